#pragma once

#include "lupi/common.hpp"
#include "lupi/dataset.hpp"
#include "lupi/svm.hpp"

#include <variant>

namespace lupi {

/// Per-coordinate polynomial least-squares fit of one privileged feature
/// from the selected standard columns. Basis: 1, x_c, x_c^2, ... per column
/// (no cross terms), coefficients in power-major order.
struct PolyRegressor {
    int degree = 1;
    std::vector<int> input_columns;
    Vector coefficients;  // degree * |input_columns|
    double intercept = 0.0;

    double estimate(const Eigen::Ref<const Vector>& standard_row) const;
};

/// Lazy k-nearest estimator: the privileged value of a query is the
/// 1/distance-weighted mean of its k nearest stored rows; an exact match
/// returns that row's value directly.
struct WeightedSimilarity {
    int k = 3;
    std::vector<int> input_columns;
    Matrix stored_standard;    // subsampled training rows (selected columns)
    Vector stored_privileged;  // matching privileged values (one feature)

    double estimate(const Eigen::Ref<const Vector>& standard_row) const;
};

using MappingFunction = std::variant<PolyRegressor, WeightedSimilarity>;

/// One estimator per privileged feature.
struct MappingFunctionSet {
    std::vector<MappingFunction> per_feature;
    std::vector<std::string> warnings;

    Eigen::Index count() const { return static_cast<Eigen::Index>(per_feature.size()); }
};

enum class MappingKind { regression, similarity };

struct KtHyper {
    int max_degree = 3;       // regression
    int k_neighbors = 3;      // similarity
    int top_p_columns = 0;    // 0 = use every standard column
    int max_stored = 5000;    // similarity subsample cap (stratified)
    std::uint64_t seed = 0;   // subsampling determinism
};

/// Complete-set SVM over [standard | privileged] plus the mappings used to
/// synthesize the privileged block at run-time.
struct KtModel {
    MappingFunctionSet mappings;
    SvmModel downstream;
    Eigen::Index standard_dim = 0;
};

/// Least-squares polynomial fit with ridge 1e-10; degree chosen over
/// 1..max_degree by validation SSE on an internal 80/20 split (every fifth
/// row is held out), then refit on all rows. Degree is capped at n-1 with a
/// warning when samples are scarce.
PolyRegressor fit_poly_regression(const Matrix& standard, const Vector& target,
                                  int max_degree, std::string* warning = nullptr);

Matrix estimate_privileged(const MappingFunctionSet& mappings, const Matrix& standard_rows);

KtModel train_kt(const LupiDataset& dataset, MappingKind kind,
                 const KernelSpec& downstream_kernel, double C, const KtHyper& hyper = {});

SvmPrediction predict_kt(const KtModel& model, const Matrix& standard_rows);

Vector decision_values_kt(const KtModel& model, const Matrix& standard_rows);

/// Standard-column subset with the strongest |Pearson correlation| to the
/// target; all columns when top_p <= 0 or top_p >= d.
std::vector<int> select_input_columns(const Matrix& standard, const Vector& target, int top_p);

}  // namespace lupi
