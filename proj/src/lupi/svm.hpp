#pragma once

#include "lupi/common.hpp"
#include "lupi/kernels.hpp"
#include "lupi/qp.hpp"

namespace lupi {

/// Soft-margin kernel SVM trained through the shared QP solver.
/// The full dual vector is stored next to the training rows so the decision
/// function is reproducible from the model alone.
struct SvmModel {
    Vector alphas;            // length n, 0 <= alpha_i <= C
    double bias = 0.0;
    Matrix support_rows;      // n x d training rows
    std::vector<int> support_labels;  // -1/+1
    KernelSpec kernel;
    double C = 1.0;

    Eigen::Index input_dim() const { return support_rows.cols(); }
};

struct SvmPrediction {
    std::vector<int> labels;  // sign(raw), sign(0) = +1
    Vector raw;
};

SvmModel train_svm(const Matrix& standard, const std::vector<int>& labels,
                   const KernelSpec& kernel, double C, double tol = 1e-8);

SvmPrediction predict_svm(const SvmModel& model, const Matrix& rows);

/// Decision values only (margin f(x) without the sign).
Vector decision_values_svm(const SvmModel& model, const Matrix& rows);

}  // namespace lupi
