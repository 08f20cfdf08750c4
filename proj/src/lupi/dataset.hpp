#pragma once

#include "lupi/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace lupi {

/// Paired standard/privileged feature blocks plus labels.
///
/// Labels are canonical after ingestion: {-1,+1} for binary data (margin
/// trainers consume them directly), {0..K-1} for K>2 classes. Softmax
/// trainers map binary labels to class indices via class_index_of().
struct LupiDataset {
    Matrix standard;                            // n x d
    Matrix privileged;                          // n x m, m == 0 means none
    std::vector<int> labels;                    // length n
    int n_classes = 2;
    std::vector<std::string> standard_names;
    std::vector<std::string> privileged_names;
    std::string label_name = "label";

    Eigen::Index rows() const { return standard.rows(); }
    Eigen::Index standard_dim() const { return standard.cols(); }
    Eigen::Index privileged_dim() const { return privileged.cols(); }
    bool is_binary() const { return n_classes == 2; }

    /// Class index in 0..K-1 for row i (binary: -1 -> 0, +1 -> 1).
    int class_index_of(Eigen::Index i) const;

    /// Throws unless row counts agree, d >= 1, all entries finite and labels
    /// use the canonical encoding.
    void validate() const;

    LupiDataset subset(const std::vector<Eigen::Index>& row_ids) const;

    /// Copy with privileged columns appended to the standard block (m = 0
    /// afterwards). This is how the complete-set baseline is evaluated
    /// without ever passing privileged columns at prediction time.
    LupiDataset merged_complete() const;

    /// Copy keeping only the given privileged columns (in the given order).
    LupiDataset with_privileged_columns(const std::vector<int>& cols) const;
};

enum class ColumnRole { standard, privileged, label, ignore };

using Schema = std::map<std::string, ColumnRole>;

Schema load_schema(const std::string& path);
void save_schema(const Schema& schema, const std::string& path,
                 const std::vector<std::string>& column_order);

/// Loads a delimiter-separated table (first row = header, comma delimiter)
/// with column roles given by the schema. Every header column must have
/// exactly one role; exactly one label column is required.
LupiDataset load_tabular(const std::string& data_path, const std::string& schema_path);
LupiDataset load_tabular(const std::string& data_path, const Schema& schema);

/// Writes dataset + sidecar schema; numbers carry full precision so a
/// reload reproduces every cell.
void write_tabular(const LupiDataset& ds, const std::string& data_path,
                   const std::string& schema_path);

enum class SynthScenario { gauss2d, latent_lupi };

struct SynthSpec {
    SynthScenario scenario = SynthScenario::gauss2d;
    int n = 100;
    double noise_std_standard = 1.0;
    double noise_std_privileged = 0.1;
    double outlier_fraction = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

SynthScenario synth_scenario_from_name(const std::string& name);
const char* synth_scenario_name(SynthScenario s);

/// Deterministic synthetic generators.
///
/// gauss2d: two Gaussian classes at (-1,-1) and (+1,+1); outlier_fraction of
/// the points get their label flipped; the single privileged column is the
/// signed distance to the true boundary x+y=0 plus privileged noise.
///
/// latent-lupi: latent z ~ N(0, I_5); label = sign(w.z) for a fixed w;
/// standard = z + high noise, privileged = z + low noise.
LupiDataset make_synthetic(const SynthSpec& spec);

/// Stratified fold assignment, deterministic in (labels, n_folds, seed).
struct SplitPlan {
    std::vector<int> fold_assignments;  // per row, in 0..n_folds-1
    int n_folds = 0;
    std::uint64_t seed = 0;

    std::vector<Eigen::Index> fold_rows(int fold) const;
    std::vector<Eigen::Index> complement_rows(int fold) const;
};

SplitPlan stratified_folds(const std::vector<int>& labels, int n_folds, std::uint64_t seed);

}  // namespace lupi
