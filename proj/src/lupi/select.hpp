#pragma once

#include "lupi/common.hpp"
#include "lupi/dataset.hpp"
#include "lupi/kernels.hpp"

namespace lupi {

struct SelectionConfig {
    int max_features = 0;        // stop once this many are chosen
    double min_gain = 0.0;       // accuracy-gain threshold per accepted step
    double hard_margin_tau = 1.0;
    KernelSpec evaluator_kernel = KernelSpec::linear();
    double evaluator_C = 1.0;
    int n_folds = 5;
    std::uint64_t seed = 0;

    void validate(Eigen::Index m) const;
};

struct SelectionResult {
    std::vector<int> chosen;     // privileged column indices, in pick order
    std::vector<double> gains;   // hard-set accuracy gain per accepted step
    Eigen::Index hard_set_size = 0;
    double baseline_hard_accuracy = 0.0;
    std::string note;            // set when there was nothing to improve
};

/// Rows that the cross-validated standard-feature SVM misclassifies
/// out-of-fold or places within hard_margin_tau of the boundary.
std::vector<Eigen::Index> find_hard_examples(const LupiDataset& dataset,
                                             const SelectionConfig& config);

/// Greedy forward selection: starting from the standard columns, repeatedly
/// add the privileged column with the best out-of-fold accuracy on the hard
/// set (ties to the lowest index); stop on max_features, exhausted
/// candidates, or gain below min_gain.
SelectionResult select_privileged(const LupiDataset& dataset, const SelectionConfig& config);

/// Out-of-fold accuracy on `eval_rows` of an SVM trained on the standard
/// block plus the given privileged columns. Exposed so tests can brute-force
/// the greedy argmax independently.
double hard_set_accuracy(const LupiDataset& dataset, const std::vector<int>& privileged_cols,
                         const std::vector<Eigen::Index>& eval_rows,
                         const SelectionConfig& config, const SplitPlan& plan);

std::string format_selection_report(const SelectionResult& result,
                                    const std::vector<std::string>& privileged_names);

}  // namespace lupi
