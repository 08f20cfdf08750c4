#include "lupi/select.hpp"

#include "lupi/svm.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace lupi {

void SelectionConfig::validate(Eigen::Index m) const {
    if (max_features < 0 || max_features > m) {
        throw_invalid("select: max_features must lie in [0, m]");
    }
    if (hard_margin_tau <= 0.0) throw_invalid("select: hard_margin_tau must be > 0");
    if (n_folds < 2) throw_invalid("select: n_folds must be >= 2");
    if (evaluator_C <= 0.0) throw_invalid("select: evaluator_C must be > 0");
    evaluator_kernel.validate();
}

namespace {

// Out-of-fold raw decision values for an SVM on `features`.
Vector oof_decision_values(const Matrix& features, const std::vector<int>& labels,
                           const SelectionConfig& config, const SplitPlan& plan) {
    Vector raw(features.rows());
    for (int fold = 0; fold < plan.n_folds; ++fold) {
        const auto train_ids = plan.complement_rows(fold);
        const auto test_ids = plan.fold_rows(fold);
        if (test_ids.empty()) continue;

        Matrix xtr(static_cast<Eigen::Index>(train_ids.size()), features.cols());
        std::vector<int> ytr;
        ytr.reserve(train_ids.size());
        for (size_t r = 0; r < train_ids.size(); ++r) {
            xtr.row(static_cast<Eigen::Index>(r)) = features.row(train_ids[r]);
            ytr.push_back(labels[static_cast<size_t>(train_ids[r])]);
        }
        Matrix xte(static_cast<Eigen::Index>(test_ids.size()), features.cols());
        for (size_t r = 0; r < test_ids.size(); ++r) {
            xte.row(static_cast<Eigen::Index>(r)) = features.row(test_ids[r]);
        }
        const SvmModel model = train_svm(xtr, ytr, config.evaluator_kernel, config.evaluator_C);
        const Vector v = decision_values_svm(model, xte);
        for (size_t r = 0; r < test_ids.size(); ++r) {
            raw(test_ids[r]) = v(static_cast<Eigen::Index>(r));
        }
    }
    return raw;
}

Matrix with_columns(const LupiDataset& ds, const std::vector<int>& privileged_cols) {
    Matrix out(ds.rows(), ds.standard_dim() + static_cast<Eigen::Index>(privileged_cols.size()));
    out.leftCols(ds.standard_dim()) = ds.standard;
    Eigen::Index c = ds.standard_dim();
    for (int col : privileged_cols) out.col(c++) = ds.privileged.col(col);
    return out;
}

}  // namespace

std::vector<Eigen::Index> find_hard_examples(const LupiDataset& dataset,
                                             const SelectionConfig& config) {
    dataset.validate();
    if (!dataset.is_binary()) throw_data("select: binary labels required");
    config.validate(dataset.privileged_dim());

    const SplitPlan plan = stratified_folds(dataset.labels, config.n_folds, config.seed);
    const Vector raw = oof_decision_values(dataset.standard, dataset.labels, config, plan);

    std::vector<Eigen::Index> hard;
    for (Eigen::Index i = 0; i < dataset.rows(); ++i) {
        const int pred = raw(i) >= 0.0 ? +1 : -1;
        const bool miss = pred != dataset.labels[static_cast<size_t>(i)];
        if (miss || std::abs(raw(i)) < config.hard_margin_tau) hard.push_back(i);
    }
    return hard;
}

double hard_set_accuracy(const LupiDataset& dataset, const std::vector<int>& privileged_cols,
                         const std::vector<Eigen::Index>& eval_rows,
                         const SelectionConfig& config, const SplitPlan& plan) {
    if (eval_rows.empty()) throw_invalid("select: empty evaluation set");
    const Matrix features = with_columns(dataset, privileged_cols);
    const Vector raw = oof_decision_values(features, dataset.labels, config, plan);
    Eigen::Index correct = 0;
    for (Eigen::Index id : eval_rows) {
        const int pred = raw(id) >= 0.0 ? +1 : -1;
        if (pred == dataset.labels[static_cast<size_t>(id)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(eval_rows.size());
}

SelectionResult select_privileged(const LupiDataset& dataset, const SelectionConfig& config) {
    dataset.validate();
    config.validate(dataset.privileged_dim());

    SelectionResult result;
    const std::vector<Eigen::Index> hard = find_hard_examples(dataset, config);
    result.hard_set_size = static_cast<Eigen::Index>(hard.size());
    if (hard.empty()) {
        result.note = "hard set is empty; nothing to improve";
        return result;
    }

    // The hard set and the fold plan are frozen once so per-step gains stay
    // comparable.
    const SplitPlan plan = stratified_folds(dataset.labels, config.n_folds, config.seed);
    double current = hard_set_accuracy(dataset, {}, hard, config, plan);
    result.baseline_hard_accuracy = current;

    std::set<int> remaining;
    for (int c = 0; c < dataset.privileged_dim(); ++c) remaining.insert(c);

    while (!remaining.empty() &&
           static_cast<int>(result.chosen.size()) < config.max_features) {
        int best_col = -1;
        double best_acc = -1.0;
        for (int c : remaining) {  // std::set iterates ascending: ties -> lowest index
            std::vector<int> candidate = result.chosen;
            candidate.push_back(c);
            const double acc = hard_set_accuracy(dataset, candidate, hard, config, plan);
            if (acc > best_acc) {
                best_acc = acc;
                best_col = c;
            }
        }
        const double gain = best_acc - current;
        if (gain < config.min_gain) break;
        result.chosen.push_back(best_col);
        result.gains.push_back(gain);
        remaining.erase(best_col);
        current = best_acc;
    }
    return result;
}

std::string format_selection_report(const SelectionResult& result,
                                    const std::vector<std::string>& privileged_names) {
    std::ostringstream out;
    out << "privileged feature selection\n";
    out << "hard_set_size=" << result.hard_set_size << "\n";
    out << "baseline_hard_accuracy=" << format_sig(result.baseline_hard_accuracy, 9) << "\n";
    out << "selected=" << result.chosen.size() << "\n";
    if (!result.note.empty()) out << "note=" << result.note << "\n";
    out << "step,column,name,gain\n";
    for (size_t i = 0; i < result.chosen.size(); ++i) {
        const int col = result.chosen[i];
        const std::string name =
            col < static_cast<int>(privileged_names.size())
                ? privileged_names[static_cast<size_t>(col)]
                : "p" + std::to_string(col);
        out << (i + 1) << "," << col << "," << name << ","
            << format_sig(result.gains[i], 9) << "\n";
    }
    return out.str();
}

}  // namespace lupi
