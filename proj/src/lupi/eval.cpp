#include "lupi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lupi {

Metrics metrics(const ConfusionCounts& counts) {
    if (counts.total() <= 0) throw_invalid("metrics: no evaluated samples");
    Metrics m;
    m.accuracy = static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());
    if (counts.tp + counts.fp > 0) {
        m.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    }
    if (counts.tp + counts.fn > 0) {
        m.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    }
    return m;
}

ConfusionCounts confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                          bool binary) {
    if (truth.size() != predicted.size()) throw_invalid("confusion: length mismatch");
    ConfusionCounts c;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (binary) {
            const bool pos = truth[i] > 0;
            const bool pred_pos = predicted[i] > 0;
            if (pos && pred_pos) ++c.tp;
            else if (!pos && !pred_pos) ++c.tn;
            else if (!pos && pred_pos) ++c.fp;
            else ++c.fn;
        } else {
            // Multiclass: correct counts as tp, incorrect as fn, so accuracy
            // stays exact and precision/recall drop out as absent.
            if (truth[i] == predicted[i]) ++c.tp;
            else ++c.fn;
        }
    }
    return c;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    int count = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    out.count = static_cast<int>(xs.size());
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

}  // namespace

CvResult cross_validate(const Trainer& trainer, const LupiDataset& dataset,
                        const SplitPlan& plan) {
    dataset.validate();
    if (static_cast<Eigen::Index>(plan.fold_assignments.size()) != dataset.rows()) {
        throw_invalid("cross_validate: plan does not cover the dataset");
    }

    CvResult result;
    std::vector<double> accs, precs, recs;
    for (int fold = 0; fold < plan.n_folds; ++fold) {
        const auto train_ids = plan.complement_rows(fold);
        const auto test_ids = plan.fold_rows(fold);
        if (test_ids.empty()) continue;

        const LupiDataset train_view = dataset.subset(train_ids);
        const LupiDataset test_view = dataset.subset(test_ids);

        std::unique_ptr<Predictor> model;
        try {
            model = trainer.train(train_view);
        } catch (const Error& e) {
            throw Error(e.kind(), "fold " + std::to_string(fold) + " (" + trainer.name() +
                                      "): " + e.what());
        }
        // Privileged columns are withheld from prediction by construction.
        const std::vector<int> predicted = model->predict(test_view.standard);
        if (predicted.size() != test_ids.size()) {
            throw_numeric("cross_validate: predictor returned wrong count");
        }
        const ConfusionCounts counts =
            confusion(test_view.labels, predicted, dataset.is_binary());
        const Metrics m = metrics(counts);
        result.per_fold.push_back(m);
        result.per_fold_counts.push_back(counts);
        accs.push_back(m.accuracy);
        if (m.precision) precs.push_back(*m.precision);
        if (m.recall) recs.push_back(*m.recall);
    }

    const MeanStd a = mean_std(accs);
    result.mean_accuracy = a.mean;
    result.std_accuracy = a.std;
    if (!precs.empty()) {
        const MeanStd p = mean_std(precs);
        result.mean_precision = p.mean;
        result.std_precision = p.std;
    }
    if (!recs.empty()) {
        const MeanStd r = mean_std(recs);
        result.mean_recall = r.mean;
        result.std_recall = r.std;
    }
    return result;
}

std::vector<ParamMap> SearchSpace::enumerate() const {
    std::vector<ParamMap> out;
    if (strategy == Strategy::grid) {
        if (grid.empty()) throw_invalid("search: empty grid");
        for (const auto& [key, values] : grid) {
            if (values.empty()) throw_invalid("search: empty value list for " + key);
        }
        out.push_back({});
        for (const auto& [key, values] : grid) {
            std::vector<ParamMap> next;
            for (const auto& base : out) {
                for (double v : values) {
                    ParamMap p = base;
                    p[key] = v;
                    next.push_back(std::move(p));
                }
            }
            out = std::move(next);
        }
        return out;
    }
    if (ranges.empty()) throw_invalid("search: empty parameter ranges");
    if (budget < 1) throw_invalid("search: budget must be >= 1");
    std::mt19937_64 rng(mix_seed(seed, 0x5ea6c4));
    for (int b = 0; b < budget; ++b) {
        ParamMap p;
        for (const auto& [key, range] : ranges) {
            std::uniform_real_distribution<double> dist(range.first, range.second);
            p[key] = dist(rng);
        }
        out.push_back(std::move(p));
    }
    return out;
}

SearchResult search(const SearchSpace& space, const TrainerFactory& factory,
                    const LupiDataset& dataset, const SplitPlan& plan) {
    const std::vector<ParamMap> configs = space.enumerate();
    SearchResult result;
    bool any_ok = false;
    std::string last_error;
    for (const auto& params : configs) {
        double acc;
        try {
            const auto trainer = factory(params);
            acc = cross_validate(*trainer, dataset, plan).mean_accuracy;
        } catch (const Error& e) {
            last_error = e.what();
            continue;
        }
        result.leaderboard.push_back({params, acc});
        if (!any_ok || acc > result.best_accuracy) {
            result.best = params;
            result.best_accuracy = acc;
            any_ok = true;
        }
    }
    if (!any_ok) {
        throw_numeric("search: every configuration failed (last error: " + last_error + ")");
    }
    return result;
}

ComparisonReport compare(const std::vector<const Predictor*>& models,
                         const std::vector<std::string>& names, const LupiDataset& test,
                         int baseline_index) {
    if (models.empty() || models.size() != names.size()) {
        throw_invalid("compare: model/name count mismatch");
    }
    if (baseline_index < 0 || baseline_index >= static_cast<int>(models.size())) {
        throw_invalid("compare: baseline index out of range");
    }
    std::vector<std::vector<Metrics>> evaluations(models.size());
    for (size_t i = 0; i < models.size(); ++i) {
        const std::vector<int> predicted = models[i]->predict(test.standard);
        evaluations[i].push_back(metrics(confusion(test.labels, predicted, test.is_binary())));
    }
    return aggregate_comparison(names, evaluations, baseline_index, {});
}

ComparisonReport aggregate_comparison(const std::vector<std::string>& names,
                                      const std::vector<std::vector<Metrics>>& evaluations,
                                      int baseline_index,
                                      const std::vector<std::uint64_t>& seeds) {
    if (names.size() != evaluations.size()) throw_invalid("compare: name/evaluation mismatch");
    if (baseline_index < 0 || baseline_index >= static_cast<int>(names.size())) {
        throw_invalid("compare: baseline index out of range");
    }
    ComparisonReport report;
    report.baseline_index = baseline_index;
    report.seeds = seeds;

    std::vector<double> mean_errs(names.size(), 0.0);
    for (size_t i = 0; i < names.size(); ++i) {
        ModelSummary s;
        s.name = names[i];
        std::vector<double> accs, precs, recs;
        for (const Metrics& m : evaluations[i]) {
            accs.push_back(m.accuracy);
            if (m.precision) precs.push_back(*m.precision);
            if (m.recall) recs.push_back(*m.recall);
        }
        if (accs.empty()) throw_invalid("compare: model " + s.name + " has no evaluations");
        const MeanStd a = mean_std(accs);
        s.mean_accuracy = a.mean;
        s.std_accuracy = a.std;
        s.runs = a.count;
        if (!precs.empty()) {
            const MeanStd p = mean_std(precs);
            s.mean_precision = p.mean;
            s.std_precision = p.std;
        }
        if (!recs.empty()) {
            const MeanStd r = mean_std(recs);
            s.mean_recall = r.mean;
            s.std_recall = r.std;
        }
        mean_errs[i] = 1.0 - s.mean_accuracy;
        report.models.push_back(std::move(s));
    }
    report.runs = report.models[static_cast<size_t>(baseline_index)].runs;

    const double base_err = mean_errs[static_cast<size_t>(baseline_index)];
    for (size_t i = 0; i < report.models.size(); ++i) {
        if (base_err > 0.0) {
            report.models[i].relative_error_decrease = (base_err - mean_errs[i]) / base_err;
        }
    }
    return report;
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_sig(*v, 9) : "na";
}

}  // namespace

std::string format_comparison_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "model,runs,accuracy_mean,accuracy_std,precision_mean,precision_std,"
           "recall_mean,recall_std,error_mean,relative_error_decrease\n";
    for (const auto& m : report.models) {
        out << m.name << "," << m.runs << "," << format_sig(m.mean_accuracy, 9) << ","
            << format_sig(m.std_accuracy, 9) << "," << opt_cell(m.mean_precision) << ","
            << opt_cell(m.std_precision) << "," << opt_cell(m.mean_recall) << ","
            << opt_cell(m.std_recall) << "," << format_sig(1.0 - m.mean_accuracy, 9) << ","
            << opt_cell(m.relative_error_decrease) << "\n";
    }
    return out.str();
}

std::string format_comparison_summary(const ComparisonReport& report) {
    std::ostringstream out;
    const auto& base = report.models[static_cast<size_t>(report.baseline_index)];
    out << "comparison over " << report.runs << " evaluation(s)";
    if (!report.seeds.empty()) {
        out << ", seeds";
        for (auto s : report.seeds) out << " " << s;
    }
    out << "\nbaseline: " << base.name << "\n";
    for (const auto& m : report.models) {
        out << "  " << m.name << ": accuracy " << format_sig(100.0 * m.mean_accuracy, 4)
            << " +- " << format_sig(100.0 * m.std_accuracy, 3) << " %";
        if (m.mean_precision) {
            out << ", precision " << format_sig(100.0 * *m.mean_precision, 4) << " %";
        }
        if (m.mean_recall) {
            out << ", recall " << format_sig(100.0 * *m.mean_recall, 4) << " %";
        }
        if (m.relative_error_decrease && &m != &base) {
            out << ", relative error decrease "
                << format_sig(100.0 * *m.relative_error_decrease, 4) << " %";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace lupi
