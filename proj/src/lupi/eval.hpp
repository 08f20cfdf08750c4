#pragma once

#include "lupi/common.hpp"
#include "lupi/dataset.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>

namespace lupi {

struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;

    long long total() const { return tp + fp + tn + fn; }
};

/// Positive class is +1 by the ingestion convention. Precision and recall
/// with an undefined denominator are reported absent, never 0.
struct Metrics {
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
};

Metrics metrics(const ConfusionCounts& counts);

/// Confusion counts of predicted vs true labels. Multiclass data degrades to
/// plain accuracy: tp/tn count correct predictions, precision/recall are
/// only meaningful for binary labels.
ConfusionCounts confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                          bool binary);

/// Trained model handle: prediction consumes standard columns only.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::vector<int> predict(const Matrix& standard_rows) const = 0;
};

/// Trainer handle: consumes the full training view (privileged included),
/// produces a Predictor that runs on standard features alone. Out-of-fold
/// rows never expose their privileged block to predict().
class Trainer {
public:
    virtual ~Trainer() = default;
    virtual std::string name() const = 0;
    virtual std::unique_ptr<Predictor> train(const LupiDataset& train_data) const = 0;
};

struct CvResult {
    std::vector<Metrics> per_fold;
    std::vector<ConfusionCounts> per_fold_counts;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // sample std over folds (ddof = 1)
    std::optional<double> mean_precision, std_precision;
    std::optional<double> mean_recall, std_recall;
};

/// Per-fold: train on the complement, predict the fold from standard
/// features only, score against the held-out labels.
CvResult cross_validate(const Trainer& trainer, const LupiDataset& dataset,
                        const SplitPlan& plan);

using ParamMap = std::map<std::string, double>;

struct SearchSpace {
    enum class Strategy { grid, random };
    Strategy strategy = Strategy::grid;
    // grid: every combination of the listed values (keys in map order).
    std::map<std::string, std::vector<double>> grid;
    // random: budget draws from per-parameter uniform ranges.
    std::map<std::string, std::pair<double, double>> ranges;
    int budget = 1;
    std::uint64_t seed = 0;

    std::vector<ParamMap> enumerate() const;
};

struct SearchEntry {
    ParamMap params;
    double mean_accuracy = 0.0;
};

struct SearchResult {
    ParamMap best;
    double best_accuracy = 0.0;
    std::vector<SearchEntry> leaderboard;  // in evaluation order
};

using TrainerFactory = std::function<std::unique_ptr<Trainer>(const ParamMap&)>;

/// Evaluates every configuration by mean CV accuracy; ties keep the first
/// encountered. Throws when every configuration fails.
SearchResult search(const SearchSpace& space, const TrainerFactory& factory,
                    const LupiDataset& dataset, const SplitPlan& plan);

/// One line per model, aggregated over however many evaluations were run.
struct ModelSummary {
    std::string name;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::optional<double> mean_precision, std_precision;
    std::optional<double> mean_recall, std_recall;
    std::optional<double> relative_error_decrease;  // vs baseline, absent when baseline is perfect
    int runs = 1;
};

struct ComparisonReport {
    std::vector<ModelSummary> models;
    int baseline_index = 0;
    int runs = 1;
    std::vector<std::uint64_t> seeds;
};

/// Single-shot comparison on a shared test set.
ComparisonReport compare(const std::vector<const Predictor*>& models,
                         const std::vector<std::string>& names, const LupiDataset& test,
                         int baseline_index);

/// Aggregates fold x seed metric lists (one list per model) into a report.
ComparisonReport aggregate_comparison(const std::vector<std::string>& names,
                                      const std::vector<std::vector<Metrics>>& evaluations,
                                      int baseline_index,
                                      const std::vector<std::uint64_t>& seeds);

/// Delimiter-separated table plus a short human-readable block; absent
/// metrics render as "na". Column order:
/// model,runs,accuracy_mean,accuracy_std,precision_mean,precision_std,
/// recall_mean,recall_std,error_mean,relative_error_decrease
std::string format_comparison_csv(const ComparisonReport& report);
std::string format_comparison_summary(const ComparisonReport& report);

}  // namespace lupi
