#include "lupi/select.hpp"

#include <doctest.h>

#include <random>

using namespace lupi;

namespace {

// Wide-margin separable 1-D data: label matches the sign of the feature.
LupiDataset separable(int n) {
    LupiDataset ds;
    ds.standard.resize(n, 1);
    ds.privileged.resize(n, 0);
    for (int i = 0; i < n; ++i) {
        const int y = i % 2 == 0 ? +1 : -1;
        ds.standard(i, 0) = y * (5.0 + 0.1 * i);
        ds.labels.push_back(y);
    }
    return ds;
}

// Noisy standard feature plus assorted privileged candidates, one of which
// leaks the label exactly.
LupiDataset leaky_dataset(int n, int m, int leak_col, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    LupiDataset ds;
    ds.standard.resize(n, 2);
    ds.privileged.resize(n, m);
    for (int i = 0; i < n; ++i) {
        const int y = i % 2 == 0 ? +1 : -1;
        ds.labels.push_back(y);
        ds.standard(i, 0) = 0.4 * y + gauss(rng);
        ds.standard(i, 1) = gauss(rng);
        for (int c = 0; c < m; ++c) {
            ds.privileged(i, c) = c == leak_col ? static_cast<double>(y) : gauss(rng);
        }
    }
    return ds;
}

SelectionConfig linear_config(int max_features) {
    SelectionConfig cfg;
    cfg.max_features = max_features;
    cfg.min_gain = 1e-9;
    cfg.hard_margin_tau = 1.0;
    cfg.evaluator_kernel = KernelSpec::linear();
    cfg.evaluator_C = 10.0;
    cfg.n_folds = 4;
    cfg.seed = 1;
    return cfg;
}

}  // namespace

TEST_CASE("wide-margin separable data has an empty hard set") {
    const LupiDataset ds = separable(24);
    SelectionConfig cfg = linear_config(0);
    cfg.hard_margin_tau = 0.1;
    const auto hard = find_hard_examples(ds, cfg);
    CHECK(hard.empty());

    const SelectionResult res = select_privileged(ds, cfg);
    CHECK(res.chosen.empty());
    CHECK(res.hard_set_size == 0);
    CHECK(!res.note.empty());
}

TEST_CASE("a flipped-label outlier lands in the hard set") {
    LupiDataset ds = separable(24);
    ds.labels[3] = -ds.labels[3];  // now misclassified out-of-fold by construction
    SelectionConfig cfg = linear_config(0);
    cfg.hard_margin_tau = 0.1;
    const auto hard = find_hard_examples(ds, cfg);
    CHECK(std::find(hard.begin(), hard.end(), 3) != hard.end());
}

TEST_CASE("a huge margin threshold marks every row hard") {
    const LupiDataset ds = separable(24);
    SelectionConfig cfg = linear_config(0);
    cfg.hard_margin_tau = 1e9;
    const auto hard = find_hard_examples(ds, cfg);
    CHECK(hard.size() == 24);
}

TEST_CASE("the label-leak column is chosen first and fixes every hard example") {
    const LupiDataset ds = leaky_dataset(60, 5, 2, 3);
    const SelectionConfig cfg = linear_config(5);
    const SelectionResult res = select_privileged(ds, cfg);

    REQUIRE(!res.chosen.empty());
    CHECK(res.chosen[0] == 2);
    CHECK(res.baseline_hard_accuracy + res.gains[0] == doctest::Approx(1.0));
}

TEST_CASE("every accepted step matches a brute-force argmax scan") {
    const LupiDataset ds = leaky_dataset(48, 6, 4, 11);
    SelectionConfig cfg = linear_config(3);
    cfg.min_gain = -1.0;  // accept every step so the scan covers all of them
    const SelectionResult res = select_privileged(ds, cfg);
    REQUIRE(res.chosen.size() == 3);

    const auto hard = find_hard_examples(ds, cfg);
    const SplitPlan plan = stratified_folds(ds.labels, cfg.n_folds, cfg.seed);

    std::vector<int> prefix;
    for (size_t step = 0; step < res.chosen.size(); ++step) {
        double best_acc = -1.0;
        int best_col = -1;
        for (int c = 0; c < ds.privileged_dim(); ++c) {
            if (std::find(prefix.begin(), prefix.end(), c) != prefix.end()) continue;
            std::vector<int> candidate = prefix;
            candidate.push_back(c);
            const double acc = hard_set_accuracy(ds, candidate, hard, cfg, plan);
            if (acc > best_acc) {
                best_acc = acc;
                best_col = c;
            }
        }
        CHECK(res.chosen[step] == best_col);
        prefix.push_back(res.chosen[step]);
    }
}

TEST_CASE("an impossible gain threshold blocks all steps") {
    const LupiDataset ds = leaky_dataset(40, 3, 1, 5);
    SelectionConfig cfg = linear_config(3);
    cfg.min_gain = 1.0;
    const SelectionResult res = select_privileged(ds, cfg);
    CHECK(res.chosen.empty());
    CHECK(res.hard_set_size > 0);
}

TEST_CASE("empty candidate set yields an empty selection") {
    LupiDataset ds = leaky_dataset(40, 3, 1, 5);
    ds.privileged.resize(ds.rows(), 0);
    ds.privileged_names.clear();
    const SelectionConfig cfg = linear_config(0);
    const SelectionResult res = select_privileged(ds, cfg);
    CHECK(res.chosen.empty());
}

TEST_CASE("selection is deterministic given identical inputs and seed") {
    const LupiDataset ds = leaky_dataset(50, 4, 0, 21);
    const SelectionConfig cfg = linear_config(4);
    const SelectionResult a = select_privileged(ds, cfg);
    const SelectionResult b = select_privileged(ds, cfg);
    CHECK(a.chosen == b.chosen);
    CHECK(a.gains == b.gains);
    CHECK(a.hard_set_size == b.hard_set_size);
}

TEST_CASE("accepted gains respect the threshold") {
    const LupiDataset ds = leaky_dataset(60, 5, 2, 3);
    SelectionConfig cfg = linear_config(5);
    cfg.min_gain = 0.01;
    const SelectionResult res = select_privileged(ds, cfg);
    for (double g : res.gains) CHECK(g >= cfg.min_gain);
}

TEST_CASE("selection report lists steps, columns and gains") {
    const LupiDataset ds = leaky_dataset(60, 3, 1, 3);
    const SelectionResult res = select_privileged(ds, linear_config(3));
    const std::string report = format_selection_report(res, {"pa", "pb", "pc"});
    CHECK(report.find("hard_set_size=") != std::string::npos);
    CHECK(report.find("step,column,name,gain") != std::string::npos);
    if (!res.chosen.empty()) {
        CHECK(report.find("pb") != std::string::npos);
    }
}

TEST_CASE("config validation") {
    const LupiDataset ds = leaky_dataset(40, 3, 1, 5);
    SelectionConfig cfg = linear_config(4);  // max_features > m
    CHECK_THROWS_AS(select_privileged(ds, cfg), Error);
    cfg = linear_config(2);
    cfg.hard_margin_tau = 0.0;
    CHECK_THROWS_AS(select_privileged(ds, cfg), Error);
    cfg = linear_config(2);
    cfg.n_folds = 1;
    CHECK_THROWS_AS(select_privileged(ds, cfg), Error);
}
