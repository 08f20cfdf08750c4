#include "lupi/experiment.hpp"

#include "lupi/trainers.hpp"

#include <filesystem>
#include <future>
#include <sstream>

namespace lupi {

std::unique_ptr<Trainer> make_trainer(const ExperimentConfig& config, Approach approach) {
    switch (approach) {
        case Approach::standard:
            return std::make_unique<SvmTrainer>(config.svm_kernel, config.svm_C);
        case Approach::complete:
            // Evaluated on a dataset whose standard block already carries the
            // privileged columns; the trainer itself is a plain SVM.
            return std::make_unique<SvmTrainer>(config.svm_kernel, config.svm_C);
        case Approach::kt_regression:
            return std::make_unique<KtTrainer>(MappingKind::regression, config.svm_kernel,
                                               config.svm_C, config.kt);
        case Approach::kt_similarity:
            return std::make_unique<KtTrainer>(MappingKind::similarity, config.svm_kernel,
                                               config.svm_C, config.kt);
        case Approach::svmplus:
            return std::make_unique<SvmPlusTrainer>(config.svmplus, config.svmplus_tol);
        case Approach::distill:
            return std::make_unique<DistillTrainer>(config.distill, config.distill_hidden);
    }
    throw_invalid("unknown approach");
}

namespace {

std::unique_ptr<Trainer> make_baseline(const ExperimentConfig& config) {
    // Each approach is compared against the standard-set model of its own
    // family: a net for distillation, an SVM otherwise.
    if (config.approach == Approach::distill) {
        DistillConfig base = config.distill;
        base.lambda = 0.0;
        return std::make_unique<NetTrainer>(base, config.distill_hidden);
    }
    return std::make_unique<SvmTrainer>(config.svm_kernel, config.svm_C);
}

std::string baseline_name(const ExperimentConfig& config) {
    return config.approach == Approach::distill ? "standard-net" : "standard-svm";
}

AnyModel train_final_model(const ExperimentConfig& config, Approach approach,
                           const LupiDataset& data) {
    switch (approach) {
        case Approach::standard:
            return train_svm(data.standard, data.labels, config.svm_kernel, config.svm_C);
        case Approach::complete: {
            const LupiDataset merged = data.merged_complete();
            return train_svm(merged.standard, merged.labels, config.svm_kernel, config.svm_C);
        }
        case Approach::kt_regression:
            return train_kt(data, MappingKind::regression, config.svm_kernel, config.svm_C,
                            config.kt);
        case Approach::kt_similarity:
            return train_kt(data, MappingKind::similarity, config.svm_kernel, config.svm_C,
                            config.kt);
        case Approach::svmplus:
            return train_svmplus(data, config.svmplus, config.svmplus_tol);
        case Approach::distill:
            return train_distilled(data, config.distill, config.distill_hidden);
    }
    throw_invalid("unknown approach");
}

AnyModel train_final_baseline(const ExperimentConfig& config, const LupiDataset& data) {
    if (config.approach == Approach::distill) {
        std::vector<int> classes;
        for (Eigen::Index i = 0; i < data.rows(); ++i) classes.push_back(data.class_index_of(i));
        DistillConfig base = config.distill;
        base.lambda = 0.0;
        return train_net(data.standard, classes, data.n_classes, config.distill_hidden, base).net;
    }
    return train_svm(data.standard, data.labels, config.svm_kernel, config.svm_C);
}

struct SeedMetrics {
    std::vector<Metrics> baseline;
    std::vector<Metrics> approach;
};

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config, int jobs) {
    if (jobs < 1) throw_invalid("jobs must be >= 1");
    const LupiDataset dataset =
        load_config_dataset(config.synth, config.data_path, config.schema_path);

    // The complete-set baseline consumes privileged columns at prediction
    // time by definition; folding them into the standard block up front
    // keeps the cross-validation path free of privileged features for every
    // trainer without exception.
    const bool merged = config.approach == Approach::complete;
    const LupiDataset eval_view = merged ? dataset.merged_complete() : dataset;
    const LupiDataset baseline_view = dataset;

    const auto approach_trainer = make_trainer(config, config.approach);
    const auto baseline_trainer = make_baseline(config);
    const bool approach_is_baseline = config.approach == Approach::standard;

    auto eval_seed = [&](std::uint64_t seed) {
        SeedMetrics out;
        const SplitPlan plan = stratified_folds(dataset.labels, config.n_folds, seed);
        out.baseline = cross_validate(*baseline_trainer, baseline_view, plan).per_fold;
        if (!approach_is_baseline) {
            out.approach = cross_validate(*approach_trainer, eval_view, plan).per_fold;
        }
        return out;
    };

    std::vector<SeedMetrics> per_seed(config.seeds.size());
    if (jobs <= 1 || config.seeds.size() <= 1) {
        for (size_t s = 0; s < config.seeds.size(); ++s) per_seed[s] = eval_seed(config.seeds[s]);
    } else {
        // Deterministic merge: results land in their seed's slot.
        std::vector<std::future<SeedMetrics>> futures;
        futures.reserve(config.seeds.size());
        size_t next = 0;
        while (next < config.seeds.size()) {
            const size_t batch_end =
                std::min(config.seeds.size(), next + static_cast<size_t>(jobs));
            for (size_t s = next; s < batch_end; ++s) {
                futures.push_back(std::async(std::launch::async, eval_seed, config.seeds[s]));
            }
            for (size_t s = next; s < batch_end; ++s) {
                per_seed[s] = futures[s - next].get();
            }
            futures.clear();
            next = batch_end;
        }
    }

    std::vector<std::string> names{baseline_name(config)};
    std::vector<std::vector<Metrics>> evaluations(1);
    for (const auto& sm : per_seed) {
        evaluations[0].insert(evaluations[0].end(), sm.baseline.begin(), sm.baseline.end());
    }
    if (!approach_is_baseline) {
        names.push_back(approach_name(config.approach));
        evaluations.emplace_back();
        for (const auto& sm : per_seed) {
            evaluations[1].insert(evaluations[1].end(), sm.approach.begin(), sm.approach.end());
        }
    }

    ExperimentOutput out;
    out.report = aggregate_comparison(names, evaluations, 0, config.seeds);
    out.report_csv = format_comparison_csv(out.report);
    out.summary = format_comparison_summary(out.report);

    std::filesystem::create_directories(config.output_dir);
    const auto path_of = [&](const std::string& name) {
        return (std::filesystem::path(config.output_dir) / name).string();
    };
    atomic_write_file(path_of("report.csv"), out.report_csv);
    out.written_files.push_back(path_of("report.csv"));
    atomic_write_file(path_of("summary.txt"), out.summary);
    out.written_files.push_back(path_of("summary.txt"));

    const AnyModel baseline_model = train_final_baseline(config, dataset);
    const std::string base_path = path_of("model_baseline.txt");
    save_model(baseline_model, base_path);
    out.written_files.push_back(base_path);
    if (!approach_is_baseline) {
        const AnyModel approach_model = train_final_model(config, config.approach, dataset);
        const std::string approach_path =
            path_of(std::string("model_") + approach_name(config.approach) + ".txt");
        save_model(approach_model, approach_path);
        out.written_files.push_back(approach_path);
    }
    return out;
}

std::string run_select(const SelectExperimentConfig& config) {
    LupiDataset dataset = load_config_dataset(config.synth, config.data_path, config.schema_path);
    SelectionConfig sel = config.selection;
    if (!config.max_features_given) {
        sel.max_features = static_cast<int>(dataset.privileged_dim());
    }
    const SelectionResult result = select_privileged(dataset, sel);
    return format_selection_report(result, dataset.privileged_names);
}

std::string boundary_grid_csv(const AnyModel& model, double xmin, double xmax, double ymin,
                              double ymax, int nx, int ny) {
    if (model_input_dim(model) != 2) {
        throw_data("boundary dump needs a model over a 2-D standard space (got " +
                   std::to_string(model_input_dim(model)) + ")");
    }
    if (nx < 2 || ny < 2) throw_invalid("boundary grid needs nx, ny >= 2");
    if (!(xmax > xmin) || !(ymax > ymin)) throw_invalid("boundary grid has empty extent");

    Matrix pts(static_cast<Eigen::Index>(nx) * ny, 2);
    Eigen::Index r = 0;
    for (int iy = 0; iy < ny; ++iy) {
        const double y = ymin + (ymax - ymin) * iy / (ny - 1);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = xmin + (xmax - xmin) * ix / (nx - 1);
            pts(r, 0) = x;
            pts(r, 1) = y;
            ++r;
        }
    }
    const Vector values = model_decision_values(model, pts);
    std::ostringstream out;
    out << "x,y,value\n";
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        out << format_sig(pts(i, 0), 9) << "," << format_sig(pts(i, 1), 9) << ","
            << format_sig(values(i), 9) << "\n";
    }
    return out.str();
}

}  // namespace lupi
