#pragma once

#include "lupi/config.hpp"
#include "lupi/eval.hpp"
#include "lupi/model_io.hpp"

namespace lupi {

struct ExperimentOutput {
    ComparisonReport report;
    std::string report_csv;
    std::string summary;
    std::vector<std::string> written_files;
};

/// Full `run` pipeline: load/synthesize the dataset, cross-validate the
/// configured approach against its standard-set baseline over every seed,
/// write report.csv / summary.txt / final models into output_dir.
/// jobs > 1 evaluates seeds concurrently; results merge by seed index, so
/// output is identical at any job count.
ExperimentOutput run_experiment(const ExperimentConfig& config, int jobs = 1);

/// Builds the trainer for an approach (used by run_experiment and tests).
std::unique_ptr<Trainer> make_trainer(const ExperimentConfig& config, Approach approach);

/// `select` pipeline; returns the report text.
std::string run_select(const SelectExperimentConfig& config);

/// Regular-grid decision dump for 2-D standard spaces:
/// header x,y,value with 9 significant digits.
std::string boundary_grid_csv(const AnyModel& model, double xmin, double xmax, double ymin,
                              double ymax, int nx, int ny);

}  // namespace lupi
