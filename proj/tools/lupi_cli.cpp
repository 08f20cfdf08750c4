// lupi command line: dataset synthesis, experiment runs, privileged-feature
// selection and decision-boundary dumps. Talks to the library exclusively
// through the public C API.

#include "lupi.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
int exit_code_of(lupi_status status) {
    switch (status) {
        case LUPI_OK: return 0;
        case LUPI_ERR_INVALID_ARG: return 1;
        case LUPI_ERR_DATA: return 2;
        case LUPI_ERR_IO: return 2;
        case LUPI_ERR_NUMERIC: return 3;
    }
    return 3;
}

int fail(lupi_status status) {
    std::cerr << "error: " << lupi_last_error() << "\n";
    return exit_code_of(status);
}

// Temp-file-plus-rename so readers never see partial output.
bool write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) return false;
    const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
    std::fclose(f);
    if (!ok || std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        return false;
    }
    return true;
}

struct SynthArgs {
    std::string scenario = "gauss2d";
    int n = 200;
    double noise_std_standard = 0.7;
    double noise_std_privileged = 0.05;
    double outlier_fraction = 0.1;
    std::uint64_t seed = 0;
    std::string out = "dataset.csv";
    std::string schema;
};

int cmd_synth(const SynthArgs& args) {
    lupi_dataset* ds = nullptr;
    lupi_status status =
        lupi_dataset_synth(args.scenario.c_str(), args.n, args.noise_std_standard,
                           args.noise_std_privileged, args.outlier_fraction, args.seed, &ds);
    if (status != LUPI_OK) return fail(status);

    const std::string schema = args.schema.empty() ? args.out + ".schema" : args.schema;
    status = lupi_dataset_save(ds, args.out.c_str(), schema.c_str());
    if (status != LUPI_OK) {
        lupi_dataset_free(ds);
        return fail(status);
    }
    int n = 0, d = 0, m = 0, k = 0;
    lupi_dataset_dims(ds, &n, &d, &m, &k);
    std::cout << "wrote " << args.out << " and " << schema << ": " << n << " rows, " << d
              << " standard + " << m << " privileged columns, " << k << " classes\n";
    lupi_dataset_free(ds);
    return 0;
}

int cmd_run(const std::string& config, const std::string& out_dir, int jobs) {
    char* summary = nullptr;
    const lupi_status status = lupi_run_experiment(
        config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), jobs, &summary);
    if (status != LUPI_OK) return fail(status);
    std::cout << summary;
    lupi_string_free(summary);
    return 0;
}

int cmd_select(const std::string& config, const std::string& out) {
    char* report = nullptr;
    const lupi_status status = lupi_run_select(config.c_str(), &report);
    if (status != LUPI_OK) return fail(status);
    std::cout << report;
    int rc = 0;
    if (!out.empty() && !write_file_atomic(out, report)) {
        std::cerr << "error: cannot write " << out << "\n";
        rc = 2;
    }
    lupi_string_free(report);
    return rc;
}

struct BoundaryArgs {
    std::vector<std::string> models;
    std::vector<std::string> outs;
    double xmin = -3.0, xmax = 3.0, ymin = -3.0, ymax = 3.0;
    int nx = 50, ny = 50;
};

int cmd_boundary(const BoundaryArgs& args) {
    if (args.models.size() != args.outs.size()) {
        std::cerr << "error: need one --out per --model\n";
        return 1;
    }
    for (size_t i = 0; i < args.models.size(); ++i) {
        lupi_model* model = nullptr;
        lupi_status status = lupi_model_load(args.models[i].c_str(), &model);
        if (status != LUPI_OK) return fail(status);

        char* csv = nullptr;
        status = lupi_boundary_grid(model, args.xmin, args.xmax, args.ymin, args.ymax, args.nx,
                                    args.ny, &csv);
        lupi_model_free(model);
        if (status != LUPI_OK) return fail(status);

        const bool ok = write_file_atomic(args.outs[i], csv);
        lupi_string_free(csv);
        if (!ok) {
            std::cerr << "error: cannot write " << args.outs[i] << "\n";
            return 2;
        }
        std::cout << "wrote " << args.outs[i] << " (" << args.nx << "x" << args.ny
                  << " grid)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"detection models trained with privileged information"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--scenario", synth.scenario, "gauss2d or latent-lupi")
        ->capture_default_str();
    synth_cmd->add_option("--n", synth.n, "sample count")->capture_default_str();
    synth_cmd->add_option("--noise-std-standard", synth.noise_std_standard)
        ->capture_default_str();
    synth_cmd->add_option("--noise-std-privileged", synth.noise_std_privileged)
        ->capture_default_str();
    synth_cmd->add_option("--outlier-fraction", synth.outlier_fraction)->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "dataset file")->capture_default_str();
    synth_cmd->add_option("--schema", synth.schema, "schema file (default <out>.schema)");

    std::string run_config, run_out_dir;
    int jobs = 1;
    auto* run_cmd = app.add_subcommand("run", "train an approach and compare to its baseline");
    run_cmd->add_option("--config", run_config, "experiment config file")->required();
    run_cmd->add_option("--out", run_out_dir, "output directory (overrides output.dir)");
    run_cmd->add_option("--jobs", jobs, "concurrent seed evaluations")->capture_default_str();

    std::string select_config, select_out;
    auto* select_cmd = app.add_subcommand("select", "greedy privileged-feature selection");
    select_cmd->add_option("--config", select_config, "selection config file")->required();
    select_cmd->add_option("--out", select_out, "also write the report to this file");

    BoundaryArgs boundary;
    auto* boundary_cmd =
        app.add_subcommand("boundary", "dump decision values over a 2-D grid");
    boundary_cmd->add_option("--model", boundary.models, "model file (repeatable)")->required();
    boundary_cmd->add_option("--out", boundary.outs, "output csv (one per model)")->required();
    boundary_cmd->add_option("--xmin", boundary.xmin)->capture_default_str();
    boundary_cmd->add_option("--xmax", boundary.xmax)->capture_default_str();
    boundary_cmd->add_option("--ymin", boundary.ymin)->capture_default_str();
    boundary_cmd->add_option("--ymax", boundary.ymax)->capture_default_str();
    boundary_cmd->add_option("--nx", boundary.nx)->capture_default_str();
    boundary_cmd->add_option("--ny", boundary.ny)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help exits cleanly, any parse error is usage
    }

    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (run_cmd->parsed()) return cmd_run(run_config, run_out_dir, jobs);
    if (select_cmd->parsed()) return cmd_select(select_config, select_out);
    if (boundary_cmd->parsed()) return cmd_boundary(boundary);
    return 1;
}
