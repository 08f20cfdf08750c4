// C API implementation: translates between opaque handles / status codes and
// the C++ core. Exceptions never cross this boundary.

#include "lupi.h"

#include "lupi/config.hpp"
#include "lupi/dataset.hpp"
#include "lupi/experiment.hpp"
#include "lupi/model_io.hpp"

#include <cstring>
#include <string>

struct lupi_dataset {
    lupi::LupiDataset data;
};

struct lupi_model {
    lupi::AnyModel model;
};

namespace {

thread_local std::string g_last_error;

lupi_status status_of(const lupi::Error& e) {
    switch (e.kind()) {
        case lupi::ErrorKind::invalid_argument: return LUPI_ERR_INVALID_ARG;
        case lupi::ErrorKind::data: return LUPI_ERR_DATA;
        case lupi::ErrorKind::io: return LUPI_ERR_IO;
        case lupi::ErrorKind::numeric: return LUPI_ERR_NUMERIC;
    }
    return LUPI_ERR_NUMERIC;
}

template <typename Fn>
lupi_status guarded(Fn&& fn) {
    try {
        fn();
        return LUPI_OK;
    } catch (const lupi::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LUPI_ERR_NUMERIC;
    } catch (...) {
        g_last_error = "unknown error";
        return LUPI_ERR_NUMERIC;
    }
}

lupi_status require(bool ok, const char* message) {
    if (ok) return LUPI_OK;
    g_last_error = message;
    return LUPI_ERR_INVALID_ARG;
}

lupi::KernelSpec to_kernel(lupi_kernel k) {
    lupi::KernelSpec spec;
    switch (k.family) {
        case LUPI_KERNEL_LINEAR: spec.family = lupi::KernelFamily::linear; break;
        case LUPI_KERNEL_POLYNOMIAL: spec.family = lupi::KernelFamily::polynomial; break;
        case LUPI_KERNEL_RBF: spec.family = lupi::KernelFamily::rbf; break;
        default: lupi::throw_invalid("unknown kernel family code");
    }
    spec.degree = k.degree;
    spec.gamma = k.gamma;
    spec.coef0 = k.coef0;
    return spec;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* lupi_last_error(void) { return g_last_error.c_str(); }

lupi_status lupi_dataset_load(const char* data_path, const char* schema_path,
                              lupi_dataset** out) {
    if (auto s = require(data_path && schema_path && out, "null argument")) return s;
    return guarded([&] {
        auto ds = std::make_unique<lupi_dataset>();
        ds->data = lupi::load_tabular(data_path, std::string(schema_path));
        *out = ds.release();
    });
}

lupi_status lupi_dataset_synth(const char* scenario, int n, double noise_std_standard,
                               double noise_std_privileged, double outlier_fraction,
                               uint64_t seed, lupi_dataset** out) {
    if (auto s = require(scenario && out, "null argument")) return s;
    return guarded([&] {
        lupi::SynthSpec spec;
        spec.scenario = lupi::synth_scenario_from_name(scenario);
        spec.n = n;
        spec.noise_std_standard = noise_std_standard;
        spec.noise_std_privileged = noise_std_privileged;
        spec.outlier_fraction = outlier_fraction;
        spec.seed = seed;
        auto ds = std::make_unique<lupi_dataset>();
        ds->data = lupi::make_synthetic(spec);
        *out = ds.release();
    });
}

lupi_status lupi_dataset_save(const lupi_dataset* ds, const char* data_path,
                              const char* schema_path) {
    if (auto s = require(ds && data_path && schema_path, "null argument")) return s;
    return guarded([&] { lupi::write_tabular(ds->data, data_path, schema_path); });
}

lupi_status lupi_dataset_dims(const lupi_dataset* ds, int* n_rows, int* n_standard,
                              int* n_privileged, int* n_classes) {
    if (auto s = require(ds != nullptr, "null dataset")) return s;
    if (n_rows) *n_rows = static_cast<int>(ds->data.rows());
    if (n_standard) *n_standard = static_cast<int>(ds->data.standard_dim());
    if (n_privileged) *n_privileged = static_cast<int>(ds->data.privileged_dim());
    if (n_classes) *n_classes = ds->data.n_classes;
    return LUPI_OK;
}

namespace {

lupi_status copy_block(const lupi::Matrix& m, double* buf, size_t buf_len) {
    const size_t need = static_cast<size_t>(m.rows()) * static_cast<size_t>(m.cols());
    if (!buf || buf_len < need) {
        g_last_error = "buffer too small (" + std::to_string(need) + " doubles needed)";
        return LUPI_ERR_INVALID_ARG;
    }
    size_t j = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) buf[j++] = m(r, c);
    }
    return LUPI_OK;
}

}  // namespace

lupi_status lupi_dataset_standard(const lupi_dataset* ds, double* buf, size_t buf_len) {
    if (auto s = require(ds != nullptr, "null dataset")) return s;
    return copy_block(ds->data.standard, buf, buf_len);
}

lupi_status lupi_dataset_privileged(const lupi_dataset* ds, double* buf, size_t buf_len) {
    if (auto s = require(ds != nullptr, "null dataset")) return s;
    return copy_block(ds->data.privileged, buf, buf_len);
}

lupi_status lupi_dataset_labels(const lupi_dataset* ds, int* buf, size_t buf_len) {
    if (auto s = require(ds != nullptr, "null dataset")) return s;
    if (!buf || buf_len < ds->data.labels.size()) {
        g_last_error = "buffer too small";
        return LUPI_ERR_INVALID_ARG;
    }
    for (size_t i = 0; i < ds->data.labels.size(); ++i) buf[i] = ds->data.labels[i];
    return LUPI_OK;
}

void lupi_dataset_free(lupi_dataset* ds) { delete ds; }

lupi_status lupi_train_svm(const lupi_dataset* ds, lupi_kernel kernel, double C,
                           int use_complete, lupi_model** out) {
    if (auto s = require(ds && out, "null argument")) return s;
    return guarded([&] {
        const lupi::LupiDataset view = use_complete ? ds->data.merged_complete() : ds->data;
        auto model = std::make_unique<lupi_model>();
        model->model = lupi::train_svm(view.standard, view.labels, to_kernel(kernel), C);
        *out = model.release();
    });
}

lupi_status lupi_train_svmplus(const lupi_dataset* ds, lupi_kernel kernel_standard,
                               lupi_kernel kernel_privileged, double kappa, double gamma,
                               double C, double tol, lupi_model** out) {
    if (auto s = require(ds && out, "null argument")) return s;
    return guarded([&] {
        lupi::SvmPlusConfig config;
        config.kernel_standard = to_kernel(kernel_standard);
        config.kernel_privileged = to_kernel(kernel_privileged);
        config.kappa = kappa;
        config.gamma = gamma;
        config.C = lupi::Vector::Constant(1, C);
        auto model = std::make_unique<lupi_model>();
        model->model = lupi::train_svmplus(ds->data, config, tol);
        *out = model.release();
    });
}

lupi_status lupi_train_kt(const lupi_dataset* ds, int mapping_kind, int max_degree,
                          int k_neighbors, int top_p_columns, lupi_kernel downstream_kernel,
                          double C, lupi_model** out) {
    if (auto s = require(ds && out, "null argument")) return s;
    if (auto s = require(mapping_kind == 0 || mapping_kind == 1,
                         "mapping_kind must be 0 (regression) or 1 (similarity)")) {
        return s;
    }
    return guarded([&] {
        lupi::KtHyper hyper;
        hyper.max_degree = max_degree;
        hyper.k_neighbors = k_neighbors;
        hyper.top_p_columns = top_p_columns;
        auto model = std::make_unique<lupi_model>();
        model->model = lupi::train_kt(
            ds->data,
            mapping_kind == 0 ? lupi::MappingKind::regression : lupi::MappingKind::similarity,
            to_kernel(downstream_kernel), C, hyper);
        *out = model.release();
    });
}

lupi_status lupi_train_distill(const lupi_dataset* ds, const int* hidden_sizes, int n_hidden,
                               double temperature, double lambda, int epochs, int batch_size,
                               double learning_rate, uint64_t seed, lupi_model** out) {
    if (auto s = require(ds && out, "null argument")) return s;
    if (auto s = require(n_hidden == 0 || hidden_sizes != nullptr, "null hidden sizes")) return s;
    return guarded([&] {
        lupi::DistillConfig config;
        config.temperature = temperature;
        config.lambda = lambda;
        config.epochs = epochs;
        config.batch_size = batch_size;
        config.learning_rate = learning_rate;
        config.seed = seed;
        std::vector<int> hidden(hidden_sizes, hidden_sizes + n_hidden);
        auto model = std::make_unique<lupi_model>();
        model->model = lupi::train_distilled(ds->data, config, hidden);
        *out = model.release();
    });
}

lupi_status lupi_model_predict(const lupi_model* model, const double* rows, int n_rows,
                               int n_cols, int* labels_out, double* raw_out) {
    if (auto s = require(model && rows && labels_out, "null argument")) return s;
    if (auto s = require(n_rows > 0 && n_cols > 0, "empty prediction input")) return s;
    return guarded([&] {
        lupi::Matrix m(n_rows, n_cols);
        size_t j = 0;
        for (int r = 0; r < n_rows; ++r) {
            for (int c = 0; c < n_cols; ++c) m(r, c) = rows[j++];
        }
        const std::vector<int> labels = lupi::model_predict_labels(model->model, m);
        for (int r = 0; r < n_rows; ++r) labels_out[r] = labels[static_cast<size_t>(r)];
        if (raw_out) {
            const lupi::Vector raw = lupi::model_decision_values(model->model, m);
            for (int r = 0; r < n_rows; ++r) raw_out[r] = raw(r);
        }
    });
}

lupi_status lupi_model_input_dim(const lupi_model* model, int* dim) {
    if (auto s = require(model && dim, "null argument")) return s;
    *dim = static_cast<int>(lupi::model_input_dim(model->model));
    return LUPI_OK;
}

lupi_status lupi_model_kind(const lupi_model* model, char* buf, size_t buf_len) {
    if (auto s = require(model && buf, "null argument")) return s;
    const std::string kind = lupi::model_kind_name(lupi::model_kind(model->model));
    if (buf_len < kind.size() + 1) {
        g_last_error = "buffer too small";
        return LUPI_ERR_INVALID_ARG;
    }
    std::memcpy(buf, kind.c_str(), kind.size() + 1);
    return LUPI_OK;
}

lupi_status lupi_model_save(const lupi_model* model, const char* path) {
    if (auto s = require(model && path, "null argument")) return s;
    return guarded([&] { lupi::save_model(model->model, path); });
}

lupi_status lupi_model_load(const char* path, lupi_model** out) {
    if (auto s = require(path && out, "null argument")) return s;
    return guarded([&] {
        auto model = std::make_unique<lupi_model>();
        model->model = lupi::load_model(path);
        *out = model.release();
    });
}

void lupi_model_free(lupi_model* model) { delete model; }

lupi_status lupi_run_experiment(const char* config_path, const char* out_dir_override,
                                int jobs, char** summary_out) {
    if (auto s = require(config_path != nullptr, "null config path")) return s;
    return guarded([&] {
        lupi::ExperimentConfig config = lupi::parse_experiment_config(config_path);
        if (out_dir_override) config.output_dir = out_dir_override;
        const lupi::ExperimentOutput result = lupi::run_experiment(config, jobs);
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

lupi_status lupi_run_select(const char* config_path, char** report_out) {
    if (auto s = require(config_path && report_out, "null argument")) return s;
    return guarded([&] {
        const lupi::SelectExperimentConfig config = lupi::parse_select_config(config_path);
        *report_out = dup_string(lupi::run_select(config));
    });
}

lupi_status lupi_boundary_grid(const lupi_model* model, double xmin, double xmax, double ymin,
                               double ymax, int nx, int ny, char** csv_out) {
    if (auto s = require(model && csv_out, "null argument")) return s;
    return guarded([&] {
        *csv_out = dup_string(
            lupi::boundary_grid_csv(model->model, xmin, xmax, ymin, ymax, nx, ny));
    });
}

void lupi_string_free(char* s) { delete[] s; }

}  // extern "C"
