#include "lupi/config.hpp"

#include <filesystem>
#include <sstream>

namespace lupi {

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    return from_string(read_file(path), path);
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw_data(origin + " line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(t.substr(0, eq));
        if (cfg.values_.count(key)) {
            throw_data(origin + ": duplicate key " + key);
        }
        cfg.values_[key] = trim(t.substr(eq + 1));
        cfg.consumed_[key] = false;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end()) consumed_[key] = true;
    return it != values_.end();
}

std::string KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw_data(origin_ + ": missing required key " + key);
    consumed_[key] = true;
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
    double v;
    if (!parse_double(get(key), v)) throw_data(origin_ + ": bad number for " + key);
    return v;
}

double KeyValueConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int_or(const std::string& key, int fallback) const {
    return has(key) ? static_cast<int>(get_double(key)) : fallback;
}

std::uint64_t KeyValueConfig::get_seed_or(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    try {
        return static_cast<std::uint64_t>(std::stoull(get(key)));
    } catch (const std::exception&) {
        throw_data(origin_ + ": bad seed for " + key);
    }
}

std::vector<double> KeyValueConfig::get_list_or(const std::string& key,
                                                const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& part : split(get(key), ',')) {
        double v;
        if (!parse_double(part, v)) throw_data(origin_ + ": bad list entry in " + key);
        out.push_back(v);
    }
    return out;
}

void KeyValueConfig::reject_unknown_keys() const {
    for (const auto& [key, used] : consumed_) {
        if (!used) throw_data(origin_ + ": unknown key " + key);
    }
}

Approach approach_from_name(const std::string& name) {
    if (name == "standard") return Approach::standard;
    if (name == "complete") return Approach::complete;
    if (name == "kt-regression") return Approach::kt_regression;
    if (name == "kt-similarity") return Approach::kt_similarity;
    if (name == "svmplus") return Approach::svmplus;
    if (name == "distill") return Approach::distill;
    throw_data("unknown approach: " + name);
}

const char* approach_name(Approach a) {
    switch (a) {
        case Approach::standard: return "standard";
        case Approach::complete: return "complete";
        case Approach::kt_regression: return "kt-regression";
        case Approach::kt_similarity: return "kt-similarity";
        case Approach::svmplus: return "svmplus";
        case Approach::distill: return "distill";
    }
    return "unknown";
}

namespace {

KernelSpec parse_kernel(const KeyValueConfig& cfg, const std::string& prefix,
                        const KernelSpec& fallback) {
    KernelSpec k = fallback;
    if (cfg.has(prefix + ".family")) {
        k.family = kernel_family_from_name(cfg.get(prefix + ".family"));
    }
    k.degree = cfg.get_int_or(prefix + ".degree", k.degree);
    k.gamma = cfg.get_double_or(prefix + ".gamma", k.gamma);
    k.coef0 = cfg.get_double_or(prefix + ".coef0", k.coef0);
    return k;
}

void parse_dataset_source(const KeyValueConfig& cfg, std::optional<SynthSpec>& synth,
                          std::string& data_path, std::string& schema_path) {
    const std::string kind = cfg.get_or("dataset.kind", "synth");
    if (kind == "synth") {
        SynthSpec spec;
        spec.scenario = synth_scenario_from_name(cfg.get_or("dataset.scenario", "gauss2d"));
        spec.n = cfg.get_int_or("dataset.n", 200);
        const bool latent = spec.scenario == SynthScenario::latent_lupi;
        spec.noise_std_standard =
            cfg.get_double_or("dataset.noise_std_standard", latent ? 1.0 : 0.7);
        spec.noise_std_privileged =
            cfg.get_double_or("dataset.noise_std_privileged", latent ? 0.1 : 0.05);
        spec.outlier_fraction = cfg.get_double_or("dataset.outlier_fraction", latent ? 0.0 : 0.1);
        spec.seed = cfg.get_seed_or("dataset.seed", 0);
        spec.validate();
        synth = spec;
        return;
    }
    if (kind != "tabular") throw_data("dataset.kind must be synth or tabular");
    data_path = cfg.get("dataset.path");
    schema_path = cfg.get("dataset.schema");
    if (!std::filesystem::exists(data_path)) throw_data("dataset file not found: " + data_path);
    if (!std::filesystem::exists(schema_path)) {
        throw_data("schema file not found: " + schema_path);
    }
}

}  // namespace

LupiDataset load_config_dataset(const std::optional<SynthSpec>& synth,
                                const std::string& data_path, const std::string& schema_path) {
    if (synth) return make_synthetic(*synth);
    return load_tabular(data_path, schema_path);
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    const KeyValueConfig cfg = KeyValueConfig::from_file(path);
    ExperimentConfig out;

    parse_dataset_source(cfg, out.synth, out.data_path, out.schema_path);
    out.approach = approach_from_name(cfg.get("approach"));

    out.svm_kernel = parse_kernel(cfg, "svm.kernel", KernelSpec::rbf(1.0));
    out.svm_C = cfg.get_double_or("svm.C", 1.0);

    out.svmplus.kernel_standard =
        parse_kernel(cfg, "svmplus.kernel_standard", out.svm_kernel);
    out.svmplus.kernel_privileged =
        parse_kernel(cfg, "svmplus.kernel_privileged", KernelSpec::rbf(1.0));
    out.svmplus.kappa = cfg.get_double_or("svmplus.kappa", 1.0);
    out.svmplus.gamma = cfg.get_double_or("svmplus.gamma", 1.0);
    out.svmplus.C = Vector::Constant(1, cfg.get_double_or("svmplus.C", out.svm_C));
    out.svmplus_tol = cfg.get_double_or("svmplus.tol", 1e-6);

    out.kt.max_degree = cfg.get_int_or("kt.max_degree", 3);
    out.kt.k_neighbors = cfg.get_int_or("kt.k", 3);
    out.kt.top_p_columns = cfg.get_int_or("kt.top_p_columns", 0);
    out.kt.max_stored = cfg.get_int_or("kt.max_stored", 5000);
    out.kt.seed = cfg.get_seed_or("kt.seed", 0);

    out.distill.temperature = cfg.get_double_or("distill.temperature", 1.0);
    out.distill.lambda = cfg.get_double_or("distill.lambda", 0.5);
    out.distill.epochs = cfg.get_int_or("distill.epochs", 200);
    out.distill.batch_size = cfg.get_int_or("distill.batch_size", 32);
    out.distill.learning_rate = cfg.get_double_or("distill.learning_rate", 0.1);
    out.distill.seed = cfg.get_seed_or("distill.seed", 0);
    out.distill.validate();
    out.distill_hidden.clear();
    for (double h : cfg.get_list_or("distill.hidden", {10, 10})) {
        if (h < 1) throw_data("distill.hidden entries must be >= 1");
        out.distill_hidden.push_back(static_cast<int>(h));
    }

    out.n_folds = cfg.get_int_or("eval.n_folds", 5);
    {
        std::vector<double> fallback;
        for (int s = 0; s < 10; ++s) fallback.push_back(s);
        for (double s : cfg.get_list_or("eval.seeds", fallback)) {
            out.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    out.output_dir = cfg.get_or("output.dir", "out");

    cfg.reject_unknown_keys();
    return out;
}

SelectExperimentConfig parse_select_config(const std::string& path) {
    const KeyValueConfig cfg = KeyValueConfig::from_file(path);
    SelectExperimentConfig out;
    parse_dataset_source(cfg, out.synth, out.data_path, out.schema_path);

    out.max_features_given = cfg.has("select.max_features");
    out.selection.max_features = cfg.get_int_or("select.max_features", 0);
    out.selection.min_gain = cfg.get_double_or("select.min_gain", 0.0);
    out.selection.hard_margin_tau = cfg.get_double_or("select.tau", 1.0);
    out.selection.evaluator_kernel =
        parse_kernel(cfg, "select.kernel", KernelSpec::linear());
    out.selection.evaluator_C = cfg.get_double_or("select.C", 1.0);
    out.selection.n_folds = cfg.get_int_or("select.n_folds", 5);
    out.selection.seed = cfg.get_seed_or("select.seed", 0);

    cfg.reject_unknown_keys();
    return out;
}

}  // namespace lupi
