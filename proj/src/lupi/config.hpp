#pragma once

#include "lupi/common.hpp"
#include "lupi/dataset.hpp"
#include "lupi/distill.hpp"
#include "lupi/kernels.hpp"
#include "lupi/select.hpp"
#include "lupi/svmplus.hpp"
#include "lupi/transfer.hpp"

#include <map>
#include <optional>

namespace lupi {

/// Flat dotted-key configuration file: one `key=value` per line, `#` starts
/// a comment. Unknown keys are rejected so typos fail loudly.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int_or(const std::string& key, int fallback) const;
    std::uint64_t get_seed_or(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_list_or(const std::string& key,
                                    const std::vector<double>& fallback) const;

    /// Throws if any key was never read; call after parsing a config.
    void reject_unknown_keys() const;

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> consumed_;
};

enum class Approach { standard, complete, kt_regression, kt_similarity, svmplus, distill };

Approach approach_from_name(const std::string& name);
const char* approach_name(Approach a);

struct ExperimentConfig {
    // dataset source: exactly one of the two
    std::optional<SynthSpec> synth;
    std::string data_path, schema_path;

    Approach approach = Approach::standard;

    KernelSpec svm_kernel = KernelSpec::rbf(1.0);
    double svm_C = 1.0;

    SvmPlusConfig svmplus;
    double svmplus_tol = 1e-6;

    KtHyper kt;

    DistillConfig distill;
    std::vector<int> distill_hidden = {10, 10};

    int n_folds = 5;
    std::vector<std::uint64_t> seeds;  // defaults to 0..9
    std::string output_dir = "out";
};

/// Parses and validates; referenced files must exist at parse time.
ExperimentConfig parse_experiment_config(const std::string& path);

struct SelectExperimentConfig {
    std::optional<SynthSpec> synth;
    std::string data_path, schema_path;
    SelectionConfig selection;
    bool max_features_given = false;  // default: all privileged columns
};

SelectExperimentConfig parse_select_config(const std::string& path);

LupiDataset load_config_dataset(const std::optional<SynthSpec>& synth,
                                const std::string& data_path, const std::string& schema_path);

}  // namespace lupi
