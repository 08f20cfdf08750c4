#include "lupi/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace lupi {

int LupiDataset::class_index_of(Eigen::Index i) const {
    const int y = labels.at(static_cast<size_t>(i));
    if (n_classes == 2) return y < 0 ? 0 : 1;
    return y;
}

void LupiDataset::validate() const {
    const Eigen::Index n = standard.rows();
    if (standard.cols() < 1) throw_data("dataset has zero standard columns");
    if (privileged.rows() != n && privileged.cols() > 0) {
        throw_data("standard/privileged row count mismatch");
    }
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw_data("label count does not match row count");
    }
    if (!standard.allFinite() || (privileged.size() > 0 && !privileged.allFinite())) {
        throw_data("dataset contains NaN or infinite entries");
    }
    if (n_classes < 2) throw_data("dataset needs at least two classes");
    for (int y : labels) {
        if (n_classes == 2) {
            if (y != -1 && y != 1) throw_data("binary labels must be -1/+1");
        } else if (y < 0 || y >= n_classes) {
            throw_data("class index out of range");
        }
    }
}

LupiDataset LupiDataset::subset(const std::vector<Eigen::Index>& row_ids) const {
    LupiDataset out;
    out.standard.resize(static_cast<Eigen::Index>(row_ids.size()), standard.cols());
    out.privileged.resize(static_cast<Eigen::Index>(row_ids.size()), privileged.cols());
    out.labels.reserve(row_ids.size());
    Eigen::Index r = 0;
    for (Eigen::Index id : row_ids) {
        out.standard.row(r) = standard.row(id);
        if (privileged.cols() > 0) out.privileged.row(r) = privileged.row(id);
        out.labels.push_back(labels[static_cast<size_t>(id)]);
        ++r;
    }
    out.n_classes = n_classes;
    out.standard_names = standard_names;
    out.privileged_names = privileged_names;
    out.label_name = label_name;
    return out;
}

LupiDataset LupiDataset::merged_complete() const {
    LupiDataset out;
    out.standard.resize(rows(), standard.cols() + privileged.cols());
    out.standard << standard, privileged;
    out.privileged.resize(rows(), 0);
    out.labels = labels;
    out.n_classes = n_classes;
    out.standard_names = standard_names;
    for (const auto& nm : privileged_names) out.standard_names.push_back(nm);
    out.label_name = label_name;
    return out;
}

LupiDataset LupiDataset::with_privileged_columns(const std::vector<int>& cols) const {
    LupiDataset out = *this;
    out.privileged.resize(rows(), static_cast<Eigen::Index>(cols.size()));
    out.privileged_names.clear();
    Eigen::Index c = 0;
    for (int col : cols) {
        if (col < 0 || col >= privileged.cols()) throw_invalid("privileged column out of range");
        out.privileged.col(c) = privileged.col(col);
        if (col < static_cast<int>(privileged_names.size())) {
            out.privileged_names.push_back(privileged_names[static_cast<size_t>(col)]);
        }
        ++c;
    }
    return out;
}

namespace {

ColumnRole role_from_name(const std::string& name, const std::string& context) {
    if (name == "standard") return ColumnRole::standard;
    if (name == "privileged") return ColumnRole::privileged;
    if (name == "label") return ColumnRole::label;
    if (name == "ignore") return ColumnRole::ignore;
    throw_data("unknown column role '" + name + "' " + context);
}

const char* role_name(ColumnRole r) {
    switch (r) {
        case ColumnRole::standard: return "standard";
        case ColumnRole::privileged: return "privileged";
        case ColumnRole::label: return "label";
        case ColumnRole::ignore: return "ignore";
    }
    return "ignore";
}

}  // namespace

Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open schema file: " + path);
    Schema schema;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw_data("schema " + path + " line " + std::to_string(lineno) +
                       ": expected name=role");
        }
        const std::string name = trim(t.substr(0, eq));
        const std::string role = trim(t.substr(eq + 1));
        if (schema.count(name)) throw_data("schema assigns column '" + name + "' twice");
        schema[name] = role_from_name(role, "in " + path);
    }
    return schema;
}

void save_schema(const Schema& schema, const std::string& path,
                 const std::vector<std::string>& column_order) {
    std::ostringstream out;
    for (const auto& name : column_order) {
        auto it = schema.find(name);
        if (it == schema.end()) throw_invalid("schema missing column " + name);
        out << name << "=" << role_name(it->second) << "\n";
    }
    atomic_write_file(path, out.str());
}

namespace {

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;
};

RawTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open data file: " + path);
    RawTable t;
    std::string line;
    bool first = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (first) {
            for (auto& f : fields) t.header.push_back(trim(f));
            first = false;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw_data(path + " row " + std::to_string(lineno) + ": has " +
                       std::to_string(fields.size()) + " cells, header has " +
                       std::to_string(t.header.size()));
        }
        for (auto& f : fields) f = trim(f);
        t.cells.push_back(std::move(fields));
    }
    if (first) throw_data(path + ": empty file (no header)");
    return t;
}

}  // namespace

LupiDataset load_tabular(const std::string& data_path, const std::string& schema_path) {
    return load_tabular(data_path, load_schema(schema_path));
}

LupiDataset load_tabular(const std::string& data_path, const Schema& schema) {
    RawTable table = read_table(data_path);

    std::vector<int> standard_cols, privileged_cols;
    int label_col = -1;
    for (size_t c = 0; c < table.header.size(); ++c) {
        auto it = schema.find(table.header[c]);
        if (it == schema.end()) {
            throw_data("schema gives no role for column '" + table.header[c] + "'");
        }
        switch (it->second) {
            case ColumnRole::standard: standard_cols.push_back(static_cast<int>(c)); break;
            case ColumnRole::privileged: privileged_cols.push_back(static_cast<int>(c)); break;
            case ColumnRole::label:
                if (label_col >= 0) throw_data("more than one label column");
                label_col = static_cast<int>(c);
                break;
            case ColumnRole::ignore: break;
        }
    }
    if (label_col < 0) throw_data("schema names no label column");
    if (standard_cols.empty()) throw_data("zero standard columns");
    if (table.cells.empty()) throw_data(data_path + ": no data rows");

    const Eigen::Index n = static_cast<Eigen::Index>(table.cells.size());
    LupiDataset ds;
    ds.standard.resize(n, static_cast<Eigen::Index>(standard_cols.size()));
    ds.privileged.resize(n, static_cast<Eigen::Index>(privileged_cols.size()));
    for (int c : standard_cols) ds.standard_names.push_back(table.header[static_cast<size_t>(c)]);
    for (int c : privileged_cols) ds.privileged_names.push_back(table.header[static_cast<size_t>(c)]);
    ds.label_name = table.header[static_cast<size_t>(label_col)];

    auto parse_cell = [&](Eigen::Index r, int c) -> double {
        double v = 0.0;
        const std::string& cell = table.cells[static_cast<size_t>(r)][static_cast<size_t>(c)];
        if (!parse_double(cell, v)) {
            throw_data(data_path + ": unparsable cell '" + cell + "' at row " +
                       std::to_string(r + 2) + ", column '" +
                       table.header[static_cast<size_t>(c)] + "'");
        }
        if (!std::isfinite(v)) {
            throw_data(data_path + ": non-finite value at row " + std::to_string(r + 2) +
                       ", column '" + table.header[static_cast<size_t>(c)] + "'");
        }
        return v;
    };

    std::vector<std::string> raw_labels(static_cast<size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) {
        for (size_t j = 0; j < standard_cols.size(); ++j) {
            ds.standard(r, static_cast<Eigen::Index>(j)) = parse_cell(r, standard_cols[j]);
        }
        for (size_t j = 0; j < privileged_cols.size(); ++j) {
            ds.privileged(r, static_cast<Eigen::Index>(j)) = parse_cell(r, privileged_cols[j]);
        }
        raw_labels[static_cast<size_t>(r)] = table.cells[static_cast<size_t>(r)][static_cast<size_t>(label_col)];
    }

    std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
    if (distinct.size() < 2) throw_data("label column has fewer than two distinct values");
    std::vector<std::string> ordered(distinct.begin(), distinct.end());
    if (ordered.size() > 2) {
        // Multiclass: sort numerically when every label parses as a number,
        // otherwise keep the lexicographic order.
        bool all_numeric = true;
        for (const auto& s : ordered) {
            double v;
            if (!parse_double(s, v)) { all_numeric = false; break; }
        }
        if (all_numeric) {
            std::sort(ordered.begin(), ordered.end(), [](const std::string& a, const std::string& b) {
                double va = 0, vb = 0;
                parse_double(a, va);
                parse_double(b, vb);
                return va < vb;
            });
        }
    }

    ds.n_classes = static_cast<int>(ordered.size());
    std::map<std::string, int> index;
    for (size_t k = 0; k < ordered.size(); ++k) index[ordered[k]] = static_cast<int>(k);
    ds.labels.reserve(static_cast<size_t>(n));
    for (const auto& raw : raw_labels) {
        const int k = index[raw];
        // Binary: lexicographically smaller raw label maps to -1.
        ds.labels.push_back(ds.n_classes == 2 ? (k == 0 ? -1 : +1) : k);
    }

    ds.validate();
    return ds;
}

void write_tabular(const LupiDataset& ds, const std::string& data_path,
                   const std::string& schema_path) {
    ds.validate();
    std::vector<std::string> order;
    Schema schema;
    std::ostringstream out;
    bool first = true;
    auto emit = [&](const std::string& name, ColumnRole role) {
        if (!first) out << ",";
        out << name;
        first = false;
        order.push_back(name);
        schema[name] = role;
    };
    for (Eigen::Index c = 0; c < ds.standard.cols(); ++c) {
        const auto nm = c < static_cast<Eigen::Index>(ds.standard_names.size())
                            ? ds.standard_names[static_cast<size_t>(c)]
                            : "s" + std::to_string(c);
        emit(nm, ColumnRole::standard);
    }
    for (Eigen::Index c = 0; c < ds.privileged.cols(); ++c) {
        const auto nm = c < static_cast<Eigen::Index>(ds.privileged_names.size())
                            ? ds.privileged_names[static_cast<size_t>(c)]
                            : "p" + std::to_string(c);
        emit(nm, ColumnRole::privileged);
    }
    emit(ds.label_name.empty() ? "label" : ds.label_name, ColumnRole::label);
    out << "\n";

    for (Eigen::Index r = 0; r < ds.rows(); ++r) {
        for (Eigen::Index c = 0; c < ds.standard.cols(); ++c) {
            out << format_full(ds.standard(r, c)) << ",";
        }
        for (Eigen::Index c = 0; c < ds.privileged.cols(); ++c) {
            out << format_full(ds.privileged(r, c)) << ",";
        }
        out << ds.labels[static_cast<size_t>(r)] << "\n";
    }
    atomic_write_file(data_path, out.str());
    save_schema(schema, schema_path, order);
}

void SynthSpec::validate() const {
    if (n < 4) throw_invalid("synthetic datasets need n >= 4");
    if (noise_std_standard < 0 || noise_std_privileged < 0) {
        throw_invalid("noise standard deviations must be >= 0");
    }
    if (outlier_fraction < 0 || outlier_fraction > 1) {
        throw_invalid("outlier_fraction must lie in [0,1]");
    }
    if (scenario == SynthScenario::latent_lupi && noise_std_privileged > noise_std_standard) {
        throw_invalid("latent-lupi requires noise_std_privileged <= noise_std_standard");
    }
}

SynthScenario synth_scenario_from_name(const std::string& name) {
    if (name == "gauss2d") return SynthScenario::gauss2d;
    if (name == "latent-lupi" || name == "latent_lupi") return SynthScenario::latent_lupi;
    throw_invalid("unknown synthetic scenario: " + name);
}

const char* synth_scenario_name(SynthScenario s) {
    return s == SynthScenario::gauss2d ? "gauss2d" : "latent-lupi";
}

namespace {

LupiDataset make_gauss2d(const SynthSpec& spec) {
    std::mt19937_64 rng(mix_seed(spec.seed, 0xa11ce));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int n = spec.n;
    LupiDataset ds;
    ds.standard.resize(n, 2);
    ds.privileged.resize(n, 1);
    ds.labels.resize(static_cast<size_t>(n));
    ds.standard_names = {"x1", "x2"};
    ds.privileged_names = {"margin_distance"};

    // Classes are drawn as antithetic pairs: the -1 point mirrors a +1 draw
    // through the origin. Each class still has exactly the N(center, s^2 I)
    // marginal, and the sample is symmetric under negation plus label swap.
    const int n_pos = n / 2;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n_pos; ++i) {
        const double x0 = 1.0 + spec.noise_std_standard * gauss(rng);
        const double x1 = 1.0 + spec.noise_std_standard * gauss(rng);
        const double p = (x0 + x1) * inv_sqrt2 + spec.noise_std_privileged * gauss(rng);
        ds.standard(i, 0) = x0;
        ds.standard(i, 1) = x1;
        ds.privileged(i, 0) = p;
        ds.labels[static_cast<size_t>(i)] = +1;

        const int j = n_pos + i;
        ds.standard(j, 0) = -x0;
        ds.standard(j, 1) = -x1;
        ds.privileged(j, 0) = -p;
        ds.labels[static_cast<size_t>(j)] = -1;
    }
    if (n % 2 == 1) {  // odd count: one unpaired -1 draw
        const int i = n - 1;
        const double x0 = -1.0 + spec.noise_std_standard * gauss(rng);
        const double x1 = -1.0 + spec.noise_std_standard * gauss(rng);
        ds.standard(i, 0) = x0;
        ds.standard(i, 1) = x1;
        ds.privileged(i, 0) = (x0 + x1) * inv_sqrt2 + spec.noise_std_privileged * gauss(rng);
        ds.labels[static_cast<size_t>(i)] = -1;
    }

    // Relabel a fraction of points across the true boundary x+y=0.
    const int n_out = static_cast<int>(std::floor(spec.outlier_fraction * n));
    if (n_out > 0) {
        std::vector<int> ids(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) ids[static_cast<size_t>(i)] = i;
        std::shuffle(ids.begin(), ids.end(), rng);
        for (int k = 0; k < n_out; ++k) {
            auto& y = ds.labels[static_cast<size_t>(ids[static_cast<size_t>(k)])];
            y = -y;
        }
    }
    return ds;
}

LupiDataset make_latent_lupi(const SynthSpec& spec) {
    std::mt19937_64 rng(mix_seed(spec.seed, 0xbea7));
    std::normal_distribution<double> gauss(0.0, 1.0);

    constexpr int kDim = 5;
    // Fixed direction defining the true labels; not axis-aligned on purpose.
    static const double w_raw[kDim] = {1.0, -0.5, 0.75, 1.25, -1.0};
    Vector w(kDim);
    for (int j = 0; j < kDim; ++j) w(j) = w_raw[j];
    w.normalize();

    const int n = spec.n;
    LupiDataset ds;
    ds.standard.resize(n, kDim);
    ds.privileged.resize(n, kDim);
    ds.labels.resize(static_cast<size_t>(n));
    for (int j = 0; j < kDim; ++j) {
        ds.standard_names.push_back("s" + std::to_string(j));
        ds.privileged_names.push_back("p" + std::to_string(j));
    }

    Vector z(kDim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < kDim; ++j) z(j) = gauss(rng);
        ds.labels[static_cast<size_t>(i)] = w.dot(z) >= 0 ? +1 : -1;
        for (int j = 0; j < kDim; ++j) {
            ds.standard(i, j) = z(j) + spec.noise_std_standard * gauss(rng);
        }
        for (int j = 0; j < kDim; ++j) {
            ds.privileged(i, j) = z(j) + spec.noise_std_privileged * gauss(rng);
        }
    }
    return ds;
}

}  // namespace

LupiDataset make_synthetic(const SynthSpec& spec) {
    spec.validate();
    LupiDataset ds = spec.scenario == SynthScenario::gauss2d ? make_gauss2d(spec)
                                                             : make_latent_lupi(spec);
    ds.validate();
    return ds;
}

std::vector<Eigen::Index> SplitPlan::fold_rows(int fold) const {
    std::vector<Eigen::Index> out;
    for (size_t i = 0; i < fold_assignments.size(); ++i) {
        if (fold_assignments[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
}

std::vector<Eigen::Index> SplitPlan::complement_rows(int fold) const {
    std::vector<Eigen::Index> out;
    for (size_t i = 0; i < fold_assignments.size(); ++i) {
        if (fold_assignments[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
}

SplitPlan stratified_folds(const std::vector<int>& labels, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw_invalid("n_folds must be >= 2");
    std::map<int, std::vector<int>> by_class;
    for (size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(static_cast<int>(i));
    }
    for (const auto& [cls, ids] : by_class) {
        if (static_cast<int>(ids.size()) < n_folds) {
            throw_data("class " + std::to_string(cls) + " has " + std::to_string(ids.size()) +
                       " members, fewer than n_folds=" + std::to_string(n_folds));
        }
    }

    SplitPlan plan;
    plan.fold_assignments.assign(labels.size(), 0);
    plan.n_folds = n_folds;
    plan.seed = seed;

    std::mt19937_64 rng(mix_seed(seed, 0xf01d5));
    // Round-robin within each class; the next class continues where the
    // previous one stopped so fold sizes stay balanced overall.
    int cursor = 0;
    for (auto& [cls, ids] : by_class) {
        std::shuffle(ids.begin(), ids.end(), rng);
        for (int id : ids) {
            plan.fold_assignments[static_cast<size_t>(id)] = cursor % n_folds;
            ++cursor;
        }
    }
    return plan;
}

}  // namespace lupi
