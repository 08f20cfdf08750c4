#include "lupi/model_io.hpp"

#include <map>
#include <sstream>

namespace lupi {

namespace {

class Writer {
public:
    void put(const std::string& key, const std::string& value) {
        out_ << key << "=" << value << "\n";
    }
    void put(const std::string& key, double value) { put(key, format_full(value)); }
    void put(const std::string& key, int value) { put(key, std::to_string(value)); }
    void put(const std::string& key, Eigen::Index value) { put(key, std::to_string(value)); }
    void put_vec(const std::string& key, const Vector& v) {
        std::ostringstream ss;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (i) ss << " ";
            ss << format_full(v(i));
        }
        out_ << key << "=" << ss.str() << "\n";
    }
    void put_ints(const std::string& key, const std::vector<int>& v) {
        std::ostringstream ss;
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) ss << " ";
            ss << v[i];
        }
        out_ << key << "=" << ss.str() << "\n";
    }
    void put_mat(const std::string& key, const Matrix& m) {
        put(key + ".rows", m.rows());
        put(key + ".cols", m.cols());
        std::ostringstream ss;
        bool first = true;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (!first) ss << " ";
                ss << format_full(m(r, c));
                first = false;
            }
        }
        out_ << key << ".data=" << ss.str() << "\n";
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty() || line[0] == '#') continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos) throw_data("model file: expected key=value: " + line);
            kv_[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw_data("model file: missing key " + key);
        return it->second;
    }

    double get_double(const std::string& key) const {
        double v;
        if (!parse_double(get(key), v)) throw_data("model file: bad number for " + key);
        return v;
    }

    int get_int(const std::string& key) const {
        return static_cast<int>(get_double(key));
    }

    Vector get_vec(const std::string& key, Eigen::Index expect = -1) const {
        std::istringstream ss(get(key));
        std::vector<double> vals;
        double v;
        while (ss >> v) vals.push_back(v);
        if (expect >= 0 && static_cast<Eigen::Index>(vals.size()) != expect) {
            throw_data("model file: " + key + " has wrong length");
        }
        Vector out(static_cast<Eigen::Index>(vals.size()));
        for (size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
        return out;
    }

    std::vector<int> get_ints(const std::string& key) const {
        std::istringstream ss(get(key));
        std::vector<int> vals;
        int v;
        while (ss >> v) vals.push_back(v);
        return vals;
    }

    Matrix get_mat(const std::string& key) const {
        const Eigen::Index rows = get_int(key + ".rows");
        const Eigen::Index cols = get_int(key + ".cols");
        const Vector data = get_vec(key + ".data", rows * cols);
        Matrix m(rows, cols);
        Eigen::Index j = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data(j++);
        }
        return m;
    }

private:
    std::map<std::string, std::string> kv_;
};

void write_kernel(Writer& w, const std::string& prefix, const KernelSpec& k) {
    w.put(prefix + ".family", kernel_family_name(k.family));
    w.put(prefix + ".degree", k.degree);
    w.put(prefix + ".gamma", k.gamma);
    w.put(prefix + ".coef0", k.coef0);
}

KernelSpec read_kernel(const Reader& r, const std::string& prefix) {
    KernelSpec k;
    k.family = kernel_family_from_name(r.get(prefix + ".family"));
    k.degree = r.get_int(prefix + ".degree");
    k.gamma = r.get_double(prefix + ".gamma");
    k.coef0 = r.get_double(prefix + ".coef0");
    return k;
}

void write_svm(Writer& w, const std::string& prefix, const SvmModel& m) {
    write_kernel(w, prefix + "kernel", m.kernel);
    w.put(prefix + "C", m.C);
    w.put(prefix + "bias", m.bias);
    w.put_vec(prefix + "alphas", m.alphas);
    w.put_ints(prefix + "labels", m.support_labels);
    w.put_mat(prefix + "rows", m.support_rows);
}

SvmModel read_svm(const Reader& r, const std::string& prefix) {
    SvmModel m;
    m.kernel = read_kernel(r, prefix + "kernel");
    m.C = r.get_double(prefix + "C");
    m.bias = r.get_double(prefix + "bias");
    m.alphas = r.get_vec(prefix + "alphas");
    m.support_labels = r.get_ints(prefix + "labels");
    m.support_rows = r.get_mat(prefix + "rows");
    if (m.support_rows.rows() != m.alphas.size() ||
        m.alphas.size() != static_cast<Eigen::Index>(m.support_labels.size())) {
        throw_data("model file: inconsistent svm arrays");
    }
    return m;
}

void write_net(Writer& w, const std::string& prefix, const FeedForwardNet& net) {
    w.put_ints(prefix + "layers", net.layer_sizes);
    for (size_t l = 0; l < net.weights.size(); ++l) {
        w.put_mat(prefix + "w" + std::to_string(l), net.weights[l]);
        w.put_vec(prefix + "b" + std::to_string(l), net.biases[l]);
    }
}

FeedForwardNet read_net(const Reader& r, const std::string& prefix) {
    FeedForwardNet net;
    net.layer_sizes = r.get_ints(prefix + "layers");
    if (net.layer_sizes.size() < 2) throw_data("model file: net needs >= 2 layers");
    for (size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        net.weights.push_back(r.get_mat(prefix + "w" + std::to_string(l)));
        net.biases.push_back(r.get_vec(prefix + "b" + std::to_string(l),
                                       net.layer_sizes[l + 1]));
        if (net.weights.back().rows() != net.layer_sizes[l + 1] ||
            net.weights.back().cols() != net.layer_sizes[l]) {
            throw_data("model file: net weight shape mismatch at layer " + std::to_string(l));
        }
    }
    return net;
}

}  // namespace

ModelKind model_kind(const AnyModel& model) {
    if (std::holds_alternative<SvmModel>(model)) return ModelKind::svm;
    if (std::holds_alternative<SvmPlusModel>(model)) return ModelKind::svmplus;
    if (std::holds_alternative<KtModel>(model)) return ModelKind::kt;
    if (std::holds_alternative<DistilledModel>(model)) return ModelKind::distill;
    return ModelKind::net;
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::svm: return "svm";
        case ModelKind::svmplus: return "svmplus";
        case ModelKind::kt: return "kt";
        case ModelKind::distill: return "distill";
        case ModelKind::net: return "net";
    }
    return "unknown";
}

Eigen::Index model_input_dim(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> Eigen::Index {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel>) return m.input_dim();
            else if constexpr (std::is_same_v<T, SvmPlusModel>) return m.input_dim();
            else if constexpr (std::is_same_v<T, KtModel>) return m.standard_dim;
            else if constexpr (std::is_same_v<T, DistilledModel>) return m.student.input_dim();
            else return m.input_dim();
        },
        model);
}

std::vector<int> model_predict_labels(const AnyModel& model, const Matrix& rows) {
    return std::visit(
        [&](const auto& m) -> std::vector<int> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel>) return predict_svm(m, rows).labels;
            else if constexpr (std::is_same_v<T, SvmPlusModel>) return predict_svmplus(m, rows).labels;
            else if constexpr (std::is_same_v<T, KtModel>) return predict_kt(m, rows).labels;
            else {
                const FeedForwardNet& net =
                    [&]() -> const FeedForwardNet& {
                    if constexpr (std::is_same_v<T, DistilledModel>) return m.student;
                    else return m;
                }();
                const auto pred = predict_net(net, rows);
                std::vector<int> out;
                out.reserve(pred.classes.size());
                for (int c : pred.classes) {
                    out.push_back(net.n_classes() == 2 ? (c == 0 ? -1 : +1) : c);
                }
                return out;
            }
        },
        model);
}

Vector model_decision_values(const AnyModel& model, const Matrix& rows) {
    return std::visit(
        [&](const auto& m) -> Vector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel>) return decision_values_svm(m, rows);
            else if constexpr (std::is_same_v<T, SvmPlusModel>) return decision_values_svmplus(m, rows);
            else if constexpr (std::is_same_v<T, KtModel>) return decision_values_kt(m, rows);
            else {
                const FeedForwardNet& net =
                    [&]() -> const FeedForwardNet& {
                    if constexpr (std::is_same_v<T, DistilledModel>) return m.student;
                    else return m;
                }();
                if (net.n_classes() != 2) {
                    throw_invalid("decision values need a binary model");
                }
                const Matrix logits = net.logits(rows);
                return logits.col(1) - logits.col(0);
            }
        },
        model);
}

std::string serialize_model(const AnyModel& model) {
    Writer w;
    w.put("lupi_model", 1);
    w.put("kind", model_kind_name(model_kind(model)));
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel>) {
                write_svm(w, "", m);
            } else if constexpr (std::is_same_v<T, SvmPlusModel>) {
                write_kernel(w, "kernel_standard", m.kernel_standard);
                write_kernel(w, "kernel_privileged", m.kernel_privileged);
                w.put("kappa", m.kappa);
                w.put("gamma", m.gamma);
                w.put("bias", m.bias);
                w.put_vec("C", m.C);
                w.put_vec("alphas", m.alphas);
                w.put_vec("deltas", m.deltas);
                w.put_ints("labels", m.support_labels);
                w.put_mat("rows", m.support_rows_standard);
            } else if constexpr (std::is_same_v<T, KtModel>) {
                w.put("standard_dim", m.standard_dim);
                w.put("n_mappings", m.mappings.count());
                for (Eigen::Index j = 0; j < m.mappings.count(); ++j) {
                    const std::string p = "mapping" + std::to_string(j) + ".";
                    const auto& fn = m.mappings.per_feature[static_cast<size_t>(j)];
                    if (const auto* reg = std::get_if<PolyRegressor>(&fn)) {
                        w.put(p + "kind", "regression");
                        w.put(p + "degree", reg->degree);
                        w.put_ints(p + "cols", reg->input_columns);
                        w.put(p + "intercept", reg->intercept);
                        w.put_vec(p + "coefficients", reg->coefficients);
                    } else {
                        const auto& sim = std::get<WeightedSimilarity>(fn);
                        w.put(p + "kind", "similarity");
                        w.put(p + "k", sim.k);
                        w.put_ints(p + "cols", sim.input_columns);
                        w.put_mat(p + "stored_standard", sim.stored_standard);
                        w.put_vec(p + "stored_privileged", sim.stored_privileged);
                    }
                }
                write_svm(w, "downstream.", m.downstream);
            } else if constexpr (std::is_same_v<T, DistilledModel>) {
                w.put("temperature", m.config.temperature);
                w.put("lambda", m.config.lambda);
                w.put("epochs", m.config.epochs);
                w.put("batch_size", m.config.batch_size);
                w.put("learning_rate", m.config.learning_rate);
                w.put("seed", std::to_string(m.config.seed));
                write_net(w, "student.", m.student);
                write_net(w, "teacher.", m.teacher);
            } else {
                write_net(w, "net.", m);
            }
        },
        model);
    return w.str();
}

AnyModel parse_model(const std::string& text) {
    Reader r(text);
    if (r.get_int("lupi_model") != 1) throw_data("model file: unsupported version");
    const std::string kind = r.get("kind");
    if (kind == "svm") {
        return read_svm(r, "");
    }
    if (kind == "svmplus") {
        SvmPlusModel m;
        m.kernel_standard = read_kernel(r, "kernel_standard");
        m.kernel_privileged = read_kernel(r, "kernel_privileged");
        m.kappa = r.get_double("kappa");
        m.gamma = r.get_double("gamma");
        m.bias = r.get_double("bias");
        m.C = r.get_vec("C");
        m.alphas = r.get_vec("alphas");
        m.deltas = r.get_vec("deltas");
        m.support_labels = r.get_ints("labels");
        m.support_rows_standard = r.get_mat("rows");
        if (m.alphas.size() != m.deltas.size() ||
            m.alphas.size() != m.support_rows_standard.rows()) {
            throw_data("model file: inconsistent svmplus arrays");
        }
        return m;
    }
    if (kind == "kt") {
        KtModel m;
        m.standard_dim = r.get_int("standard_dim");
        const int n = r.get_int("n_mappings");
        for (int j = 0; j < n; ++j) {
            const std::string p = "mapping" + std::to_string(j) + ".";
            const std::string mk = r.get(p + "kind");
            if (mk == "regression") {
                PolyRegressor reg;
                reg.degree = r.get_int(p + "degree");
                reg.input_columns = r.get_ints(p + "cols");
                reg.intercept = r.get_double(p + "intercept");
                reg.coefficients = r.get_vec(p + "coefficients");
                m.mappings.per_feature.emplace_back(std::move(reg));
            } else if (mk == "similarity") {
                WeightedSimilarity sim;
                sim.k = r.get_int(p + "k");
                sim.input_columns = r.get_ints(p + "cols");
                sim.stored_standard = r.get_mat(p + "stored_standard");
                sim.stored_privileged = r.get_vec(p + "stored_privileged");
                m.mappings.per_feature.emplace_back(std::move(sim));
            } else {
                throw_data("model file: unknown mapping kind " + mk);
            }
        }
        m.downstream = read_svm(r, "downstream.");
        return m;
    }
    if (kind == "distill") {
        DistilledModel m;
        m.config.temperature = r.get_double("temperature");
        m.config.lambda = r.get_double("lambda");
        m.config.epochs = r.get_int("epochs");
        m.config.batch_size = r.get_int("batch_size");
        m.config.learning_rate = r.get_double("learning_rate");
        m.config.seed = static_cast<std::uint64_t>(std::stoull(r.get("seed")));
        m.student = read_net(r, "student.");
        m.teacher = read_net(r, "teacher.");
        return m;
    }
    if (kind == "net") {
        return read_net(r, "net.");
    }
    throw_data("model file: unknown kind " + kind);
}

void save_model(const AnyModel& model, const std::string& path) {
    atomic_write_file(path, serialize_model(model));
}

AnyModel load_model(const std::string& path) {
    return parse_model(read_file(path));
}

}  // namespace lupi
