#include "lupi/distill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lupi {

void DistillConfig::validate() const {
    if (temperature <= 0.0) throw_invalid("distill: temperature must be > 0");
    if (lambda < 0.0 || lambda > 1.0) throw_invalid("distill: lambda must lie in [0,1]");
    if (epochs < 1) throw_invalid("distill: epochs must be >= 1");
    if (batch_size < 1) throw_invalid("distill: batch_size must be >= 1");
    if (learning_rate <= 0.0) throw_invalid("distill: learning_rate must be > 0");
}

Matrix FeedForwardNet::logits(const Matrix& rows) const {
    if (rows.cols() != input_dim()) {
        throw_invalid("net: input has " + std::to_string(rows.cols()) +
                      " columns, expected " + std::to_string(input_dim()));
    }
    Matrix a = rows.transpose();  // features x n
    for (size_t l = 0; l < weights.size(); ++l) {
        a = (weights[l] * a).colwise() + biases[l];
        if (l + 1 < weights.size()) a = a.cwiseMax(0.0);  // rectifier
    }
    return a.transpose();
}

Matrix FeedForwardNet::probabilities(const Matrix& rows) const {
    return tempered_softmax_rows(logits(rows), 1.0);
}

Vector tempered_softmax(const Vector& logits, double temperature) {
    if (temperature <= 0.0) throw_invalid("tempered_softmax: T must be > 0");
    if (!logits.allFinite()) throw_invalid("tempered_softmax: non-finite logits");
    Vector t = logits / temperature;
    const double mx = t.maxCoeff();
    Vector e = (t.array() - mx).exp();
    return e / e.sum();
}

Matrix tempered_softmax_rows(const Matrix& logits, double temperature) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        out.row(r) = tempered_softmax(logits.row(r).transpose(), temperature).transpose();
    }
    return out;
}

namespace {

constexpr double kProbClip = 1e-12;

double clipped_log(double p) { return std::log(std::max(p, kProbClip)); }

// Per-sample loss terms; the lambda = 0 path never touches the soft labels
// so its arithmetic matches plain supervised training exactly.
double loss_of_probs(const Matrix& probs, const std::vector<int>& hard_labels,
                     const Matrix& soft_labels, double lambda) {
    const Eigen::Index n = probs.rows();
    const Eigen::Index k = probs.cols();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int y = hard_labels[static_cast<size_t>(i)];
        const double hard = -clipped_log(probs(i, y));
        if (lambda == 0.0) {
            total += hard;
            continue;
        }
        double soft = 0.0;
        for (Eigen::Index c = 0; c < k; ++c) {
            soft -= soft_labels(i, c) * clipped_log(probs(i, c));
        }
        total += (1.0 - lambda) * hard + lambda * soft;
    }
    return total / static_cast<double>(n);
}

void check_class_labels(const std::vector<int>& labels, int n_classes) {
    if (n_classes < 2) throw_data("net: at least two classes are required");
    std::vector<bool> seen(static_cast<size_t>(n_classes), false);
    for (int y : labels) {
        if (y < 0 || y >= n_classes) throw_data("net: class index out of range");
        seen[static_cast<size_t>(y)] = true;
    }
    for (int c = 0; c < n_classes; ++c) {
        if (!seen[static_cast<size_t>(c)]) {
            throw_data("net: class " + std::to_string(c) + " absent from training data");
        }
    }
}

}  // namespace

double distillation_loss(const Matrix& student_logits, const std::vector<int>& hard_labels,
                         const Matrix& soft_labels, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw_invalid("distillation_loss: lambda out of range");
    if (student_logits.rows() != static_cast<Eigen::Index>(hard_labels.size())) {
        throw_invalid("distillation_loss: logit/label count mismatch");
    }
    if (lambda > 0.0 && (soft_labels.rows() != student_logits.rows() ||
                         soft_labels.cols() != student_logits.cols())) {
        throw_invalid("distillation_loss: soft label shape mismatch");
    }
    const Matrix probs = tempered_softmax_rows(student_logits, 1.0);
    return loss_of_probs(probs, hard_labels, soft_labels, lambda);
}

FeedForwardNet make_net(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw_invalid("net: need at least input and output layers");
    for (int s : layer_sizes) {
        if (s < 1) throw_invalid("net: every layer needs at least one unit");
    }
    FeedForwardNet net;
    net.layer_sizes = layer_sizes;
    std::mt19937_64 rng(mix_seed(seed, 0x1417));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double scale = std::sqrt(2.0 / fan_in);
        Matrix w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) w(r, c) = scale * gauss(rng);
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(Vector::Zero(fan_out));
    }
    return net;
}

NetGradients distillation_gradients(const FeedForwardNet& net, const Matrix& inputs,
                                    const std::vector<int>& hard_labels,
                                    const Matrix& soft_labels, double lambda) {
    const Eigen::Index n = inputs.rows();
    const size_t n_layers = net.weights.size();

    // Forward pass, keeping activations.
    std::vector<Matrix> acts;  // acts[l]: layer inputs (units x n)
    acts.push_back(inputs.transpose());
    for (size_t l = 0; l < n_layers; ++l) {
        Matrix z = (net.weights[l] * acts.back()).colwise() + net.biases[l];
        if (l + 1 < n_layers) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
    }
    const Matrix logits = acts.back().transpose();
    const Matrix probs = tempered_softmax_rows(logits, 1.0);

    NetGradients out;
    out.loss = loss_of_probs(probs, hard_labels, soft_labels, lambda);

    // d loss / d logits, averaged over the batch.
    Matrix delta(net.n_classes(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int y = hard_labels[static_cast<size_t>(i)];
        for (int c = 0; c < net.n_classes(); ++c) {
            const double p = probs(i, c);
            const double hard = p - (c == y ? 1.0 : 0.0);
            double g;
            if (lambda == 0.0) {
                g = hard;
            } else {
                g = (1.0 - lambda) * hard + lambda * (p - soft_labels(i, c));
            }
            delta(c, i) = g / static_cast<double>(n);
        }
    }

    out.d_weights.resize(n_layers);
    out.d_biases.resize(n_layers);
    for (size_t l = n_layers; l-- > 0;) {
        out.d_weights[l] = delta * acts[l].transpose();
        out.d_biases[l] = delta.rowwise().sum();
        if (l > 0) {
            Matrix back = net.weights[l].transpose() * delta;
            // Rectifier gate: the stored activation is already max(z, 0).
            delta = back.cwiseProduct(
                (acts[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return out;
}

namespace {

TrainedNet train_core(const Matrix& inputs, const std::vector<int>& hard_labels,
                      const Matrix& soft_labels, double lambda, int n_classes,
                      const std::vector<int>& hidden_sizes, const DistillConfig& opt) {
    opt.validate();
    if (inputs.rows() < 1 || inputs.cols() < 1) throw_data("net: empty training input");
    check_class_labels(hard_labels, n_classes);

    std::vector<int> layers;
    layers.push_back(static_cast<int>(inputs.cols()));
    for (int h : hidden_sizes) layers.push_back(h);
    layers.push_back(n_classes);

    TrainedNet trained;
    trained.net = make_net(layers, opt.seed);

    const Eigen::Index n = inputs.rows();
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(mix_seed(opt.seed, 0x0bad5eed));
    const Eigen::Index batch = std::min<Eigen::Index>(opt.batch_size, n);

    Matrix bx(batch, inputs.cols());
    Matrix bs(batch, lambda > 0.0 ? static_cast<Eigen::Index>(n_classes) : 0);
    std::vector<int> by(static_cast<size_t>(batch));

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index len = std::min<Eigen::Index>(batch, n - start);
            bx.conservativeResize(len, Eigen::NoChange);
            if (lambda > 0.0) bs.conservativeResize(len, Eigen::NoChange);
            by.resize(static_cast<size_t>(len));
            for (Eigen::Index r = 0; r < len; ++r) {
                const Eigen::Index id = order[static_cast<size_t>(start + r)];
                bx.row(r) = inputs.row(id);
                if (lambda > 0.0) bs.row(r) = soft_labels.row(id);
                by[static_cast<size_t>(r)] = hard_labels[static_cast<size_t>(id)];
            }
            NetGradients g = distillation_gradients(trained.net, bx, by, bs, lambda);
            for (size_t l = 0; l < trained.net.weights.size(); ++l) {
                trained.net.weights[l] -= opt.learning_rate * g.d_weights[l];
                trained.net.biases[l] -= opt.learning_rate * g.d_biases[l];
            }
        }
        // Epoch loss over the whole set in row order (fixed reduction order).
        trained.loss_history.push_back(
            distillation_loss(trained.net.logits(inputs), hard_labels, soft_labels, lambda));
    }
    return trained;
}

}  // namespace

TrainedNet train_net(const Matrix& inputs, const std::vector<int>& class_labels, int n_classes,
                     const std::vector<int>& hidden_sizes, const DistillConfig& opt) {
    return train_core(inputs, class_labels, Matrix(), 0.0, n_classes, hidden_sizes, opt);
}

FeedForwardNet train_teacher(const Matrix& privileged, const std::vector<int>& class_labels,
                             int n_classes, const std::vector<int>& hidden_sizes,
                             const DistillConfig& opt) {
    if (privileged.cols() == 0) throw_data("distill: teacher needs privileged features (m = 0)");
    return train_core(privileged, class_labels, Matrix(), 0.0, n_classes, hidden_sizes, opt).net;
}

DistilledModel train_distilled(const LupiDataset& dataset, const DistillConfig& config,
                               const std::vector<int>& hidden_sizes) {
    dataset.validate();
    config.validate();
    if (dataset.privileged_dim() == 0) {
        throw_data("distill: dataset has no privileged features (m = 0)");
    }

    std::vector<int> classes;
    classes.reserve(static_cast<size_t>(dataset.rows()));
    for (Eigen::Index i = 0; i < dataset.rows(); ++i) classes.push_back(dataset.class_index_of(i));

    DistilledModel model;
    model.config = config;

    DistillConfig teacher_opt = config;
    teacher_opt.lambda = 0.0;
    teacher_opt.seed = mix_seed(config.seed, 0x7eac);
    model.teacher = train_teacher(dataset.privileged, classes, dataset.n_classes, hidden_sizes,
                                  teacher_opt);

    model.soft_labels =
        tempered_softmax_rows(model.teacher.logits(dataset.privileged), config.temperature);

    TrainedNet student = train_core(dataset.standard, classes, model.soft_labels, config.lambda,
                                    dataset.n_classes, hidden_sizes, config);
    model.student = std::move(student.net);
    model.loss_history = std::move(student.loss_history);
    return model;
}

NetPrediction predict_net(const FeedForwardNet& net, const Matrix& rows) {
    NetPrediction out;
    out.probabilities = net.probabilities(rows);
    out.classes.reserve(static_cast<size_t>(rows.rows()));
    for (Eigen::Index r = 0; r < out.probabilities.rows(); ++r) {
        int best = 0;
        for (int c = 1; c < out.probabilities.cols(); ++c) {
            if (out.probabilities(r, c) > out.probabilities(r, best)) best = c;
        }
        out.classes.push_back(best);
    }
    return out;
}

NetPrediction predict_distilled(const DistilledModel& model, const Matrix& standard_rows) {
    return predict_net(model.student, standard_rows);
}

}  // namespace lupi
