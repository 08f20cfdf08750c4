#pragma once

#include "lupi/common.hpp"
#include "lupi/dataset.hpp"

namespace lupi {

/// Fully connected net: rectifier hidden layers, softmax output. Forward
/// passes return logits; softmax is applied where probabilities are needed.
struct FeedForwardNet {
    std::vector<int> layer_sizes;    // input, hidden..., output (K classes)
    std::vector<Matrix> weights;     // weights[l]: layer_sizes[l+1] x layer_sizes[l]
    std::vector<Vector> biases;

    Eigen::Index input_dim() const { return layer_sizes.front(); }
    int n_classes() const { return layer_sizes.back(); }

    Matrix logits(const Matrix& rows) const;        // n x K
    Matrix probabilities(const Matrix& rows) const; // softmax(logits), T = 1
};

struct DistillConfig {
    double temperature = 1.0;  // > 0, applied only when soft labels are made
    double lambda = 0.0;       // in [0,1]
    int epochs = 200;
    int batch_size = 32;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Student + teacher pair; prediction uses the student on standard features
/// only. soft_labels are the teacher's tempered class probabilities on the
/// training rows.
struct DistilledModel {
    FeedForwardNet student;
    FeedForwardNet teacher;
    Matrix soft_labels;              // n x K, rows sum to 1
    DistillConfig config;
    std::vector<double> loss_history;  // per-epoch training loss (fixed order)
};

struct TrainedNet {
    FeedForwardNet net;
    std::vector<double> loss_history;
};

/// Numerically stable softmax(logits / T); T <= 0 is an error.
Vector tempered_softmax(const Vector& logits, double temperature);
Matrix tempered_softmax_rows(const Matrix& logits, double temperature);

/// Mean over samples of (1-lambda)*CE(hard) + lambda*CE(soft) against the
/// student's T=1 softmax. Probabilities are clipped at 1e-12 inside the logs.
double distillation_loss(const Matrix& student_logits, const std::vector<int>& hard_labels,
                         const Matrix& soft_labels, double lambda);

/// Seeded net construction (He-style init) shared by all trainers.
FeedForwardNet make_net(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Plain supervised trainer (hard labels only); also the lambda = 0 path of
/// distillation, with bit-identical arithmetic under the same seed.
TrainedNet train_net(const Matrix& inputs, const std::vector<int>& class_labels, int n_classes,
                     const std::vector<int>& hidden_sizes, const DistillConfig& opt);

/// Teacher on the privileged block.
FeedForwardNet train_teacher(const Matrix& privileged, const std::vector<int>& class_labels,
                             int n_classes, const std::vector<int>& hidden_sizes,
                             const DistillConfig& opt);

DistilledModel train_distilled(const LupiDataset& dataset, const DistillConfig& config,
                               const std::vector<int>& hidden_sizes);

struct NetPrediction {
    std::vector<int> classes;  // argmax, ties to the lowest index
    Matrix probabilities;      // n x K
};

NetPrediction predict_net(const FeedForwardNet& net, const Matrix& rows);
NetPrediction predict_distilled(const DistilledModel& model, const Matrix& standard_rows);

/// Loss and analytic parameter gradients of the distillation objective on a
/// fixed batch; used by the trainer and checked against finite differences.
struct NetGradients {
    double loss = 0.0;
    std::vector<Matrix> d_weights;
    std::vector<Vector> d_biases;
};

NetGradients distillation_gradients(const FeedForwardNet& net, const Matrix& inputs,
                                    const std::vector<int>& hard_labels,
                                    const Matrix& soft_labels, double lambda);

}  // namespace lupi
