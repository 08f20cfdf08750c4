#include "lupi/trainers.hpp"

namespace lupi {

namespace {

class SvmPredictor : public Predictor {
public:
    explicit SvmPredictor(SvmModel model) : model_(std::move(model)) {}
    std::vector<int> predict(const Matrix& rows) const override {
        return predict_svm(model_, rows).labels;
    }

private:
    SvmModel model_;
};

class SvmPlusPredictor : public Predictor {
public:
    explicit SvmPlusPredictor(SvmPlusModel model) : model_(std::move(model)) {}
    std::vector<int> predict(const Matrix& rows) const override {
        return predict_svmplus(model_, rows).labels;
    }

private:
    SvmPlusModel model_;
};

class KtPredictor : public Predictor {
public:
    explicit KtPredictor(KtModel model) : model_(std::move(model)) {}
    std::vector<int> predict(const Matrix& rows) const override {
        return predict_kt(model_, rows).labels;
    }

private:
    KtModel model_;
};

// Maps class indices back to the dataset's label encoding.
std::vector<int> classes_to_labels(const std::vector<int>& classes, int n_classes) {
    std::vector<int> out;
    out.reserve(classes.size());
    for (int c : classes) out.push_back(n_classes == 2 ? (c == 0 ? -1 : +1) : c);
    return out;
}

class NetPredictor : public Predictor {
public:
    NetPredictor(FeedForwardNet net, int n_classes)
        : net_(std::move(net)), n_classes_(n_classes) {}
    std::vector<int> predict(const Matrix& rows) const override {
        return classes_to_labels(predict_net(net_, rows).classes, n_classes_);
    }

private:
    FeedForwardNet net_;
    int n_classes_;
};

class ConstantPredictor : public Predictor {
public:
    explicit ConstantPredictor(int label) : label_(label) {}
    std::vector<int> predict(const Matrix& rows) const override {
        return std::vector<int>(static_cast<size_t>(rows.rows()), label_);
    }

private:
    int label_;
};

}  // namespace

std::unique_ptr<Predictor> SvmTrainer::train(const LupiDataset& data) const {
    return std::make_unique<SvmPredictor>(train_svm(data.standard, data.labels, kernel_, C_));
}

std::unique_ptr<Predictor> SvmPlusTrainer::train(const LupiDataset& data) const {
    return std::make_unique<SvmPlusPredictor>(train_svmplus(data, config_, tol_));
}

std::unique_ptr<Predictor> KtTrainer::train(const LupiDataset& data) const {
    return std::make_unique<KtPredictor>(train_kt(data, kind_, kernel_, C_, hyper_));
}

std::unique_ptr<Predictor> DistillTrainer::train(const LupiDataset& data) const {
    DistilledModel model = train_distilled(data, config_, hidden_);
    return std::make_unique<NetPredictor>(std::move(model.student), data.n_classes);
}

std::unique_ptr<Predictor> NetTrainer::train(const LupiDataset& data) const {
    std::vector<int> classes;
    classes.reserve(static_cast<size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i) classes.push_back(data.class_index_of(i));
    TrainedNet trained = train_net(data.standard, classes, data.n_classes, hidden_, config_);
    return std::make_unique<NetPredictor>(std::move(trained.net), data.n_classes);
}

std::unique_ptr<Predictor> ConstantTrainer::train(const LupiDataset&) const {
    return std::make_unique<ConstantPredictor>(label_);
}

}  // namespace lupi
