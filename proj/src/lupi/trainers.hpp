#pragma once

#include "lupi/distill.hpp"
#include "lupi/eval.hpp"
#include "lupi/svm.hpp"
#include "lupi/svmplus.hpp"
#include "lupi/transfer.hpp"

namespace lupi {

/// Standard-set SVM (uses the standard block only).
class SvmTrainer : public Trainer {
public:
    SvmTrainer(KernelSpec kernel, double C) : kernel_(kernel), C_(C) {}
    std::string name() const override { return "standard-svm"; }
    std::unique_ptr<Predictor> train(const LupiDataset& data) const override;

private:
    KernelSpec kernel_;
    double C_;
};

class SvmPlusTrainer : public Trainer {
public:
    SvmPlusTrainer(SvmPlusConfig config, double tol = 1e-6)
        : config_(std::move(config)), tol_(tol) {}
    std::string name() const override { return "svmplus"; }
    std::unique_ptr<Predictor> train(const LupiDataset& data) const override;

private:
    SvmPlusConfig config_;
    double tol_;
};

class KtTrainer : public Trainer {
public:
    KtTrainer(MappingKind kind, KernelSpec downstream_kernel, double C, KtHyper hyper = {})
        : kind_(kind), kernel_(downstream_kernel), C_(C), hyper_(hyper) {}
    std::string name() const override {
        return kind_ == MappingKind::regression ? "kt-regression" : "kt-similarity";
    }
    std::unique_ptr<Predictor> train(const LupiDataset& data) const override;

private:
    MappingKind kind_;
    KernelSpec kernel_;
    double C_;
    KtHyper hyper_;
};

class DistillTrainer : public Trainer {
public:
    DistillTrainer(DistillConfig config, std::vector<int> hidden_sizes)
        : config_(config), hidden_(std::move(hidden_sizes)) {}
    std::string name() const override { return "distill"; }
    std::unique_ptr<Predictor> train(const LupiDataset& data) const override;

private:
    DistillConfig config_;
    std::vector<int> hidden_;
};

/// Plain softmax net on the standard block (the distillation baseline).
class NetTrainer : public Trainer {
public:
    NetTrainer(DistillConfig config, std::vector<int> hidden_sizes)
        : config_(config), hidden_(std::move(hidden_sizes)) {}
    std::string name() const override { return "standard-net"; }
    std::unique_ptr<Predictor> train(const LupiDataset& data) const override;

private:
    DistillConfig config_;
    std::vector<int> hidden_;
};

/// Always predicts one label; test scaffolding for the harness.
class ConstantTrainer : public Trainer {
public:
    explicit ConstantTrainer(int label) : label_(label) {}
    std::string name() const override { return "constant"; }
    std::unique_ptr<Predictor> train(const LupiDataset& data) const override;

private:
    int label_;
};

}  // namespace lupi
