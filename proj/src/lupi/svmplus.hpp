#pragma once

#include "lupi/common.hpp"
#include "lupi/dataset.hpp"
#include "lupi/kernels.hpp"
#include "lupi/qp.hpp"
#include "lupi/svm.hpp"

namespace lupi {

/// SVM+ hyperparameters: one kernel per feature space, the correction
/// weight gamma, the box multiplier kappa and per-sample costs C_i
/// (broadcast from a scalar in the common case).
struct SvmPlusConfig {
    KernelSpec kernel_standard;
    KernelSpec kernel_privileged;
    double kappa = 1.0;
    double gamma = 1.0;
    Vector C = Vector::Constant(1, 1.0);  // scalar broadcast when size 1

    double cost_of(Eigen::Index i) const { return C.size() == 1 ? C(0) : C(i); }
    void validate(Eigen::Index n_rows, bool for_training) const;
};

/// Dual solution of the SVM+ program. Prediction uses only the standard
/// kernel and rows; the privileged kernel is kept for audit.
struct SvmPlusModel {
    Vector alphas;                  // length L, 0 <= alpha_i <= kappa*C_i
    Vector deltas;                  // length L, 0 <= delta_i <= C_i
    double bias = 0.0;
    Matrix support_rows_standard;   // L x d
    std::vector<int> support_labels;
    KernelSpec kernel_standard;
    KernelSpec kernel_privileged;
    double kappa = 1.0;
    double gamma = 1.0;
    Vector C;
    KktReport solve_report;

    Eigen::Index input_dim() const { return support_rows_standard.cols(); }
};

/// Assembles the dual into the standard QP form over z = (alpha, delta):
///   H11 = (K + gamma K*) .* yy',  H12 = H21 = -gamma K* .* yy',
///   H22 = gamma K* .* yy',  f = (-1..-1, 0..0),
///   Aeq = [y 0; 0 y], beq = 0, lb = 0, ub = (kappa C.., C..).
/// gamma = 0 is accepted here (it zeroes every privileged term); training
/// itself requires gamma > 0.
QpProblem assemble_qp(const LupiDataset& dataset, const SvmPlusConfig& config);

SvmPlusModel train_svmplus(const LupiDataset& dataset, const SvmPlusConfig& config,
                           double tol = 1e-6);

SvmPrediction predict_svmplus(const SvmPlusModel& model, const Matrix& standard_rows);

Vector decision_values_svmplus(const SvmPlusModel& model, const Matrix& standard_rows);

}  // namespace lupi
