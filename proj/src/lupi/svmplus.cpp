#include "lupi/svmplus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lupi {

void SvmPlusConfig::validate(Eigen::Index n_rows, bool for_training) const {
    kernel_standard.validate();
    kernel_privileged.validate();
    if (kappa <= 0.0) throw_invalid("svmplus: kappa must be > 0");
    if (for_training && gamma <= 0.0) throw_invalid("svmplus: gamma must be > 0");
    if (!for_training && gamma < 0.0) throw_invalid("svmplus: gamma must be >= 0");
    if (C.size() != 1 && C.size() != n_rows) {
        throw_invalid("svmplus: C must be a scalar or one value per sample");
    }
    for (Eigen::Index i = 0; i < C.size(); ++i) {
        if (C(i) <= 0.0) throw_invalid("svmplus: every C_i must be > 0");
    }
}

QpProblem assemble_qp(const LupiDataset& dataset, const SvmPlusConfig& config) {
    dataset.validate();
    if (dataset.privileged_dim() == 0) {
        throw_data("svmplus: dataset has no privileged features (m = 0)");
    }
    if (!dataset.is_binary()) throw_data("svmplus: binary labels required");
    const Eigen::Index L = dataset.rows();
    config.validate(L, /*for_training=*/false);

    Vector y(L);
    for (Eigen::Index i = 0; i < L; ++i) y(i) = dataset.labels[static_cast<size_t>(i)];
    const Matrix yy = y * y.transpose();

    const Matrix K = gram(config.kernel_standard, dataset.standard);
    const Matrix Kp = gram(config.kernel_privileged, dataset.privileged);
    const Matrix Ky = K.cwiseProduct(yy);
    const Matrix Kpy = Kp.cwiseProduct(yy);

    QpProblem qp;
    qp.H.resize(2 * L, 2 * L);
    qp.H.topLeftCorner(L, L) = Ky + config.gamma * Kpy;
    qp.H.topRightCorner(L, L) = -config.gamma * Kpy;
    qp.H.bottomLeftCorner(L, L) = -config.gamma * Kpy;
    qp.H.bottomRightCorner(L, L) = config.gamma * Kpy;

    qp.f.resize(2 * L);
    qp.f.head(L).setConstant(-1.0);
    qp.f.tail(L).setZero();

    qp.Aeq = Matrix::Zero(2, 2 * L);
    qp.Aeq.row(0).head(L) = y.transpose();
    qp.Aeq.row(1).tail(L) = y.transpose();
    qp.beq = Vector::Zero(2);

    qp.lb = Vector::Zero(2 * L);
    qp.ub.resize(2 * L);
    for (Eigen::Index i = 0; i < L; ++i) {
        qp.ub(i) = config.kappa * config.cost_of(i);
        qp.ub(L + i) = config.cost_of(i);
    }
    return qp;
}

SvmPlusModel train_svmplus(const LupiDataset& dataset, const SvmPlusConfig& config,
                           double tol) {
    config.validate(dataset.rows(), /*for_training=*/true);
    {
        bool pos = false, neg = false;
        for (int yv : dataset.labels) (yv > 0 ? pos : neg) = true;
        if (!pos || !neg) throw_data("svmplus: training data contains a single class");
    }
    const QpProblem qp = assemble_qp(dataset, config);
    QpOptions opt;
    opt.tol = tol;
    const QpSolution sol = solve(qp, opt);

    const Eigen::Index L = dataset.rows();
    SvmPlusModel model;
    model.alphas = sol.z.head(L);
    model.deltas = sol.z.tail(L);
    model.support_rows_standard = dataset.standard;
    model.support_labels = dataset.labels;
    model.kernel_standard = config.kernel_standard;
    model.kernel_privileged = config.kernel_privileged;
    model.kappa = config.kappa;
    model.gamma = config.gamma;
    model.C.resize(L);
    for (Eigen::Index i = 0; i < L; ++i) model.C(i) = config.cost_of(i);
    model.solve_report = sol.kkt;

    // Bias: B = y_j - F_j - gamma*fstar_j at an index j whose alpha and
    // delta are both strictly interior; averaged over all such j.
    Vector y(L);
    for (Eigen::Index i = 0; i < L; ++i) y(i) = dataset.labels[static_cast<size_t>(i)];
    const Matrix K = gram(config.kernel_standard, dataset.standard);
    const Matrix Kp = gram(config.kernel_privileged, dataset.privileged);
    const Vector F = K * model.alphas.cwiseProduct(y);
    const Vector fstar = Kp * (model.alphas - model.deltas).cwiseProduct(y);

    const double margin = 10.0 * tol;
    double bias_sum = 0.0;
    int n_free = 0;
    for (Eigen::Index j = 0; j < L; ++j) {
        const double ca = model.kappa * model.C(j);
        const double cd = model.C(j);
        const bool alpha_free = model.alphas(j) > margin && model.alphas(j) < ca - margin;
        const bool delta_free = model.deltas(j) > margin && model.deltas(j) < cd - margin;
        if (alpha_free && delta_free) {
            bias_sum += y(j) - F(j) - config.gamma * fstar(j);
            ++n_free;
        }
    }
    if (n_free > 0) {
        model.bias = bias_sum / n_free;
    } else {
        // Fall back to the bias interval from the alpha-side conditions:
        // rows with free alpha pin B exactly; rows at 0 or kappa*C bound it
        // from one side depending on the label.
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < L; ++j) {
            const double ca = model.kappa * model.C(j);
            const double g = F(j) + config.gamma * fstar(j);
            const double e = y(j) - g;
            const bool at_zero = model.alphas(j) <= margin;
            const bool at_cap = model.alphas(j) >= ca - margin;
            if (!at_zero && !at_cap) {
                lo = std::max(lo, e);
                hi = std::min(hi, e);
            } else if (at_zero) {
                if (y(j) > 0) lo = std::max(lo, e);
                else hi = std::min(hi, e);
            } else {
                if (y(j) > 0) hi = std::min(hi, e);
                else lo = std::max(lo, e);
            }
        }
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
            throw_numeric("svmplus: no valid bias index and empty KKT interval");
        }
        if (!std::isfinite(lo)) model.bias = hi;
        else if (!std::isfinite(hi)) model.bias = lo;
        else if (lo > hi + 1e-6 * (1.0 + std::abs(lo) + std::abs(hi))) {
            throw_numeric("svmplus: empty bias interval [" + format_sig(lo, 6) + ", " +
                          format_sig(hi, 6) + "]");
        } else {
            model.bias = 0.5 * (lo + hi);
        }
    }
    return model;
}

Vector decision_values_svmplus(const SvmPlusModel& model, const Matrix& standard_rows) {
    if (standard_rows.cols() != model.support_rows_standard.cols()) {
        throw_invalid("svmplus: prediction rows have " + std::to_string(standard_rows.cols()) +
                      " columns, model expects " +
                      std::to_string(model.support_rows_standard.cols()));
    }
    const Eigen::Index L = model.support_rows_standard.rows();
    Vector raw = Vector::Constant(standard_rows.rows(), model.bias);
    for (Eigen::Index i = 0; i < L; ++i) {
        if (model.alphas(i) <= 0.0) continue;
        const double c = model.alphas(i) * model.support_labels[static_cast<size_t>(i)];
        for (Eigen::Index r = 0; r < standard_rows.rows(); ++r) {
            raw(r) += c * kernel_eval(model.kernel_standard,
                                      model.support_rows_standard.row(i).transpose(),
                                      standard_rows.row(r).transpose());
        }
    }
    return raw;
}

SvmPrediction predict_svmplus(const SvmPlusModel& model, const Matrix& standard_rows) {
    SvmPrediction out;
    out.raw = decision_values_svmplus(model, standard_rows);
    out.labels.reserve(static_cast<size_t>(standard_rows.rows()));
    for (Eigen::Index r = 0; r < standard_rows.rows(); ++r) {
        out.labels.push_back(out.raw(r) >= 0.0 ? +1 : -1);
    }
    return out;
}

}  // namespace lupi
