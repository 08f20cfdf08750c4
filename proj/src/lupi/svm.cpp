#include "lupi/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lupi {

namespace {

void check_binary(const std::vector<int>& labels) {
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y == +1) pos = true;
        else if (y == -1) neg = true;
        else throw_invalid("svm: labels must be -1/+1");
    }
    if (!pos || !neg) throw_data("svm: training data contains a single class");
}

}  // namespace

SvmModel train_svm(const Matrix& standard, const std::vector<int>& labels,
                   const KernelSpec& kernel, double C, double tol) {
    if (C <= 0.0) throw_invalid("svm: C must be > 0");
    if (standard.rows() != static_cast<Eigen::Index>(labels.size())) {
        throw_invalid("svm: row/label count mismatch");
    }
    check_binary(labels);
    kernel.validate();

    const Eigen::Index n = standard.rows();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<size_t>(i)];

    const Matrix G = gram(kernel, standard);

    QpProblem qp;
    qp.H = G.cwiseProduct(y * y.transpose());
    qp.f = Vector::Constant(n, -1.0);
    qp.Aeq = y.transpose();
    qp.beq = Vector::Zero(1);
    qp.lb = Vector::Zero(n);
    qp.ub = Vector::Constant(n, C);

    QpOptions opt;
    opt.tol = tol;
    const QpSolution sol = solve(qp, opt);

    SvmModel model;
    model.alphas = sol.z;
    model.support_rows = standard;
    model.support_labels = labels;
    model.kernel = kernel;
    model.C = C;

    // F_i = sum_j alpha_j y_j K(x_j, x_i); e_i = y_i - F_i is the bias that
    // makes row i sit exactly on the margin.
    Vector coeff = sol.z.cwiseProduct(y);
    Vector F = G * coeff;
    const double margin = 10.0 * tol * std::max(1.0, C);

    double bias_sum = 0.0;
    int n_free = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sol.z(i) > margin && sol.z(i) < C - margin) {
            bias_sum += y(i) - F(i);
            ++n_free;
        }
    }
    if (n_free > 0) {
        model.bias = bias_sum / n_free;
    } else {
        // Midpoint of the bias interval implied by the bound-active rows.
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = y(i) - F(i);
            const bool at_zero = sol.z(i) <= margin;
            const bool at_c = sol.z(i) >= C - margin;
            if (at_zero) {
                if (y(i) > 0) lo = std::max(lo, e);
                else hi = std::min(hi, e);
            } else if (at_c) {
                if (y(i) > 0) hi = std::min(hi, e);
                else lo = std::max(lo, e);
            }
        }
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
            throw_numeric("svm: cannot determine bias (no constraints on it)");
        }
        if (!std::isfinite(lo)) model.bias = hi;
        else if (!std::isfinite(hi)) model.bias = lo;
        else if (lo > hi + 1e-6 * (1.0 + std::abs(lo) + std::abs(hi))) {
            throw_numeric("svm: empty bias interval [" + format_sig(lo, 6) + ", " +
                          format_sig(hi, 6) + "]");
        } else {
            model.bias = 0.5 * (lo + hi);
        }
    }
    return model;
}

Vector decision_values_svm(const SvmModel& model, const Matrix& rows) {
    if (rows.cols() != model.support_rows.cols()) {
        throw_invalid("svm: prediction rows have " + std::to_string(rows.cols()) +
                      " columns, model expects " + std::to_string(model.support_rows.cols()));
    }
    const Eigen::Index n = model.support_rows.rows();
    Vector coeff(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        coeff(i) = model.alphas(i) * model.support_labels[static_cast<size_t>(i)];
    }
    Vector raw = Vector::Constant(rows.rows(), model.bias);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (model.alphas(i) <= 0.0) continue;
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            raw(r) += coeff(i) * kernel_eval(model.kernel, model.support_rows.row(i).transpose(),
                                             rows.row(r).transpose());
        }
    }
    return raw;
}

SvmPrediction predict_svm(const SvmModel& model, const Matrix& rows) {
    SvmPrediction out;
    out.raw = decision_values_svm(model, rows);
    out.labels.reserve(static_cast<size_t>(rows.rows()));
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        out.labels.push_back(out.raw(r) >= 0.0 ? +1 : -1);
    }
    return out;
}

}  // namespace lupi
