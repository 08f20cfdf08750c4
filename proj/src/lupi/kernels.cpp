#include "lupi/kernels.hpp"

#include <cmath>

namespace lupi {

KernelSpec KernelSpec::linear() {
    KernelSpec s;
    s.family = KernelFamily::linear;
    return s;
}

KernelSpec KernelSpec::polynomial(int degree, double gamma, double coef0) {
    KernelSpec s;
    s.family = KernelFamily::polynomial;
    s.degree = degree;
    s.gamma = gamma;
    s.coef0 = coef0;
    return s;
}

KernelSpec KernelSpec::rbf(double gamma) {
    KernelSpec s;
    s.family = KernelFamily::rbf;
    s.gamma = gamma;
    return s;
}

void KernelSpec::validate() const {
    switch (family) {
        case KernelFamily::linear:
            return;
        case KernelFamily::polynomial:
            if (degree < 1) throw_invalid("polynomial kernel requires degree >= 1");
            if (gamma <= 0.0) throw_invalid("polynomial kernel requires gamma > 0");
            return;
        case KernelFamily::rbf:
            if (gamma <= 0.0) throw_invalid("rbf kernel requires gamma > 0");
            return;
    }
    throw_invalid("unknown kernel family");
}

const char* kernel_family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::linear: return "linear";
        case KernelFamily::polynomial: return "polynomial";
        case KernelFamily::rbf: return "rbf";
    }
    return "unknown";
}

KernelFamily kernel_family_from_name(const std::string& name) {
    if (name == "linear") return KernelFamily::linear;
    if (name == "polynomial" || name == "poly") return KernelFamily::polynomial;
    if (name == "rbf") return KernelFamily::rbf;
    throw_invalid("unknown kernel family: " + name);
}

namespace {

// Integer power by squaring; keeps poly kernels exact for small degrees.
double powi(double base, int times) {
    double tmp = base, ret = 1.0;
    for (int t = times; t > 0; t /= 2) {
        if (t % 2 == 1) ret *= tmp;
        tmp = tmp * tmp;
    }
    return ret;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& z) {
    if (x.size() != z.size()) {
        throw_invalid("kernel_eval: dimension mismatch (" + std::to_string(x.size()) +
                      " vs " + std::to_string(z.size()) + ")");
    }
    spec.validate();
    switch (spec.family) {
        case KernelFamily::linear:
            return x.dot(z);
        case KernelFamily::polynomial:
            return powi(spec.gamma * x.dot(z) + spec.coef0, spec.degree);
        case KernelFamily::rbf:
            return std::exp(-spec.gamma * (x - z).squaredNorm());
    }
    throw_invalid("unknown kernel family");
}

Matrix gram(const KernelSpec& spec, const Matrix& rows) {
    if (rows.rows() == 0) throw_invalid("gram: empty input");
    spec.validate();
    const Eigen::Index n = rows.rows();
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = kernel_eval(spec, rows.row(i).transpose(), rows.row(j).transpose());
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

Matrix gram_cross(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw_invalid("gram_cross: column mismatch");
    spec.validate();
    Matrix g(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            g(i, j) = kernel_eval(spec, a.row(i).transpose(), b.row(j).transpose());
        }
    }
    return g;
}

}  // namespace lupi
