#pragma once

#include "lupi/common.hpp"

namespace lupi {

enum class KernelFamily { linear, polynomial, rbf };

/// Kernel family plus the hyperparameters the family actually uses.
/// linear:      k(x,z) = <x,z>
/// polynomial:  k(x,z) = (gamma*<x,z> + coef0)^degree
/// rbf:         k(x,z) = exp(-gamma*|x-z|^2)
struct KernelSpec {
    KernelFamily family = KernelFamily::linear;
    int degree = 3;       // polynomial only
    double gamma = 1.0;   // rbf width / polynomial scale
    double coef0 = 0.0;   // polynomial offset

    static KernelSpec linear();
    static KernelSpec polynomial(int degree, double gamma = 1.0, double coef0 = 0.0);
    static KernelSpec rbf(double gamma);

    /// Throws invalid_argument if a required parameter is missing/out of range.
    void validate() const;
};

const char* kernel_family_name(KernelFamily f);
KernelFamily kernel_family_from_name(const std::string& name);

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& z);

/// Dense Gram matrix G[i][j] = k(rows[i], rows[j]). Upper triangle is
/// computed and mirrored, so the result is exactly symmetric.
Matrix gram(const KernelSpec& spec, const Matrix& rows);

/// Cross-Gram: G[i][j] = k(a[i], b[j]).
Matrix gram_cross(const KernelSpec& spec, const Matrix& a, const Matrix& b);

}  // namespace lupi
