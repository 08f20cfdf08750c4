#pragma once

#include "lupi/common.hpp"

namespace lupi {

/// Convex quadratic program in the standard form
///     minimize    0.5 z'Hz + f'z
///     subject to  Aeq z = beq,  lb <= z <= ub
/// with H symmetric positive semidefinite and finite bounds.
struct QpProblem {
    Matrix H;
    Vector f;
    Matrix Aeq;   // 0 x n when there are no equality constraints
    Vector beq;
    Vector lb;
    Vector ub;

    Eigen::Index dim() const { return f.size(); }
    Eigen::Index n_eq() const { return Aeq.rows(); }

    /// Checks symmetry (1e-10), consistent lengths and lb <= ub.
    void validate() const;
};

/// KKT residuals with multipliers recovered from the active sets of z.
/// A point passes verification iff every residual is <= the tolerance.
struct KktReport {
    double stationarity_residual = 0.0;
    double primal_feasibility = 0.0;
    double complementarity = 0.0;
    double tolerance_used = 0.0;

    bool passes() const {
        return stationarity_residual <= tolerance_used &&
               primal_feasibility <= tolerance_used &&
               complementarity <= tolerance_used;
    }
    double worst() const;
};

struct QpSolution {
    Vector z;
    double objective = 0.0;
    int iterations = 0;
    KktReport kkt;
};

struct QpOptions {
    double tol = 1e-6;
    int max_iter = 0;  // 0 -> 100 * dimension
};

/// Interior-point solve. Throws on inconsistent constraints (detected via a
/// bound-constrained equality-projection residual before iterating) and when
/// max_iter is exhausted without meeting the KKT tolerance (the message
/// carries the residuals reached).
QpSolution solve(const QpProblem& problem, const QpOptions& options = {});

/// Independent optimality check: recovers equality multipliers by a small
/// convex fit and bound multipliers from the active sets, then reports the
/// stationarity, feasibility and complementarity residuals of z.
KktReport verify_kkt(const QpProblem& problem, const Vector& z, double tol);

}  // namespace lupi
