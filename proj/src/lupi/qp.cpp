#include "lupi/qp.hpp"

#include <algorithm>
#include <cmath>

namespace lupi {

void QpProblem::validate() const {
    const Eigen::Index n = f.size();
    if (n < 1) throw_invalid("qp: empty problem");
    if (H.rows() != n || H.cols() != n) throw_invalid("qp: H dimension mismatch");
    if (lb.size() != n || ub.size() != n) throw_invalid("qp: bound length mismatch");
    if (Aeq.rows() != beq.size()) throw_invalid("qp: Aeq/beq row mismatch");
    if (Aeq.rows() > 0 && Aeq.cols() != n) throw_invalid("qp: Aeq column mismatch");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw_invalid("qp: H is not symmetric");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(lb(i) <= ub(i))) throw_invalid("qp: lb > ub at index " + std::to_string(i));
        if (!std::isfinite(lb(i)) || !std::isfinite(ub(i))) {
            throw_invalid("qp: bounds must be finite");
        }
    }
    if (!H.allFinite() || !f.allFinite() || (Aeq.size() > 0 && !Aeq.allFinite()) ||
        (beq.size() > 0 && !beq.allFinite())) {
        throw_invalid("qp: non-finite problem data");
    }
}

double KktReport::worst() const {
    return std::max({stationarity_residual, primal_feasibility, complementarity});
}

namespace {

double objective_of(const QpProblem& p, const Vector& z) {
    return 0.5 * z.dot(p.H * z) + p.f.dot(z);
}

// Ridge H by 1e-10 when an LDLT pass suggests the smallest eigenvalue dipped
// below zero from numerical noise (Gram-built Hessians are often exactly
// semidefinite).
Matrix regularized_hessian(const Matrix& H) {
    Eigen::LDLT<Matrix> ldlt(H);
    bool needs_ridge = ldlt.info() != Eigen::Success;
    if (!needs_ridge) {
        const auto d = ldlt.vectorD();
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (d(i) < 0.0) { needs_ridge = true; break; }
        }
    }
    if (!needs_ridge) return H;
    Matrix out = H;
    out.diagonal().array() += 1e-10;
    return out;
}

struct Presolved {
    QpProblem reduced;
    std::vector<Eigen::Index> keep;   // reduced index -> original index
    Vector fixed_values;              // original dimension; valid where fixed
    std::vector<bool> is_fixed;
};

// Variables with lb == ub (to machine precision) are substituted out; the
// interior-point iteration needs strictly positive slack on both sides.
Presolved presolve_fixed(const QpProblem& p) {
    Presolved out;
    const Eigen::Index n = p.dim();
    out.is_fixed.assign(static_cast<size_t>(n), false);
    out.fixed_values = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (p.ub(i) - p.lb(i) < 1e-14 * (1.0 + std::abs(p.lb(i)))) {
            out.is_fixed[static_cast<size_t>(i)] = true;
            out.fixed_values(i) = 0.5 * (p.lb(i) + p.ub(i));
        } else {
            out.keep.push_back(i);
        }
    }
    const Eigen::Index r = static_cast<Eigen::Index>(out.keep.size());
    if (r == n) {
        out.reduced = p;
        return out;
    }
    QpProblem q;
    q.H.resize(r, r);
    q.f.resize(r);
    q.lb.resize(r);
    q.ub.resize(r);
    Vector xf = out.fixed_values;
    for (Eigen::Index a = 0; a < r; ++a) {
        const Eigen::Index i = out.keep[static_cast<size_t>(a)];
        q.f(a) = p.f(i);
        q.lb(a) = p.lb(i);
        q.ub(a) = p.ub(i);
        for (Eigen::Index b = 0; b < r; ++b) {
            q.H(a, b) = p.H(i, out.keep[static_cast<size_t>(b)]);
        }
        // Fixed coordinates shift the linear term of the survivors.
        for (Eigen::Index j = 0; j < n; ++j) {
            if (out.is_fixed[static_cast<size_t>(j)]) q.f(a) += p.H(i, j) * xf(j);
        }
    }
    q.Aeq.resize(p.n_eq(), r);
    q.beq = p.beq;
    for (Eigen::Index e = 0; e < p.n_eq(); ++e) {
        for (Eigen::Index a = 0; a < r; ++a) {
            q.Aeq(e, a) = p.Aeq(e, out.keep[static_cast<size_t>(a)]);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (out.is_fixed[static_cast<size_t>(j)]) q.beq(e) -= p.Aeq(e, j) * xf(j);
        }
    }
    out.reduced = q;
    return out;
}

struct IpmResult {
    Vector z;
    Vector y;  // equality multipliers
    int iterations = 0;
    bool converged = false;
    double dual_res = 0.0;
    double eq_res = 0.0;
    double gap = 0.0;
};

// Infeasible-start Mehrotra predictor-corrector for the box+equality QP.
// Slacks sl = z-lb, su = ub-z stay strictly positive; each step solves the
// reduced system (H+D)dz - A'dy = r via an LLT of H+D and a small Schur
// complement on the equality block.
IpmResult ipm_solve(const QpProblem& p, double target, int max_iter) {
    const Eigen::Index n = p.dim();
    const Eigen::Index me = p.n_eq();

    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = 0.5 * (p.lb(i) + p.ub(i));
    Vector y = Vector::Zero(me);
    Vector zl = Vector::Ones(n);
    Vector zu = Vector::Ones(n);

    auto slacks = [&](const Vector& x, Vector& sl, Vector& su) {
        sl = x - p.lb;
        su = p.ub - x;
    };

    IpmResult res;
    Vector sl(n), su(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        slacks(z, sl, su);

        Vector r_dual = p.H * z + p.f - zl + zu;
        if (me > 0) r_dual -= p.Aeq.transpose() * y;
        Vector r_eq = me > 0 ? Vector(p.Aeq * z - p.beq) : Vector();

        const double mu = (sl.dot(zl) + su.dot(zu)) / static_cast<double>(2 * n);
        res.dual_res = r_dual.cwiseAbs().maxCoeff();
        res.eq_res = me > 0 ? r_eq.cwiseAbs().maxCoeff() : 0.0;
        res.gap = mu * static_cast<double>(2 * n);
        res.iterations = iter;
        if (res.dual_res <= target && res.eq_res <= target &&
            res.gap <= target * static_cast<double>(n)) {
            res.converged = true;
            break;
        }

        Vector d = zl.cwiseQuotient(sl) + zu.cwiseQuotient(su);
        Matrix M = p.H;
        M.diagonal() += d;
        Eigen::LLT<Matrix> llt(M);
        double ridge = 1e-12 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
        while (llt.info() != Eigen::Success && ridge < 1e6) {
            Matrix M2 = M;
            M2.diagonal().array() += ridge;
            llt.compute(M2);
            ridge *= 100.0;
        }
        if (llt.info() != Eigen::Success) {
            throw_numeric("qp: failed to factorize the interior-point system");
        }

        Matrix schur;
        Matrix MinvAt;
        if (me > 0) {
            MinvAt = llt.solve(p.Aeq.transpose());
            schur = p.Aeq * MinvAt;
        }

        auto solve_kkt = [&](const Vector& r1, const Vector& r2, Vector& dz, Vector& dy) {
            // (H+D) dz - Aeq' dy = r1 ;  Aeq dz = r2
            if (me == 0) {
                dz = llt.solve(r1);
                dy.resize(0);
                return;
            }
            Vector t = llt.solve(r1);
            dy = schur.ldlt().solve(r2 - p.Aeq * t);
            dz = t + MinvAt * dy;
        };

        auto step_len = [&](const Vector& v, const Vector& dv, double cap) {
            double a = cap;
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
            }
            return a;
        };

        // Affine (predictor) direction.
        Vector rc_l = -sl.cwiseProduct(zl);
        Vector rc_u = -su.cwiseProduct(zu);
        Vector r1 = -r_dual + rc_l.cwiseQuotient(sl) - rc_u.cwiseQuotient(su);
        Vector dz_a, dy_a;
        solve_kkt(r1, me > 0 ? Vector(-r_eq) : Vector(), dz_a, dy_a);
        Vector dzl_a = (rc_l - zl.cwiseProduct(dz_a)).cwiseQuotient(sl);
        Vector dzu_a = (rc_u + zu.cwiseProduct(dz_a)).cwiseQuotient(su);

        double ap = std::min(step_len(sl, dz_a, 1.0), step_len(su, Vector(-dz_a), 1.0));
        double ad = std::min(step_len(zl, dzl_a, 1.0), step_len(zu, dzu_a, 1.0));
        const double mu_aff =
            ((sl + ap * dz_a).dot(zl + ad * dzl_a) + (su - ap * dz_a).dot(zu + ad * dzu_a)) /
            static_cast<double>(2 * n);
        const double sigma = mu > 0 ? std::pow(mu_aff / mu, 3.0) : 0.0;

        // Corrector with centering; the affine products enter the
        // complementarity targets.
        const double smu = sigma * mu;
        for (Eigen::Index i = 0; i < n; ++i) {
            rc_l(i) = -sl(i) * zl(i) - dz_a(i) * dzl_a(i) + smu;
            rc_u(i) = -su(i) * zu(i) + dz_a(i) * dzu_a(i) + smu;
        }
        r1 = -r_dual + rc_l.cwiseQuotient(sl) - rc_u.cwiseQuotient(su);
        Vector dz, dy;
        solve_kkt(r1, me > 0 ? Vector(-r_eq) : Vector(), dz, dy);
        Vector dzl = (rc_l - zl.cwiseProduct(dz)).cwiseQuotient(sl);
        Vector dzu = (rc_u + zu.cwiseProduct(dz)).cwiseQuotient(su);

        const double tau = 0.995;
        ap = tau * std::min(step_len(sl, dz, 1.0 / tau), step_len(su, Vector(-dz), 1.0 / tau));
        ad = tau * std::min(step_len(zl, dzl, 1.0 / tau), step_len(zu, dzu, 1.0 / tau));
        ap = std::min(ap, 1.0);
        ad = std::min(ad, 1.0);

        z += ap * dz;
        zl += ad * dzl;
        zu += ad * dzu;
        if (me > 0) y += ad * dy;
        res.iterations = iter + 1;
    }
    res.z = z;
    res.y = y;
    return res;
}

// Equality feasibility probe: minimize |Aeq z - beq|^2 over the box. The
// subproblem has no equality rows, so it reuses the same interior-point
// iteration without recursion.
void check_equality_feasible(const QpProblem& p, double tol) {
    if (p.n_eq() == 0) return;
    QpProblem probe;
    probe.H = 2.0 * p.Aeq.transpose() * p.Aeq;
    probe.H = regularized_hessian(probe.H);
    probe.f = -2.0 * p.Aeq.transpose() * p.beq;
    probe.Aeq.resize(0, p.dim());
    probe.beq.resize(0);
    probe.lb = p.lb;
    probe.ub = p.ub;
    IpmResult r = ipm_solve(probe, 1e-10, 300);
    const double resid = (p.Aeq * r.z - p.beq).cwiseAbs().maxCoeff();
    // The probe minimizes a squared residual, so its answer is only accurate
    // to about the square root of the solver precision. Genuinely infeasible
    // constraints overshoot this by orders of magnitude.
    const double allowed = std::max(100.0 * tol, 1e-4 * (1.0 + p.beq.cwiseAbs().maxCoeff()));
    if (resid > allowed) {
        throw_numeric("qp: infeasible constraints (equality-projection residual " +
                      format_sig(resid, 3) + ")");
    }
}

}  // namespace

KktReport verify_kkt(const QpProblem& problem, const Vector& z, double tol) {
    problem.validate();
    const Eigen::Index n = problem.dim();
    if (z.size() != n) throw_invalid("verify_kkt: z has wrong dimension");
    const Eigen::Index me = problem.n_eq();

    KktReport report;
    report.tolerance_used = tol;

    double bound_viol = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        bound_viol = std::max(bound_viol, problem.lb(i) - z(i));
        bound_viol = std::max(bound_viol, z(i) - problem.ub(i));
    }
    double eq_viol = me > 0 ? (problem.Aeq * z - problem.beq).cwiseAbs().maxCoeff() : 0.0;
    report.primal_feasibility = std::max(0.0, std::max(bound_viol, eq_viol));

    const double span = (problem.ub - problem.lb).cwiseAbs().maxCoeff();
    const double act_tol = std::max(1e-7 * (1.0 + span), 10.0 * tol);
    std::vector<bool> at_lb(static_cast<size_t>(n)), at_ub(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        at_lb[static_cast<size_t>(i)] = z(i) - problem.lb(i) <= act_tol;
        at_ub[static_cast<size_t>(i)] = problem.ub(i) - z(i) <= act_tol;
    }

    const Vector g = problem.H * z + problem.f;

    // Violation of stationarity for a candidate multiplier vector: active
    // bounds absorb the correctly signed part of the gradient, everything
    // else must vanish.
    auto violation = [&](const Vector& mu) {
        Vector r = g;
        if (me > 0) r -= problem.Aeq.transpose() * mu;
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool lo = at_lb[static_cast<size_t>(i)];
            const bool hi = at_ub[static_cast<size_t>(i)];
            if (lo && hi) v(i) = 0.0;
            else if (lo) v(i) = std::min(r(i), 0.0);
            else if (hi) v(i) = std::max(r(i), 0.0);
            else v(i) = r(i);
        }
        return v;
    };

    Vector mu = Vector::Zero(me);
    if (me > 0) {
        // Minimize |violation(mu)|^2: alternate between fitting mu by least
        // squares on the currently unabsorbed coordinates and refreshing
        // that set. Falls back to the best iterate seen.
        Vector best_mu = mu;
        double best = violation(mu).squaredNorm();
        for (int pass = 0; pass < 50; ++pass) {
            Vector r = g - problem.Aeq.transpose() * mu;
            std::vector<Eigen::Index> active_rows;
            for (Eigen::Index i = 0; i < n; ++i) {
                const bool lo = at_lb[static_cast<size_t>(i)];
                const bool hi = at_ub[static_cast<size_t>(i)];
                if (lo && hi) continue;
                if (lo && r(i) >= 0.0) continue;
                if (hi && r(i) <= 0.0) continue;
                active_rows.push_back(i);
            }
            Matrix At(static_cast<Eigen::Index>(active_rows.size()), me);
            Vector gs(static_cast<Eigen::Index>(active_rows.size()));
            for (size_t k = 0; k < active_rows.size(); ++k) {
                At.row(static_cast<Eigen::Index>(k)) =
                    problem.Aeq.col(active_rows[k]).transpose();
                gs(static_cast<Eigen::Index>(k)) = g(active_rows[k]);
            }
            Vector next = At.completeOrthogonalDecomposition().solve(gs);
            const double score = violation(next).squaredNorm();
            if (score < best - 1e-18) {
                best = score;
                best_mu = next;
                mu = next;
            } else {
                break;
            }
        }
        mu = best_mu;
    }

    const Vector v = violation(mu);
    report.stationarity_residual = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;

    // Recovered bound multipliers live on the active sets only, so the
    // complementarity products involve at most act_tol-sized slacks.
    Vector r = g;
    if (me > 0) r -= problem.Aeq.transpose() * mu;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (at_lb[static_cast<size_t>(i)]) {
            const double lambda = std::max(r(i), 0.0);
            comp = std::max(comp, lambda * std::abs(z(i) - problem.lb(i)));
        }
        if (at_ub[static_cast<size_t>(i)]) {
            const double eta = std::max(-r(i), 0.0);
            comp = std::max(comp, eta * std::abs(problem.ub(i) - z(i)));
        }
    }
    report.complementarity = comp;
    return report;
}

QpSolution solve(const QpProblem& problem, const QpOptions& options) {
    problem.validate();
    if (options.tol <= 0.0) throw_invalid("qp: tol must be > 0");
    const int max_iter =
        options.max_iter > 0 ? options.max_iter : 100 * static_cast<int>(problem.dim());

    check_equality_feasible(problem, options.tol);

    Presolved pre = presolve_fixed(problem);
    QpProblem worked = pre.reduced;
    worked.H = regularized_hessian(worked.H);

    // Inner IPM targets sit well below the KKT contract so the independent
    // verification comes back clean.
    const double target = std::min(options.tol * 1e-3, 1e-9);

    Vector z_full(problem.dim());
    int iterations = 0;
    IpmResult last;
    double tighten = 1.0;
    for (int round = 0; round < 3; ++round) {
        if (worked.dim() == 0) break;
        last = ipm_solve(worked, target * tighten, std::max(1, max_iter - iterations));
        iterations += last.iterations;
        if (!last.converged) break;

        // Reassemble and verify against the original problem.
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < problem.dim(); ++i) {
            z_full(i) = pre.is_fixed[static_cast<size_t>(i)]
                            ? pre.fixed_values(i)
                            : last.z(k++);
        }
        KktReport rep = verify_kkt(problem, z_full, options.tol);
        if (rep.passes()) {
            QpSolution sol;
            sol.z = z_full;
            sol.objective = objective_of(problem, z_full);
            sol.iterations = iterations;
            sol.kkt = rep;
            return sol;
        }
        tighten *= 1e-2;
        if (iterations >= max_iter) break;
    }

    if (worked.dim() == 0) {
        // Everything was fixed by the bounds; nothing to optimize.
        z_full = pre.fixed_values;
        KktReport rep = verify_kkt(problem, z_full, options.tol);
        QpSolution sol;
        sol.z = z_full;
        sol.objective = objective_of(problem, z_full);
        sol.iterations = 0;
        sol.kkt = rep;
        if (!rep.passes() && rep.primal_feasibility > options.tol) {
            throw_numeric("qp: fixed problem violates equality constraints");
        }
        return sol;
    }

    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < problem.dim(); ++i) {
        z_full(i) = pre.is_fixed[static_cast<size_t>(i)] ? pre.fixed_values(i) : last.z(k++);
    }
    KktReport rep = verify_kkt(problem, z_full, options.tol);
    throw_numeric("qp: max_iter (" + std::to_string(max_iter) +
                  ") exceeded; residuals: stationarity=" + format_sig(rep.stationarity_residual, 3) +
                  " feasibility=" + format_sig(rep.primal_feasibility, 3) +
                  " complementarity=" + format_sig(rep.complementarity, 3));
}

}  // namespace lupi
