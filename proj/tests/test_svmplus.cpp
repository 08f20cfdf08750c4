#include "lupi/svmplus.hpp"

#include <doctest.h>

using namespace lupi;

namespace {

LupiDataset orthonormal_pair() {
    LupiDataset ds;
    ds.standard = Matrix::Identity(2, 2);
    ds.privileged = Matrix::Identity(2, 2);
    ds.labels = {+1, -1};
    return ds;
}

SvmPlusConfig identity_config(double gamma, double kappa, double C) {
    SvmPlusConfig cfg;
    cfg.kernel_standard = KernelSpec::linear();
    cfg.kernel_privileged = KernelSpec::linear();
    cfg.gamma = gamma;
    cfg.kappa = kappa;
    cfg.C = Vector::Constant(1, C);
    return cfg;
}

LupiDataset gauss2d(int n, std::uint64_t seed) {
    SynthSpec spec;
    spec.scenario = SynthScenario::gauss2d;
    spec.n = n;
    spec.noise_std_standard = 0.8;
    spec.noise_std_privileged = 0.05;
    spec.outlier_fraction = 0.1;
    spec.seed = seed;
    return make_synthetic(spec);
}

}  // namespace

TEST_CASE("assembled blocks match the hand-derived identity-kernel values") {
    const LupiDataset ds = orthonormal_pair();
    const QpProblem qp = assemble_qp(ds, identity_config(1.0, 1.0, 1.0));

    REQUIRE(qp.dim() == 4);
    Matrix h11 = qp.H.topLeftCorner(2, 2);
    Matrix h12 = qp.H.topRightCorner(2, 2);
    Matrix h21 = qp.H.bottomLeftCorner(2, 2);
    Matrix h22 = qp.H.bottomRightCorner(2, 2);

    Matrix expect11(2, 2), expect12(2, 2), expect22(2, 2);
    expect11 << 2, 0, 0, 2;
    expect12 << -1, 0, 0, -1;
    expect22 << 1, 0, 0, 1;
    CHECK((h11 - expect11).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((h12 - expect12).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((h21 - expect12).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((h22 - expect22).cwiseAbs().maxCoeff() <= 1e-12);

    Vector f_expect(4);
    f_expect << -1, -1, 0, 0;
    CHECK((qp.f - f_expect).cwiseAbs().maxCoeff() == 0.0);

    // Aeq stacks (y, 0) over (0, y); beq = 0.
    Matrix aeq(2, 4);
    aeq << 1, -1, 0, 0, 0, 0, 1, -1;
    CHECK((qp.Aeq - aeq).cwiseAbs().maxCoeff() == 0.0);
    CHECK(qp.beq.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gamma = 0 collapses the assembly to the standard SVM Hessian") {
    const LupiDataset ds = orthonormal_pair();
    const QpProblem qp = assemble_qp(ds, identity_config(0.0, 1.0, 1.0));
    Matrix svm_hessian(2, 2);
    svm_hessian << 1, 0, 0, 1;  // identity gram times y_i y_j on the diagonal
    CHECK((qp.H.topLeftCorner(2, 2) - svm_hessian).cwiseAbs().maxCoeff() == 0.0);
    CHECK(qp.H.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(qp.H.bottomRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("upper bounds follow (kappa C..., C...)") {
    const LupiDataset ds = orthonormal_pair();
    const QpProblem qp = assemble_qp(ds, identity_config(1.0, 2.0, 1.0));
    Vector expect(4);
    expect << 2, 2, 1, 1;
    CHECK((qp.ub - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK(qp.lb.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training on gauss2d meets the KKT tolerance and model invariants") {
    const LupiDataset ds = gauss2d(60, 42);
    SvmPlusConfig cfg;
    cfg.kernel_standard = KernelSpec::rbf(0.5);
    cfg.kernel_privileged = KernelSpec::rbf(0.5);
    cfg.kappa = 1.0;
    cfg.gamma = 0.5;
    cfg.C = Vector::Constant(1, 2.0);
    const SvmPlusModel model = train_svmplus(ds, cfg, 1e-6);

    CHECK(model.solve_report.stationarity_residual <= 1e-6);
    CHECK(model.solve_report.primal_feasibility <= 1e-6);
    CHECK(model.solve_report.complementarity <= 1e-6);

    double eq_a = 0.0, eq_d = 0.0;
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
        const double y = ds.labels[static_cast<size_t>(i)];
        CHECK(model.alphas(i) >= -1e-9);
        CHECK(model.alphas(i) <= cfg.kappa * cfg.C(0) + 1e-9);
        CHECK(model.deltas(i) >= -1e-9);
        CHECK(model.deltas(i) <= cfg.C(0) + 1e-9);
        eq_a += model.alphas(i) * y;
        eq_d += model.deltas(i) * y;
    }
    CHECK(std::abs(eq_a) <= 1e-6);
    CHECK(std::abs(eq_d) <= 1e-6);
}

TEST_CASE("bias recomputed at every doubly-free index agrees with the stored bias") {
    const LupiDataset ds = gauss2d(80, 7);
    SvmPlusConfig cfg;
    cfg.kernel_standard = KernelSpec::rbf(0.7);
    cfg.kernel_privileged = KernelSpec::rbf(0.7);
    cfg.kappa = 1.5;
    cfg.gamma = 0.3;
    cfg.C = Vector::Constant(1, 1.0);
    const double tol = 1e-6;
    const SvmPlusModel model = train_svmplus(ds, cfg, tol);

    Vector y(ds.rows());
    for (Eigen::Index i = 0; i < ds.rows(); ++i) y(i) = ds.labels[static_cast<size_t>(i)];
    const Matrix K = gram(cfg.kernel_standard, ds.standard);
    const Matrix Kp = gram(cfg.kernel_privileged, ds.privileged);
    const Vector F = K * model.alphas.cwiseProduct(y);
    const Vector fstar = Kp * (model.alphas - model.deltas).cwiseProduct(y);

    int checked = 0;
    for (Eigen::Index j = 0; j < ds.rows(); ++j) {
        const double ca = cfg.kappa * cfg.C(0), cd = cfg.C(0);
        const bool alpha_free =
            model.alphas(j) > 10 * tol && model.alphas(j) < ca - 10 * tol;
        const bool delta_free =
            model.deltas(j) > 10 * tol && model.deltas(j) < cd - 10 * tol;
        if (alpha_free && delta_free) {
            const double b_j = y(j) - F(j) - cfg.gamma * fstar(j);
            CHECK(std::abs(b_j - model.bias) <= 1e-4);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("vanishing gamma recovers the standard SVM decision values") {
    const LupiDataset ds = gauss2d(60, 5);
    SvmPlusConfig cfg;
    cfg.kernel_standard = KernelSpec::rbf(0.5);
    cfg.kernel_privileged = KernelSpec::rbf(0.5);
    cfg.kappa = 1.0;
    cfg.gamma = 1e-9;
    cfg.C = Vector::Constant(1, 1.0);
    const SvmPlusModel plus = train_svmplus(ds, cfg, 1e-6);
    const SvmModel base = train_svm(ds.standard, ds.labels, cfg.kernel_standard, 1.0);

    Matrix probe(25, 2);
    int k = 0;
    for (int ix = 0; ix < 5; ++ix) {
        for (int iy = 0; iy < 5; ++iy) {
            probe(k, 0) = -2.0 + ix;
            probe(k, 1) = -2.0 + iy;
            ++k;
        }
    }
    const Vector vp = decision_values_svmplus(plus, probe);
    const Vector vb = decision_values_svm(base, probe);
    CHECK((vp - vb).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("prediction ignores privileged features and needs none") {
    const LupiDataset ds = gauss2d(40, 3);
    SvmPlusConfig cfg;
    cfg.kernel_standard = KernelSpec::rbf(0.6);
    cfg.kernel_privileged = KernelSpec::rbf(0.6);
    cfg.gamma = 0.5;
    cfg.C = Vector::Constant(1, 1.0);
    const SvmPlusModel model = train_svmplus(ds, cfg, 1e-6);
    const SvmPrediction p = predict_svmplus(model, ds.standard);
    CHECK(p.labels.size() == static_cast<size_t>(ds.rows()));

    Matrix wrong(1, 3);
    wrong.setZero();
    CHECK_THROWS_AS(predict_svmplus(model, wrong), Error);
}

TEST_CASE("midpoint of the class means sits near the boundary on average") {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthSpec spec;
        spec.scenario = SynthScenario::gauss2d;
        spec.n = 80;
        spec.noise_std_standard = 0.6;
        spec.noise_std_privileged = 0.02;
        spec.outlier_fraction = 0.0;
        spec.seed = seed;
        const LupiDataset ds = make_synthetic(spec);

        SvmPlusConfig cfg;
        cfg.kernel_standard = KernelSpec::linear();
        cfg.kernel_privileged = KernelSpec::linear();
        cfg.gamma = 0.5;
        cfg.C = Vector::Constant(1, 1.0);
        const SvmPlusModel model = train_svmplus(ds, cfg, 1e-6);
        Matrix mid(1, 2);
        mid.setZero();
        total += decision_values_svmplus(model, mid)(0);
    }
    CHECK(std::abs(total / 10.0) <= 1e-2);
}

TEST_CASE("missing privileged block is rejected") {
    LupiDataset ds;
    ds.standard = Matrix::Identity(2, 2);
    ds.privileged.resize(2, 0);
    ds.labels = {+1, -1};
    CHECK_THROWS_AS(train_svmplus(ds, identity_config(1.0, 1.0, 1.0), 1e-6), Error);
}

TEST_CASE("config validation") {
    const LupiDataset ds = orthonormal_pair();
    SvmPlusConfig cfg = identity_config(1.0, 1.0, 1.0);
    cfg.gamma = 0.0;  // allowed for assembly, rejected for training
    CHECK_NOTHROW(assemble_qp(ds, cfg));
    CHECK_THROWS_AS(train_svmplus(ds, cfg, 1e-6), Error);

    cfg = identity_config(1.0, -1.0, 1.0);
    CHECK_THROWS_AS(assemble_qp(ds, cfg), Error);
    cfg = identity_config(1.0, 1.0, -2.0);
    CHECK_THROWS_AS(assemble_qp(ds, cfg), Error);
}
