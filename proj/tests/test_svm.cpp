#include "lupi/svm.hpp"

#include <doctest.h>

#include <random>

using namespace lupi;

namespace {

Matrix column(std::initializer_list<double> xs) {
    Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return m;
}

void check_dual_feasibility(const SvmModel& model) {
    double eq = 0.0;
    for (Eigen::Index i = 0; i < model.alphas.size(); ++i) {
        CHECK(model.alphas(i) >= -1e-9);
        CHECK(model.alphas(i) <= model.C + 1e-9);
        eq += model.alphas(i) * model.support_labels[static_cast<size_t>(i)];
    }
    CHECK(std::abs(eq) <= 1e-6);
}

}  // namespace

TEST_CASE("two-point dual solved by hand: alpha = 0.5, bias = 0, f(x) = x") {
    const Matrix x = column({-1.0, 1.0});
    const std::vector<int> y{-1, +1};
    const SvmModel model = train_svm(x, y, KernelSpec::linear(), 10.0);

    CHECK(model.alphas(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(model.alphas(1) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(model.bias == doctest::Approx(0.0).epsilon(1e-8));
    check_dual_feasibility(model);

    const SvmPrediction pred = predict_svm(model, column({2.0, 0.0, -3.0}));
    CHECK(pred.raw(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(pred.labels[0] == +1);
    CHECK(pred.labels[1] == +1);  // sign(0) = +1
    CHECK(pred.labels[2] == -1);
    CHECK(pred.raw(2) == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("duplicating every row leaves the decision function unchanged") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(10, 2);
    std::vector<int> y;
    for (int i = 0; i < 10; ++i) {
        const int label = i < 5 ? +1 : -1;
        x(i, 0) = label * 1.0 + 0.3 * gauss(rng);
        x(i, 1) = label * 1.0 + 0.3 * gauss(rng);
        y.push_back(label);
    }
    Matrix x2(20, 2);
    x2 << x, x;
    std::vector<int> y2 = y;
    y2.insert(y2.end(), y.begin(), y.end());

    const SvmModel a = train_svm(x, y, KernelSpec::rbf(0.8), 2.0);
    const SvmModel b = train_svm(x2, y2, KernelSpec::rbf(0.8), 2.0);

    Matrix probe(9, 2);
    int k = 0;
    for (double px : {-1.5, 0.0, 1.5}) {
        for (double py : {-1.5, 0.0, 1.5}) {
            probe(k, 0) = px;
            probe(k, 1) = py;
            ++k;
        }
    }
    const Vector ra = decision_values_svm(a, probe);
    const Vector rb = decision_values_svm(b, probe);
    CHECK((ra - rb).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("single-class input is rejected") {
    const Matrix x = column({0.0, 1.0, 2.0});
    CHECK_THROWS_AS(train_svm(x, {1, 1, 1}, KernelSpec::linear(), 1.0), Error);
}

TEST_CASE("margin property on separable data with large C") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Matrix x(20, 2);
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
        const int label = i % 2 == 0 ? +1 : -1;
        x(i, 0) = label * u(rng);
        x(i, 1) = label * u(rng);
        y.push_back(label);
    }
    const SvmModel model = train_svm(x, y, KernelSpec::linear(), 1e4);
    const Vector raw = decision_values_svm(model, x);
    for (int i = 0; i < 20; ++i) {
        CHECK(y[static_cast<size_t>(i)] * raw(i) >= 1.0 - 1e-4);
    }
    check_dual_feasibility(model);
}

TEST_CASE("prediction is deterministic and validates dimensions") {
    const Matrix x = column({-1.0, 1.0});
    const SvmModel model = train_svm(x, {-1, +1}, KernelSpec::linear(), 1.0);
    const SvmPrediction p1 = predict_svm(model, column({0.4}));
    const SvmPrediction p2 = predict_svm(model, column({0.4}));
    CHECK(p1.raw(0) == p2.raw(0));
    CHECK(p1.labels == p2.labels);

    Matrix wrong(1, 2);
    wrong.setZero();
    CHECK_THROWS_AS(predict_svm(model, wrong), Error);
}

TEST_CASE("invalid parameters are rejected") {
    const Matrix x = column({-1.0, 1.0});
    CHECK_THROWS_AS(train_svm(x, {-1, +1}, KernelSpec::linear(), 0.0), Error);
    CHECK_THROWS_AS(train_svm(x, {-1, +1, +1}, KernelSpec::linear(), 1.0), Error);
}
