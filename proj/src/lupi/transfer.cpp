#include "lupi/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace lupi {

namespace {

double fit_ridge_ls(const Matrix& phi, const Vector& target, Vector& beta) {
    // Normal equations with ridge 1e-10; returns training SSE.
    Matrix gram = phi.transpose() * phi;
    gram.diagonal().array() += 1e-10;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
        throw_numeric("transfer: rank-deficient regression basis after ridge");
    }
    beta = ldlt.solve(phi.transpose() * target);
    return (phi * beta - target).squaredNorm();
}

// Power-major basis: [1, x_{c1}, x_{c2}, ..., x_{c1}^2, x_{c2}^2, ...].
Matrix basis_matrix(const Matrix& standard, const std::vector<int>& cols, int degree,
                    const std::vector<Eigen::Index>& rows) {
    const Eigen::Index p = static_cast<Eigen::Index>(cols.size());
    Matrix phi(static_cast<Eigen::Index>(rows.size()), 1 + p * degree);
    for (size_t r = 0; r < rows.size(); ++r) {
        const Eigen::Index rr = static_cast<Eigen::Index>(r);
        phi(rr, 0) = 1.0;
        Eigen::Index j = 1;
        for (int q = 1; q <= degree; ++q) {
            for (int c : cols) {
                phi(rr, j++) = std::pow(standard(rows[r], c), q);
            }
        }
    }
    return phi;
}

}  // namespace

double PolyRegressor::estimate(const Eigen::Ref<const Vector>& standard_row) const {
    double v = intercept;
    Eigen::Index j = 0;
    for (int q = 1; q <= degree; ++q) {
        for (int c : input_columns) {
            v += coefficients(j++) * std::pow(standard_row(c), q);
        }
    }
    return v;
}

double WeightedSimilarity::estimate(const Eigen::Ref<const Vector>& standard_row) const {
    const Eigen::Index n = stored_standard.rows();
    Vector q(static_cast<Eigen::Index>(input_columns.size()));
    for (size_t j = 0; j < input_columns.size(); ++j) {
        q(static_cast<Eigen::Index>(j)) = standard_row(input_columns[j]);
    }
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = (stored_standard.row(i).transpose() - q).norm();
        if (d == 0.0) return stored_privileged(i);  // exact-match rule
        dist.emplace_back(d, i);
    }
    const int kk = std::min<int>(k, static_cast<int>(n));
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    double wsum = 0.0, val = 0.0;
    for (int j = 0; j < kk; ++j) {
        const double w = 1.0 / dist[static_cast<size_t>(j)].first;
        wsum += w;
        val += w * stored_privileged(dist[static_cast<size_t>(j)].second);
    }
    return val / wsum;
}

std::vector<int> select_input_columns(const Matrix& standard, const Vector& target, int top_p) {
    const int d = static_cast<int>(standard.cols());
    std::vector<int> all(static_cast<size_t>(d));
    std::iota(all.begin(), all.end(), 0);
    if (top_p <= 0 || top_p >= d) return all;

    const double ty = target.mean();
    Vector tc = target.array() - ty;
    const double tn = tc.norm();
    std::vector<std::pair<double, int>> scored;
    for (int c = 0; c < d; ++c) {
        Vector xc = standard.col(c).array() - standard.col(c).mean();
        const double denom = xc.norm() * tn;
        const double corr = denom > 0 ? std::abs(xc.dot(tc) / denom) : 0.0;
        scored.emplace_back(-corr, c);  // negative: strongest first, index breaks ties
    }
    std::sort(scored.begin(), scored.end());
    std::vector<int> out;
    for (int j = 0; j < top_p; ++j) out.push_back(scored[static_cast<size_t>(j)].second);
    std::sort(out.begin(), out.end());
    return out;
}

PolyRegressor fit_poly_regression(const Matrix& standard, const Vector& target,
                                  int max_degree, std::string* warning) {
    if (max_degree < 1) throw_invalid("transfer: max_degree must be >= 1");
    const Eigen::Index n = standard.rows();
    if (n != target.size()) throw_invalid("transfer: row/target length mismatch");
    if (n < 2) throw_data("transfer: too few samples to fit a regression");

    int cap = std::min<int>(max_degree, static_cast<int>(n) - 1);
    if (cap < max_degree && warning) {
        *warning = "polynomial degree capped at " + std::to_string(cap) + " (" +
                   std::to_string(n) + " samples)";
    }

    std::vector<int> cols(static_cast<size_t>(standard.cols()));
    std::iota(cols.begin(), cols.end(), 0);

    // Every fifth row validates; with fewer than five rows the split would be
    // empty, so score on the training rows instead.
    std::vector<Eigen::Index> train_rows, val_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i % 5 == 4) val_rows.push_back(i);
        else train_rows.push_back(i);
    }
    if (val_rows.empty()) val_rows = train_rows;

    int best_degree = 1;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int degree = 1; degree <= cap; ++degree) {
        Matrix phi_train = basis_matrix(standard, cols, degree, train_rows);
        Vector t_train(static_cast<Eigen::Index>(train_rows.size()));
        for (size_t r = 0; r < train_rows.size(); ++r) {
            t_train(static_cast<Eigen::Index>(r)) = target(train_rows[r]);
        }
        Vector beta;
        fit_ridge_ls(phi_train, t_train, beta);

        Matrix phi_val = basis_matrix(standard, cols, degree, val_rows);
        Vector t_val(static_cast<Eigen::Index>(val_rows.size()));
        for (size_t r = 0; r < val_rows.size(); ++r) {
            t_val(static_cast<Eigen::Index>(r)) = target(val_rows[r]);
        }
        const double sse = (phi_val * beta - t_val).squaredNorm();
        if (sse < best_sse - 1e-15 * (1.0 + best_sse)) {
            best_sse = sse;
            best_degree = degree;
        }
    }

    // Refit the chosen degree on all rows.
    std::vector<Eigen::Index> all_rows(static_cast<size_t>(n));
    std::iota(all_rows.begin(), all_rows.end(), 0);
    Matrix phi = basis_matrix(standard, cols, best_degree, all_rows);
    Vector beta;
    fit_ridge_ls(phi, target, beta);

    PolyRegressor reg;
    reg.degree = best_degree;
    reg.input_columns = cols;
    reg.intercept = beta(0);
    reg.coefficients = beta.tail(beta.size() - 1);
    return reg;
}

Matrix estimate_privileged(const MappingFunctionSet& mappings, const Matrix& standard_rows) {
    const Eigen::Index m = mappings.count();
    Matrix out(standard_rows.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto& fn = mappings.per_feature[static_cast<size_t>(j)];
        for (Eigen::Index r = 0; r < standard_rows.rows(); ++r) {
            const Vector row = standard_rows.row(r).transpose();
            // Dimension check against the columns each estimator reads.
            out(r, j) = std::visit(
                [&](const auto& est) {
                    for (int c : est.input_columns) {
                        if (c >= row.size()) {
                            throw_invalid("transfer: estimate row has too few columns");
                        }
                    }
                    return est.estimate(row);
                },
                fn);
        }
    }
    return out;
}

namespace {

// Stratified row cap for the lazy similarity estimator.
std::vector<Eigen::Index> subsample_rows(const LupiDataset& ds, int max_stored,
                                         std::uint64_t seed) {
    const Eigen::Index n = ds.rows();
    if (max_stored <= 0 || n <= max_stored) {
        std::vector<Eigen::Index> all(static_cast<size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::map<int, std::vector<Eigen::Index>> by_class;
    for (Eigen::Index i = 0; i < n; ++i) by_class[ds.labels[static_cast<size_t>(i)]].push_back(i);
    std::mt19937_64 rng(mix_seed(seed, 0x5a3b));
    std::vector<Eigen::Index> chosen;
    for (auto& [cls, ids] : by_class) {
        std::shuffle(ids.begin(), ids.end(), rng);
        const auto want = static_cast<size_t>(
            std::max<Eigen::Index>(1, max_stored * static_cast<Eigen::Index>(ids.size()) / n));
        for (size_t j = 0; j < std::min(want, ids.size()); ++j) chosen.push_back(ids[j]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

KtModel train_kt(const LupiDataset& dataset, MappingKind kind,
                 const KernelSpec& downstream_kernel, double C, const KtHyper& hyper) {
    dataset.validate();
    if (dataset.privileged_dim() == 0) {
        throw_data("transfer: dataset has no privileged features (m = 0)");
    }
    if (!dataset.is_binary()) throw_data("transfer: binary labels required");

    KtModel model;
    model.standard_dim = dataset.standard_dim();

    const Eigen::Index m = dataset.privileged_dim();
    for (Eigen::Index j = 0; j < m; ++j) {
        const Vector target = dataset.privileged.col(j);
        const std::vector<int> cols =
            select_input_columns(dataset.standard, target, hyper.top_p_columns);
        if (kind == MappingKind::regression) {
            Matrix sub(dataset.rows(), static_cast<Eigen::Index>(cols.size()));
            for (size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = dataset.standard.col(cols[c]);
            std::string warning;
            PolyRegressor reg = fit_poly_regression(sub, target, hyper.max_degree, &warning);
            // Re-express the fitted columns in terms of the full standard row.
            reg.input_columns = cols;
            if (!warning.empty()) {
                model.mappings.warnings.push_back("privileged feature " + std::to_string(j) +
                                                  ": " + warning);
            }
            model.mappings.per_feature.emplace_back(std::move(reg));
        } else {
            if (hyper.k_neighbors < 1) throw_invalid("transfer: k must be >= 1");
            const auto rows = subsample_rows(dataset, hyper.max_stored, hyper.seed);
            WeightedSimilarity sim;
            sim.k = hyper.k_neighbors;
            sim.input_columns = cols;
            sim.stored_standard.resize(static_cast<Eigen::Index>(rows.size()),
                                       static_cast<Eigen::Index>(cols.size()));
            sim.stored_privileged.resize(static_cast<Eigen::Index>(rows.size()));
            for (size_t r = 0; r < rows.size(); ++r) {
                for (size_t c = 0; c < cols.size(); ++c) {
                    sim.stored_standard(static_cast<Eigen::Index>(r),
                                        static_cast<Eigen::Index>(c)) =
                        dataset.standard(rows[r], cols[c]);
                }
                sim.stored_privileged(static_cast<Eigen::Index>(r)) =
                    dataset.privileged(rows[r], j);
            }
            model.mappings.per_feature.emplace_back(std::move(sim));
        }
    }

    // The downstream model trains on the true complete set; estimates only
    // replace the privileged block at prediction time.
    Matrix complete(dataset.rows(), dataset.standard_dim() + m);
    complete << dataset.standard, dataset.privileged;
    model.downstream = train_svm(complete, dataset.labels, downstream_kernel, C);
    return model;
}

Vector decision_values_kt(const KtModel& model, const Matrix& standard_rows) {
    if (standard_rows.cols() != model.standard_dim) {
        throw_invalid("transfer: prediction rows have " + std::to_string(standard_rows.cols()) +
                      " columns, model expects " + std::to_string(model.standard_dim));
    }
    const Matrix est = estimate_privileged(model.mappings, standard_rows);
    Matrix complete(standard_rows.rows(), standard_rows.cols() + est.cols());
    complete << standard_rows, est;
    return decision_values_svm(model.downstream, complete);
}

SvmPrediction predict_kt(const KtModel& model, const Matrix& standard_rows) {
    SvmPrediction out;
    out.raw = decision_values_kt(model, standard_rows);
    out.labels.reserve(static_cast<size_t>(standard_rows.rows()));
    for (Eigen::Index r = 0; r < standard_rows.rows(); ++r) {
        out.labels.push_back(out.raw(r) >= 0.0 ? +1 : -1);
    }
    return out;
}

}  // namespace lupi
