#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "ggm/chordal.hpp"
#include "ggm/data_matrix.hpp"
#include "ggm/hiw.hpp"
#include "ggm/rng.hpp"

namespace ggm {

namespace detail {

inline void check_square(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) throw DomainError(std::string(what) + ": matrix must be square");
}

inline void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
    check_square(m, what);
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
        throw DomainError(std::string(what) + ": matrix is not symmetric");
}

inline Eigen::LLT<Eigen::MatrixXd> cholesky_pd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError(std::string(what) + ": matrix is not positive definite");
    return llt;
}

inline Eigen::MatrixXd pd_inverse(const Eigen::MatrixXd& m, const char* what) {
    auto llt = cholesky_pd(m, what);
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    return ((inv + inv.transpose()) * 0.5).eval();
}

}  // namespace detail

/// Covariance together with its precision and, when known, the graph whose
/// missing edges are zeros of the precision.
struct CovarianceModel {
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd precision;
    std::optional<Graph> graph;
};

/// KL(N(0,sigma1) || N(0,sigma2)) = (tr(S2^-1 S1) - p - ln det(S2^-1 S1))/2.
/// Identical inputs return exactly 0.
inline double kl_gaussian(const Eigen::MatrixXd& sigma1, const Eigen::MatrixXd& sigma2) {
    detail::check_symmetric(sigma1, "kl_gaussian");
    detail::check_symmetric(sigma2, "kl_gaussian");
    if (sigma1.rows() != sigma2.rows()) throw DomainError("kl_gaussian: dimension mismatch");
    if ((sigma1.array() == sigma2.array()).all()) return 0.0;
    const auto p = sigma1.rows();
    auto llt2 = detail::cholesky_pd(sigma2, "kl_gaussian");
    const double ld1 = detail::logdet_pd(sigma1);
    double ld2 = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) ld2 += std::log(llt2.matrixLLT()(i, i));
    ld2 *= 2.0;
    const double trace = llt2.solve(sigma1).trace();
    return 0.5 * (trace - static_cast<double>(p) - (ld1 - ld2));
}

/// KL-minimizing covariance Markov with respect to a decomposable target:
/// the precision is assembled from zero-padded inverses of the clique and
/// separator blocks of sigma, so clique marginals are preserved exactly and
/// the precision vanishes off the edge set.
inline CovarianceModel iproject(const Eigen::MatrixXd& sigma, const Graph& target) {
    detail::check_symmetric(sigma, "iproject");
    if (sigma.rows() != target.vertex_count()) throw DomainError("iproject: dimension mismatch");
    const JunctionTree jt = junction_tree(target);
    const auto p = sigma.rows();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(p, p);
    auto accumulate = [&](const VertexSet& a, double sign) {
        if (a.count() == 0) return;
        const std::vector<int> idx = a.to_vector();
        const Eigen::MatrixXd inv = detail::pd_inverse(detail::principal_submatrix(sigma, idx), "iproject");
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                k(idx[i], idx[j]) += sign * inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    for (const VertexSet& c : jt.cliques) accumulate(c, 1.0);
    for (const VertexSet& s : jt.separators) accumulate(s, -1.0);
    CovarianceModel model;
    model.precision = ((k + k.transpose()) * 0.5).eval();
    model.sigma = detail::pd_inverse(model.precision, "iproject");
    model.graph = target;
    return model;
}

/// Minimum KL from N(0,sigma) to its projection onto any one-edge-deleted
/// complete graph. Deleting edge (i,j) costs -ln(1 - rho_ij^2)/2 where
/// rho_ij = -K_ij/sqrt(K_ii K_jj) is the partial correlation, so the
/// cheapest deletion is the pair with the smallest squared partial
/// correlation. Nesting makes larger deletions only costlier, so this is
/// the minimum over all proper decomposable submodels of the full model.
struct MinKlResult {
    double value = 0.0;
    Edge edge{0, 1};
};

inline MinKlResult min_kl_complete_to_subgraphs(const Eigen::MatrixXd& sigma) {
    detail::check_symmetric(sigma, "min_kl_complete_to_subgraphs");
    const auto p = sigma.rows();
    if (p < 2) throw DomainError("min_kl_complete_to_subgraphs requires p >= 2");
    const Eigen::MatrixXd k = detail::pd_inverse(sigma, "min_kl_complete_to_subgraphs");
    MinKlResult best;
    double best_rho2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const double rho = -k(i, j) / std::sqrt(k(i, i) * k(j, j));
            const double rho2 = rho * rho;
            if (rho2 < best_rho2) {
                best_rho2 = rho2;
                best.edge = Edge{static_cast<int>(i), static_cast<int>(j)};
            }
        }
    best.value = -0.5 * std::log1p(-best_rho2);
    return best;
}

/// Wishart-form prior on a precision matrix with no graph restriction:
/// density proportional to det(K)^((delta-2)/2) exp(-tr(D K)/2).
struct GWishartSpec {
    double delta = 3.0;
    Eigen::MatrixXd d;
};

/// Draws K via the Bartlett construction of a Wishart with df delta+p-1 and
/// scale D^-1: K = (L A)(L A)' with L = chol(D^-1), A lower triangular,
/// A_ii = sqrt(chisq(df - i)) (0-based i), A_ij standard normal below the
/// diagonal. Diagonal draws come before the subdiagonal of each column so
/// the stream layout is fixed.
inline Eigen::MatrixXd sample_complete_gwishart(const GWishartSpec& spec, Rng& rng) {
    detail::check_symmetric(spec.d, "sample_complete_gwishart");
    const auto p = spec.d.rows();
    if (!(spec.delta > 0.0)) throw DomainError("g-wishart shape must be positive");
    const double df = spec.delta + static_cast<double>(p) - 1.0;
    const Eigen::MatrixXd dinv = detail::pd_inverse(spec.d, "sample_complete_gwishart");
    const Eigen::MatrixXd l = detail::cholesky_pd(dinv, "sample_complete_gwishart").matrixL();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        a(j, j) = std::sqrt(rng.chi_squared(df - static_cast<double>(j)));
        for (Eigen::Index i = j + 1; i < p; ++i) a(i, j) = rng.normal();
    }
    const Eigen::MatrixXd la = l * a;
    Eigen::MatrixXd k = la * la.transpose();
    return ((k + k.transpose()) * 0.5).eval();
}

/// n rows from N_p(0, sigma), raw (uncentered). Row-major fill order.
inline Eigen::MatrixXd sample_mvn_rows(const Eigen::MatrixXd& sigma, int n, Rng& rng) {
    detail::check_symmetric(sigma, "sample_mvn");
    if (n < 1) throw DomainError("sample_mvn: n must be positive");
    const Eigen::MatrixXd l = detail::cholesky_pd(sigma, "sample_mvn").matrixL();
    Eigen::MatrixXd z(n, sigma.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.normal();
    return z * l.transpose();
}

/// Same draws packaged as a centered DataMatrix ready for scoring.
inline DataMatrix sample_mvn(const Eigen::MatrixXd& sigma, int n, Rng& rng) {
    if (n < 2) throw DomainError("sample_mvn: DataMatrix needs n >= 2");
    return DataMatrix(sample_mvn_rows(sigma, n, rng));
}

}  // namespace ggm
