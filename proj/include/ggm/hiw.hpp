#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "ggm/chordal.hpp"
#include "ggm/data_matrix.hpp"
#include "ggm/prior.hpp"

namespace ggm {

/// ln Gamma_a(x), the multivariate gamma function.
inline double log_mvgamma(int a, double x) {
    if (a < 0) throw DomainError("log_mvgamma: dimension must be nonnegative");
    if (a == 0) return 0.0;
    if (!(x + (1.0 - a) / 2.0 > 0.0)) throw DomainError("log_mvgamma: gamma argument not positive");
    double s = 0.25 * a * (a - 1.0) * std::log(std::numbers::pi);
    for (int j = 1; j <= a; ++j) s += std::lgamma(x + (1.0 - j) / 2.0);
    return s;
}

namespace detail {

/// ln det of a symmetric positive definite matrix via Cholesky.
inline double logdet_pd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError();
    double s = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double d = l(i, i);
        if (!(d > 1e-150)) throw NotPositiveDefiniteError();
        s += std::log(d);
    }
    return 2.0 * s;
}

inline Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(idx[i], idx[j]);
    return sub;
}

}  // namespace detail

/// ln H_G(b, D): log normalizing constant of the hyper-inverse Wishart,
/// a clique-over-separator ratio of terms
///   ((b+|A|-1)/2) ln det(D_A/2) - ln Gamma_|A|((b+|A|-1)/2).
inline double log_hiw_norm_const(const JunctionTree& jt, double b, const Eigen::MatrixXd& d) {
    if (!(b > 0.0)) throw DomainError("hyper-inverse Wishart requires b > 0");
    auto term = [&](const VertexSet& a) {
        const int q = a.count();
        if (q == 0) return 0.0;
        const std::vector<int> idx = a.to_vector();
        const double ld = detail::logdet_pd(detail::principal_submatrix(d, idx));
        const double x = (b + q - 1.0) / 2.0;
        return x * (ld - q * std::numbers::ln2) - log_mvgamma(q, x);
    };
    double s = 0.0;
    for (const VertexSet& c : jt.cliques) s += term(c);
    for (const VertexSet& sep : jt.separators) s -= term(sep);
    return s;
}

/// Fraction of the likelihood used to build the implicit prior; the
/// remainder 1-g carries the evidence. Unset means g = 1/n.
struct LikelihoodConfig {
    std::optional<double> g;

    double effective_g(int n) const {
        const double v = g.value_or(1.0 / n);
        if (!(v > 0.0 && v < 1.0)) throw DomainError("fraction g must lie in (0,1)");
        return v;
    }
};

/// Fractional marginal likelihood ln f(x|G) for decomposable G:
///   -(np/2) ln 2pi + ln H_G(gn, g X'X) - ln H_G(n, X'X).
/// Because H_G factorizes over cliques and separators, the value is a sum
/// of per-subset terms; those depend on the data only through ln det of
/// principal Gram submatrices, which this evaluator caches across calls.
/// The cache is guarded for concurrent use (values are deterministic, so
/// duplicated computation under contention is harmless).
class MarginalLikelihood {
  public:
    MarginalLikelihood(const DataMatrix& data, LikelihoodConfig cfg = {})
        : data_(&data), g_(cfg.effective_g(data.n)) {}

    const DataMatrix& data() const { return *data_; }
    double fraction() const { return g_; }

    /// ln f(x_A | complete graph on A); empty A gives 0.
    double subset_value(const VertexSet& a) const {
        const int q = a.count();
        if (q == 0) return 0.0;
        const double ld = gram_logdet(a);
        const double n = data_->n;
        const double x1 = (g_ * n + q - 1.0) / 2.0;
        const double x0 = (n + q - 1.0) / 2.0;
        // ln det(g Gram_A / 2) = q ln(g/2) + ln det Gram_A
        const double t1 = x1 * (q * std::log(g_ / 2.0) + ld) - log_mvgamma(q, x1);
        const double t0 = x0 * (ld - q * std::numbers::ln2) - log_mvgamma(q, x0);
        return -(n * q / 2.0) * std::log(2.0 * std::numbers::pi) + t1 - t0;
    }

    double log_marginal(const JunctionTree& jt) const {
        double s = 0.0;
        for (const VertexSet& c : jt.cliques) s += subset_value(c);
        for (const VertexSet& sep : jt.separators) s -= subset_value(sep);
        return s;
    }

    double log_marginal(const Graph& g) const {
        if (g.vertex_count() != data_->p) throw DomainError("graph and data dimension mismatch");
        return log_marginal(junction_tree(g));
    }

    /// Score change from adding non-edge (a,b) to a decomposable graph where
    /// the addition is legal. With S = N(a) ∩ N(b), only one clique and one
    /// separator pair change:
    ///   delta = v(S+a+b) + v(S) - v(S+a) - v(S+b).
    double delta_add(const Graph& g, int a, int b) const {
        VertexSet s = g.neighbors(a);
        s &= g.neighbors(b);
        VertexSet sa = s, sb = s, sab = s;
        sa.set(a);
        sb.set(b);
        sab.set(a);
        sab.set(b);
        return subset_value(sab) + subset_value(s) - subset_value(sa) - subset_value(sb);
    }

    /// Score change from deleting edge (a,b) lying in the single clique C;
    /// with S = C minus {a,b}:
    ///   delta = v(S+a) + v(S+b) - v(C) - v(S).
    double delta_delete(const VertexSet& clique, int a, int b) const {
        VertexSet s = clique;
        s.reset(a);
        s.reset(b);
        VertexSet sa = s, sb = s;
        sa.set(a);
        sb.set(b);
        return subset_value(sa) + subset_value(sb) - subset_value(clique) - subset_value(s);
    }

    std::size_t cache_size() const {
        std::shared_lock lock(mutex_);
        return cache_.size();
    }

  private:
    double gram_logdet(const VertexSet& a) const {
        {
            std::shared_lock lock(mutex_);
            auto it = cache_.find(a);
            if (it != cache_.end()) return it->second;
        }
        const double ld = detail::logdet_pd(detail::principal_submatrix(data_->gram, a.to_vector()));
        std::unique_lock lock(mutex_);
        return cache_.emplace(a, ld).first->second;
    }

    const DataMatrix* data_;
    double g_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<VertexSet, double, VertexSetHash> cache_;
};

inline double log_marginal_likelihood(const DataMatrix& data, const Graph& g, LikelihoodConfig cfg = {}) {
    return MarginalLikelihood(data, cfg).log_marginal(g);
}

/// The universal ranking key: ln f(x|G) + ln pi(G), unnormalized.
inline double log_posterior_score(const DataMatrix& data, const Graph& g, const PriorSpec& prior,
                                  LikelihoodConfig cfg = {}) {
    return log_marginal_likelihood(data, g, cfg) + log_prior(prior, g);
}

}  // namespace ggm
