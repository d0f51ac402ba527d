#pragma once

// Reference implementations used only by the tests. Everything here is
// written from the mathematical definitions with algorithms deliberately
// different from the library's: chordality by induced-cycle enumeration
// instead of maximum cardinality search, junction trees by maximum-weight
// spanning tree instead of clique extraction along a perfect ordering,
// determinants by full-pivot LU instead of Cholesky, KL divergence by
// two-dimensional quadrature, and size-law moments in plain long double
// arithmetic instead of log-sum-exp.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ggm/graph.hpp"

namespace oracle {

// A graph is chordal iff no vertex subset induces a plain cycle of length
// >= 4 (all induced degrees exactly 2 and connected). Exponential in p, so
// keep p small in the tests that call this.
inline bool is_chordal(const ggm::Graph& g) {
    const int p = g.vertex_count();
    if (p > 20) throw std::runtime_error("oracle::is_chordal is exponential; keep p <= 20");
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
        std::vector<int> vs;
        for (int v = 0; v < p; ++v)
            if (mask & (1u << v)) vs.push_back(v);
        if (vs.size() < 4) continue;
        bool all_degree_two = true;
        for (int v : vs) {
            int deg = 0;
            for (int u : vs)
                if (u != v && g.has_edge(u, v)) ++deg;
            if (deg != 2) {
                all_degree_two = false;
                break;
            }
        }
        if (!all_degree_two) continue;
        // connected within the subset?
        std::vector<int> stack{vs[0]};
        std::vector<char> seen(static_cast<std::size_t>(p), 0);
        seen[static_cast<std::size_t>(vs[0])] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int u : vs)
                if (!seen[static_cast<std::size_t>(u)] && g.has_edge(u, v)) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    ++reached;
                    stack.push_back(u);
                }
        }
        if (reached == vs.size()) return false;  // induced chordless cycle found
    }
    return true;
}

// All maximal cliques by subset enumeration (p <= 20).
inline std::vector<std::vector<int>> maximal_cliques(const ggm::Graph& g) {
    const int p = g.vertex_count();
    if (p > 20) throw std::runtime_error("oracle::maximal_cliques is exponential; keep p <= 20");
    auto complete = [&](std::uint32_t mask) {
        for (int a = 0; a < p; ++a) {
            if (!(mask & (1u << a))) continue;
            for (int b = a + 1; b < p; ++b)
                if ((mask & (1u << b)) && !g.has_edge(a, b)) return false;
        }
        return true;
    };
    std::vector<std::uint32_t> cliques;
    for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
        if (!complete(mask)) continue;
        bool maximal = true;
        for (int v = 0; v < p && maximal; ++v)
            if (!(mask & (1u << v)) && complete(mask | (1u << v))) maximal = false;
        if (maximal) cliques.push_back(mask);
    }
    std::vector<std::vector<int>> out;
    for (std::uint32_t mask : cliques) {
        std::vector<int> vs;
        for (int v = 0; v < p; ++v)
            if (mask & (1u << v)) vs.push_back(v);
        out.push_back(std::move(vs));
    }
    return out;
}

struct CliqueTree {
    std::vector<std::vector<int>> cliques;
    std::vector<std::vector<int>> separators;  // one per tree edge; may be empty sets
};

// Junction tree by Kruskal on the complete clique graph weighted by
// intersection size. For a decomposable graph any maximum-weight spanning
// tree of that graph is a junction tree; the separator multiset it yields
// is the graph invariant the decomposition formulas need.
inline CliqueTree clique_tree(const ggm::Graph& g) {
    CliqueTree t;
    t.cliques = maximal_cliques(g);
    const std::size_t nc = t.cliques.size();
    if (nc <= 1) return t;
    struct Cand {
        std::size_t i, j;
        int weight;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = i + 1; j < nc; ++j) {
            std::vector<int> inter;
            std::set_intersection(t.cliques[i].begin(), t.cliques[i].end(), t.cliques[j].begin(),
                                  t.cliques[j].end(), std::back_inserter(inter));
            cands.push_back({i, j, static_cast<int>(inter.size())});
        }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.weight > y.weight; });
    std::vector<std::size_t> comp(nc);
    for (std::size_t i = 0; i < nc; ++i) comp[i] = i;
    auto find = [&](std::size_t x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (const Cand& c : cands) {
        const std::size_t a = find(c.i), b = find(c.j);
        if (a == b) continue;
        comp[a] = b;
        std::vector<int> inter;
        std::set_intersection(t.cliques[c.i].begin(), t.cliques[c.i].end(), t.cliques[c.j].begin(),
                              t.cliques[c.j].end(), std::back_inserter(inter));
        t.separators.push_back(std::move(inter));
        if (t.separators.size() == nc - 1) break;
    }
    return t;
}

// Multivariate gamma via the recurrence
//   Gamma_1(x) = Gamma(x),  Gamma_q(x) = pi^((q-1)/2) Gamma(x) Gamma_{q-1}(x - 1/2).
inline double log_mvgamma(int q, double x) {
    if (q == 1) return std::lgamma(x);
    return 0.5 * (q - 1) * std::log(std::numbers::pi) + std::lgamma(x) + log_mvgamma(q - 1, x - 0.5);
}

inline double logdet_lu(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 0.0;
    return std::log(m.fullPivLu().determinant());
}

// Fractional marginal likelihood of a data subset under the saturated model,
// assembled from scratch: fresh Gram submatrix, LU determinant, recursive
// multivariate gamma. `x` must already be column-centered.
inline double subset_marginal(const Eigen::MatrixXd& x, const std::vector<int>& subset, double g_frac) {
    const int q = static_cast<int>(subset.size());
    if (q == 0) return 0.0;
    const double n = static_cast<double>(x.rows());
    Eigen::MatrixXd xa(x.rows(), q);
    for (int j = 0; j < q; ++j) xa.col(j) = x.col(subset[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd s = xa.transpose() * xa;
    auto term = [&](double b, double scale) {
        const double arg = (b + q - 1.0) / 2.0;
        return arg * logdet_lu(0.5 * scale * s) - log_mvgamma(q, arg);
    };
    return -(n * q / 2.0) * std::log(2.0 * std::numbers::pi) + term(g_frac * n, g_frac) - term(n, 1.0);
}

// Markov ratio over an independently built clique tree.
inline double graph_marginal(const Eigen::MatrixXd& x, const ggm::Graph& g, double g_frac) {
    const CliqueTree t = clique_tree(g);
    double total = 0.0;
    for (const auto& c : t.cliques) total += subset_marginal(x, c, g_frac);
    for (const auto& s : t.separators) total -= subset_marginal(x, s, g_frac);
    return total;
}

// KL divergence between two bivariate centered Gaussians by composite
// Simpson quadrature of p1 log(p1/p2). Accurate to ~1e-7 for the
// well-conditioned inputs the tests feed it.
inline double kl_quadrature_2d(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
    const Eigen::Matrix2d k1 = s1.inverse(), k2 = s2.inverse();
    const double ld1 = std::log(s1.determinant()), ld2 = std::log(s2.determinant());
    const double span = 9.0 * std::sqrt(std::max(s1(0, 0), s1(1, 1)));
    const int steps = 800;  // composite Simpson needs an even panel count
    const double hgrid = 2.0 * span / steps;
    auto weight = [&](int i) {
        if (i == 0 || i == steps) return 1.0;
        return (i % 2 == 1) ? 4.0 : 2.0;
    };
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double xx = -span + i * hgrid;
        for (int j = 0; j <= steps; ++j) {
            const double yy = -span + j * hgrid;
            Eigen::Vector2d v(xx, yy);
            const double q1 = v.dot(k1 * v), q2 = v.dot(k2 * v);
            const double logp1 = -std::log(2.0 * std::numbers::pi) - 0.5 * ld1 - 0.5 * q1;
            const double logratio = 0.5 * (ld2 - ld1) + 0.5 * (q2 - q1);
            acc += weight(i) * weight(j) * std::exp(logp1) * logratio;
        }
    }
    return acc * hgrid * hgrid / 9.0;
}

// Mean and variance of the size law in plain long double arithmetic.
// graph_count == true weighs class k by the number of graphs of that size.
inline std::pair<double, double> loss_size_moments(int m, double h, double c, bool graph_count) {
    std::vector<long double> binom(static_cast<std::size_t>(m) + 1, 0.0L);
    binom[0] = 1.0L;
    for (int row = 1; row <= m; ++row)
        for (int k = row; k >= 1; --k) binom[static_cast<std::size_t>(k)] += binom[static_cast<std::size_t>(k - 1)];
    long double z = 0.0L, s1 = 0.0L, s2 = 0.0L;
    for (int k = 0; k <= m; ++k) {
        long double w = std::exp(-static_cast<long double>(h) *
                                 ((1.0L - c) * k + c * std::log(binom[static_cast<std::size_t>(k)])));
        if (graph_count) w *= binom[static_cast<std::size_t>(k)];
        z += w;
        s1 += k * w;
        s2 += static_cast<long double>(k) * k * w;
    }
    const long double mean = s1 / z;
    return {static_cast<double>(mean), static_cast<double>(s2 / z - mean * mean)};
}

// Random walk over the decomposable space using only oracle chordality.
inline ggm::Graph random_decomposable(int p, int steps, std::mt19937& gen) {
    ggm::Graph g(p);
    std::uniform_int_distribution<int> pick(0, p - 1);
    for (int s = 0; s < steps; ++s) {
        const int a = pick(gen), b = pick(gen);
        if (a == b) continue;
        ggm::Graph t = g.toggled(a, b);
        if (is_chordal(t)) g = std::move(t);
    }
    return g;
}

// Well-conditioned random covariance matrix.
inline Eigen::MatrixXd random_spd(int p, std::mt19937& gen) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = nd(gen);
    return a * a.transpose() + 0.5 * static_cast<double>(p) * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace oracle
