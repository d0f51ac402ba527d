#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "ggm/chordal.hpp"
#include "ggm/errors.hpp"
#include "ggm/gaussian.hpp"
#include "ggm/rng.hpp"
#include "oracles.hpp"

using ggm::CovarianceModel;
using ggm::Graph;

TEST_CASE("kl divergence basics", "[gaussian]") {
    Eigen::MatrixXd s1(2, 2), s2(2, 2);
    s1 << 2.0, 0.3, 0.3, 1.0;
    s2 << 1.0, -0.2, -0.2, 1.5;
    REQUIRE(ggm::kl_gaussian(s1, s1) == 0.0);
    REQUIRE(ggm::kl_gaussian(s1, s2) > 0.0);
    REQUIRE(std::abs(ggm::kl_gaussian(s1, s2) - ggm::kl_gaussian(s2, s1)) > 1e-6);  // not symmetric

    // One dimension has a textbook closed form.
    Eigen::MatrixXd a(1, 1), b(1, 1);
    a << 3.0;
    b << 1.5;
    const double r = 3.0 / 1.5;
    REQUIRE(std::abs(ggm::kl_gaussian(a, b) - 0.5 * (r - 1.0 - std::log(r))) < 1e-12);

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
    REQUIRE_THROWS_AS(ggm::kl_gaussian(bad, s2), ggm::NotPositiveDefiniteError);
    REQUIRE_THROWS_AS(ggm::kl_gaussian(s1, Eigen::MatrixXd::Identity(3, 3)), ggm::DomainError);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.2, 0.3, 1.0;
    REQUIRE_THROWS_AS(ggm::kl_gaussian(asym, s2), ggm::DomainError);
}

TEST_CASE("kl divergence agrees with quadrature in two dimensions", "[gaussian]") {
    std::mt19937 gen(2);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd s1 = oracle::random_spd(2, gen);
        const Eigen::MatrixXd s2 = oracle::random_spd(2, gen);
        const double closed = ggm::kl_gaussian(s1, s2);
        const double quad = oracle::kl_quadrature_2d(s1, s2);
        REQUIRE(std::abs(closed - quad) < 1e-5 * std::max(1.0, closed));
    }
}

TEST_CASE("projection onto the complete graph is the identity", "[gaussian]") {
    std::mt19937 gen(3);
    const Eigen::MatrixXd sigma = oracle::random_spd(4, gen);
    const CovarianceModel proj = ggm::iproject(sigma, Graph::complete(4));
    REQUIRE((proj.sigma - sigma).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE(ggm::kl_gaussian(sigma, proj.sigma) < 1e-10);
}

TEST_CASE("projection zeroes the precision off the target edges", "[gaussian]") {
    std::mt19937 gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 3 + static_cast<int>(gen() % 4);  // 3..6
        const Eigen::MatrixXd sigma = oracle::random_spd(p, gen);
        const Graph target = oracle::random_decomposable(p, 8 * p, gen);
        const CovarianceModel proj = ggm::iproject(sigma, target);

        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (!target.has_edge(i, j)) REQUIRE(std::abs(proj.precision(i, j)) < 1e-10);

        // Clique marginals are preserved exactly.
        for (const auto& c : ggm::junction_tree(target).cliques) {
            for (int i : c.to_vector())
                for (int j : c.to_vector())
                    REQUIRE(std::abs(proj.sigma(i, j) - sigma(i, j)) < 1e-8);
        }

        // tr(K-hat Sigma) collapses to the dimension, which reduces the KL
        // divergence to the log-determinant ratio.
        const double tr = (proj.precision * sigma).trace();
        REQUIRE(std::abs(tr - p) < 1e-8);
        const double kl = ggm::kl_gaussian(sigma, proj.sigma);
        const double half_logdet = 0.5 * (std::log(proj.sigma.determinant()) - std::log(sigma.determinant()));
        REQUIRE(std::abs(kl - half_logdet) < 1e-8);
        REQUIRE(kl >= -1e-12);  // complete targets give KL 0 up to rounding
    }
}

TEST_CASE("projection is the closest model in its family", "[gaussian]") {
    // Perturbing the projected precision inside the allowed sparsity pattern
    // can only increase the divergence.
    std::mt19937 gen(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        const int p = 4;
        const Eigen::MatrixXd sigma = oracle::random_spd(p, gen);
        const Graph target = oracle::random_decomposable(p, 25, gen);
        const CovarianceModel proj = ggm::iproject(sigma, target);
        const double base = ggm::kl_gaussian(sigma, proj.sigma);
        for (int probe = 0; probe < 20; ++probe) {
            Eigen::MatrixXd k = proj.precision;
            for (int i = 0; i < p; ++i) {
                k(i, i) += 0.05 * nd(gen);
                for (int j = i + 1; j < p; ++j)
                    if (target.has_edge(i, j)) {
                        const double eps = 0.05 * nd(gen);
                        k(i, j) += eps;
                        k(j, i) += eps;
                    }
            }
            const Eigen::LLT<Eigen::MatrixXd> llt(k);
            if (llt.info() != Eigen::Success) continue;  // wandered out of the cone
            const Eigen::MatrixXd cand = llt.solve(Eigen::MatrixXd::Identity(p, p));
            REQUIRE(ggm::kl_gaussian(sigma, cand) >= base - 1e-10);
        }
    }
}

TEST_CASE("cheapest single-edge deletion from the saturated model", "[gaussian]") {
    std::mt19937 gen(13);
    for (int trial = 0; trial < 40; ++trial) {
        const int p = 3 + static_cast<int>(gen() % 4);  // 3..6
        const Eigen::MatrixXd sigma = oracle::random_spd(p, gen);
        const ggm::MinKlResult res = ggm::min_kl_complete_to_subgraphs(sigma);

        // Brute force: project onto every one-edge-deleted complete graph.
        double best = std::numeric_limits<double>::infinity();
        ggm::Edge best_edge{-1, -1};
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b) {
                const Graph g = Graph::complete(p).without_edge(a, b);
                const double kl = ggm::kl_gaussian(sigma, ggm::iproject(sigma, g).sigma);
                if (kl < best) {
                    best = kl;
                    best_edge = ggm::Edge{a, b};
                }
            }
        REQUIRE(std::abs(res.value - best) < 1e-10);
        REQUIRE(res.edge == best_edge);

        // Closed form through the partial correlation of the dropped pair.
        const Eigen::MatrixXd k = sigma.inverse();
        const double rho = -k(res.edge.a, res.edge.b) / std::sqrt(k(res.edge.a, res.edge.a) * k(res.edge.b, res.edge.b));
        REQUIRE(std::abs(res.value + 0.5 * std::log1p(-rho * rho)) < 1e-10);
    }

    REQUIRE_THROWS_AS(ggm::min_kl_complete_to_subgraphs(Eigen::MatrixXd::Identity(1, 1)), ggm::DomainError);
}

TEST_CASE("precision sampler matches Wishart moments", "[gaussian]") {
    // With scale D the density is Wishart with nu = delta + p - 1 degrees of
    // freedom and matrix parameter D^{-1}, so E[K] = nu D^{-1}.
    ggm::Rng rng(2026);
    const int p = 3;
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(p, p);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    const double delta = 3.0;
    const double nu = delta + p - 1;
    const Eigen::MatrixXd dinv = d.inverse();

    const int draws = 40000;
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < draws; ++i) {
        const Eigen::MatrixXd k = ggm::sample_complete_gwishart({delta, d}, rng);
        REQUIRE((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE(Eigen::LLT<Eigen::MatrixXd>(k).info() == Eigen::Success);
        mean += k;
    }
    mean /= draws;
    // Monte Carlo error on each entry is about sqrt(2 nu)/sqrt(draws) ~ 0.016.
    REQUIRE((mean - nu * dinv).cwiseAbs().maxCoeff() < 0.08);
}

TEST_CASE("precision sampler is a pure function of the rng state", "[gaussian]") {
    const ggm::GWishartSpec spec{3.0, Eigen::MatrixXd::Identity(4, 4)};
    ggm::Rng r1(9), r2(9);
    const Eigen::MatrixXd k1 = ggm::sample_complete_gwishart(spec, r1);
    const Eigen::MatrixXd k2 = ggm::sample_complete_gwishart(spec, r2);
    REQUIRE((k1.array() == k2.array()).all());

    ggm::Rng r3(10);
    const Eigen::MatrixXd k3 = ggm::sample_complete_gwishart(spec, r3);
    REQUIRE_FALSE((k1.array() == k3.array()).all());

    REQUIRE_THROWS_AS(ggm::sample_complete_gwishart({0.0, Eigen::MatrixXd::Identity(2, 2)}, r1),
                      ggm::DomainError);
}

TEST_CASE("gaussian sampler covariance converges", "[gaussian]") {
    Eigen::MatrixXd sigma(3, 3);
    sigma << 2.0, 0.8, 0.0, 0.8, 1.5, -0.4, 0.0, -0.4, 1.0;
    ggm::Rng rng(31);
    const int n = 200000;
    const ggm::DataMatrix data = ggm::sample_mvn(sigma, n, rng);
    REQUIRE(data.n == n);
    REQUIRE(data.p == 3);
    // Columns are centered by construction.
    REQUIRE(data.values.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd cov = data.gram / (n - 1);
    REQUIRE((cov - sigma).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("gaussian sampler determinism and validation", "[gaussian]") {
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
    ggm::Rng r1(5), r2(5);
    const ggm::DataMatrix a = ggm::sample_mvn(sigma, 20, r1);
    const ggm::DataMatrix b = ggm::sample_mvn(sigma, 20, r2);
    REQUIRE((a.values.array() == b.values.array()).all());

    ggm::Rng r3(5);
    REQUIRE_THROWS_AS(ggm::sample_mvn(sigma, 1, r3), ggm::DomainError);
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 3.0, 3.0, 1.0;
    REQUIRE_THROWS_AS(ggm::sample_mvn(bad, 10, r3), ggm::NotPositiveDefiniteError);
}
