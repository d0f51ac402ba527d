#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ggm/gaussian.hpp"
#include "ggm/prior.hpp"
#include "ggm/search.hpp"

namespace ggm {

/// The 10-vertex, 20-edge decomposable graph used as ground truth by the
/// recovery studies; shipped redundantly as data/figure_graph_10v20.txt.
inline Graph base_graph() {
    static constexpr int edges[20][2] = {{0, 5}, {0, 6}, {1, 3}, {2, 3}, {2, 5}, {2, 6}, {2, 7},
                                         {2, 8}, {3, 5}, {3, 7}, {3, 8}, {4, 5}, {4, 8}, {5, 6},
                                         {5, 7}, {5, 8}, {6, 8}, {6, 9}, {7, 8}, {8, 9}};
    Graph g(10);
    for (const auto& e : edges) g.add_edge(e[0], e[1]);
    return g;
}

struct SimStudySpec {
    int noise_vertices = 5;  // isolated extra vertices appended after the 10 base ones
    int n = 50;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

/// Ground-truth Gaussian for the recovery study: precision -0.3 on the base
/// edges, diagonal 1.05 * (absolute row sum) + 1 so the matrix is strictly
/// diagonally dominant, hence positive definite; noise vertices are
/// independent unit-variance coordinates.
inline CovarianceModel build_true_model(const SimStudySpec& spec) {
    if (spec.noise_vertices < 0) throw DomainError("noise vertex count must be nonnegative");
    const Graph base = base_graph();
    const int p = base.vertex_count() + spec.noise_vertices;
    Graph truth(p);
    for (const Edge& e : base.edges()) truth.add_edge(e.a, e.b);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(p, p);
    for (const Edge& e : truth.edges()) k(e.a, e.b) = k(e.b, e.a) = -0.3;
    for (int i = 0; i < p; ++i) k(i, i) = 1.05 * k.row(i).cwiseAbs().sum() + 1.0;
    CovarianceModel model;
    model.precision = k;
    model.sigma = detail::pd_inverse(k, "build_true_model");
    model.graph = truth;
    return model;
}

struct SimStudyRun {
    std::uint64_t seed = 0;
    std::string prior_label;
    double h = 0.0, c = 0.0;
    int false_positives = 0;  // median-graph edges absent from the truth
    int false_negatives = 0;  // truth edges absent from the median graph
    int true_positives = 0;
    int median_edges = 0;
    double mean_true_edge_inclusion = 0.0;
    double best_score = 0.0;
};

struct SimStudyReport {
    SimStudySpec spec;
    std::vector<SimStudyRun> runs;
};

/// One dataset per seed, searched under the four standard priors
/// (uniform, multiplicity-correcting, pure-size, and their midpoint).
/// FP/FN are judged against the median probability graph at the 0.5
/// threshold; the tp+fp = median size and fn+tp = 20 identities are
/// asserted on every run.
inline SimStudyReport run_sim_study(const SimStudySpec& spec, SearchConfig cfg) {
    const CovarianceModel model = build_true_model(spec);
    const Graph& truth = *model.graph;
    const int p = truth.vertex_count();
    const int m = p * (p - 1) / 2;

    const std::vector<std::pair<std::string, PriorSpec>> priors{
        {"uniform", PriorSpec::uniform(m)},
        {"carvalho-scott", PriorSpec::carvalho_scott(m)},
        {"villa-lee-1", PriorSpec::villa_lee(m, 1.0)},
        {"mixture", PriorSpec::mixture(m)},
    };

    SimStudyReport report;
    report.spec = spec;
    for (std::uint64_t seed : spec.seeds) {
        Rng data_rng(seed);
        const DataMatrix data = sample_mvn(model.sigma, spec.n, data_rng);
        for (const auto& [label, prior] : priors) {
            cfg.seed = seed;
            const SearchResult res = run_fincs(data, prior, cfg);
            SimStudyRun run;
            run.seed = seed;
            run.prior_label = label;
            if (prior.family != PriorFamily::Bernoulli && prior.family != PriorFamily::BetaBinomial) {
                const auto [h, c] = prior.loss_params();
                run.h = h;
                run.c = c;
            }
            double incl_sum = 0.0;
            for (const Edge& e : truth.edges()) {
                incl_sum += res.inclusion.at(e.a, e.b);
                if (res.median.has_edge(e.a, e.b))
                    ++run.true_positives;
                else
                    ++run.false_negatives;
            }
            run.false_positives = res.median.edge_count() - run.true_positives;
            run.median_edges = res.median.edge_count();
            run.mean_true_edge_inclusion = incl_sum / truth.edge_count();
            run.best_score = res.stats.best_score;
            if (run.true_positives + run.false_positives != run.median_edges ||
                run.false_negatives + run.true_positives != truth.edge_count())
                throw Error("sim study accounting identity violated");
            report.runs.push_back(std::move(run));
        }
    }
    return report;
}

struct CalibrationRow {
    std::string label;
    double h = 0.0, c = 0.0;
    SizeWeighting weighting = SizeWeighting::PerSize;
    double mean = 0.0;
    double variance = 0.0;
};

/// The prior-elicitation table: calibrated and directly-evaluated loss-based
/// settings at m=15, the Bernoulli(0.2) comparator under the graph-count
/// law, and the pure-size h=1 prior at m=136.
inline std::vector<CalibrationRow> run_calibration_study(int m = 15) {
    std::vector<CalibrationRow> rows;
    auto push_loss = [&](const std::string& label, const PriorSpec& s) {
        const Moments mom = size_moments(size_distribution(s, SizeWeighting::PerSize));
        const auto [h, c] = s.loss_params();
        rows.push_back({label, h, c, SizeWeighting::PerSize, mom.mean, mom.variance});
    };
    push_loss("calibrated mean 3", calibrate(m, 3.0));
    push_loss("direct (0.28, 0.11)", PriorSpec::loss_based(m, 0.28, 0.11));
    push_loss("calibrated mean 3, variance 35.5", calibrate(m, 3.0, 35.5));
    push_loss("direct (1.36, 0.93)", PriorSpec::loss_based(m, 1.36, 0.93));
    {
        const PriorSpec bern = PriorSpec::bernoulli(m, 0.2);
        const Moments mom = size_moments(size_distribution(bern, SizeWeighting::GraphCount));
        rows.push_back({"bernoulli 0.2 (graph-count law)", 0.0, 0.0, SizeWeighting::GraphCount, mom.mean, mom.variance});
    }
    push_loss("pure-size h=1, m=136", PriorSpec::villa_lee(136, 1.0));
    return rows;
}

enum class KlScaleVariant { Identity, Dense, DenseInverse };

inline const char* to_string(KlScaleVariant v) {
    switch (v) {
        case KlScaleVariant::Identity: return "identity";
        case KlScaleVariant::Dense: return "dense";
        case KlScaleVariant::DenseInverse: return "dense-inverse";
    }
    return "?";
}

/// Scale matrix for the prior draw at size v: identity, the all-entries
/// matrix with diagonal v and off-diagonal v-1, or that matrix's exact
/// inverse I - ((v-1)/(1+(v-1)v)) * ones.
inline Eigen::MatrixXd kl_scale_matrix(KlScaleVariant variant, int v) {
    switch (variant) {
        case KlScaleVariant::Identity: return Eigen::MatrixXd::Identity(v, v);
        case KlScaleVariant::Dense:
            return Eigen::MatrixXd::Identity(v, v) + (v - 1.0) * Eigen::MatrixXd::Ones(v, v);
        case KlScaleVariant::DenseInverse: {
            const double a = v - 1.0;
            return Eigen::MatrixXd::Identity(v, v) - (a / (1.0 + a * v)) * Eigen::MatrixXd::Ones(v, v);
        }
    }
    throw DomainError("unknown scale variant");
}

struct KlStudySpec {
    std::vector<int> sizes{3, 5, 10};
    int mc_samples = 1000;
    KlScaleVariant variant = KlScaleVariant::Identity;
    double delta = 3.0;
    std::uint64_t seed = 0;
};

struct KlCurvePoint {
    int size = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate, per graph size, of the expected cost of the best
/// single-edge deletion from the complete model when the precision is drawn
/// from the Wishart-form prior. One derived RNG substream per draw, indexed
/// across the whole study, so any execution order gives identical draws.
inline std::vector<KlCurvePoint> run_kl_study(const KlStudySpec& spec) {
    if (spec.mc_samples < 1) throw DomainError("kl study needs at least one draw");
    Rng master(spec.seed);
    std::vector<KlCurvePoint> curve;
    std::int64_t draw_index = 0;
    for (int v : spec.sizes) {
        if (v < 2) throw DomainError("kl study sizes must be >= 2");
        const GWishartSpec gw{spec.delta, kl_scale_matrix(spec.variant, v)};
        std::vector<double> vals(static_cast<std::size_t>(spec.mc_samples));
        for (int s = 0; s < spec.mc_samples; ++s, ++draw_index) {
            Rng r = master.substream(static_cast<std::uint64_t>(draw_index));
            const Eigen::MatrixXd k = sample_complete_gwishart(gw, r);
            const Eigen::MatrixXd sigma = detail::pd_inverse(k, "run_kl_study");
            vals[static_cast<std::size_t>(s)] = min_kl_complete_to_subgraphs(sigma).value;
        }
        double mean = 0.0;
        for (double x : vals) mean += x;
        mean /= spec.mc_samples;
        double ss = 0.0;
        for (double x : vals) ss += (x - mean) * (x - mean);
        const double sd = spec.mc_samples > 1 ? std::sqrt(ss / (spec.mc_samples - 1)) : 0.0;
        curve.push_back({v, mean, sd / std::sqrt(static_cast<double>(spec.mc_samples))});
    }
    return curve;
}

}  // namespace ggm
