#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ggm/graph.hpp"

namespace ggm {

inline double log_binom(int m, int k) {
    if (k < 0 || k > m) throw DomainError("log_binom: k out of range");
    return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

enum class PriorFamily { LossBased, Uniform, CarvalhoScott, VillaLee, Mixture, Bernoulli, BetaBinomial };

inline const char* to_string(PriorFamily f) {
    switch (f) {
        case PriorFamily::LossBased: return "loss-based";
        case PriorFamily::Uniform: return "uniform";
        case PriorFamily::CarvalhoScott: return "carvalho-scott";
        case PriorFamily::VillaLee: return "villa-lee";
        case PriorFamily::Mixture: return "mixture";
        case PriorFamily::Bernoulli: return "bernoulli";
        case PriorFamily::BetaBinomial: return "beta-binomial";
    }
    return "?";
}

/// Graph prior evaluated through the edge count only. The loss-based family
/// has kernel exp(-h[(1-c)k + c ln C(m,k)]); Uniform, CarvalhoScott,
/// VillaLee and Mixture are the (h,c) corners (0,*), (1,1), (h,0), (1,1/2).
struct PriorSpec {
    PriorFamily family = PriorFamily::Uniform;
    int m = 0;          // maximum edge count p(p-1)/2
    double h = 0.0;     // LossBased, VillaLee
    double c = 0.0;     // LossBased
    double phi = 0.0;   // Bernoulli
    double a = 0.0;     // BetaBinomial
    double b = 0.0;     // BetaBinomial

    static PriorSpec loss_based(int m, double h, double c) {
        require_m(m);
        if (!(h >= 0.0)) throw DomainError("loss-based prior requires h >= 0");
        if (!(c >= 0.0 && c <= 1.0)) throw DomainError("loss-based prior requires c in [0,1]");
        PriorSpec s;
        s.family = PriorFamily::LossBased;
        s.m = m;
        s.h = h;
        s.c = c;
        return s;
    }
    static PriorSpec uniform(int m) {
        require_m(m);
        PriorSpec s;
        s.family = PriorFamily::Uniform;
        s.m = m;
        return s;
    }
    static PriorSpec carvalho_scott(int m) {
        require_m(m);
        PriorSpec s;
        s.family = PriorFamily::CarvalhoScott;
        s.m = m;
        s.h = 1.0;
        s.c = 1.0;
        return s;
    }
    static PriorSpec villa_lee(int m, double h) {
        require_m(m);
        if (!(h >= 0.0)) throw DomainError("villa-lee prior requires h >= 0");
        PriorSpec s;
        s.family = PriorFamily::VillaLee;
        s.m = m;
        s.h = h;
        return s;
    }
    static PriorSpec mixture(int m) {
        require_m(m);
        PriorSpec s;
        s.family = PriorFamily::Mixture;
        s.m = m;
        s.h = 1.0;
        s.c = 0.5;
        return s;
    }
    static PriorSpec bernoulli(int m, double phi) {
        require_m(m);
        if (!(phi > 0.0 && phi < 1.0)) throw DomainError("bernoulli prior requires phi in (0,1)");
        PriorSpec s;
        s.family = PriorFamily::Bernoulli;
        s.m = m;
        s.phi = phi;
        return s;
    }
    static PriorSpec beta_binomial(int m, double a, double b) {
        require_m(m);
        if (!(a > 0.0 && b > 0.0)) throw DomainError("beta-binomial prior requires a,b > 0");
        PriorSpec s;
        s.family = PriorFamily::BetaBinomial;
        s.m = m;
        s.a = a;
        s.b = b;
        return s;
    }

    /// (h,c) for the loss-based subfamilies; DomainError for the others.
    std::pair<double, double> loss_params() const {
        switch (family) {
            case PriorFamily::LossBased: return {h, c};
            case PriorFamily::Uniform: return {0.0, 0.0};
            case PriorFamily::CarvalhoScott: return {1.0, 1.0};
            case PriorFamily::VillaLee: return {h, 0.0};
            case PriorFamily::Mixture: return {1.0, 0.5};
            default: throw DomainError("prior family has no (h,c) parameters");
        }
    }

  private:
    static void require_m(int m) {
        if (m < 0) throw DomainError("prior requires m >= 0");
    }
};

/// Unnormalized log prior mass of a graph with k edges out of m possible.
inline double log_prior_size(const PriorSpec& spec, int k) {
    if (k < 0 || k > spec.m) throw DomainError("edge count outside 0..m");
    switch (spec.family) {
        case PriorFamily::Bernoulli:
            return k * std::log(spec.phi) + (spec.m - k) * std::log1p(-spec.phi);
        case PriorFamily::BetaBinomial:
            return log_beta(spec.a + k, spec.b + spec.m - k) - log_beta(spec.a, spec.b);
        default: {
            const auto [h, c] = spec.loss_params();
            return -h * ((1.0 - c) * k + c * log_binom(spec.m, k));
        }
    }
}

inline double log_prior(const PriorSpec& spec, const Graph& g) {
    if (g.max_edge_count() != spec.m)
        throw DomainError("prior was specified for a different number of vertices");
    return log_prior_size(spec, g.edge_count());
}

/// Per-size: each edge count k weighted by its prior kernel alone.
/// GraphCount: additionally weighted by the C(m,k) graphs of that size,
/// i.e. the size law of a graph drawn from the prior over all graphs.
enum class SizeWeighting { PerSize, GraphCount };

struct SizeDistribution {
    int m = 0;
    SizeWeighting weighting = SizeWeighting::PerSize;
    std::vector<double> pmf;  // index k = 0..m
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

inline SizeDistribution size_distribution(const PriorSpec& spec, SizeWeighting mode) {
    if (spec.m < 1) throw DomainError("size distribution requires m >= 1");
    std::vector<double> lw(static_cast<std::size_t>(spec.m) + 1);
    for (int k = 0; k <= spec.m; ++k) {
        lw[static_cast<std::size_t>(k)] = log_prior_size(spec, k);
        if (mode == SizeWeighting::GraphCount) lw[static_cast<std::size_t>(k)] += log_binom(spec.m, k);
    }
    const double mx = *std::max_element(lw.begin(), lw.end());
    double total = 0.0;
    for (double& v : lw) {
        v = std::exp(v - mx);
        total += v;
    }
    SizeDistribution dist;
    dist.m = spec.m;
    dist.weighting = mode;
    dist.pmf.resize(lw.size());
    for (std::size_t k = 0; k < lw.size(); ++k) dist.pmf[k] = lw[k] / total;
    return dist;
}

inline Moments size_moments(const SizeDistribution& dist) {
    double mean = 0.0;
    for (std::size_t k = 0; k < dist.pmf.size(); ++k) mean += static_cast<double>(k) * dist.pmf[k];
    double var = 0.0;
    for (std::size_t k = 0; k < dist.pmf.size(); ++k) {
        const double d = static_cast<double>(k) - mean;
        var += d * d * dist.pmf[k];
    }
    return {mean, var};
}

namespace detail {

inline Moments loss_based_moments(int m, double h, double c) {
    return size_moments(size_distribution(PriorSpec::loss_based(m, h, c), SizeWeighting::PerSize));
}

/// Mean of the per-size law is m/2 at h=0 and non-increasing toward 0 as h
/// grows (for c < 1); returns the h in [0, h_max] matching target_mean, or
/// nullopt when even h_max leaves the mean above target.
inline std::optional<double> solve_h_for_mean(int m, double c, double target_mean, double h_max) {
    const double tol = 1e-7;
    double lo = 0.0, hi = h_max;
    double f_lo = loss_based_moments(m, lo, c).mean - target_mean;
    if (std::abs(f_lo) <= tol) return lo;
    if (f_lo < 0.0) return std::nullopt;  // target above m/2, handled by caller
    double f_hi = loss_based_moments(m, hi, c).mean - target_mean;
    if (std::abs(f_hi) <= tol) return hi;
    if (f_hi > 0.0) return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = loss_based_moments(m, mid, c).mean - target_mean;
        if (std::abs(f) <= tol) return mid;
        if (f > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Finds a loss-based (h,c) whose per-size law hits target_mean (within
/// 1e-4) and, when requested, target_variance (within 1e-2). The search runs
/// over [0,20] x [0,1]; along the constant-mean ridge the variance grows
/// with c, so candidate c values are scanned upward and the smallest
/// solution is returned. `fixed_c` pins c and solves for h alone.
inline PriorSpec calibrate(int m, double target_mean, std::optional<double> target_variance = std::nullopt,
                           std::optional<double> fixed_c = std::nullopt) {
    if (m < 1) throw DomainError("calibrate requires m >= 1");
    if (!(target_mean > 0.0 && target_mean < m)) throw DomainError("target mean must lie in (0, m)");
    if (fixed_c && !(*fixed_c >= 0.0 && *fixed_c <= 1.0)) throw DomainError("fixed c must lie in [0,1]");
    const double h_max = 20.0;
    const double mean_tol = 1e-4, var_tol = 1e-2;

    auto finish = [&](double h, double c) {
        const Moments mom = detail::loss_based_moments(m, h, c);
        if (std::abs(mom.mean - target_mean) > mean_tol)
            throw UnattainableError("no h in [0,20] attains the requested mean");
        if (target_variance && std::abs(mom.variance - *target_variance) > var_tol)
            throw UnattainableError("requested variance not attainable at the requested mean");
        return PriorSpec::loss_based(m, h, c);
    };

    if (fixed_c || !target_variance) {
        const double c = fixed_c.value_or(0.0);  // smallest-c convention when unconstrained
        const auto h = detail::solve_h_for_mean(m, c, target_mean, h_max);
        if (!h) throw UnattainableError("no h in [0,20] attains the requested mean at this c");
        return finish(*h, c);
    }

    // Scan c upward for the first bracket where the ridge variance crosses
    // the target, then bisect inside it.
    std::vector<double> grid;
    for (int i = 0; i <= 199; ++i) grid.push_back(i * 0.005);
    grid.push_back(0.999);
    grid.push_back(0.9995);
    double prev_c = -1.0, prev_f = 0.0;
    bool have_prev = false;
    for (double c : grid) {
        const auto h = detail::solve_h_for_mean(m, c, target_mean, h_max);
        if (!h) break;  // means pinned above target from here on (c near 1)
        const double f = detail::loss_based_moments(m, *h, c).variance - *target_variance;
        if (std::abs(f) <= 0.5 * var_tol) return finish(*h, c);
        if (have_prev && prev_f * f < 0.0) {
            double lo = prev_c, hi = c, f_lo = prev_f;
            for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
                const double mid = 0.5 * (lo + hi);
                const auto hm = detail::solve_h_for_mean(m, mid, target_mean, h_max);
                if (!hm) {
                    hi = mid;
                    continue;
                }
                const double fm = detail::loss_based_moments(m, *hm, mid).variance - *target_variance;
                if (std::abs(fm) <= 0.5 * var_tol) return finish(*hm, mid);
                if (f_lo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    f_lo = fm;
                }
            }
            const auto hm = detail::solve_h_for_mean(m, 0.5 * (lo + hi), target_mean, h_max);
            if (hm) return finish(*hm, 0.5 * (lo + hi));
            break;
        }
        have_prev = true;
        prev_c = c;
        prev_f = f;
    }
    throw UnattainableError("no (h,c) in [0,20]x[0,1] attains the requested mean/variance pair");
}

}  // namespace ggm
