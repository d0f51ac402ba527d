#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ggm/chordal.hpp"
#include "ggm/hiw.hpp"
#include "ggm/rng.hpp"

namespace ggm {

struct SearchConfig {
    std::int64_t iterations = 100000;
    int global_period = 50;
    int resample_period = 10;
    std::size_t list_capacity = 1000;
    double inclusion_clamp = 0.01;     // floor/ceiling on proposal weights
    std::uint64_t seed = 0;
    std::int64_t inclusion_resync = 10000;  // full q-hat recompute period; 0 disables
    std::int64_t progress_period = 0;       // stderr progress lines; 0 silences
    bool use_score_memo = true;

    void validate() const {
        if (iterations < 0) throw DomainError("iterations must be nonnegative");
        if (global_period < 1 || resample_period < 1) throw DomainError("move periods must be >= 1");
        if (list_capacity < 1) throw DomainError("list capacity must be >= 1");
        if (!(inclusion_clamp > 0.0 && inclusion_clamp < 0.5)) throw DomainError("inclusion clamp must lie in (0, 0.5)");
        if (inclusion_resync < 0 || progress_period < 0) throw DomainError("periods must be nonnegative");
    }
};

struct ScoredGraph {
    Graph graph;
    double score;
};

/// Bounded best-score list of unique graphs. Order inside the backing map is
/// ascending (score, key); reverse traversal gives the reporting order.
/// When full, a candidate must strictly beat the current minimum; the
/// incumbent wins ties, which keeps reruns deterministic.
class ScoredGraphList {
  public:
    explicit ScoredGraphList(std::size_t capacity = 1000) : capacity_(capacity) {
        if (capacity_ < 1) throw DomainError("list capacity must be >= 1");
    }

    struct OfferResult {
        bool inserted = false;
        std::optional<ScoredGraph> evicted;
    };

    OfferResult offer(const Graph& g, double score) {
        OfferResult res;
        PackedEdges key = g.packed();
        if (members_.contains(key)) return res;
        if (ordered_.size() >= capacity_) {
            auto lowest = ordered_.begin();
            if (score <= lowest->first.first) return res;
            res.evicted = ScoredGraph{std::move(lowest->second), lowest->first.first};
            members_.erase(lowest->first.second);
            ordered_.erase(lowest);
        }
        members_.insert(key);
        ordered_.emplace(std::make_pair(score, std::move(key)), g);
        res.inserted = true;
        return res;
    }

    bool contains(const PackedEdges& key) const { return members_.contains(key); }
    std::size_t size() const { return ordered_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return ordered_.empty(); }

    double max_score() const {
        if (empty()) throw EmptyListError();
        return ordered_.rbegin()->first.first;
    }
    double min_score() const {
        if (empty()) throw EmptyListError();
        return ordered_.begin()->first.first;
    }
    ScoredGraph best() const {
        if (empty()) throw EmptyListError();
        auto it = ordered_.rbegin();
        return {it->second, it->first.first};
    }

    /// Visit entries best-first.
    template <class Fn>
    void for_each(Fn&& fn) const {
        for (auto it = ordered_.rbegin(); it != ordered_.rend(); ++it) fn(it->second, it->first.first);
    }

    std::vector<ScoredGraph> entries_descending() const {
        std::vector<ScoredGraph> out;
        out.reserve(size());
        for_each([&](const Graph& g, double s) { out.push_back({g, s}); });
        return out;
    }

  private:
    std::size_t capacity_;
    std::map<std::pair<double, PackedEdges>, Graph> ordered_;
    std::unordered_set<PackedEdges, PackedEdgesHash> members_;
};

struct InclusionMatrix {
    int p = 0;
    Eigen::MatrixXd q;  // symmetric, zero diagonal

    InclusionMatrix() = default;
    explicit InclusionMatrix(int p_) : p(p_), q(Eigen::MatrixXd::Zero(p_, p_)) {}
    double at(int i, int j) const { return q(i, j); }
};

/// Score-weighted edge frequencies over the list:
/// q_ij = sum_r 1[(i,j) in G_r] exp(score_r - max) / sum_r exp(score_r - max).
inline InclusionMatrix update_inclusion(const ScoredGraphList& list, int p) {
    if (list.empty()) throw EmptyListError();
    const double mx = list.max_score();
    InclusionMatrix incl(p);
    double denom = 0.0;
    list.for_each([&](const Graph& g, double s) {
        const double w = std::exp(s - mx);
        denom += w;
        for (const Edge& e : g.edges()) {
            incl.q(e.a, e.b) += w;
            incl.q(e.b, e.a) += w;
        }
    });
    incl.q /= denom;
    return incl;
}

namespace detail {

/// Running numerator/denominator behind the live q-hat estimate. Deltas are
/// applied on every list mutation; run_fincs rebuilds periodically to keep
/// float drift away from the final (always fully recomputed) summary.
class InclusionTracker {
  public:
    explicit InclusionTracker(int p) : p_(p), num_(Eigen::MatrixXd::Zero(p, p)) {}

    void add(const Graph& g, double score) {
        if (denom_ == 0.0) {
            max_score_ = score;
        } else if (score > max_score_) {
            const double scale = std::exp(max_score_ - score);
            num_ *= scale;
            denom_ *= scale;
            max_score_ = score;
        }
        apply(g, std::exp(score - max_score_));
    }

    void remove(const Graph& g, double score) { apply(g, -std::exp(score - max_score_)); }

    void rebuild(const ScoredGraphList& list) {
        num_.setZero();
        denom_ = 0.0;
        if (list.empty()) return;
        max_score_ = list.max_score();
        list.for_each([&](const Graph& g, double s) { apply(g, std::exp(s - max_score_)); });
    }

    void snapshot_into(InclusionMatrix& out) const {
        if (out.p != p_) out = InclusionMatrix(p_);
        out.q = (num_ / denom_).cwiseMax(0.0).cwiseMin(1.0);
    }

  private:
    void apply(const Graph& g, double w) {
        denom_ += w;
        for (const Edge& e : g.edges()) {
            num_(e.a, e.b) += w;
            num_(e.b, e.a) += w;
        }
    }

    int p_;
    double max_score_ = 0.0;
    double denom_ = 0.0;
    Eigen::MatrixXd num_;
};

}  // namespace detail

/// Canonical scoring front end: marginal likelihood plus log prior, with an
/// optional memo keyed by the packed edge bitmap. Memoization only skips
/// recomputation; scores are deterministic either way.
class Scorer {
  public:
    Scorer(const DataMatrix& data, const PriorSpec& prior, LikelihoodConfig cfg = {}, bool use_memo = true)
        : ml_(data, cfg), prior_(prior), use_memo_(use_memo) {
        if (prior.m != data.p * (data.p - 1) / 2) throw DomainError("prior m does not match data dimension");
    }

    double score(const Graph& g) {
        if (g.vertex_count() != ml_.data().p) throw DomainError("graph and data dimension mismatch");
        PackedEdges key = g.packed();
        if (use_memo_) {
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        const double s = ml_.log_marginal(junction_tree(g)) + log_prior(prior_, g);
        remember(std::move(key), s);
        return s;
    }

    /// Variant for callers that already hold the junction tree.
    double score(const Graph& g, const JunctionTree& jt) {
        PackedEdges key = g.packed();
        if (use_memo_) {
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        const double s = ml_.log_marginal(jt) + log_prior(prior_, g);
        remember(std::move(key), s);
        return s;
    }

    const MarginalLikelihood& marginal() const { return ml_; }
    const PriorSpec& prior() const { return prior_; }
    std::int64_t evaluations() const { return evaluations_; }
    std::size_t memo_size() const { return memo_.size(); }

  private:
    void remember(PackedEdges key, double s) {
        ++evaluations_;
        if (use_memo_ && memo_.size() < kMemoCap) memo_.emplace(std::move(key), s);
    }

    static constexpr std::size_t kMemoCap = 400000;
    MarginalLikelihood ml_;
    PriorSpec prior_;
    bool use_memo_;
    std::int64_t evaluations_ = 0;
    std::unordered_map<PackedEdges, double, PackedEdgesHash> memo_;
};

/// Starting point: marginal-correlation screen at 2/sqrt(n), then fill in
/// to the nearest chordal supergraph.
inline Graph initialize(const DataMatrix& data) {
    Graph g(data.p);
    const double thresh = 2.0 / std::sqrt(static_cast<double>(data.n));
    for (int i = 0; i < data.p; ++i)
        for (int j = i + 1; j < data.p; ++j) {
            const double denom = std::sqrt(data.gram(i, i) * data.gram(j, j));
            if (denom <= 0.0) continue;  // constant column
            if (std::abs(data.gram(i, j) / denom) > thresh) g.add_edge(i, j);
        }
    return min_fill_triangulation(g);
}

/// One guided toggle: pick add/delete with even odds (forced when only one
/// class is legal), then sample an edge with weight clamp(q, eps, 1-eps)
/// for additions or clamp(1-q, eps, 1-eps) for deletions. Always accepted.
inline Graph local_move(const Graph& current, const JunctionTree& jt, const InclusionMatrix& q, double clamp_eps,
                        Rng& rng) {
    const EdgeMoves moves = legal_edge_moves(current, jt);
    bool do_add;
    if (moves.additions.empty() && moves.deletions.empty())
        throw DomainError("graph admits no legal edge toggles");
    if (moves.additions.empty())
        do_add = false;
    else if (moves.deletions.empty())
        do_add = true;
    else
        do_add = rng.uniform01() < 0.5;
    const std::vector<Edge>& cand = do_add ? moves.additions : moves.deletions;
    std::vector<double> w(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const double inc = q.at(cand[i].a, cand[i].b);
        const double raw = do_add ? inc : 1.0 - inc;
        w[i] = std::min(std::max(raw, clamp_eps), 1.0 - clamp_eps);
    }
    const Edge e = cand[rng.sample_weighted(w)];
    return do_add ? current.with_edge(e.a, e.b) : current.without_edge(e.a, e.b);
}

inline Graph local_move(const Graph& current, const InclusionMatrix& q, double clamp_eps, Rng& rng) {
    return local_move(current, junction_tree(current), q, clamp_eps, rng);
}

/// Draw an already-scored graph with probability proportional to
/// exp(score - max score), visiting entries best-first.
inline ScoredGraph resample_move(const ScoredGraphList& list, Rng& rng) {
    if (list.empty()) throw EmptyListError();
    const double mx = list.max_score();
    std::vector<double> w;
    w.reserve(list.size());
    list.for_each([&](const Graph&, double s) { w.push_back(std::exp(s - mx)); });
    const std::size_t pick = rng.sample_weighted(w);
    std::optional<ScoredGraph> out;
    std::size_t i = 0;
    list.for_each([&](const Graph& g, double s) {
        if (i++ == pick) out = ScoredGraph{g, s};
    });
    return *out;
}

/// Median-graph restart: threshold q-hat at 0.5 (strictly above), bracket
/// the result between its min-fill supergraph and its best-edges-first
/// decomposable subgraph, pick one with score-proportional odds, then
/// hill-climb with best-improvement toggles. Candidate toggles are ranked
/// by the local clique/separator score delta; the winner is rescored
/// canonically and only kept if the full score actually improves, so the
/// climb is monotone by construction. `visit` sees every graph that gets a
/// canonical score.
template <class Visit>
Graph global_move(const InclusionMatrix& q, Scorer& scorer, Rng& rng, Visit&& visit) {
    const int p = q.p;
    Graph median(p);
    std::vector<double> edge_score(static_cast<std::size_t>(median.max_edge_count()), 0.0);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double v = q.at(i, j);
            edge_score[static_cast<std::size_t>(edge_index(p, i, j))] = v;
            if (v > 0.5) median.add_edge(i, j);
        }
    const Graph gplus = min_fill_triangulation(median);
    const Graph gminus = max_decomposable_subgraph(median, edge_score);

    Graph current = gplus;
    double cur_score;
    if (gplus == gminus) {
        cur_score = scorer.score(current);
        visit(current, cur_score);
    } else {
        const double splus = scorer.score(gplus);
        const double sminus = scorer.score(gminus);
        visit(gplus, splus);
        visit(gminus, sminus);
        const double mx = std::max(splus, sminus);
        const std::vector<double> w{std::exp(splus - mx), std::exp(sminus - mx)};
        if (rng.sample_weighted(w) == 1) {
            current = gminus;
            cur_score = sminus;
        } else {
            cur_score = splus;
        }
    }

    const MarginalLikelihood& ml = scorer.marginal();
    const int max_steps = current.max_edge_count();
    for (int step = 0; step < max_steps; ++step) {
        const JunctionTree jt = junction_tree(current);
        const EdgeMoves moves = legal_edge_moves(current, jt);
        const int k = current.edge_count();
        double best_delta = 0.0;
        Edge best_edge{-1, -1};
        bool best_is_add = false;
        if (k < current.max_edge_count()) {
            const double dprior = log_prior_size(scorer.prior(), k + 1) - log_prior_size(scorer.prior(), k);
            for (const Edge& e : moves.additions) {
                const double d = ml.delta_add(current, e.a, e.b) + dprior;
                if (d > best_delta) {
                    best_delta = d;
                    best_edge = e;
                    best_is_add = true;
                }
            }
        }
        if (k > 0) {
            const double dprior = log_prior_size(scorer.prior(), k - 1) - log_prior_size(scorer.prior(), k);
            for (const Edge& e : moves.deletions) {
                const VertexSet* in_clique = nullptr;
                for (const VertexSet& c : jt.cliques)
                    if (c.test(e.a) && c.test(e.b)) {
                        in_clique = &c;
                        break;
                    }
                const double d = ml.delta_delete(*in_clique, e.a, e.b) + dprior;
                if (d > best_delta) {
                    best_delta = d;
                    best_edge = e;
                    best_is_add = false;
                }
            }
        }
        if (best_edge.a < 0) break;
        const Graph next =
            best_is_add ? current.with_edge(best_edge.a, best_edge.b) : current.without_edge(best_edge.a, best_edge.b);
        const double next_score = scorer.score(next);
        if (!(next_score > cur_score)) break;  // delta ranking was optimistic at rounding level
        visit(next, next_score);
        current = next;
        cur_score = next_score;
    }
    return current;
}

inline Graph global_move(const InclusionMatrix& q, Scorer& scorer, Rng& rng) {
    return global_move(q, scorer, rng, [](const Graph&, double) {});
}

struct SearchStats {
    std::int64_t iterations = 0;
    std::int64_t local_moves = 0;
    std::int64_t resample_moves = 0;
    std::int64_t global_moves = 0;
    std::int64_t score_evaluations = 0;
    std::int64_t list_insertions = 0;
    std::int64_t list_evictions = 0;
    double best_score = 0.0;
    std::int64_t list_size = 0;
    std::int64_t subset_cache_entries = 0;
    std::int64_t memo_entries = 0;
};

struct SearchResult {
    ScoredGraphList list{1000};
    InclusionMatrix inclusion;  // exact recomputation over the final list
    Graph median{1};            // edges with inclusion >= 0.5
    SearchStats stats;
};

/// Serial search loop: local toggles by default, a resample every
/// resample_period iterations, a global restart every global_period
/// iterations (the global slot wins when both divide). All randomness
/// comes from cfg.seed, so equal inputs give bit-identical results.
inline SearchResult run_fincs(const DataMatrix& data, const PriorSpec& prior, const SearchConfig& cfg,
                              LikelihoodConfig lik = {}) {
    cfg.validate();
    Scorer scorer(data, prior, lik, cfg.use_score_memo);
    Rng rng(cfg.seed);
    SearchResult res;
    res.list = ScoredGraphList(cfg.list_capacity);
    detail::InclusionTracker tracker(data.p);
    SearchStats& st = res.stats;

    auto visit = [&](const Graph& g, double s) {
        auto offer = res.list.offer(g, s);
        if (!offer.inserted) return;
        ++st.list_insertions;
        if (offer.evicted) {
            ++st.list_evictions;
            tracker.remove(offer.evicted->graph, offer.evicted->score);
        }
        tracker.add(g, s);
    };

    Graph current = initialize(data);
    JunctionTree cur_jt = junction_tree(current);
    visit(current, scorer.score(current, cur_jt));

    InclusionMatrix live;
    for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
        if (t % cfg.global_period == 0) {
            ++st.global_moves;
            tracker.snapshot_into(live);
            current = global_move(live, scorer, rng, visit);
            cur_jt = junction_tree(current);
        } else if (t % cfg.resample_period == 0) {
            ++st.resample_moves;
            current = resample_move(res.list, rng).graph;
            cur_jt = junction_tree(current);
        } else {
            ++st.local_moves;
            tracker.snapshot_into(live);
            Graph next = local_move(current, cur_jt, live, cfg.inclusion_clamp, rng);
            JunctionTree next_jt = junction_tree(next);
            visit(next, scorer.score(next, next_jt));
            current = std::move(next);
            cur_jt = std::move(next_jt);
        }
        if (cfg.inclusion_resync > 0 && t % cfg.inclusion_resync == 0) tracker.rebuild(res.list);
        if (cfg.progress_period > 0 && t % cfg.progress_period == 0)
            std::fprintf(stderr, "iter %lld  best %.6f  list %zu\n", static_cast<long long>(t),
                         res.list.max_score(), res.list.size());
    }

    st.iterations = cfg.iterations;
    st.score_evaluations = scorer.evaluations();
    st.best_score = res.list.max_score();
    st.list_size = static_cast<std::int64_t>(res.list.size());
    st.subset_cache_entries = static_cast<std::int64_t>(scorer.marginal().cache_size());
    st.memo_entries = static_cast<std::int64_t>(scorer.memo_size());

    res.inclusion = update_inclusion(res.list, data.p);
    res.median = Graph(data.p);
    for (int i = 0; i < data.p; ++i)
        for (int j = i + 1; j < data.p; ++j)
            if (res.inclusion.at(i, j) >= 0.5) res.median.add_edge(i, j);
    return res;
}

}  // namespace ggm
