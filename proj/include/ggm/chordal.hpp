#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "ggm/graph.hpp"

namespace ggm {

/// Clique/separator decomposition of a decomposable graph.
///
/// Cliques are listed in a perfect ordering: for i >= 1, the intersection of
/// cliques[i] with the union of all earlier cliques equals separators[i-1]
/// and is contained in cliques[parent[i]] (running intersection property).
/// Separators may be empty when the graph is disconnected.
struct JunctionTree {
    std::vector<VertexSet> cliques;
    std::vector<VertexSet> separators;  // size == cliques.size() - 1
    std::vector<int> parent;            // parent[0] == -1
};

namespace detail {

/// Scratch for maximum cardinality search; reusable across calls on graphs
/// with the same vertex count to avoid re-allocation in search loops.
struct McsWorkspace {
    std::vector<int> weight;
    std::vector<int> order;    // visit order: order[i] = vertex visited i-th
    std::vector<int> pos;      // pos[v] = visit position of v
    std::vector<char> visited;
    std::vector<VertexSet> earlier;  // earlier-neighbor set per vertex
    VertexSet scratch;

    void reset(int p) {
        weight.assign(static_cast<std::size_t>(p), 0);
        order.clear();
        order.reserve(static_cast<std::size_t>(p));
        pos.assign(static_cast<std::size_t>(p), -1);
        visited.assign(static_cast<std::size_t>(p), 0);
        if (static_cast<int>(earlier.size()) != p || (p > 0 && earlier[0].capacity() != p)) {
            earlier.assign(static_cast<std::size_t>(p), VertexSet(p));
            scratch = VertexSet(p);
        } else {
            for (auto& s : earlier) s.clear();
            scratch.clear();
        }
    }
};

/// Maximum cardinality search with the zero-fill-in chordality check of
/// Tarjan and Yannakakis. Ties in the cardinality weight are broken by
/// `tie_rank` (lower rank preferred); pass nullptr for index order.
/// Returns true iff the graph is chordal; the workspace then holds a
/// perfect vertex ordering and per-vertex earlier-neighbor sets.
inline bool mcs(const Graph& g, McsWorkspace& ws, const int* tie_rank = nullptr) {
    const int p = g.vertex_count();
    ws.reset(p);
    for (int step = 0; step < p; ++step) {
        int best = -1;
        for (int v = 0; v < p; ++v) {
            if (ws.visited[static_cast<std::size_t>(v)]) continue;
            if (best < 0 || ws.weight[static_cast<std::size_t>(v)] > ws.weight[static_cast<std::size_t>(best)] ||
                (ws.weight[static_cast<std::size_t>(v)] == ws.weight[static_cast<std::size_t>(best)] && tie_rank &&
                 tie_rank[v] < tie_rank[best]))
                best = v;
        }
        ws.visited[static_cast<std::size_t>(best)] = 1;
        ws.pos[static_cast<std::size_t>(best)] = step;
        ws.order.push_back(best);
        VertexSet& e = ws.earlier[static_cast<std::size_t>(best)];
        e = g.neighbors(best);
        g.neighbors(best).for_each([&](int u) {
            if (!ws.visited[static_cast<std::size_t>(u)]) {
                ++ws.weight[static_cast<std::size_t>(u)];
                e.reset(u);
            }
        });
    }
    // Zero fill-in: earlier neighbors of each vertex minus the latest one
    // must be earlier neighbors of that latest one.
    for (int v : ws.order) {
        const VertexSet& e = ws.earlier[static_cast<std::size_t>(v)];
        int u = -1, upos = -1;
        e.for_each([&](int x) {
            if (ws.pos[static_cast<std::size_t>(x)] > upos) {
                upos = ws.pos[static_cast<std::size_t>(x)];
                u = x;
            }
        });
        if (u < 0) continue;
        ws.scratch = e;
        ws.scratch.reset(u);
        if (!ws.scratch.is_subset_of(ws.earlier[static_cast<std::size_t>(u)])) return false;
    }
    return true;
}

}  // namespace detail

/// True iff every cycle of length >= 4 has a chord.
inline bool is_decomposable(const Graph& g) {
    thread_local detail::McsWorkspace ws;
    return detail::mcs(g, ws);
}

namespace detail {

/// Clique extraction along an MCS ordering (Blair-Peyton). Requires a
/// successful mcs() pass in `ws`.
inline void build_junction_tree(const Graph& g, const McsWorkspace& ws, JunctionTree& jt) {
    const int p = g.vertex_count();
    jt.cliques.clear();
    jt.separators.clear();
    jt.parent.clear();
    std::vector<int> defining_clique(static_cast<std::size_t>(p), -1);
    int prev_weight = -1;
    for (int i = 0; i < p; ++i) {
        const int v = ws.order[static_cast<std::size_t>(i)];
        const VertexSet& e = ws.earlier[static_cast<std::size_t>(v)];
        const int w = e.count();
        if (i == 0 || w <= prev_weight) {
            // v seeds a new clique {v} ∪ earlier(v); its separator is earlier(v).
            VertexSet clique = e;
            clique.set(v);
            if (!jt.cliques.empty()) {
                int u = -1, upos = -1;
                e.for_each([&](int x) {
                    if (ws.pos[static_cast<std::size_t>(x)] > upos) {
                        upos = ws.pos[static_cast<std::size_t>(x)];
                        u = x;
                    }
                });
                jt.separators.push_back(e);
                jt.parent.push_back(u >= 0 ? defining_clique[static_cast<std::size_t>(u)] : 0);
            } else {
                jt.parent.push_back(-1);
            }
            jt.cliques.push_back(std::move(clique));
        } else {
            jt.cliques.back().set(v);
        }
        defining_clique[static_cast<std::size_t>(v)] = static_cast<int>(jt.cliques.size()) - 1;
        prev_weight = w;
    }
}

}  // namespace detail

/// Clique/separator decomposition; throws NotDecomposableError otherwise.
/// `tie_rank`, when given, reorders MCS tie-breaking (used to exercise
/// invariance across perfect orderings); it must have p entries.
inline JunctionTree junction_tree(const Graph& g, const int* tie_rank = nullptr) {
    thread_local detail::McsWorkspace ws;
    if (!detail::mcs(g, ws, tie_rank)) throw NotDecomposableError();
    JunctionTree jt;
    detail::build_junction_tree(g, ws, jt);
    return jt;
}

/// True iff adding the non-edge (a,b) to the decomposable graph keeps it
/// decomposable: a and b must be disconnected once their common
/// neighborhood is removed. (In a chordal graph the common neighborhood of
/// a non-adjacent pair is complete, so this is exactly the condition for
/// the new edge to close no long chordless cycle.)
/// The three scratch sets let callers in hot loops avoid reallocation.
inline bool edge_addable(const Graph& g, int a, int b, VertexSet& frontier, VertexSet& visited, VertexSet& next) {
    const VertexSet& na = g.neighbors(a);
    const VertexSet& nb = g.neighbors(b);
    visited = na;
    visited &= nb;  // blocked: the common neighborhood separates a from b iff the edge is addable
    visited.set(a);
    frontier.clear();
    frontier.set(a);
    while (true) {
        next.clear();
        frontier.for_each([&](int v) { next |= g.neighbors(v); });
        next.subtract(visited);
        if (next.none()) return true;
        if (next.test(b)) return false;
        visited |= next;
        std::swap(frontier, next);
    }
}

inline bool edge_addable(const Graph& g, int a, int b) {
    VertexSet frontier(g.vertex_count()), visited(g.vertex_count()), next(g.vertex_count());
    return edge_addable(g, a, b, frontier, visited, next);
}

/// Decomposability-preserving single-edge perturbations.
struct EdgeMoves {
    std::vector<Edge> additions;
    std::vector<Edge> deletions;
};

/// Additions: non-edges passing edge_addable. Deletions: edges contained in
/// exactly one clique. Both lists are in canonical edge order.
inline EdgeMoves legal_edge_moves(const Graph& g, const JunctionTree& jt) {
    const int p = g.vertex_count();
    EdgeMoves moves;

    std::vector<std::uint8_t> clique_count(static_cast<std::size_t>(g.max_edge_count()), 0);
    for (const VertexSet& c : jt.cliques) {
        const std::vector<int> vs = c.to_vector();
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j) {
                auto& n = clique_count[static_cast<std::size_t>(edge_index(p, vs[i], vs[j]))];
                if (n < 2) ++n;
            }
    }

    VertexSet frontier(p), visited(p), scratch(p);
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) {
            if (g.has_edge(a, b)) {
                if (clique_count[static_cast<std::size_t>(edge_index(p, a, b))] == 1)
                    moves.deletions.push_back(Edge{a, b});
            } else if (edge_addable(g, a, b, frontier, visited, scratch)) {
                moves.additions.push_back(Edge{a, b});
            }
        }
    return moves;
}

/// Decomposable supergraph via greedy minimum-fill elimination. Chordal
/// inputs come back unchanged (a zero-fill vertex always exists).
inline Graph min_fill_triangulation(const Graph& g) {
    const int p = g.vertex_count();
    Graph filled = g;
    Graph work = g;  // vertices get eliminated from this copy
    VertexSet remaining(p);
    for (int v = 0; v < p; ++v) remaining.set(v);

    std::vector<int> nbrs;
    for (int step = 0; step < p; ++step) {
        int best = -1;
        long best_fill = -1;
        for (int v = remaining.first(); v >= 0; v = remaining.next(v)) {
            VertexSet nb = work.neighbors(v);
            nb &= remaining;
            long fill = 0;
            const std::vector<int> vs = nb.to_vector();
            for (std::size_t i = 0; i < vs.size(); ++i)
                for (std::size_t j = i + 1; j < vs.size(); ++j)
                    if (!work.has_edge(vs[i], vs[j])) ++fill;
            if (best < 0 || fill < best_fill) {
                best = v;
                best_fill = fill;
            }
            if (best_fill == 0) break;  // cannot improve; earliest zero-fill vertex wins
        }
        VertexSet nb = work.neighbors(best);
        nb &= remaining;
        nbrs = nb.to_vector();
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t j = i + 1; j < nbrs.size(); ++j)
                if (!work.has_edge(nbrs[i], nbrs[j])) {
                    work.add_edge(nbrs[i], nbrs[j]);
                    filled.add_edge(nbrs[i], nbrs[j]);
                }
        remaining.reset(best);
    }
    return filled;
}

/// Decomposable subgraph keeping high-score edges: edges are admitted in
/// decreasing score order (ties by canonical edge order) whenever the
/// partial graph stays chordal, with extra passes until a fixed point, so
/// the effect is to delete the lowest-score obstructing edges.
/// `edge_score` is indexed by edge_index(p, a, b).
inline Graph max_decomposable_subgraph(const Graph& g, std::span<const double> edge_score) {
    if (is_decomposable(g)) return g;
    const int p = g.vertex_count();

    std::vector<Edge> order = g.edges();
    std::stable_sort(order.begin(), order.end(), [&](const Edge& x, const Edge& y) {
        return edge_score[static_cast<std::size_t>(edge_index(p, x.a, x.b))] >
               edge_score[static_cast<std::size_t>(edge_index(p, y.a, y.b))];
    });

    Graph sub(p);
    VertexSet frontier(p), visited(p), scratch(p);
    std::vector<Edge> pending = std::move(order);
    bool progress = true;
    while (progress && !pending.empty()) {
        progress = false;
        std::vector<Edge> skipped;
        for (const Edge& e : pending) {
            const bool disjoint = sub.neighbors(e.a).none() || sub.neighbors(e.b).none();
            if (disjoint || edge_addable(sub, e.a, e.b, frontier, visited, scratch)) {
                sub.add_edge(e.a, e.b);
                progress = true;
            } else {
                skipped.push_back(e);
            }
        }
        pending = std::move(skipped);
    }
    return sub;
}

/// All decomposable graphs on p <= 6 vertices (2^15 candidates at most).
inline std::vector<Graph> enumerate_decomposable(int p) {
    if (p > 6) throw TooLargeError("enumerate_decomposable supports p <= 6");
    if (p < 1) throw DomainError("vertex count must be positive");
    const int m = p * (p - 1) / 2;
    std::vector<Edge> pairs;
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) pairs.push_back(Edge{a, b});

    std::vector<Graph> out;
    detail::McsWorkspace ws;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
        Graph g(p);
        for (int i = 0; i < m; ++i)
            if (mask >> i & 1) g.add_edge(pairs[static_cast<std::size_t>(i)].a, pairs[static_cast<std::size_t>(i)].b);
        if (detail::mcs(g, ws)) out.push_back(std::move(g));
    }
    return out;
}

}  // namespace ggm
