#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "ggm/bitset.hpp"
#include "ggm/errors.hpp"

namespace ggm {

/// Undirected edge with endpoints 0-based and a < b.
struct Edge {
    int a = 0;
    int b = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend std::strong_ordering operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Linear index of edge (a,b), a < b, in row-major upper-triangle order.
inline int edge_index(int p, int a, int b) {
    return a * p - a * (a + 1) / 2 + (b - a - 1);
}

/// Canonical fixed-size encoding of an edge set; hash/equality key for
/// graph deduplication and score memoization.
struct PackedEdges {
    std::vector<std::uint64_t> words;
    std::uint64_t hash = 0;

    friend bool operator==(const PackedEdges& x, const PackedEdges& y) {
        return x.hash == y.hash && x.words == y.words;
    }
    friend std::strong_ordering operator<=>(const PackedEdges& x, const PackedEdges& y) {
        return x.words <=> y.words;
    }
};

struct PackedEdgesHash {
    std::size_t operator()(const PackedEdges& k) const { return static_cast<std::size_t>(k.hash); }
};

/// Undirected labeled graph on p vertices, adjacency-bitset representation.
/// No self-loops; the edge set is canonical by construction.
class Graph {
public:
    Graph() = default;

    explicit Graph(int p) : p_(checked_vertex_count(p)), adj_(static_cast<std::size_t>(p), VertexSet(p)) {}

    static Graph complete(int p) {
        Graph g(p);
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b) g.add_edge(a, b);
        return g;
    }

    static Graph from_edges(int p, const std::vector<Edge>& edges) {
        Graph g(p);
        for (const Edge& e : edges) g.add_edge(e.a, e.b);
        return g;
    }

    int vertex_count() const { return p_; }
    int edge_count() const { return k_; }
    int max_edge_count() const { return p_ * (p_ - 1) / 2; }

    bool has_edge(int a, int b) const { return adj_[static_cast<std::size_t>(a)].test(b); }

    void add_edge(int a, int b) {
        check_pair(a, b);
        if (has_edge(a, b)) return;
        adj_[static_cast<std::size_t>(a)].set(b);
        adj_[static_cast<std::size_t>(b)].set(a);
        ++k_;
    }

    void remove_edge(int a, int b) {
        check_pair(a, b);
        if (!has_edge(a, b)) return;
        adj_[static_cast<std::size_t>(a)].reset(b);
        adj_[static_cast<std::size_t>(b)].reset(a);
        --k_;
    }

    Graph with_edge(int a, int b) const {
        Graph g = *this;
        g.add_edge(a, b);
        return g;
    }

    Graph without_edge(int a, int b) const {
        Graph g = *this;
        g.remove_edge(a, b);
        return g;
    }

    Graph toggled(int a, int b) const { return has_edge(a, b) ? without_edge(a, b) : with_edge(a, b); }

    const VertexSet& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    int degree(int v) const { return adj_[static_cast<std::size_t>(v)].count(); }

    /// Edges in canonical (a, then b) order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(static_cast<std::size_t>(k_));
        for (int a = 0; a < p_; ++a)
            adj_[static_cast<std::size_t>(a)].for_each([&](int b) {
                if (b > a) out.push_back(Edge{a, b});
            });
        return out;
    }

    PackedEdges packed() const {
        PackedEdges key;
        key.words.assign(static_cast<std::size_t>(max_edge_count() + 63) / 64 + (max_edge_count() == 0 ? 1 : 0), 0);
        for (int a = 0; a < p_; ++a)
            adj_[static_cast<std::size_t>(a)].for_each([&](int b) {
                if (b > a) {
                    const int idx = edge_index(p_, a, b);
                    key.words[static_cast<std::size_t>(idx) >> 6] |= std::uint64_t{1} << (idx & 63);
                }
            });
        key.hash = hash_words(key.words, static_cast<std::uint64_t>(p_));
        return key;
    }

    /// Graph with vertex v renamed to perm[v]; perm must be a permutation of 0..p-1.
    Graph relabeled(const std::vector<int>& perm) const {
        Graph g(p_);
        for (int a = 0; a < p_; ++a)
            adj_[static_cast<std::size_t>(a)].for_each([&](int b) {
                if (b > a) g.add_edge(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
            });
        return g;
    }

    friend bool operator==(const Graph& x, const Graph& y) {
        return x.p_ == y.p_ && x.k_ == y.k_ && x.adj_ == y.adj_;
    }

private:
    static int checked_vertex_count(int p) {
        if (p <= 0) throw DomainError("graph needs at least one vertex");
        return p;
    }

    void check_pair(int a, int b) const {
        if (a == b) throw DomainError("self-loops are not allowed");
        if (a < 0 || b < 0 || a >= p_ || b >= p_) throw DomainError("vertex out of range");
    }

    int p_ = 0;
    int k_ = 0;
    std::vector<VertexSet> adj_;
};

}  // namespace ggm
