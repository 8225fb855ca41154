#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nbg {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using SideId = std::uint32_t;

/// Set of edge indices of a specific Multigraph (order irrelevant, no duplicates).
using EdgeSubset = std::vector<EdgeId>;

/// Finite undirected multigraph. Loops and parallel edges are allowed.
///
/// Edge e owns two directed sides: side 2e runs tail->head in stored order,
/// side 2e+1 is its reverse. rev(s) = s^1 is an involution without fixed
/// points; a loop still has two distinct sides and contributes 2 to the
/// degree of its vertex. Edge and side indices are functions of insertion
/// order only. Instances are immutable after construction.
class Multigraph {
public:
    Multigraph() = default;

    Multigraph(VertexId vertex_count, std::vector<std::pair<VertexId, VertexId>> edges)
        : vertex_count_(vertex_count), edges_(std::move(edges)) {
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto [u, v] = edges_[e];
            if (u >= vertex_count_ || v >= vertex_count_) {
                throw std::invalid_argument("edge " + std::to_string(e) +
                                            " has an endpoint out of range");
            }
        }
        rebuild_incidence();
    }

    VertexId vertex_count() const noexcept { return vertex_count_; }
    EdgeId edge_count() const noexcept { return static_cast<EdgeId>(edges_.size()); }
    SideId side_count() const noexcept { return static_cast<SideId>(2 * edges_.size()); }

    std::pair<VertexId, VertexId> edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<std::pair<VertexId, VertexId>>& edges() const noexcept { return edges_; }

    static SideId rev(SideId s) noexcept { return s ^ 1u; }
    static EdgeId side_edge(SideId s) noexcept { return s >> 1; }

    VertexId tail(SideId s) const {
        const auto& e = edges_[s >> 1];
        return (s & 1u) == 0 ? e.first : e.second;
    }
    VertexId head(SideId s) const { return tail(rev(s)); }

    /// Outgoing sides of v, ascending by side index.
    std::span<const SideId> sides(VertexId v) const {
        return {out_sides_.data() + out_offset_[v], out_offset_[v + 1] - out_offset_[v]};
    }

    /// Number of sides with tail v; a loop at v counts twice.
    std::size_t degree(VertexId v) const { return out_offset_[v + 1] - out_offset_[v]; }

    bool is_loop(EdgeId e) const { return edges_[e].first == edges_[e].second; }

private:
    void rebuild_incidence() {
        out_offset_.assign(vertex_count_ + 1, 0);
        for (const auto& [u, v] : edges_) {
            ++out_offset_[u + 1];
            ++out_offset_[v + 1];
        }
        for (VertexId v = 0; v < vertex_count_; ++v) out_offset_[v + 1] += out_offset_[v];
        out_sides_.resize(2 * edges_.size());
        std::vector<std::size_t> cursor(out_offset_.begin(), out_offset_.end() - 1);
        for (SideId s = 0; s < out_sides_.size(); ++s) out_sides_[cursor[tail(s)]++] = s;
    }

    VertexId vertex_count_ = 0;
    std::vector<std::pair<VertexId, VertexId>> edges_;
    std::vector<std::size_t> out_offset_;
    std::vector<SideId> out_sides_;
};

/// Simple complete graph K_q, edges in lexicographic order, (q-1)-regular.
inline Multigraph complete_graph(VertexId q) {
    if (q < 2) throw std::invalid_argument("complete_graph requires q >= 2");
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(static_cast<std::size_t>(q) * (q - 1) / 2);
    for (VertexId u = 0; u < q; ++u)
        for (VertexId v = u + 1; v < q; ++v) edges.emplace_back(u, v);
    return Multigraph(q, std::move(edges));
}

/// True iff the graph has a single component (the empty graph counts as connected).
inline bool is_connected(const Multigraph& g) {
    if (g.vertex_count() == 0) return true;
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        VertexId x = stack.back();
        stack.pop_back();
        for (SideId s : g.sides(x)) {
            VertexId y = g.head(s);
            if (!seen[y]) {
                seen[y] = 1;
                ++reached;
                stack.push_back(y);
            }
        }
    }
    return reached == g.vertex_count();
}

namespace detail {

/// Shortest cycle visible from a BFS rooted at `root`: min over scanned
/// non-tree sides (x -> y) of dist(x) + dist(y) + 1. Never below the true
/// girth; equal to it for some root on a shortest cycle.
inline std::optional<std::uint64_t> rooted_cycle_bound(const Multigraph& g, VertexId root,
                                                       std::vector<std::uint32_t>& dist,
                                                       std::vector<SideId>& parent_side) {
    constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
    constexpr SideId kNoSide = 0xFFFFFFFFu;
    dist.assign(g.vertex_count(), kUnset);
    parent_side.assign(g.vertex_count(), kNoSide);
    std::vector<VertexId> queue{root};
    dist[root] = 0;
    std::optional<std::uint64_t> best;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        VertexId x = queue[qi];
        for (SideId s : g.sides(x)) {
            if (parent_side[x] != kNoSide && s == Multigraph::rev(parent_side[x])) continue;
            VertexId y = g.head(s);
            if (dist[y] == kUnset) {
                dist[y] = dist[x] + 1;
                parent_side[y] = s;
                queue.push_back(y);
            } else if (s != parent_side[y]) {
                std::uint64_t len = std::uint64_t(dist[x]) + dist[y] + 1;
                if (!best || len < *best) best = len;
            }
        }
    }
    return best;
}

}  // namespace detail

/// Length of the shortest cycle, or nullopt for forests. A loop is a cycle
/// of length 1, a parallel pair a cycle of length 2. Exact (BFS from every
/// vertex with parent-side tracking).
inline std::optional<std::uint64_t> girth(const Multigraph& g) {
    std::optional<std::uint64_t> best;
    std::vector<std::uint32_t> dist;
    std::vector<SideId> parent_side;
    for (VertexId root = 0; root < g.vertex_count(); ++root) {
        auto b = detail::rooted_cycle_bound(g, root, dist, parent_side);
        if (b && (!best || *b < *best)) {
            best = b;
            if (*best == 1) break;
        }
    }
    return best;
}

/// True iff every vertex has degree exactly 2; together with connectedness
/// this characterizes cycles (including a loop and a parallel pair).
inline bool is_cycle(const Multigraph& g) {
    if (g.vertex_count() == 0 || g.edge_count() == 0) return false;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) != 2) return false;
    return true;
}

namespace detail {

inline std::vector<char> edge_mask(const Multigraph& g, const EdgeSubset& subset,
                                   const char* op_name) {
    std::vector<char> mask(g.edge_count(), 0);
    for (EdgeId e : subset) {
        if (e >= g.edge_count())
            throw std::invalid_argument(std::string(op_name) + ": edge index out of range");
        if (mask[e]) throw std::invalid_argument(std::string(op_name) + ": duplicate edge index");
        mask[e] = 1;
    }
    return mask;
}

}  // namespace detail

/// Replace each edge of `subset` by a path of length 2 through a fresh
/// degree-2 vertex. Old vertex indices are stable; edges outside the subset
/// keep their indices; a subdivided edge keeps its index for the half
/// incident to its stored tail, and the second half is appended.
inline Multigraph subdivide(const Multigraph& g, const EdgeSubset& subset) {
    auto mask = detail::edge_mask(g, subset, "subdivide");
    auto edges = g.edges();
    VertexId next_vertex = g.vertex_count();
    std::vector<std::pair<VertexId, VertexId>> appended;
    appended.reserve(subset.size());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (!mask[e]) continue;
        VertexId mid = next_vertex++;
        VertexId v = edges[e].second;
        edges[e].second = mid;
        appended.emplace_back(mid, v);
    }
    edges.insert(edges.end(), appended.begin(), appended.end());
    return Multigraph(next_vertex, std::move(edges));
}

/// Replace every edge by a path of K edges (K-1 fresh vertices per edge).
/// K = 1 returns the graph unchanged.
inline Multigraph subdivide_uniform(const Multigraph& g, std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("subdivide_uniform requires K >= 1");
    if (k == 1) return g;
    auto edges = g.edges();
    VertexId next_vertex = g.vertex_count();
    std::vector<std::pair<VertexId, VertexId>> appended;
    appended.reserve(std::size_t(g.edge_count()) * (k - 1));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        VertexId v = edges[e].second;
        VertexId prev = next_vertex;
        edges[e].second = prev;
        for (std::uint32_t j = 1; j + 1 < k; ++j) {
            appended.emplace_back(next_vertex, next_vertex + 1);
            ++next_vertex;
        }
        appended.emplace_back(next_vertex, v);
        ++next_vertex;
    }
    edges.insert(edges.end(), appended.begin(), appended.end());
    return Multigraph(next_vertex, std::move(edges));
}

/// Degree-m permutation lift. Vertex (v, i) of the lift has index v*m + i;
/// edge (u, v) with voltage sigma yields, for each sheet i, the lifted edge
/// ((u, i), (v, sigma(i))) with index e*m + i. The projection
/// vertex v*m+i -> v, edge e*m+i -> e is a covering map of degree m.
inline Multigraph permutation_lift(const Multigraph& g, std::uint32_t m,
                                   const std::vector<std::vector<std::uint32_t>>& voltages) {
    if (m < 1) throw std::invalid_argument("permutation_lift requires m >= 1");
    if (voltages.size() != g.edge_count())
        throw std::invalid_argument("permutation_lift: one voltage per edge required");
    std::vector<char> hit(m);
    for (const auto& sigma : voltages) {
        if (sigma.size() != m)
            throw std::invalid_argument("permutation_lift: voltage has wrong length");
        std::fill(hit.begin(), hit.end(), 0);
        for (auto img : sigma) {
            if (img >= m || hit[img])
                throw std::invalid_argument("permutation_lift: voltage is not a permutation");
            hit[img] = 1;
        }
    }
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(std::size_t(g.edge_count()) * m);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge(e);
        for (std::uint32_t i = 0; i < m; ++i)
            edges.emplace_back(u * m + i, v * m + voltages[e][i]);
    }
    return Multigraph(g.vertex_count() * m, std::move(edges));
}

/// Count of vertices with each degree, as (degree, count) pairs ascending.
inline std::vector<std::pair<std::size_t, std::size_t>> degree_histogram(const Multigraph& g) {
    std::vector<std::size_t> degs;
    degs.reserve(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) degs.push_back(g.degree(v));
    std::sort(degs.begin(), degs.end());
    std::vector<std::pair<std::size_t, std::size_t>> hist;
    for (std::size_t i = 0; i < degs.size();) {
        std::size_t j = i;
        while (j < degs.size() && degs[j] == degs[i]) ++j;
        hist.emplace_back(degs[i], j - i);
        i = j;
    }
    return hist;
}

}  // namespace nbg
