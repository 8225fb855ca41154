#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbg/multigraph.hpp"
#include "nbg/rng.hpp"

namespace nbg {

/// A graph together with its covering projection onto a base graph.
struct Cover {
    Multigraph graph;
    std::vector<VertexId> vertex_to_base;
    std::vector<EdgeId> edge_to_base;
};

inline Cover identity_cover(const Multigraph& g) {
    Cover c{g, {}, {}};
    c.vertex_to_base.resize(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) c.vertex_to_base[v] = v;
    c.edge_to_base.resize(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) c.edge_to_base[e] = e;
    return c;
}

/// Checks that the stored projection is a covering map: every cover edge
/// maps onto a base edge compatibly with its endpoints, the induced side map
/// is a bijection between the sides at each cover vertex and the sides at
/// its image, and every base vertex is hit.
inline bool is_covering(const Cover& c, const Multigraph& base) {
    const Multigraph& g = c.graph;
    if (c.vertex_to_base.size() != g.vertex_count()) return false;
    if (c.edge_to_base.size() != g.edge_count()) return false;
    for (VertexId v : c.vertex_to_base)
        if (v >= base.vertex_count()) return false;
    std::vector<SideId> side_map(g.side_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeId b = c.edge_to_base[e];
        if (b >= base.edge_count()) return false;
        const auto [u, v] = g.edge(e);
        const auto [bu, bv] = base.edge(b);
        if (c.vertex_to_base[u] == bu && c.vertex_to_base[v] == bv) {
            side_map[2 * e] = 2 * b;
            side_map[2 * e + 1] = 2 * b + 1;
        } else if (c.vertex_to_base[u] == bv && c.vertex_to_base[v] == bu) {
            side_map[2 * e] = 2 * b + 1;
            side_map[2 * e + 1] = 2 * b;
        } else {
            return false;
        }
    }
    std::vector<SideId> got, want;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        got.clear();
        want.clear();
        for (SideId s : g.sides(v)) got.push_back(side_map[s]);
        for (SideId s : base.sides(c.vertex_to_base[v])) want.push_back(s);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        if (got != want) return false;
    }
    std::vector<char> hit(base.vertex_count(), 0);
    for (VertexId v : c.vertex_to_base) hit[v] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char x) { return x != 0; });
}

struct CoverLimits {
    std::uint64_t max_vertices = 100000;
    std::uint64_t max_attempts = 5000;
};

struct CoverSearchResult {
    bool ok = false;
    Cover cover;
    std::optional<std::uint64_t> girth_achieved;  // girth of cover.graph; nullopt = acyclic
    std::uint64_t attempts = 0;                   // candidate lifts built and inspected
    std::string message;
};

namespace detail {

/// A simple cycle shorter than the census bound, stored as its edge set.
struct ShortCycle {
    std::uint32_t length;
    std::vector<EdgeId> edges;
};

/// Census of all simple cycles of length < bound, each counted once. Roots
/// a depth-first search at every vertex, keeps only cycles whose minimal
/// vertex is the root, prunes with exact distances from the root, and
/// breaks the two traversal directions by side-index comparison. Returns
/// false if the census exceeded `cap` cycles (out is then incomplete).
inline bool short_cycle_census(const Multigraph& g, std::uint64_t bound, std::size_t cap,
                               std::vector<ShortCycle>& out) {
    out.clear();
    if (bound <= 1 || g.edge_count() == 0) return true;
    const VertexId n = g.vertex_count();
    std::vector<std::uint32_t> dist(n);
    std::vector<char> on_path(n, 0);
    std::vector<VertexId> queue;
    std::vector<SideId> path;  // sides along the current root path

    struct Frame {
        VertexId vertex;
        std::size_t next;  // cursor into sides(vertex)
    };
    std::vector<Frame> stack;

    for (VertexId root = 0; root < n; ++root) {
        // BFS distances from the root; unreachable = large.
        std::fill(dist.begin(), dist.end(), 0xFFFFFFFFu);
        queue.clear();
        queue.push_back(root);
        dist[root] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            VertexId x = queue[qi];
            for (SideId s : g.sides(x)) {
                VertexId y = g.head(s);
                if (dist[y] == 0xFFFFFFFFu) {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        on_path[root] = 1;
        stack.clear();
        stack.push_back({root, 0});
        path.clear();
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto sides = g.sides(f.vertex);
            if (f.next >= sides.size()) {
                stack.pop_back();
                if (!path.empty()) {
                    on_path[f.vertex] = 0;
                    path.pop_back();
                }
                continue;
            }
            const SideId s = sides[f.next++];
            if (!path.empty() && s == Multigraph::rev(path.back())) continue;
            const VertexId w = g.head(s);
            const std::uint64_t len = path.size() + 1;
            if (w == root) {
                if (len >= bound) continue;
                const SideId first = path.empty() ? s : path.front();
                if (first >= Multigraph::rev(s)) continue;  // canonical direction
                ShortCycle cyc;
                cyc.length = static_cast<std::uint32_t>(len);
                cyc.edges.reserve(len);
                for (SideId ps : path) cyc.edges.push_back(Multigraph::side_edge(ps));
                cyc.edges.push_back(Multigraph::side_edge(s));
                out.push_back(std::move(cyc));
                if (out.size() > cap) return false;
                continue;
            }
            if (w < root || on_path[w]) continue;
            if (len + dist[w] >= bound) continue;  // cannot close below the bound
            on_path[w] = 1;
            path.push_back(s);
            stack.push_back({w, 0});
        }
        on_path[root] = 0;
    }
    return true;
}

/// Length histogram of a census, comparable lexicographically (fewer
/// shortest cycles wins, then fewer next-shortest, ...).
inline std::vector<std::uint64_t> census_histogram(const std::vector<ShortCycle>& cycles,
                                                   std::uint64_t bound) {
    std::vector<std::uint64_t> hist(bound, 0);
    for (const auto& c : cycles) ++hist[c.length];
    return hist;
}

/// Predicts the cycle-length histogram of the 2-lift with voltage bits x:
/// a base cycle with even voltage sum survives twice at its own length, one
/// with odd sum lifts to a single cycle of twice the length.
class TwoLiftPlanner {
public:
    TwoLiftPlanner(const std::vector<ShortCycle>& cycles, EdgeId edge_count, std::uint64_t bound)
        : cycles_(cycles), bound_(bound), edge_to_cycles_(edge_count) {
        for (std::uint32_t ci = 0; ci < cycles.size(); ++ci)
            for (EdgeId e : cycles[ci].edges) edge_to_cycles_[e].push_back(ci);
    }

    std::vector<std::uint64_t> predict(const std::vector<char>& x) const {
        std::vector<std::uint64_t> hist(bound_, 0);
        for (const auto& c : cycles_) {
            int parity = 0;
            for (EdgeId e : c.edges) parity ^= x[e];
            add_contribution(hist, c.length, parity, +1);
        }
        return hist;
    }

    /// Greedy first-improvement bit flips until a full pass makes no
    /// progress. Mutates x to the local optimum and returns its histogram.
    std::vector<std::uint64_t> optimize(std::vector<char>& x, int max_passes = 30) const {
        std::vector<char> parity(cycles_.size(), 0);
        for (std::uint32_t ci = 0; ci < cycles_.size(); ++ci) {
            int p = 0;
            for (EdgeId e : cycles_[ci].edges) p ^= x[e];
            parity[ci] = static_cast<char>(p);
        }
        std::vector<std::uint64_t> hist = predict(x);
        std::vector<std::uint64_t> trial(bound_);
        for (int pass = 0; pass < max_passes; ++pass) {
            bool improved = false;
            for (EdgeId e = 0; e < edge_to_cycles_.size(); ++e) {
                if (edge_to_cycles_[e].empty()) continue;
                trial = hist;
                for (std::uint32_t ci : edge_to_cycles_[e]) {
                    add_contribution(trial, cycles_[ci].length, parity[ci], -1);
                    add_contribution(trial, cycles_[ci].length, parity[ci] ^ 1, +1);
                }
                if (std::lexicographical_compare(trial.begin(), trial.end(), hist.begin(),
                                                 hist.end())) {
                    x[e] ^= 1;
                    for (std::uint32_t ci : edge_to_cycles_[e]) parity[ci] ^= 1;
                    hist = trial;
                    improved = true;
                }
            }
            if (!improved) break;
        }
        return hist;
    }

private:
    void add_contribution(std::vector<std::uint64_t>& hist, std::uint32_t length, int parity,
                          int delta) const {
        if (parity == 0) {
            hist[length] += std::uint64_t(2 * delta);
        } else if (2ull * length < bound_) {
            hist[2 * length] += std::uint64_t(delta);
        }
    }

    const std::vector<ShortCycle>& cycles_;
    std::uint64_t bound_;
    std::vector<std::vector<std::uint32_t>> edge_to_cycles_;
};

inline Cover lift_cover(const Cover& cur, std::uint32_t m,
                        const std::vector<std::vector<std::uint32_t>>& voltages) {
    Cover next{permutation_lift(cur.graph, m, voltages), {}, {}};
    next.vertex_to_base.resize(next.graph.vertex_count());
    for (VertexId v = 0; v < next.graph.vertex_count(); ++v)
        next.vertex_to_base[v] = cur.vertex_to_base[v / m];
    next.edge_to_base.resize(next.graph.edge_count());
    for (EdgeId e = 0; e < next.graph.edge_count(); ++e)
        next.edge_to_base[e] = cur.edge_to_base[e / m];
    return next;
}

inline std::vector<std::vector<std::uint32_t>> random_voltages(EdgeId edges, std::uint32_t m,
                                                               Rng& rng) {
    std::vector<std::vector<std::uint32_t>> voltages(edges);
    for (auto& sigma : voltages) {
        sigma.resize(m);
        for (std::uint32_t i = 0; i < m; ++i) sigma[i] = i;
        for (std::uint32_t i = m; i > 1; --i)
            std::swap(sigma[i - 1], sigma[rng.below(i)]);
    }
    return voltages;
}

}  // namespace detail

/// Searches for a connected cover of `h` with verified girth >= g. Layered
/// strategy: the graph itself if its girth already suffices; a cyclic cover
/// when `h` is a cycle; a short burst of random permutation lifts when the
/// deficit is small; otherwise iterated 2-lifts whose voltages are chosen by
/// hill-climbing a parity prediction over the census of short cycles, a
/// candidate being accepted only if its exact census histogram
/// lexicographically decreases. Girth and the covering projection of the
/// returned graph are always verified exactly; the search heuristics carry
/// no correctness burden.
inline CoverSearchResult high_girth_cover(const Multigraph& h, std::uint64_t g,
                                          std::uint64_t seed, CoverLimits limits = {}) {
    if (g < 3) throw std::invalid_argument("high_girth_cover: girth target must be >= 3");
    if (!is_connected(h)) throw std::invalid_argument("high_girth_cover: base is disconnected");
    if (h.edge_count() == 0) throw std::invalid_argument("high_girth_cover: base has no edges");

    constexpr std::size_t kCensusCap = 500000;
    CoverSearchResult res;
    res.cover = identity_cover(h);
    res.girth_achieved = girth(h);
    if (!res.girth_achieved || *res.girth_achieved >= g) {
        res.ok = true;
        return res;
    }

    Rng rng(seed);
    if (is_cycle(h)) {
        const std::uint64_t len = h.edge_count();
        const std::uint32_t m = static_cast<std::uint32_t>((g + len - 1) / len);
        if (std::uint64_t(h.vertex_count()) * m > limits.max_vertices) {
            res.message = "cyclic cover needs " + std::to_string(h.vertex_count() * m) +
                          " vertices, over the limit";
            return res;
        }
        std::vector<std::vector<std::uint32_t>> voltages(h.edge_count());
        for (EdgeId e = 0; e < h.edge_count(); ++e) {
            voltages[e].resize(m);
            for (std::uint32_t i = 0; i < m; ++i)
                voltages[e][i] = (e == 0) ? (i + 1) % m : i;
        }
        Cover c = detail::lift_cover(res.cover, m, voltages);
        res.attempts = 1;
        auto gr = girth(c.graph);
        if (is_connected(c.graph) && gr && *gr >= g) {
            res.cover = std::move(c);
            res.girth_achieved = gr;
            res.ok = true;
            return res;
        }
        res.message = "cyclic cover construction failed";  // unreachable by construction
        return res;
    }

    // Random permutation lifts: only worth a burst when the deficit is small
    // (short cycles survive a random lift with constant expected count).
    if (g <= *res.girth_achieved + 2) {
        Rng burst = rng.substream(1);
        for (std::uint32_t m = 2; m <= 3; ++m) {
            if (std::uint64_t(h.vertex_count()) * m > limits.max_vertices) break;
            for (int t = 0; t < 4 && res.attempts < limits.max_attempts; ++t) {
                auto voltages = detail::random_voltages(h.edge_count(), m, burst);
                Cover c = detail::lift_cover(identity_cover(h), m, voltages);
                ++res.attempts;
                if (!is_connected(c.graph)) continue;
                auto gr = girth(c.graph);
                if (gr && *gr >= g) {
                    res.cover = std::move(c);
                    res.girth_achieved = gr;
                    res.ok = true;
                    return res;
                }
            }
        }
    }

    // Iterated 2-lifts. State advances only when the exact census improves,
    // so the loop terminates: the histogram decreases lexicographically.
    Cover cur = identity_cover(h);
    std::vector<detail::ShortCycle> cycles;
    if (!detail::short_cycle_census(cur.graph, g, kCensusCap, cycles)) {
        res.message = "short-cycle census exceeded " + std::to_string(kCensusCap) + " cycles";
        return res;
    }
    auto cur_hist = detail::census_histogram(cycles, g);
    Rng climber = rng.substream(2);
    while (res.attempts < limits.max_attempts) {
        if (cycles.empty()) break;  // girth(cur) >= g
        if (2ull * cur.graph.vertex_count() > limits.max_vertices) {
            res.cover = cur;
            res.girth_achieved = girth(cur.graph);
            res.message = "vertex limit reached at girth " +
                          std::to_string(res.girth_achieved ? *res.girth_achieved : 0) +
                          " (needs > " + std::to_string(limits.max_vertices) + " vertices)";
            return res;
        }
        detail::TwoLiftPlanner planner(cycles, cur.graph.edge_count(), g);
        bool advanced = false;
        for (int restart = 0; restart < 8 && res.attempts < limits.max_attempts; ++restart) {
            std::vector<char> x(cur.graph.edge_count());
            for (auto& bit : x) bit = static_cast<char>(climber.coin());
            planner.optimize(x);
            std::vector<std::vector<std::uint32_t>> voltages(cur.graph.edge_count());
            for (EdgeId e = 0; e < cur.graph.edge_count(); ++e)
                voltages[e] = x[e] ? std::vector<std::uint32_t>{1, 0}
                                   : std::vector<std::uint32_t>{0, 1};
            Cover cand = detail::lift_cover(cur, 2, voltages);
            ++res.attempts;
            if (!is_connected(cand.graph)) continue;
            std::vector<detail::ShortCycle> cand_cycles;
            if (!detail::short_cycle_census(cand.graph, g, kCensusCap, cand_cycles)) {
                res.message =
                    "short-cycle census exceeded " + std::to_string(kCensusCap) + " cycles";
                res.cover = cur;
                res.girth_achieved = girth(cur.graph);
                return res;
            }
            auto cand_hist = detail::census_histogram(cand_cycles, g);
            if (std::lexicographical_compare(cand_hist.begin(), cand_hist.end(),
                                             cur_hist.begin(), cur_hist.end())) {
                cur = std::move(cand);
                cycles = std::move(cand_cycles);
                cur_hist = std::move(cand_hist);
                advanced = true;
                break;
            }
        }
        if (!advanced && res.attempts >= limits.max_attempts) break;
    }

    auto gr = girth(cur.graph);
    res.cover = std::move(cur);
    res.girth_achieved = gr;
    if (gr && *gr >= g && is_connected(res.cover.graph)) {
        res.ok = true;
    } else if (res.message.empty()) {
        res.message = "attempt budget exhausted at girth " + std::to_string(gr ? *gr : 0);
    }
    return res;
}

}  // namespace nbg
