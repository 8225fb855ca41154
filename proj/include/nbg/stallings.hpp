#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbg/graph_io.hpp"
#include "nbg/growth.hpp"
#include "nbg/multigraph.hpp"

namespace nbg::stallings {

/// A letter of the free group F_r: +k reads a_k, -k reads its inverse.
using Letter = std::int32_t;
using Word = std::vector<Letter>;

inline bool is_reduced(const Word& w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0) return false;
        if (i > 0 && w[i] == -w[i - 1]) return false;
    }
    return true;
}

inline Word reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (Letter x : w) {
        if (x == 0) throw std::invalid_argument("reduce: zero letter");
        if (!out.empty() && out.back() == -x)
            out.pop_back();
        else
            out.push_back(x);
    }
    return out;
}

inline Word inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (Letter& x : out) x = -x;
    return out;
}

/// Generator-labeled basepointed graph; label(rev(s)) = -label(s) always.
struct LabeledGraph {
    Multigraph graph;
    VertexId basepoint = 0;
    std::vector<Letter> side_labels;
};

namespace detail {

inline void require_valid(const LabeledGraph& l, const char* op) {
    if (l.side_labels.size() != l.graph.side_count())
        throw std::invalid_argument(std::string(op) + ": one label per side required");
    if (l.graph.vertex_count() == 0 || l.basepoint >= l.graph.vertex_count())
        throw std::invalid_argument(std::string(op) + ": basepoint out of range");
    for (SideId s = 0; s < l.graph.side_count(); s += 2) {
        if (l.side_labels[s] == 0 || l.side_labels[s + 1] != -l.side_labels[s])
            throw std::invalid_argument(std::string(op) +
                                        ": side labels must be nonzero and mutually inverse");
    }
}

}  // namespace detail

/// True iff no vertex has two outgoing sides carrying the same letter.
inline bool check_folded(const LabeledGraph& l) {
    if (l.side_labels.size() != l.graph.side_count()) return false;
    std::vector<Letter> seen;
    for (VertexId v = 0; v < l.graph.vertex_count(); ++v) {
        seen.clear();
        for (SideId s : l.graph.sides(v)) seen.push_back(l.side_labels[s]);
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
    }
    return true;
}

struct AugmentResult {
    Multigraph graph;
    std::vector<EdgeId> added_loops;
};

/// Brings every vertex up to degree 2r by appending loops; original edges
/// keep their indices.
inline AugmentResult augment_loops(const Multigraph& g, std::uint32_t r) {
    if (r < 1) throw std::invalid_argument("augment_loops: rank must be >= 1");
    auto edges = g.edges();
    AugmentResult res{Multigraph{}, {}};
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const auto deg = g.degree(v);
        if (deg % 2 != 0)
            throw std::invalid_argument("augment_loops: vertex " + std::to_string(v) +
                                        " has odd degree " + std::to_string(deg));
        if (deg > 2 * r)
            throw std::invalid_argument("augment_loops: vertex " + std::to_string(v) +
                                        " has degree " + std::to_string(deg) + " > 2r");
        for (std::size_t i = 0; i < (2 * r - deg) / 2; ++i) {
            res.added_loops.push_back(static_cast<EdgeId>(edges.size()));
            edges.emplace_back(v, v);
        }
    }
    res.graph = Multigraph(g.vertex_count(), std::move(edges));
    return res;
}

namespace detail {

/// Orients every edge along an Euler circuit (deterministic: start at vertex
/// 0, always leave by the smallest unused side). out[e] is the vertex the
/// oriented edge leaves. Requires all degrees even and the graph connected.
inline std::vector<VertexId> euler_orientation(const Multigraph& g) {
    std::vector<char> used(g.edge_count(), 0);
    std::vector<VertexId> out(g.edge_count());
    std::vector<std::size_t> cursor(g.vertex_count(), 0);
    std::vector<VertexId> stack{0};
    EdgeId oriented = 0;
    while (!stack.empty()) {
        VertexId v = stack.back();
        const auto sides = g.sides(v);
        while (cursor[v] < sides.size() && used[Multigraph::side_edge(sides[cursor[v]])])
            ++cursor[v];
        if (cursor[v] == sides.size()) {
            stack.pop_back();
            continue;
        }
        const SideId s = sides[cursor[v]];
        const EdgeId e = Multigraph::side_edge(s);
        used[e] = 1;
        out[e] = v;  // traversal direction tail(s) -> head(s)
        ++oriented;
        stack.push_back(g.head(s));
    }
    if (oriented != g.edge_count())
        throw std::invalid_argument("euler_orientation: graph is not connected");
    return out;
}

}  // namespace detail

/// Splits a 2r-regular connected multigraph into r spanning 2-regular edge
/// classes: Euler orientation makes every vertex r-out/r-in, and each of r
/// successive perfect matchings of the out/in bipartite graph contributes
/// one out-side and one in-side per vertex, i.e. a 2-factor.
inline std::vector<std::vector<EdgeId>> two_factorize(const Multigraph& g, std::uint32_t r) {
    if (r < 1) throw std::invalid_argument("two_factorize: rank must be >= 1");
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) != 2 * r)
            throw std::invalid_argument("two_factorize: vertex " + std::to_string(v) +
                                        " has degree " + std::to_string(g.degree(v)) +
                                        ", expected " + std::to_string(2 * r));
    if (!is_connected(g)) throw std::invalid_argument("two_factorize: graph is disconnected");

    const auto out = detail::euler_orientation(g);
    const VertexId n = g.vertex_count();
    const auto in_vertex = [&](EdgeId e) {
        const auto [u, v] = g.edge(e);
        return out[e] == u ? v : u;
    };
    std::vector<std::vector<EdgeId>> adj(n);
    for (EdgeId e = 0; e < g.edge_count(); ++e) adj[out[e]].push_back(e);

    constexpr EdgeId kFree = 0xFFFFFFFFu;
    std::vector<char> consumed(g.edge_count(), 0);
    std::vector<EdgeId> match_left(n), match_right(n);
    std::vector<std::uint32_t> visited(n, 0);
    std::uint32_t stamp = 0;

    struct Frame {
        VertexId u;
        std::size_t next;
        EdgeId taken;
    };
    std::vector<Frame> stack;

    const auto augment = [&](VertexId u0) {
        ++stamp;
        stack.clear();
        stack.push_back({u0, 0, kFree});
        while (!stack.empty()) {
            Frame& f = stack.back();
            bool descended = false;
            while (f.next < adj[f.u].size()) {
                const EdgeId e = adj[f.u][f.next++];
                if (consumed[e]) continue;
                const VertexId v = in_vertex(e);
                if (visited[v] == stamp) continue;
                visited[v] = stamp;
                f.taken = e;
                if (match_right[v] == kFree) {
                    for (const Frame& fr : stack) {
                        match_left[fr.u] = fr.taken;
                        match_right[in_vertex(fr.taken)] = fr.taken;
                    }
                    return true;
                }
                stack.push_back({out[match_right[v]], 0, kFree});
                descended = true;
                break;
            }
            if (!descended && f.next >= adj[f.u].size()) stack.pop_back();
        }
        return false;
    };

    std::vector<std::vector<EdgeId>> factors;
    factors.reserve(r);
    for (std::uint32_t k = 0; k < r; ++k) {
        std::fill(match_left.begin(), match_left.end(), kFree);
        std::fill(match_right.begin(), match_right.end(), kFree);
        for (VertexId u = 0; u < n; ++u) {
            if (!augment(u))
                throw std::logic_error("two_factorize: matching failed on a regular bipartite "
                                       "graph");
        }
        std::vector<EdgeId> factor(match_left.begin(), match_left.end());
        std::sort(factor.begin(), factor.end());
        for (EdgeId e : factor) consumed[e] = 1;
        factors.push_back(std::move(factor));
    }
    return factors;
}

/// Orients each factor along its cycles (walk start: least vertex, then
/// least side) and labels walk-direction sides of factor k with letter k+1.
/// One +k and one -k side leave every vertex per factor, so the result is
/// deterministic and codeterministic, hence folded.
inline LabeledGraph label(const Multigraph& g, const std::vector<std::vector<EdgeId>>& factors,
                          VertexId basepoint) {
    if (g.vertex_count() == 0 || basepoint >= g.vertex_count())
        throw std::invalid_argument("label: basepoint out of range");
    std::vector<Letter> labels(g.side_count(), 0);
    std::vector<char> edge_seen(g.edge_count(), 0);
    std::vector<std::vector<SideId>> at(g.vertex_count());
    for (std::size_t k = 0; k < factors.size(); ++k) {
        const Letter letter = static_cast<Letter>(k + 1);
        for (auto& v : at) v.clear();
        for (EdgeId e : factors[k]) {
            if (e >= g.edge_count() || edge_seen[e])
                throw std::invalid_argument("label: factors must partition the edge set");
            edge_seen[e] = 1;
            at[g.tail(2 * e)].push_back(2 * e);
            at[g.tail(2 * e + 1)].push_back(2 * e + 1);
        }
        for (auto& v : at) std::sort(v.begin(), v.end());
        std::vector<char> used(g.edge_count(), 0);
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            if (at[v].size() != 2 && !at[v].empty())
                throw std::invalid_argument("label: factor " + std::to_string(k) +
                                            " is not 2-regular at vertex " + std::to_string(v));
        }
        for (VertexId start = 0; start < g.vertex_count(); ++start) {
            for (;;) {
                SideId first = 0;
                bool found = false;
                for (SideId s : at[start]) {
                    if (!used[Multigraph::side_edge(s)]) {
                        first = s;
                        found = true;
                        break;
                    }
                }
                if (!found) break;
                VertexId v = start;
                SideId s = first;
                for (;;) {
                    used[Multigraph::side_edge(s)] = 1;
                    labels[s] = letter;
                    labels[Multigraph::rev(s)] = -letter;
                    v = g.head(s);
                    bool next_found = false;
                    for (SideId t : at[v]) {
                        if (!used[Multigraph::side_edge(t)]) {
                            s = t;
                            next_found = true;
                            break;
                        }
                    }
                    if (!next_found) break;
                }
                if (v != start)
                    throw std::logic_error("label: factor walk did not close its cycle");
            }
        }
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (!edge_seen[e])
            throw std::invalid_argument("label: factors must partition the edge set");
    return LabeledGraph{g, basepoint, std::move(labels)};
}

/// Removes the scaffolding loops appended by augment_loops, keeping the
/// induced labeling on the original edges.
inline LabeledGraph strip_loops(const LabeledGraph& l, const std::vector<EdgeId>& added_loops) {
    detail::require_valid(l, "strip_loops");
    const EdgeId total = l.graph.edge_count();
    const EdgeId kept = total - static_cast<EdgeId>(added_loops.size());
    for (std::size_t i = 0; i < added_loops.size(); ++i) {
        const EdgeId e = added_loops[i];
        if (e != kept + i || !l.graph.is_loop(e))
            throw std::invalid_argument(
                "strip_loops: ids must be exactly the trailing loops added by augment_loops");
    }
    std::vector<std::pair<VertexId, VertexId>> edges(l.graph.edges().begin(),
                                                     l.graph.edges().begin() + kept);
    std::vector<Letter> labels(l.side_labels.begin(), l.side_labels.begin() + 2 * kept);
    return LabeledGraph{Multigraph(l.graph.vertex_count(), std::move(edges)), l.basepoint,
                        std::move(labels)};
}

/// Free basis of the subgroup from the breadth-first spanning tree rooted at
/// the basepoint (tie-break: smallest side index): one freely reduced word
/// per non-tree edge.
inline std::vector<Word> free_basis(const LabeledGraph& l) {
    detail::require_valid(l, "free_basis");
    if (!check_folded(l)) throw std::invalid_argument("free_basis: labeling is not folded");
    if (!is_connected(l.graph)) throw std::invalid_argument("free_basis: graph is disconnected");
    constexpr SideId kNoSide = 0xFFFFFFFFu;
    std::vector<SideId> parent(l.graph.vertex_count(), kNoSide);
    std::vector<char> seen(l.graph.vertex_count(), 0);
    std::vector<char> tree_edge(l.graph.edge_count(), 0);
    std::vector<Word> path(l.graph.vertex_count());
    std::vector<VertexId> queue{l.basepoint};
    seen[l.basepoint] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const VertexId x = queue[qi];
        for (SideId s : l.graph.sides(x)) {
            const VertexId y = l.graph.head(s);
            if (seen[y]) continue;
            seen[y] = 1;
            parent[y] = s;
            tree_edge[Multigraph::side_edge(s)] = 1;
            path[y] = path[x];
            path[y].push_back(l.side_labels[s]);
            queue.push_back(y);
        }
    }
    std::vector<Word> basis;
    for (EdgeId e = 0; e < l.graph.edge_count(); ++e) {
        if (tree_edge[e]) continue;
        const auto [u, v] = l.graph.edge(e);
        Word w = path[u];
        w.push_back(l.side_labels[2 * e]);
        const Word back = inverse(path[v]);
        w.insert(w.end(), back.begin(), back.end());
        w = reduce(w);
        if (w.empty()) throw std::logic_error("free_basis: non-tree edge produced empty word");
        basis.push_back(std::move(w));
    }
    return basis;
}

/// Traces a freely reduced word from the basepoint; true iff every step
/// exists and the trace closes at the basepoint.
inline bool membership(const LabeledGraph& l, const Word& w) {
    detail::require_valid(l, "membership");
    if (!check_folded(l)) throw std::invalid_argument("membership: labeling is not folded");
    if (!is_reduced(w)) throw std::invalid_argument("membership: word is not freely reduced");
    VertexId v = l.basepoint;
    for (Letter x : w) {
        bool stepped = false;
        for (SideId s : l.graph.sides(v)) {
            if (l.side_labels[s] == x) {
                v = l.graph.head(s);
                stepped = true;
                break;
            }
        }
        if (!stepped) return false;
    }
    return v == l.basepoint;
}

/// Exact ball sizes gamma(0..n) of the subgroup: reduced words of length k
/// in the subgroup correspond bijectively to closed non-backtracking traces
/// of length k at the basepoint of a folded core graph.
inline std::vector<BigInt> ball_count(const LabeledGraph& l, std::uint32_t n) {
    detail::require_valid(l, "ball_count");
    if (!check_folded(l)) throw std::invalid_argument("ball_count: labeling is not folded");
    for (VertexId v = 0; v < l.graph.vertex_count(); ++v)
        if (v != l.basepoint && l.graph.degree(v) < 2)
            throw std::invalid_argument("ball_count: graph is not core (vertex " +
                                        std::to_string(v) + " has degree < 2)");
    std::vector<BigInt> gamma{1};
    gamma.reserve(n + 1);
    if (n == 0) return gamma;
    if (l.graph.edge_count() == 0) {
        for (std::uint32_t k = 1; k <= n; ++k) gamma.push_back(1);
        return gamma;
    }
    const NBOperator op = nb_operator(l.graph);
    std::vector<BigInt> f(op.dimension()), next(op.dimension());
    for (SideId s : l.graph.sides(l.basepoint)) f[s] = 1;
    for (std::uint32_t k = 1; k <= n; ++k) {
        if (k > 1) {
            for (auto& x : next) x = 0;
            for (SideId s = 0; s < op.dimension(); ++s) {
                if (f[s] == 0) continue;
                for (SideId t : op.row(s)) next[t] += f[s];
            }
            f.swap(next);
        }
        BigInt closed = 0;
        for (SideId s = 0; s < op.dimension(); ++s)
            if (f[s] != 0 && l.graph.head(s) == l.basepoint) closed += f[s];
        gamma.push_back(gamma.back() + closed);
    }
    return gamma;
}

struct SubgroupReport {
    std::uint32_t rank = 0;
    std::vector<Word> generators;
    std::vector<BigInt> gamma;
    double omega_estimate = 0.0;
    SpectralEstimate lambda;
    VertexId basepoint = 0;
    LabeledGraph core;  // the labeled graph the report was computed from
};

/// Sphere sequence of a ball table: s_0 = gamma_0, s_k = gamma_k -
/// gamma_{k-1}.
inline std::vector<BigInt> spheres(const std::vector<BigInt>& gamma) {
    std::vector<BigInt> s;
    s.reserve(gamma.size());
    for (std::size_t k = 0; k < gamma.size(); ++k)
        s.push_back(k == 0 ? gamma[0] : BigInt(gamma[k] - gamma[k - 1]));
    return s;
}

inline std::string render_word(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0) out += ' ';
        out += io::letter_token(w[i]);
    }
    return out;
}

/// Generators file: header `rank=<m> r=<r> basepoint=<v>`, then one word per
/// line with space-separated letter tokens (a<k> reads a_k, b<k> its
/// inverse).
inline std::string encode_generators(std::uint32_t rank, std::uint32_t r, VertexId basepoint,
                                     const std::vector<Word>& words) {
    std::string out = "rank=" + std::to_string(rank) + " r=" + std::to_string(r) +
                      " basepoint=" + std::to_string(basepoint) + "\n";
    for (const Word& w : words) out += render_word(w) + "\n";
    return out;
}

struct GeneratorsDoc {
    std::uint32_t rank = 0;
    std::uint32_t r = 0;
    VertexId basepoint = 0;
    std::vector<Word> words;
};

namespace detail {

inline std::uint64_t header_value(const std::string& token, const std::string& key) {
    const std::string prefix = key + "=";
    if (token.rfind(prefix, 0) != 0)
        throw io::ParseError("generators file: header expects '" + key + "=<value>', got '" +
                             token + "'");
    const std::string digits = token.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw io::ParseError("generators file: '" + key + "' must be a non-negative integer");
    return std::stoull(digits);
}

}  // namespace detail

inline GeneratorsDoc parse_generators(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    if (lines.empty()) throw io::ParseError("generators file: missing header line");

    std::vector<std::string> head;
    std::string tok;
    for (char c : lines[0] + " ") {
        if (c == ' ' || c == '\t') {
            if (!tok.empty()) head.push_back(tok);
            tok.clear();
        } else {
            tok += c;
        }
    }
    if (head.size() != 3)
        throw io::ParseError("generators file: header must read 'rank=<m> r=<r> basepoint=<v>'");
    GeneratorsDoc doc;
    doc.rank = static_cast<std::uint32_t>(detail::header_value(head[0], "rank"));
    doc.r = static_cast<std::uint32_t>(detail::header_value(head[1], "r"));
    doc.basepoint = static_cast<VertexId>(detail::header_value(head[2], "basepoint"));

    for (std::size_t li = 1; li < lines.size(); ++li) {
        Word w;
        std::string t;
        for (char c : lines[li] + " ") {
            if (c == ' ' || c == '\t') {
                if (t.empty()) continue;
                if (t.size() < 2 || (t[0] != 'a' && t[0] != 'b') ||
                    t.find_first_not_of("0123456789", 1) != std::string::npos)
                    throw io::ParseError("generators file: line " + std::to_string(li + 1) +
                                         ": bad letter token '" + t + "'");
                const auto k = std::stoul(t.substr(1));
                if (k == 0 || k > doc.r)
                    throw io::ParseError("generators file: line " + std::to_string(li + 1) +
                                         ": generator index " + std::to_string(k) +
                                         " outside 1..r");
                w.push_back(t[0] == 'a' ? Letter(k) : -Letter(k));
                t.clear();
            } else {
                t += c;
            }
        }
        if (!w.empty()) doc.words.push_back(std::move(w));
    }
    if (doc.words.size() != doc.rank)
        throw io::ParseError("generators file: header promises " + std::to_string(doc.rank) +
                             " words, found " + std::to_string(doc.words.size()));
    return doc;
}

inline SubgroupReport subgroup_report(const Multigraph& g, std::uint32_t r, VertexId basepoint,
                                      std::uint32_t n_max = 60) {
    if (g.vertex_count() == 0 || basepoint >= g.vertex_count())
        throw std::invalid_argument("subgroup_report: basepoint out of range");
    if (!is_connected(g)) throw std::invalid_argument("subgroup_report: graph is disconnected");
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) < 2)
            throw std::invalid_argument("subgroup_report: vertex " + std::to_string(v) +
                                        " has degree < 2");
    const AugmentResult aug = augment_loops(g, r);
    const auto factors = two_factorize(aug.graph, r);
    const LabeledGraph full = label(aug.graph, factors, basepoint);
    SubgroupReport rep;
    rep.core = strip_loops(full, aug.added_loops);
    if (!check_folded(rep.core))
        throw std::logic_error("subgroup_report: labeling lost foldedness");
    rep.basepoint = basepoint;
    rep.generators = free_basis(rep.core);
    rep.rank = static_cast<std::uint32_t>(rep.generators.size());
    const auto expected =
        std::int64_t(g.edge_count()) - std::int64_t(g.vertex_count()) + 1;
    if (std::int64_t(rep.rank) != expected)
        throw std::logic_error("subgroup_report: rank does not match E - V + 1");
    rep.gamma = ball_count(rep.core, n_max);
    const auto s = spheres(rep.gamma);
    try {
        rep.omega_estimate = ratio_estimate(s);
    } catch (const std::invalid_argument&) {
        // Degenerate sphere window (e.g. one long cycle): fall back to the
        // ball root, which has the same limit.
        rep.omega_estimate =
            rep.gamma.size() < 2
                ? 1.0
                : std::exp(nbg::detail::log_bigint(rep.gamma.back()) /
                           double(rep.gamma.size() - 1));
    }
    rep.lambda = growth_rate(g);
    return rep;
}

}  // namespace nbg::stallings
