#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nbg/multigraph.hpp"
#include "nbg/nb_operator.hpp"
#include "nbg/rng.hpp"
#include "nbg/stallings.hpp"

namespace testsup {

inline nbg::Multigraph cycle_graph(nbg::VertexId n) {
    std::vector<std::pair<nbg::VertexId, nbg::VertexId>> edges;
    for (nbg::VertexId i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return nbg::Multigraph(n, std::move(edges));
}

inline nbg::Multigraph rose(std::uint32_t loops) {
    std::vector<std::pair<nbg::VertexId, nbg::VertexId>> edges(loops, {0, 0});
    return nbg::Multigraph(1, std::move(edges));
}

inline nbg::Multigraph path_graph(nbg::VertexId n) {
    std::vector<std::pair<nbg::VertexId, nbg::VertexId>> edges;
    for (nbg::VertexId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return nbg::Multigraph(n, std::move(edges));
}

/// Two vertices joined by `k` parallel edges.
inline nbg::Multigraph banana(std::uint32_t k) {
    std::vector<std::pair<nbg::VertexId, nbg::VertexId>> edges(k, {0, 1});
    return nbg::Multigraph(2, std::move(edges));
}

/// Two vertices, each with a loop, joined by two parallel edges (all degrees 4).
inline nbg::Multigraph dumbbell() {
    return nbg::Multigraph(2, {{0, 0}, {0, 1}, {0, 1}, {1, 1}});
}

/// Seeded random connected multigraph with min degree >= 2: a Hamiltonian
/// cycle through a random vertex permutation plus `extra` random chords
/// (loops and parallel edges allowed).
inline nbg::Multigraph random_connected_min2(nbg::Rng& rng, nbg::VertexId vertices,
                                             std::uint32_t extra) {
    std::vector<nbg::VertexId> perm(vertices);
    for (nbg::VertexId i = 0; i < vertices; ++i) perm[i] = i;
    for (nbg::VertexId i = vertices; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<std::pair<nbg::VertexId, nbg::VertexId>> edges;
    for (nbg::VertexId i = 0; i < vertices; ++i)
        edges.emplace_back(perm[i], perm[(i + 1) % vertices]);
    for (std::uint32_t j = 0; j < extra; ++j)
        edges.emplace_back(static_cast<nbg::VertexId>(rng.below(vertices)),
                           static_cast<nbg::VertexId>(rng.below(vertices)));
    return nbg::Multigraph(vertices, std::move(edges));
}

/// Exhaustive girth oracle: scans all edge subsets (use only for small
/// graphs), recognizing a cycle as a subset whose touched vertices all have
/// subset-degree exactly 2 and whose support is connected.
inline std::optional<std::uint64_t> brute_girth(const nbg::Multigraph& g) {
    const nbg::EdgeId m = g.edge_count();
    std::optional<std::uint64_t> best;
    for (std::uint64_t mask = 1; mask < (1ull << m); ++mask) {
        std::vector<std::uint32_t> deg(g.vertex_count(), 0);
        std::uint64_t count = 0;
        for (nbg::EdgeId e = 0; e < m; ++e) {
            if (!(mask >> e & 1)) continue;
            ++count;
            const auto [u, v] = g.edge(e);
            ++deg[u];
            ++deg[v];
        }
        if (best && count >= *best) continue;
        bool two_regular = true;
        for (auto d : deg)
            if (d != 0 && d != 2) two_regular = false;
        if (!two_regular) continue;
        // Connectivity of the support via union-find over subset edges.
        std::vector<nbg::VertexId> parent(g.vertex_count());
        for (nbg::VertexId v = 0; v < g.vertex_count(); ++v) parent[v] = v;
        const auto find = [&](nbg::VertexId x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (nbg::EdgeId e = 0; e < m; ++e) {
            if (!(mask >> e & 1)) continue;
            const auto [u, v] = g.edge(e);
            parent[find(u)] = find(v);
        }
        nbg::VertexId root = 0xFFFFFFFFu;
        bool connected = true;
        for (nbg::VertexId v = 0; v < g.vertex_count(); ++v) {
            if (deg[v] == 0) continue;
            if (root == 0xFFFFFFFFu)
                root = find(v);
            else if (find(v) != root)
                connected = false;
        }
        if (connected) best = count;
    }
    return best;
}

/// Dense spectral radius of the non-backtracking operator, computed by an
/// unrelated algorithm (Eigen's general eigensolver on the explicit
/// 2|E| x 2|E| matrix).
inline double dense_nb_radius(const nbg::Multigraph& g) {
    const nbg::NBOperator op = nbg::nb_operator(g);
    const auto n = static_cast<Eigen::Index>(op.dimension());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (nbg::SideId s = 0; s < op.dimension(); ++s)
        for (nbg::SideId t : op.row(s)) b(s, t) = 1.0;
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(b, false);
    double radius = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) radius = std::max(radius, std::abs(solver.eigenvalues()[i]));
    return radius;
}

/// Exhaustive ball counts of the subgroup via membership over every freely
/// reduced word of length <= n in F_r (independent of the ball_count DP).
inline std::vector<nbg::BigInt> brute_ball_count(const nbg::stallings::LabeledGraph& l,
                                                 std::uint32_t r, std::uint32_t n) {
    std::vector<nbg::BigInt> gamma(n + 1, 1);  // the empty word is in every ball
    std::vector<nbg::stallings::Letter> alphabet;
    for (std::uint32_t k = 1; k <= r; ++k) {
        alphabet.push_back(static_cast<nbg::stallings::Letter>(k));
        alphabet.push_back(-static_cast<nbg::stallings::Letter>(k));
    }
    nbg::stallings::Word w;
    const auto recurse = [&](auto&& self) -> void {
        if (!w.empty() && nbg::stallings::membership(l, w))
            for (std::size_t k = w.size(); k <= n; ++k) gamma[k] += 1;
        if (w.size() == n) return;
        for (auto x : alphabet) {
            if (!w.empty() && w.back() == -x) continue;
            w.push_back(x);
            self(self);
            w.pop_back();
        }
    };
    recurse(recurse);
    return gamma;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
}

/// Scratch directory for files a test writes and reads back.
inline std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "nbg_test_scratch";
    std::filesystem::create_directories(dir);
    return dir;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the packaged CLI with the given argument string.
inline CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto dir = scratch_dir();
    const std::string out_path = (dir / ("cli_out_" + std::to_string(++counter))).string();
    const std::string err_path = out_path + ".err";
    const std::string cmd =
        std::string(NBG_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    res.out = read_file(out_path);
    res.err = read_file(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return res;
}

}  // namespace testsup
