#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbg/multigraph.hpp"
#include "nbg/nb_operator.hpp"
#include "nbg/perron.hpp"

namespace nbg {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

/// Natural log of a positive big integer, safe beyond the double range.
inline double log_bigint(const BigInt& x) {
    if (x <= 0) throw std::invalid_argument("log_bigint: argument must be positive");
    const unsigned bits = boost::multiprecision::msb(x);
    if (bits <= 900) return std::log(x.convert_to<double>());
    const unsigned shift = bits - 64;
    const double mant = BigInt(x >> shift).convert_to<double>();
    return std::log(mant) + double(shift) * 0.69314718055994530942;
}

}  // namespace detail

/// Growth rate of the universal cover of G, i.e. the Perron root of the
/// non-backtracking operator. Cycles are answered exactly as [1,1] (their
/// side graph splits into two components, so the power iteration's
/// irreducibility precondition fails even though the value is known).
inline SpectralEstimate growth_rate(const Multigraph& g, double tol = 1e-9,
                                    std::uint64_t max_iter = 1000000) {
    if (!is_connected(g)) throw std::invalid_argument("growth_rate: graph is disconnected");
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) < 2)
            throw std::invalid_argument("growth_rate: vertex " + std::to_string(v) +
                                        " has degree < 2");
    if (is_cycle(g)) return SpectralEstimate{1.0, 1.0, 0, true};
    return perron(nb_operator(g), tol, max_iter);
}

/// Sphere sizes of the universal cover around a lift of v: c_k is the number
/// of non-backtracking walks of length k starting at v. Exact big integers
/// (counts overflow 64-bit words around k = 40 already at degree 6).
inline std::vector<BigInt> nb_walk_counts(const Multigraph& g, VertexId v, std::uint32_t n) {
    if (v >= g.vertex_count()) throw std::invalid_argument("nb_walk_counts: vertex out of range");
    std::vector<BigInt> counts;
    counts.reserve(n + 1);
    counts.emplace_back(1);
    if (n == 0) return counts;
    const NBOperator op = g.edge_count() ? nb_operator(g) : NBOperator{};
    std::vector<BigInt> f(op.dimension()), next(op.dimension());
    BigInt c1 = 0;
    for (SideId s : g.sides(v)) {
        f[s] = 1;
        ++c1;
    }
    counts.push_back(c1);
    for (std::uint32_t k = 2; k <= n; ++k) {
        for (auto& x : next) x = 0;
        BigInt total = 0;
        for (SideId s = 0; s < op.dimension(); ++s) {
            if (f[s] == 0) continue;
            for (SideId t : op.row(s)) next[t] += f[s];
        }
        for (const auto& x : next) total += x;
        counts.push_back(total);
        f.swap(next);
    }
    return counts;
}

/// Growth estimate from a sphere-count sequence c_0..c_n: the geometric-mean
/// ratio over the last ceil(n/2) terms, skipping zero terms to absorb
/// periodicity: (c_{j1}/c_{j0})^{1/(j1-j0)} for the first and last nonzero
/// indices j0, j1 in the window. Requires n >= 4 and at least two nonzero
/// window terms.
inline double ratio_estimate(const std::vector<BigInt>& counts) {
    if (counts.size() < 5)
        throw std::invalid_argument("ratio_estimate: need counts c_0..c_n with n >= 4");
    const std::size_t n = counts.size() - 1;
    const std::size_t m = (n + 1) / 2;
    const std::size_t first = n - m;
    std::size_t j0 = n + 1, j1 = n + 1;
    for (std::size_t j = first; j <= n; ++j) {
        if (counts[j] == 0) continue;
        if (j0 > n) j0 = j;
        j1 = j;
    }
    if (j0 > n || j1 == j0)
        throw std::invalid_argument("ratio_estimate: window has fewer than two nonzero terms");
    return std::exp((detail::log_bigint(counts[j1]) - detail::log_bigint(counts[j0])) /
                    double(j1 - j0));
}

}  // namespace nbg
