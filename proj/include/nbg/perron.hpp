#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nbg/nb_operator.hpp"

namespace nbg {

/// Certified enclosure of a Perron eigenvalue. lower <= upper always; when
/// converged, upper - lower <= the requested tolerance.
struct SpectralEstimate {
    double lower = 0.0;
    double upper = 0.0;
    std::uint64_t iterations = 0;
    bool converged = false;

    double width() const noexcept { return upper - lower; }
    double midpoint() const noexcept { return 0.5 * (lower + upper); }
    bool encloses(double x) const noexcept { return lower <= x && x <= upper; }
};

/// Absolute slack added to each Collatz-Wielandt bound to absorb
/// floating-point rounding in the matrix-vector products and divisions.
/// Orders of magnitude below every tolerance used by callers.
inline constexpr double kPerronRoundoff = 1e-13;

/// Enclosure of the Perron root of B by power iteration on the shifted
/// operator B + I (the shift makes the iteration aperiodic and adds exactly
/// 1 to the Perron root of a nonnegative irreducible operator). Start vector
/// is all ones; after each application y = (B+I)x the Collatz-Wielandt
/// bounds min_s(y_s/x_s) and max_s(y_s/x_s) enclose the shifted root, so
/// [min-1, max-1] encloses the root of B; successive enclosures are
/// intersected. Requires is_nb_strongly_connected(B). If max_iter is hit the
/// best enclosure so far is returned with converged = false.
inline SpectralEstimate perron(const NBOperator& op, double tol = 1e-9,
                               std::uint64_t max_iter = 1000000) {
    if (op.dimension() == 0) throw std::invalid_argument("perron: empty operator");
    if (!is_nb_strongly_connected(op))
        throw std::invalid_argument("perron: operator is not irreducible");
    if (!(tol > 0)) throw std::invalid_argument("perron: tolerance must be positive");

    const std::size_t n = static_cast<std::size_t>(op.dimension());
    std::vector<double> x(n, 1.0), y(n);
    SpectralEstimate best;
    best.lower = 0.0;
    best.upper = std::numeric_limits<double>::infinity();
    for (std::uint64_t it = 1; it <= max_iter; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double ymax = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            double acc = x[s];  // identity shift
            for (SideId t : op.row(static_cast<SideId>(s))) acc += x[t];
            y[s] = acc;
            double ratio = acc / x[s];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            ymax = std::max(ymax, acc);
        }
        best.iterations = it;
        best.lower = std::max(best.lower, lo - 1.0 - kPerronRoundoff);
        best.upper = std::min(best.upper, hi - 1.0 + kPerronRoundoff);
        if (best.upper - best.lower <= tol) {
            best.converged = true;
            return best;
        }
        const double scale = 1.0 / ymax;
        for (std::size_t s = 0; s < n; ++s) x[s] = y[s] * scale;
    }
    best.converged = false;
    return best;
}

}  // namespace nbg
