#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbg/cover.hpp"
#include "nbg/growth.hpp"
#include "nbg/multigraph.hpp"
#include "nbg/perron.hpp"

namespace nbg {

/// Raised when a request cannot fit inside the configured resource limits;
/// the message names the minimal limits that would suffice.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

struct SynthesisLimits {
    std::uint64_t max_vertices = 100000;
    std::uint64_t max_eigen_iters = 1000000;  // per eigensolver call
    std::uint64_t max_cover_attempts = 5000;
};

struct SynthesisParams {
    std::uint32_t r = 0;
    std::uint32_t d = 0;  // always 2r
    double alpha = 0.0;
    double eps = 0.0;
    double eps_eff = 0.0;  // min(eps, distance of alpha to the K-interval ends)
    std::uint32_t K = 0;
    std::uint64_t n = 0;
    std::uint64_t girth_target = 0;
    bool girth_overridden = false;
    std::uint64_t seed = 0;
    SynthesisLimits limits;
};

/// One sweep record: after `index` single-edge subdivisions the graph has
/// the stated Perron enclosure. Step 0 is the unsubdivided start (edge -1).
struct SweepStep {
    std::uint64_t index = 0;
    std::int64_t edge = -1;
    double lower = 0.0;
    double upper = 0.0;
};

/// Deterministic run counters (a pure function of the inputs and seed, so
/// certificates remain byte-stable).
struct SynthesisStats {
    std::uint64_t cover_attempts = 0;
    std::uint64_t eigen_iterations = 0;
    std::uint64_t sweep_steps = 0;
    std::uint64_t vertices = 0;
    std::uint64_t edges = 0;
};

struct Certificate {
    SynthesisParams params;
    Multigraph graph;
    SpectralEstimate eigenvalue;
    std::vector<SweepStep> trace;
    std::uint64_t girth_achieved = 0;  // verified girth of the swept base graph
    SynthesisStats stats;
};

namespace detail {

/// Per-step drop of the growth rate under one extra subdivision, at growth
/// value x and tree-distance parameter n: x * (1 - x^{-1/(n+1)}).
inline double drop_bound(double x, double n) { return x * (1.0 - std::pow(x, -1.0 / (n + 1.0))); }

/// Moore bound: minimal vertex count of a d-regular graph with girth g
/// (1 + d * sum_{i<t} (d-1)^i for g = 2t+1, 2 * sum_{i<t} (d-1)^i for
/// g = 2t). Returns +infinity when it overflows double range.
inline double moore_bound(std::uint32_t d, std::uint64_t g) {
    if (g <= 2) return double(g);
    const std::uint64_t t = g / 2;
    double sum = 0.0, pw = 1.0;
    for (std::uint64_t i = 0; i < t; ++i) {
        sum += pw;
        pw *= double(d - 1);
        if (!std::isfinite(sum)) return std::numeric_limits<double>::infinity();
    }
    return (g % 2 == 1) ? 1.0 + double(d) * sum : 2.0 * sum;
}

}  // namespace detail

/// The parameter inequality that fixes n: the largest possible drop of the
/// growth rate in one sweep step, at girth parameter n.
inline double sweep_drop_limit(std::uint32_t d, std::uint32_t K, std::uint64_t n) {
    const double a = std::pow(double(d - 1), 1.0 / K);
    return detail::drop_bound(a, double(n));
}

inline SynthesisParams select_parameters(std::uint32_t r, double alpha, double eps,
                                         std::uint64_t seed, SynthesisLimits limits = {},
                                         std::optional<std::uint64_t> girth_override = {}) {
    if (r < 2) throw std::invalid_argument("select_parameters: rank must be >= 2");
    const double top = 2.0 * r - 1.0;
    if (alpha == 1.0)
        throw std::invalid_argument(
            "target growth 1 is realized exactly by any cycle; pick a target strictly inside "
            "(1, " +
            std::to_string(top) + ")");
    if (alpha == top)
        throw std::invalid_argument(
            "target growth " + std::to_string(top) +
            " is realized exactly by the rose with " + std::to_string(r) +
            " loops; pick a target strictly inside (1, " + std::to_string(top) + ")");
    if (!(alpha > 1.0 && alpha < top))
        throw std::invalid_argument("target not strictly inside (1, " + std::to_string(top) +
                                    ")");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");

    SynthesisParams p;
    p.r = r;
    p.d = 2 * r;
    p.alpha = alpha;
    p.eps = eps;
    p.seed = seed;
    p.limits = limits;

    // Smallest integer K strictly inside (L/2, L), L = ln(d-1)/ln(alpha):
    // then alpha sits strictly between (d-1)^{1/(2K)} and (d-1)^{1/K}.
    const double L = std::log(double(p.d - 1)) / std::log(alpha);
    std::uint64_t K;
    if (L < 2.0) {
        K = 1;
    } else if (L > 2.0) {
        K = static_cast<std::uint64_t>(std::floor(L / 2.0)) + 1;
    } else {
        throw std::invalid_argument(
            "target coincides with sqrt(2r-1), the junction of the K-intervals; perturb the "
            "target slightly");
    }
    if (!(K > L / 2.0 && K < L))
        throw std::invalid_argument(
            "no admissible subdivision depth K for this target; perturb the target slightly");
    p.K = static_cast<std::uint32_t>(K);

    const double hi = std::pow(double(p.d - 1), 1.0 / double(K));
    const double lo = std::pow(double(p.d - 1), 1.0 / (2.0 * double(K)));
    p.eps_eff = std::min(eps, std::min(alpha - lo, hi - alpha));
    if (!(p.eps_eff > 0.0))
        throw std::invalid_argument(
            "target is numerically on the boundary of its K-interval; perturb the target");

    // Smallest n >= 1 with hi * (1 - (d-1)^{-1/(K(n+1))}) < eps: closed-form
    // estimate, then nudged so minimality holds for the evaluated predicate.
    const auto drop_ok = [&](std::uint64_t n) { return sweep_drop_limit(p.d, p.K, n) < eps; };
    const double c = 1.0 - eps / hi;
    std::uint64_t n = 1;
    if (c > 0.0) {
        const double est = std::log(hi) / -std::log(c) - 1.0;
        if (est > 1.0) n = static_cast<std::uint64_t>(std::floor(est)) + 1;
    }
    while (!drop_ok(n)) ++n;
    while (n > 1 && drop_ok(n - 1)) --n;
    p.n = n;

    p.girth_overridden = girth_override.has_value();
    if (girth_override) {
        if (*girth_override < 3)
            throw std::invalid_argument("girth override must be >= 3");
        p.girth_target = *girth_override;
    } else {
        p.girth_target = p.n + 2;
    }

    // Resource projection: the cover stage needs at least the Moore bound
    // many vertices, and the K-subdivision multiplies by 1 + (K-1)d/2.
    const std::uint64_t cover_girth = std::max<std::uint64_t>(3, (p.girth_target + K - 1) / K);
    const double mb = detail::moore_bound(p.d, cover_girth);
    const double blowup = 1.0 + (double(K) - 1.0) * double(p.d) / 2.0;
    const double projected = mb * blowup;
    if (!(projected <= double(limits.max_vertices))) {
        std::string need;
        if (std::isfinite(projected)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.0f", std::ceil(projected));
            need = buf;
        } else {
            need = "more than 1e308";
        }
        throw ResourceError("projected base graph needs at least " + need +
                            " vertices (girth target " + std::to_string(p.girth_target) +
                            ", subdivision depth " + std::to_string(K) +
                            "); minimal sufficient limits: --max-vertices >= " + need);
    }
    return p;
}

inline Multigraph base_graph(const SynthesisParams& params) {
    return complete_graph(params.d + 1);
}

enum class SweepStatus { landed, completed, limits_exceeded, eigensolver_failed };

struct SweepOptions {
    bool stop_in_window = true;
    std::optional<double> tol_override;
};

struct SweepOutcome {
    SweepStatus status = SweepStatus::completed;
    Multigraph graph;           // state at stop or termination
    SpectralEstimate eigenvalue;  // enclosure of that state
    std::vector<SweepStep> trace;
    std::uint64_t steps = 0;
    std::uint64_t eigen_iterations = 0;
    std::string message;
};

/// Subdivides the edges of g0 one at a time in ascending index order,
/// re-certifying the growth rate after each step. With stop_in_window the
/// sweep stops at the first enclosure inside (alpha-eps, alpha+eps);
/// otherwise it runs to the full subdivision. Single-edge subdivision keeps
/// untouched edge indices stable, so "edge i of g0" is edge i throughout.
inline SweepOutcome subdivision_sweep(const Multigraph& g0, const SynthesisParams& params,
                                      SweepOptions opts = {}) {
    const double tol = opts.tol_override.value_or(params.eps_eff / 100.0);
    const auto in_window = [&](const SpectralEstimate& e) {
        return e.lower > params.alpha - params.eps && e.upper < params.alpha + params.eps;
    };
    SweepOutcome out;
    Multigraph cur = g0;
    SpectralEstimate est = growth_rate(cur, tol, params.limits.max_eigen_iters);
    out.eigen_iterations += est.iterations;
    out.trace.push_back({0, -1, est.lower, est.upper});
    if (!est.converged) {
        out.status = SweepStatus::eigensolver_failed;
        out.message = "eigensolver did not reach tolerance " + std::to_string(tol) + " within " +
                      std::to_string(params.limits.max_eigen_iters) + " iterations at step 0";
        out.graph = std::move(cur);
        out.eigenvalue = est;
        return out;
    }
    if (opts.stop_in_window && in_window(est)) {
        out.status = SweepStatus::landed;
        out.graph = std::move(cur);
        out.eigenvalue = est;
        return out;
    }
    const EdgeId total = g0.edge_count();
    for (EdgeId i = 1; i <= total; ++i) {
        if (std::uint64_t(cur.vertex_count()) + 1 > params.limits.max_vertices) {
            out.status = SweepStatus::limits_exceeded;
            out.message = "sweep needs up to " +
                          std::to_string(std::uint64_t(g0.vertex_count()) + total) +
                          " vertices; minimal sufficient limits: --max-vertices >= " +
                          std::to_string(std::uint64_t(g0.vertex_count()) + total);
            out.graph = std::move(cur);
            out.eigenvalue = est;
            return out;
        }
        cur = subdivide(cur, {i - 1});
        est = growth_rate(cur, tol, params.limits.max_eigen_iters);
        out.eigen_iterations += est.iterations;
        out.steps = i;
        out.trace.push_back({i, std::int64_t(i) - 1, est.lower, est.upper});
        if (!est.converged) {
            out.status = SweepStatus::eigensolver_failed;
            out.message = "eigensolver did not converge at step " + std::to_string(i);
            out.graph = std::move(cur);
            out.eigenvalue = est;
            return out;
        }
        if (opts.stop_in_window && in_window(est)) {
            out.status = SweepStatus::landed;
            out.graph = std::move(cur);
            out.eigenvalue = est;
            return out;
        }
    }
    out.status = SweepStatus::completed;
    out.graph = std::move(cur);
    out.eigenvalue = est;
    return out;
}

enum class SynthStatus { ok, cover_failed, limits_exceeded, eigensolver_failed, not_landed };

struct SynthesisOutcome {
    SynthStatus status = SynthStatus::not_landed;
    std::string stage;  // pipeline stage that failed, empty on success
    std::string message;
    std::optional<Certificate> certificate;
    std::vector<SweepStep> trace;  // trace so far when no certificate
    SynthesisStats stats;
};

/// Full pipeline: parameters -> complete base graph -> high-girth cover ->
/// uniform K-subdivision -> single-edge subdivision sweep. In girth-override
/// mode a sweep that runs through without landing retries with the girth
/// target raised by 2, up to the default n+2.
inline SynthesisOutcome synthesize(std::uint32_t r, double alpha, double eps, std::uint64_t seed,
                                   SynthesisLimits limits = {},
                                   std::optional<std::uint64_t> girth_override = {}) {
    SynthesisParams params = select_parameters(r, alpha, eps, seed, limits, girth_override);
    SynthesisOutcome out;
    const Multigraph h = base_graph(params);
    const double blowup = 1.0 + (double(params.K) - 1.0) * double(params.d) / 2.0;

    for (;;) {
        const std::uint64_t cover_girth =
            std::max<std::uint64_t>(3, (params.girth_target + params.K - 1) / params.K);
        CoverLimits cover_limits;
        cover_limits.max_vertices =
            static_cast<std::uint64_t>(double(limits.max_vertices) / blowup);
        cover_limits.max_attempts = limits.max_cover_attempts;
        CoverSearchResult cover = high_girth_cover(h, cover_girth, seed, cover_limits);
        out.stats.cover_attempts += cover.attempts;
        if (!cover.ok) {
            out.status = SynthStatus::limits_exceeded;
            out.stage = "high_girth_cover";
            out.message = "no cover of girth " + std::to_string(cover_girth) + " found: " +
                          cover.message + " (attempts: " + std::to_string(cover.attempts) + ")";
            return out;
        }

        const Multigraph g0 = subdivide_uniform(cover.cover.graph, params.K);
        if (g0.vertex_count() > limits.max_vertices) {
            out.status = SynthStatus::limits_exceeded;
            out.stage = "subdivide_uniform";
            out.message = "base graph has " + std::to_string(g0.vertex_count()) +
                          " vertices; minimal sufficient limits: --max-vertices >= " +
                          std::to_string(g0.vertex_count());
            return out;
        }
        const auto g0_girth = girth(g0);
        if (!g0_girth || *g0_girth < params.girth_target) {
            out.status = SynthStatus::cover_failed;
            out.stage = "subdivide_uniform";
            out.message = "internal: subdivided base girth below target";
            return out;
        }

        SweepOutcome sweep = subdivision_sweep(g0, params, {});
        out.stats.eigen_iterations += sweep.eigen_iterations;
        out.stats.sweep_steps += sweep.steps;
        out.trace = sweep.trace;
        switch (sweep.status) {
            case SweepStatus::landed: {
                Certificate cert;
                cert.params = params;
                cert.graph = std::move(sweep.graph);
                cert.eigenvalue = sweep.eigenvalue;
                cert.trace = std::move(sweep.trace);
                cert.girth_achieved = *g0_girth;
                out.stats.vertices = cert.graph.vertex_count();
                out.stats.edges = cert.graph.edge_count();
                cert.stats = out.stats;
                const double mid = cert.eigenvalue.midpoint();
                const double halfw = 0.5 * cert.eigenvalue.width();
                if (!(std::abs(mid - alpha) + halfw < eps))
                    throw std::logic_error("synthesize: landed outside the window");
                for (VertexId v = 0; v < cert.graph.vertex_count(); ++v) {
                    const auto deg = cert.graph.degree(v);
                    if (deg != 2 && deg != params.d)
                        throw std::logic_error("synthesize: degree invariant violated");
                }
                out.status = SynthStatus::ok;
                out.certificate = std::move(cert);
                return out;
            }
            case SweepStatus::completed: {
                if (params.girth_overridden && params.girth_target < params.n + 2) {
                    params.girth_target = std::min(params.n + 2, params.girth_target + 2);
                    continue;  // retry with a stricter girth target
                }
                const double endpoint =
                    std::pow(double(params.d - 1), 1.0 / (2.0 * double(params.K)));
                out.status = SynthStatus::not_landed;
                out.stage = "subdivision_sweep";
                out.message =
                    "sweep ran through without landing; final enclosure " +
                    std::string(sweep.eigenvalue.encloses(endpoint) ? "contains" : "misses") +
                    " the full-subdivision growth " + std::to_string(endpoint);
                return out;
            }
            case SweepStatus::limits_exceeded:
                out.status = SynthStatus::limits_exceeded;
                out.stage = "subdivision_sweep";
                out.message = sweep.message;
                return out;
            case SweepStatus::eigensolver_failed:
                out.status = SynthStatus::eigensolver_failed;
                out.stage = "subdivision_sweep";
                out.message = sweep.message;
                return out;
        }
    }
}

}  // namespace nbg
