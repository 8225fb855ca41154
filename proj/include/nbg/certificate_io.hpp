#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nbg/graph_io.hpp"
#include "nbg/growth.hpp"
#include "nbg/synthesis.hpp"

namespace nbg::io {

inline Json certificate_to_json(const Certificate& cert) {
    Json j;
    j["version"] = 1;
    Json params;
    params["r"] = cert.params.r;
    params["d"] = cert.params.d;
    params["alpha"] = cert.params.alpha;
    params["eps"] = cert.params.eps;
    params["eps_eff"] = cert.params.eps_eff;
    params["K"] = cert.params.K;
    params["n"] = cert.params.n;
    params["girth_target"] = cert.params.girth_target;
    params["girth_overridden"] = cert.params.girth_overridden;
    params["seed"] = cert.params.seed;
    Json limits;
    limits["max_vertices"] = cert.params.limits.max_vertices;
    limits["max_eigen_iters"] = cert.params.limits.max_eigen_iters;
    limits["max_cover_attempts"] = cert.params.limits.max_cover_attempts;
    params["limits"] = std::move(limits);
    j["params"] = std::move(params);
    j["graph"] = graph_to_json(GraphDoc{cert.graph, std::nullopt, std::nullopt});
    Json eig;
    eig["lower"] = cert.eigenvalue.lower;
    eig["upper"] = cert.eigenvalue.upper;
    j["eigenvalue"] = std::move(eig);
    Json trace = Json::array();
    for (const auto& step : cert.trace) {
        Json rec;
        rec["i"] = step.index;
        rec["edge"] = step.edge;
        rec["lower"] = step.lower;
        rec["upper"] = step.upper;
        trace.push_back(std::move(rec));
    }
    j["trace"] = std::move(trace);
    j["girth_achieved"] = cert.girth_achieved;
    j["seed"] = cert.params.seed;
    Json stats;
    stats["cover_attempts"] = cert.stats.cover_attempts;
    stats["eigen_iterations"] = cert.stats.eigen_iterations;
    stats["sweep_steps"] = cert.stats.sweep_steps;
    stats["vertices"] = cert.stats.vertices;
    stats["edges"] = cert.stats.edges;
    j["stats"] = std::move(stats);
    return j;
}

inline std::string encode_certificate(const Certificate& cert) {
    return certificate_to_json(cert).dump(2) + "\n";
}

namespace detail {

template <typename T>
T field(const Json& j, const char* object, const char* key) {
    if (!j.contains(key))
        throw ParseError(std::string("certificate: ") + object + " is missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("certificate: ") + object + " field '" + key +
                         "' has the wrong type");
    }
}

}  // namespace detail

inline Certificate certificate_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("certificate: top level must be an object");
    if (detail::field<int>(j, "document", "version") != 1)
        throw ParseError("certificate: unsupported version");
    Certificate cert;
    const Json& params = j.contains("params") && j["params"].is_object()
                             ? j["params"]
                             : throw ParseError("certificate: missing 'params' object");
    cert.params.r = detail::field<std::uint32_t>(params, "params", "r");
    cert.params.d = detail::field<std::uint32_t>(params, "params", "d");
    cert.params.alpha = detail::field<double>(params, "params", "alpha");
    cert.params.eps = detail::field<double>(params, "params", "eps");
    cert.params.eps_eff = detail::field<double>(params, "params", "eps_eff");
    cert.params.K = detail::field<std::uint32_t>(params, "params", "K");
    cert.params.n = detail::field<std::uint64_t>(params, "params", "n");
    cert.params.girth_target = detail::field<std::uint64_t>(params, "params", "girth_target");
    cert.params.girth_overridden = detail::field<bool>(params, "params", "girth_overridden");
    cert.params.seed = detail::field<std::uint64_t>(params, "params", "seed");
    if (!params.contains("limits") || !params["limits"].is_object())
        throw ParseError("certificate: params is missing 'limits'");
    const Json& limits = params["limits"];
    cert.params.limits.max_vertices =
        detail::field<std::uint64_t>(limits, "limits", "max_vertices");
    cert.params.limits.max_eigen_iters =
        detail::field<std::uint64_t>(limits, "limits", "max_eigen_iters");
    cert.params.limits.max_cover_attempts =
        detail::field<std::uint64_t>(limits, "limits", "max_cover_attempts");
    if (!j.contains("graph")) throw ParseError("certificate: missing 'graph'");
    cert.graph = graph_from_json(j["graph"]).graph;
    if (!j.contains("eigenvalue") || !j["eigenvalue"].is_object())
        throw ParseError("certificate: missing 'eigenvalue'");
    cert.eigenvalue.lower = detail::field<double>(j["eigenvalue"], "eigenvalue", "lower");
    cert.eigenvalue.upper = detail::field<double>(j["eigenvalue"], "eigenvalue", "upper");
    cert.eigenvalue.converged = true;
    if (!j.contains("trace") || !j["trace"].is_array())
        throw ParseError("certificate: missing 'trace' array");
    for (const auto& rec : j["trace"]) {
        SweepStep step;
        step.index = detail::field<std::uint64_t>(rec, "trace entry", "i");
        step.edge = detail::field<std::int64_t>(rec, "trace entry", "edge");
        step.lower = detail::field<double>(rec, "trace entry", "lower");
        step.upper = detail::field<double>(rec, "trace entry", "upper");
        cert.trace.push_back(step);
    }
    cert.girth_achieved = detail::field<std::uint64_t>(j, "document", "girth_achieved");
    if (!j.contains("stats") || !j["stats"].is_object())
        throw ParseError("certificate: missing 'stats'");
    const Json& stats = j["stats"];
    cert.stats.cover_attempts = detail::field<std::uint64_t>(stats, "stats", "cover_attempts");
    cert.stats.eigen_iterations =
        detail::field<std::uint64_t>(stats, "stats", "eigen_iterations");
    cert.stats.sweep_steps = detail::field<std::uint64_t>(stats, "stats", "sweep_steps");
    cert.stats.vertices = detail::field<std::uint64_t>(stats, "stats", "vertices");
    cert.stats.edges = detail::field<std::uint64_t>(stats, "stats", "edges");
    return cert;
}

inline Certificate decode_certificate(const std::string& bytes) {
    Json j;
    try {
        j = Json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("certificate: ") + e.what());
    }
    return certificate_from_json(j);
}

struct VerifyReport {
    bool ok = false;
    std::vector<std::string> failures;
    SpectralEstimate fresh;  // independently recomputed enclosure
};

/// Re-derives every certificate invariant from the embedded graph: degrees,
/// connectivity, girth, and a fresh eigenvalue enclosure that must both
/// overlap the stored one and land within eps of the target.
inline VerifyReport verify_certificate(const Certificate& cert) {
    VerifyReport rep;
    auto fail = [&](const std::string& what) { rep.failures.push_back(what); };

    if (cert.params.d != 2 * cert.params.r) fail("params: d != 2r");
    if (!(cert.params.eps > 0)) fail("params: eps must be positive");
    if (cert.graph.edge_count() == 0) {
        fail("graph: empty");
        return rep;
    }
    if (!is_connected(cert.graph)) fail("graph: disconnected");
    for (VertexId v = 0; v < cert.graph.vertex_count(); ++v) {
        const auto deg = cert.graph.degree(v);
        if (deg != 2 && deg != cert.params.d) {
            fail("graph: vertex " + std::to_string(v) + " has degree " + std::to_string(deg) +
                 ", expected 2 or " + std::to_string(cert.params.d));
            break;
        }
    }
    const auto gr = girth(cert.graph);
    if (!gr || *gr < cert.girth_achieved)
        fail("girth: recomputed " + std::to_string(gr ? *gr : 0) + " below recorded " +
             std::to_string(cert.girth_achieved));
    if (!(cert.eigenvalue.lower <= cert.eigenvalue.upper)) fail("eigenvalue: inverted enclosure");
    const double mid = cert.eigenvalue.midpoint();
    const double halfw = 0.5 * cert.eigenvalue.width();
    if (!(std::abs(mid - cert.params.alpha) + halfw < cert.params.eps))
        fail("eigenvalue: stored enclosure not within eps of the target");
    if (cert.trace.empty()) {
        fail("trace: empty");
    } else {
        const auto& last = cert.trace.back();
        if (last.lower != cert.eigenvalue.lower || last.upper != cert.eigenvalue.upper)
            fail("trace: final entry disagrees with the stored eigenvalue");
    }
    if (rep.failures.empty() || is_connected(cert.graph)) {
        try {
            const double tol = cert.params.eps_eff > 0 ? cert.params.eps_eff / 100.0 : 1e-9;
            rep.fresh = growth_rate(cert.graph, tol, cert.params.limits.max_eigen_iters);
            if (rep.fresh.lower > cert.eigenvalue.upper ||
                rep.fresh.upper < cert.eigenvalue.lower)
                fail("eigenvalue: fresh enclosure [" + std::to_string(rep.fresh.lower) + ", " +
                     std::to_string(rep.fresh.upper) + "] does not overlap the stored one");
            const double fmid = rep.fresh.midpoint();
            const double fhalfw = 0.5 * rep.fresh.width();
            if (!(std::abs(fmid - cert.params.alpha) + fhalfw < cert.params.eps))
                fail("eigenvalue: fresh enclosure not within eps of the target");
        } catch (const std::exception& e) {
            fail(std::string("eigenvalue: recomputation failed: ") + e.what());
        }
    }
    rep.ok = rep.failures.empty();
    return rep;
}

}  // namespace nbg::io
