#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "nbg/multigraph.hpp"

namespace nbg::io {

using Json = nlohmann::ordered_json;

/// Raised for malformed input documents; the message carries position or
/// field diagnostics.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A graph document: the graph itself plus the optional basepoint and
/// per-edge generator labels (+k = side (u -> v) reads a_k, -k = it reads
/// a_k inverse).
struct GraphDoc {
    Multigraph graph;
    std::optional<VertexId> basepoint;
    std::optional<std::vector<std::int32_t>> labels;
};

inline Json graph_to_json(const GraphDoc& doc) {
    Json j;
    j["version"] = 1;
    j["vertex_count"] = doc.graph.vertex_count();
    Json edges = Json::array();
    for (const auto& [u, v] : doc.graph.edges()) edges.push_back(Json::array({u, v}));
    j["edges"] = std::move(edges);
    if (doc.basepoint) j["basepoint"] = *doc.basepoint;
    if (doc.labels) j["labels"] = *doc.labels;
    return j;
}

inline GraphDoc graph_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("graph document: top level must be an object");
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != 1)
        throw ParseError("graph document: missing or unsupported 'version' (expected 1)");
    if (!j.contains("vertex_count") || !j["vertex_count"].is_number_unsigned())
        throw ParseError("graph document: 'vertex_count' must be a non-negative integer");
    const auto vertex_count = j["vertex_count"].get<std::uint64_t>();
    if (vertex_count > 0xFFFFFFFFull)
        throw ParseError("graph document: 'vertex_count' exceeds supported range");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw ParseError("graph document: 'edges' must be an array");
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(j["edges"].size());
    std::size_t idx = 0;
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
            !e[1].is_number_unsigned())
            throw ParseError("graph document: edges[" + std::to_string(idx) +
                             "] must be a pair of vertex indices");
        const auto u = e[0].get<std::uint64_t>(), v = e[1].get<std::uint64_t>();
        if (u >= vertex_count || v >= vertex_count)
            throw ParseError("graph document: edges[" + std::to_string(idx) +
                             "] endpoint out of range (vertex_count " +
                             std::to_string(vertex_count) + ")");
        edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
        ++idx;
    }
    GraphDoc doc{Multigraph(static_cast<VertexId>(vertex_count), std::move(edges)),
                 std::nullopt, std::nullopt};
    if (j.contains("basepoint")) {
        if (!j["basepoint"].is_number_unsigned() ||
            j["basepoint"].get<std::uint64_t>() >= vertex_count)
            throw ParseError("graph document: 'basepoint' must be a valid vertex index");
        doc.basepoint = j["basepoint"].get<VertexId>();
    }
    if (j.contains("labels")) {
        if (!j["labels"].is_array() || j["labels"].size() != doc.graph.edge_count())
            throw ParseError("graph document: 'labels' must list one entry per edge");
        std::vector<std::int32_t> labels;
        labels.reserve(j["labels"].size());
        std::size_t li = 0;
        for (const auto& l : j["labels"]) {
            if (!l.is_number_integer() || l.get<std::int64_t>() == 0 ||
                l.get<std::int64_t>() > 0x7FFFFFFFll || l.get<std::int64_t>() < -0x7FFFFFFFll)
                throw ParseError("graph document: labels[" + std::to_string(li) +
                                 "] must be a nonzero signed generator index");
            labels.push_back(l.get<std::int32_t>());
            ++li;
        }
        doc.labels = std::move(labels);
    }
    return doc;
}

/// Canonical text encoding of a graph document (2-space indented, trailing
/// newline). Byte-stable for a fixed graph: golden files depend on this.
inline std::string encode(const GraphDoc& doc) { return graph_to_json(doc).dump(2) + "\n"; }

inline std::string encode(const Multigraph& g) {
    return encode(GraphDoc{g, std::nullopt, std::nullopt});
}

inline GraphDoc decode(const std::string& bytes) {
    Json j;
    try {
        j = Json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("graph document: ") + e.what());
    }
    return graph_from_json(j);
}

/// Label token for generators and DOT output: a_k renders as "a<k>", its
/// inverse as "b<k>".
inline std::string letter_token(std::int32_t letter) {
    return (letter > 0 ? "a" : "b") + std::to_string(letter > 0 ? letter : -letter);
}

/// DOT rendering: every vertex declared, then one undirected edge statement
/// per edge (labeled with its generator letter when labels are present).
inline std::string to_dot(const GraphDoc& doc, const std::string& name = "G") {
    std::string out = "graph " + name + " {\n";
    for (VertexId v = 0; v < doc.graph.vertex_count(); ++v) {
        out += "  " + std::to_string(v);
        if (doc.basepoint && *doc.basepoint == v) out += " [shape=doublecircle]";
        out += ";\n";
    }
    for (EdgeId e = 0; e < doc.graph.edge_count(); ++e) {
        const auto [u, v] = doc.graph.edge(e);
        out += "  " + std::to_string(u) + " -- " + std::to_string(v);
        if (doc.labels) out += " [label=\"" + letter_token((*doc.labels)[e]) + "\"]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace nbg::io
