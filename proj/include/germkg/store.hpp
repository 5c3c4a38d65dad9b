#ifndef GERMKG_STORE_HPP
#define GERMKG_STORE_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "germkg/error.hpp"
#include "germkg/kg.hpp"
#include "germkg/text.hpp"

namespace germkg::store {

inline constexpr int graph_format_version = 1;
inline constexpr std::string_view graph_format_name = "germkg-graph";

/// Canonical native document: nodes and triples in listing order, endpoints
/// referenced by node id.
inline std::string serialize(const KnowledgeGraph& g) {
    nlohmann::ordered_json doc;
    doc["format"] = graph_format_name;
    doc["version"] = graph_format_version;
    auto nodes = nlohmann::ordered_json::array();
    for (auto n : g.canonical_nodes()) {
        const auto& node = g.node(n);
        nodes.push_back({{"id", node.id}, {"label", to_string(node.label)}, {"name", node.name}});
    }
    auto triples = nlohmann::ordered_json::array();
    for (auto t : g.canonical_triples()) {
        const auto& tr = g.triple(t);
        triples.push_back({{"head", g.node(g.head_of(t)).id},
                           {"relation", to_string(tr.relation)},
                           {"tail", g.node(g.tail_of(t)).id},
                           {"sentences", tr.sentences}});
    }
    doc["nodes"] = std::move(nodes);
    doc["triples"] = std::move(triples);
    return doc.dump(2) + "\n";
}

/// Rebuilds a graph from a native document. Any defect aborts before a graph
/// is returned.
inline KnowledgeGraph deserialize(std::string_view content) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("corrupted or truncated graph file (") + e.what() + ")");
    }
    try {
        if (!doc.is_object() || doc.value("format", std::string()) != graph_format_name)
            throw ValidationError("not a germkg graph document");
        auto version = doc.at("version").get<int>();
        if (version != graph_format_version)
            throw ValidationError("unsupported graph version " + std::to_string(version) + " (expected " +
                                  std::to_string(graph_format_version) + ")");
        KnowledgeGraph g;
        for (const auto& n : doc.at("nodes")) {
            auto label = parse_node_label(n.at("label").get<std::string>());
            auto idx = g.add_node(label, n.at("name").get<std::string>());
            if (g.node(idx).id != n.at("id").get<std::string>())
                throw ValidationError("node id " + n.at("id").get<std::string>() + " does not match its name");
        }
        for (const auto& t : doc.at("triples")) {
            auto head = g.find_id(t.at("head").get<std::string>());
            auto tail = g.find_id(t.at("tail").get<std::string>());
            if (!head || !tail) throw ValidationError("triple references an unknown node");
            auto relation = parse_relation(t.at("relation").get<std::string>());
            if (g.node(*head).label != NodeLabel::pubmed_id || g.node(*tail).label != tail_label(relation))
                throw ValidationError("triple endpoints do not fit relation " + std::string(to_string(relation)));
            Triple tr{g.node(*head).name, relation, g.node(*tail).name, {}};
            for (const auto& s : t.at("sentences")) tr.sentences.insert(s.get<std::size_t>());
            g.add_triple(tr);
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed graph document (") + e.what() + ")");
    }
}

inline void save(const KnowledgeGraph& g, const std::filesystem::path& path) {
    fs_util::write_file_atomic(path, serialize(g));
}

inline KnowledgeGraph load(const std::filesystem::path& path) {
    auto content = fs_util::read_file(path);
    try {
        return deserialize(content);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

} // namespace germkg::store

#endif
