#ifndef GERMKG_KG_HPP
#define GERMKG_KG_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "germkg/entity.hpp"
#include "germkg/error.hpp"
#include "germkg/ingest.hpp"
#include "germkg/lexnorm.hpp"

namespace germkg {

enum class NodeLabel : std::uint8_t { pubmed_id, gene, disease };

inline constexpr std::array<NodeLabel, 3> all_node_labels = {NodeLabel::pubmed_id, NodeLabel::gene,
                                                             NodeLabel::disease};

inline std::string_view to_string(NodeLabel l) noexcept {
    switch (l) {
    case NodeLabel::pubmed_id: return "PubMedID";
    case NodeLabel::gene: return "Gene";
    case NodeLabel::disease: return "Disease";
    }
    return "PubMedID";
}

inline NodeLabel parse_node_label(std::string_view s) {
    for (auto l : all_node_labels)
        if (to_string(l) == s) return l;
    throw ValidationError("unknown node label '" + std::string(s) + "'");
}

inline std::string_view id_prefix(NodeLabel l) noexcept {
    switch (l) {
    case NodeLabel::pubmed_id: return "pmid:";
    case NodeLabel::gene: return "gene:";
    case NodeLabel::disease: return "disease:";
    }
    return "pmid:";
}

inline NodeLabel node_label_for(Kind k) noexcept { return k == Kind::gene ? NodeLabel::gene : NodeLabel::disease; }

/// Declared in lexical order of the names so enum order is listing order.
enum class Relation : std::uint8_t { diseases_in, genes_in };

inline std::string_view to_string(Relation r) noexcept { return r == Relation::genes_in ? "GENES_IN" : "DISEASES_IN"; }

inline Relation parse_relation(std::string_view s) {
    if (s == "GENES_IN") return Relation::genes_in;
    if (s == "DISEASES_IN") return Relation::diseases_in;
    throw ValidationError("unknown relation '" + std::string(s) + "'");
}

inline Relation relation_for(Kind k) noexcept { return k == Kind::gene ? Relation::genes_in : Relation::diseases_in; }
inline NodeLabel tail_label(Relation r) noexcept { return r == Relation::genes_in ? NodeLabel::gene : NodeLabel::disease; }

inline std::string node_id(NodeLabel label, std::string_view name) {
    return std::string(id_prefix(label)) + lexical_key(name);
}

struct Node {
    std::string id;
    NodeLabel label = NodeLabel::pubmed_id;
    std::string name;

    bool operator==(const Node&) const = default;
};

/// (PubMedID) -[GENES_IN|DISEASES_IN]-> (Gene|Disease). `sentences` holds the
/// sentence indexes of the article in which the entity was mentioned.
struct Triple {
    std::string pubmed_id;
    Relation relation = Relation::genes_in;
    std::string entity;
    std::set<std::size_t> sentences;

    auto key() const { return std::tie(pubmed_id, relation, entity); }
    bool operator==(const Triple&) const = default;
};

struct GraphStats {
    std::size_t triples = 0;
    std::size_t entities = 0;
    std::size_t pubmed_ids = 0;
    std::size_t genes = 0;
    std::size_t diseases = 0;

    bool operator==(const GraphStats&) const = default;
};

/// Typed nodes plus deduplicated triples, indexed by name, by relation and by
/// adjacency in both directions. Iteration through the canonical_* accessors
/// is sorted: nodes by (label, name), triples by (head, relation, tail).
class KnowledgeGraph {
public:
    using NodeIndex = std::size_t;
    using TripleIndex = std::size_t;

    NodeIndex add_node(NodeLabel label, std::string_view name) {
        auto trimmed = std::string(name);
        if (trimmed.empty()) throw ValidationError("node name must not be empty");
        if (label == NodeLabel::pubmed_id && !ingest::is_pubmed_id(trimmed))
            throw ValidationError("PubMedID node name '" + trimmed + "' is not a digit string");
        if (auto it = by_label_name_.find({label, trimmed}); it != by_label_name_.end()) return it->second;
        auto id = node_id(label, trimmed);
        if (id == id_prefix(label)) throw ValidationError("node name '" + trimmed + "' has an empty lexical key");
        if (auto clash = by_id_.find(id); clash != by_id_.end())
            throw ValidationError("node id " + id + " shared by '" + nodes_[clash->second].name + "' and '" + trimmed +
                                  "'");
        auto idx = nodes_.size();
        nodes_.push_back({id, label, trimmed});
        by_label_name_.emplace(std::make_pair(label, trimmed), idx);
        by_id_.emplace(id, idx);
        by_name_[trimmed].push_back(idx);
        out_.emplace_back();
        in_.emplace_back();
        return idx;
    }

    /// Adds a triple, creating endpoints on first reference. A repeated
    /// (head, relation, tail) merges provenance.
    TripleIndex add_triple(const Triple& t) {
        auto head = add_node(NodeLabel::pubmed_id, t.pubmed_id);
        auto tail = add_node(tail_label(t.relation), t.entity);
        auto key = std::make_tuple(t.pubmed_id, t.relation, t.entity);
        if (auto it = by_key_.find(key); it != by_key_.end()) {
            triples_[it->second].sentences.insert(t.sentences.begin(), t.sentences.end());
            return it->second;
        }
        auto idx = triples_.size();
        triples_.push_back(t);
        endpoints_.push_back({head, tail});
        by_key_.emplace(std::move(key), idx);
        out_[head].push_back(idx);
        in_[tail].push_back(idx);
        by_relation_[t.relation].push_back(idx);
        return idx;
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Triple>& triples() const noexcept { return triples_; }
    const Node& node(NodeIndex i) const { return nodes_.at(i); }
    const Triple& triple(TripleIndex i) const { return triples_.at(i); }
    NodeIndex head_of(TripleIndex t) const { return endpoints_.at(t).first; }
    NodeIndex tail_of(TripleIndex t) const { return endpoints_.at(t).second; }
    const std::vector<TripleIndex>& outgoing(NodeIndex n) const { return out_.at(n); }
    const std::vector<TripleIndex>& incoming(NodeIndex n) const { return in_.at(n); }

    const std::vector<TripleIndex>& with_relation(Relation r) const {
        static const std::vector<TripleIndex> none;
        auto it = by_relation_.find(r);
        return it == by_relation_.end() ? none : it->second;
    }

    std::optional<NodeIndex> find(NodeLabel label, std::string_view name) const {
        auto it = by_label_name_.find({label, std::string(name)});
        if (it == by_label_name_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<NodeIndex> find_id(std::string_view id) const {
        auto it = by_id_.find(std::string(id));
        if (it == by_id_.end()) return std::nullopt;
        return it->second;
    }

    /// Nodes whose display name is exactly `name`, in canonical order.
    std::vector<NodeIndex> find_name(std::string_view name) const {
        auto it = by_name_.find(std::string(name));
        if (it == by_name_.end()) return {};
        auto out = it->second;
        std::sort(out.begin(), out.end(), [&](auto a, auto b) { return node_less(a, b); });
        return out;
    }

    std::vector<NodeIndex> canonical_nodes() const {
        std::vector<NodeIndex> out;
        out.reserve(nodes_.size());
        for (const auto& [k, idx] : by_label_name_) out.push_back(idx);
        return out;
    }

    std::vector<TripleIndex> canonical_triples() const {
        std::vector<TripleIndex> out;
        out.reserve(triples_.size());
        for (const auto& [k, idx] : by_key_) out.push_back(idx);
        return out;
    }

    bool node_less(NodeIndex a, NodeIndex b) const {
        return std::tie(nodes_[a].label, nodes_[a].name) < std::tie(nodes_[b].label, nodes_[b].name);
    }

    std::size_t count(NodeLabel label) const {
        std::size_t n = 0;
        for (const auto& node : nodes_) n += node.label == label;
        return n;
    }

    bool empty() const noexcept { return nodes_.empty(); }

private:
    std::vector<Node> nodes_;
    std::vector<Triple> triples_;
    std::vector<std::pair<NodeIndex, NodeIndex>> endpoints_;
    std::map<std::pair<NodeLabel, std::string>, NodeIndex> by_label_name_;
    std::map<std::string, NodeIndex> by_id_;
    std::map<std::string, std::vector<NodeIndex>> by_name_;
    std::map<std::tuple<std::string, Relation, std::string>, TripleIndex> by_key_;
    std::map<Relation, std::vector<TripleIndex>> by_relation_;
    std::vector<std::vector<TripleIndex>> out_;
    std::vector<std::vector<TripleIndex>> in_;
};

namespace kg {

/// One triple per distinct (kind, master) among an article's normalized
/// entities, carrying the union of the contributing sentence indexes.
inline std::vector<Triple> build_triples(std::string_view pubmed_id, std::span<const NormalizedEntity> entities) {
    std::map<std::pair<Relation, std::string>, std::set<std::size_t>> grouped;
    for (const auto& e : entities) {
        if (e.source.pubmed_id != pubmed_id)
            throw ValidationError("entity from article " + e.source.pubmed_id + " passed for article " +
                                  std::string(pubmed_id));
        for (const auto& master : e.masters) grouped[{relation_for(e.kind), master}].insert(e.source.sentence_index);
    }
    std::vector<Triple> out;
    out.reserve(grouped.size());
    for (auto& [key, sentences] : grouped)
        out.push_back({std::string(pubmed_id), key.first, key.second, std::move(sentences)});
    std::sort(out.begin(), out.end(), [](const Triple& a, const Triple& b) { return a.key() < b.key(); });
    return out;
}

inline KnowledgeGraph assemble_graph(std::span<const Triple> triples) {
    KnowledgeGraph g;
    for (const auto& t : triples) g.add_triple(t);
    return g;
}

inline GraphStats stats(const KnowledgeGraph& g) {
    GraphStats s;
    s.triples = g.triples().size();
    s.pubmed_ids = g.count(NodeLabel::pubmed_id);
    s.genes = g.count(NodeLabel::gene);
    s.diseases = g.count(NodeLabel::disease);
    s.entities = g.nodes().size();
    return s;
}

/// Triples in canonical order, by value.
inline std::vector<Triple> sorted_triples(const KnowledgeGraph& g) {
    std::vector<Triple> out;
    for (auto t : g.canonical_triples()) out.push_back(g.triple(t));
    return out;
}

inline std::vector<Node> sorted_nodes(const KnowledgeGraph& g) {
    std::vector<Node> out;
    for (auto n : g.canonical_nodes()) out.push_back(g.node(n));
    return out;
}

/// Same node set and the same triples including provenance.
inline bool equivalent(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return sorted_nodes(a) == sorted_nodes(b) && sorted_triples(a) == sorted_triples(b);
}

} // namespace kg
} // namespace germkg

#endif
