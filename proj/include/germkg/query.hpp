#ifndef GERMKG_QUERY_HPP
#define GERMKG_QUERY_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "germkg/error.hpp"
#include "germkg/kg.hpp"
#include "germkg/text.hpp"

namespace germkg {

/// Matched center node(s), their neighbors grouped by label and the triples
/// that connect them. Groups are always present for all three labels.
struct QueryResult {
    std::vector<Node> centers;
    std::map<NodeLabel, std::vector<Node>> neighbors{
        {NodeLabel::pubmed_id, {}}, {NodeLabel::gene, {}}, {NodeLabel::disease, {}}};
    std::vector<Triple> triples;

    const std::vector<Node>& group(NodeLabel l) const { return neighbors.at(l); }
    bool operator==(const QueryResult&) const = default;
};

struct CooccurrenceRow {
    std::string gene;
    std::string disease;
    std::size_t support = 0;
    std::vector<std::string> articles; // sorted; size() == support

    bool operator==(const CooccurrenceRow&) const = default;
};

enum class CooccurrenceLevel { article, sentence };

inline CooccurrenceLevel parse_cooccurrence_level(std::string_view s) {
    if (s == "article") return CooccurrenceLevel::article;
    if (s == "sentence") return CooccurrenceLevel::sentence;
    throw ValidationError("level must be 'article' or 'sentence', got '" + std::string(s) + "'");
}

inline constexpr int min_neighborhood_depth = 1;
inline constexpr int max_neighborhood_depth = 3;

namespace query {

using NodeIndex = KnowledgeGraph::NodeIndex;
using TripleIndex = KnowledgeGraph::TripleIndex;

/// Exact display-name lookup, falling back to a case-insensitive match.
/// With no label restriction every exactly matching node is returned.
inline std::vector<NodeIndex> resolve(const KnowledgeGraph& g, std::optional<NodeLabel> label, std::string_view name) {
    std::vector<NodeIndex> hits;
    for (auto n : g.find_name(name))
        if (!label || g.node(n).label == *label) hits.push_back(n);
    if (!hits.empty()) return hits;
    for (auto n : g.canonical_nodes()) {
        const auto& node = g.node(n);
        if ((!label || node.label == *label) && text::iequals(node.name, name)) hits.push_back(n);
    }
    return hits;
}

inline NodeIndex resolve_one(const KnowledgeGraph& g, NodeLabel label, std::string_view name) {
    auto hits = resolve(g, label, name);
    if (hits.empty()) {
        std::string what = label == NodeLabel::pubmed_id ? "article" : label == NodeLabel::gene ? "gene" : "disease";
        throw NotFoundError(what + " '" + std::string(name) + "' not found");
    }
    return hits.front();
}

namespace detail {

inline QueryResult collect(const KnowledgeGraph& g, const std::vector<NodeIndex>& centers,
                           const std::set<NodeIndex>& neighbors, const std::set<TripleIndex>& triples) {
    QueryResult r;
    auto sorted_centers = centers;
    std::sort(sorted_centers.begin(), sorted_centers.end(), [&](auto a, auto b) { return g.node_less(a, b); });
    for (auto c : sorted_centers) r.centers.push_back(g.node(c));
    std::vector<NodeIndex> ns(neighbors.begin(), neighbors.end());
    std::sort(ns.begin(), ns.end(), [&](auto a, auto b) { return g.node_less(a, b); });
    for (auto n : ns) r.neighbors[g.node(n).label].push_back(g.node(n));
    for (const auto& t : triples) r.triples.push_back(g.triple(t));
    std::sort(r.triples.begin(), r.triples.end(), [](const Triple& a, const Triple& b) { return a.key() < b.key(); });
    return r;
}

/// Articles linked to `entity`, plus every entity of `other` kind those articles link to.
inline QueryResult articles_and_linked(const KnowledgeGraph& g, NodeIndex entity, Relation other) {
    std::set<NodeIndex> neighbors;
    std::set<TripleIndex> triples;
    for (auto t : g.incoming(entity)) {
        auto article = g.head_of(t);
        triples.insert(t);
        neighbors.insert(article);
        for (auto t2 : g.outgoing(article)) {
            if (g.triple(t2).relation != other) continue;
            triples.insert(t2);
            neighbors.insert(g.tail_of(t2));
        }
    }
    return collect(g, {entity}, neighbors, triples);
}

} // namespace detail

/// Articles mentioning the disease and every gene those articles mention.
inline QueryResult articles_and_genes_for_disease(const KnowledgeGraph& g, std::string_view disease) {
    return detail::articles_and_linked(g, resolve_one(g, NodeLabel::disease, disease), Relation::genes_in);
}

/// Articles mentioning the gene and every disease those articles mention.
inline QueryResult articles_and_diseases_for_gene(const KnowledgeGraph& g, std::string_view gene) {
    return detail::articles_and_linked(g, resolve_one(g, NodeLabel::gene, gene), Relation::diseases_in);
}

inline QueryResult entities_for_article(const KnowledgeGraph& g, std::string_view pubmed_id) {
    auto article = resolve_one(g, NodeLabel::pubmed_id, pubmed_id);
    std::set<NodeIndex> neighbors;
    std::set<TripleIndex> triples;
    for (auto t : g.outgoing(article)) {
        triples.insert(t);
        neighbors.insert(g.tail_of(t));
    }
    return detail::collect(g, {article}, neighbors, triples);
}

struct CooccurrenceFilter {
    std::optional<std::string> gene;
    std::optional<std::string> disease;
};

/// Gene/disease pairs sharing an article (article level) or sharing a
/// sentence index within one article (sentence level). Rows are sorted by
/// support descending, then gene, then disease.
inline std::vector<CooccurrenceRow> cooccurrence(const KnowledgeGraph& g, CooccurrenceLevel level,
                                                 const CooccurrenceFilter& filter = {}) {
    std::optional<NodeIndex> gene_filter, disease_filter;
    if (filter.gene) gene_filter = resolve_one(g, NodeLabel::gene, *filter.gene);
    if (filter.disease) disease_filter = resolve_one(g, NodeLabel::disease, *filter.disease);

    std::map<std::pair<NodeIndex, NodeIndex>, std::set<std::string>> support;
    for (auto t : g.with_relation(Relation::genes_in)) {
        auto gene = g.tail_of(t);
        if (gene_filter && gene != *gene_filter) continue;
        auto article = g.head_of(t);
        const auto& gene_sentences = g.triple(t).sentences;
        for (auto t2 : g.outgoing(article)) {
            if (g.triple(t2).relation != Relation::diseases_in) continue;
            auto disease = g.tail_of(t2);
            if (disease_filter && disease != *disease_filter) continue;
            if (level == CooccurrenceLevel::sentence) {
                const auto& ds = g.triple(t2).sentences;
                bool shared = std::any_of(gene_sentences.begin(), gene_sentences.end(),
                                          [&](std::size_t s) { return ds.count(s) > 0; });
                if (!shared) continue;
            }
            support[{gene, disease}].insert(g.node(article).name);
        }
    }
    std::vector<CooccurrenceRow> rows;
    rows.reserve(support.size());
    for (auto& [pair, articles] : support)
        rows.push_back({g.node(pair.first).name, g.node(pair.second).name, articles.size(),
                        {articles.begin(), articles.end()}});
    std::sort(rows.begin(), rows.end(), [](const CooccurrenceRow& a, const CooccurrenceRow& b) {
        if (a.support != b.support) return a.support > b.support;
        return std::tie(a.gene, a.disease) < std::tie(b.gene, b.disease);
    });
    return rows;
}

/// Undirected breadth-first expansion from every node named `name`, up to
/// `depth` hops, with all triples induced on the reached node set.
inline QueryResult neighborhood(const KnowledgeGraph& g, std::string_view name, int depth) {
    if (depth < min_neighborhood_depth || depth > max_neighborhood_depth)
        throw ValidationError("depth must be between " + std::to_string(min_neighborhood_depth) + " and " +
                              std::to_string(max_neighborhood_depth) + ", got " + std::to_string(depth));
    auto centers = resolve(g, std::nullopt, name);
    if (centers.empty()) throw NotFoundError("node '" + std::string(name) + "' not found");

    std::set<NodeIndex> reached(centers.begin(), centers.end());
    std::vector<NodeIndex> frontier = centers;
    for (int hop = 0; hop < depth && !frontier.empty(); ++hop) {
        std::vector<NodeIndex> next;
        for (auto n : frontier) {
            for (auto t : g.outgoing(n))
                if (reached.insert(g.tail_of(t)).second) next.push_back(g.tail_of(t));
            for (auto t : g.incoming(n))
                if (reached.insert(g.head_of(t)).second) next.push_back(g.head_of(t));
        }
        frontier = std::move(next);
    }
    std::set<TripleIndex> triples;
    for (auto n : reached)
        for (auto t : g.outgoing(n))
            if (reached.count(g.tail_of(t))) triples.insert(t);
    std::set<NodeIndex> neighbors;
    for (auto n : reached)
        if (std::find(centers.begin(), centers.end(), n) == centers.end()) neighbors.insert(n);
    return detail::collect(g, centers, neighbors, triples);
}

inline constexpr std::size_t default_search_limit = 20;

/// Case-insensitive prefix search over display names, in (label, name) order.
inline std::vector<Node> search(const KnowledgeGraph& g, std::string_view prefix,
                                std::size_t limit = default_search_limit) {
    if (text::trim(prefix).empty()) throw ValidationError("search query must not be empty");
    std::vector<Node> out;
    for (auto n : g.canonical_nodes()) {
        if (out.size() >= limit) break;
        const auto& node = g.node(n);
        if (node.name.size() >= prefix.size() && text::iequals(std::string_view(node.name).substr(0, prefix.size()), prefix))
            out.push_back(node);
    }
    return out;
}

} // namespace query

// JSON mapping (nlohmann ADL hooks)

inline void to_json(nlohmann::json& j, const Node& n) {
    j = {{"id", n.id}, {"label", to_string(n.label)}, {"name", n.name}};
}
inline void from_json(const nlohmann::json& j, Node& n) {
    n.id = j.at("id").get<std::string>();
    n.label = parse_node_label(j.at("label").get<std::string>());
    n.name = j.at("name").get<std::string>();
}

inline void to_json(nlohmann::json& j, const Triple& t) {
    j = {{"head", t.pubmed_id}, {"relation", to_string(t.relation)}, {"tail", t.entity}, {"sentences", t.sentences}};
}
inline void from_json(const nlohmann::json& j, Triple& t) {
    t.pubmed_id = j.at("head").get<std::string>();
    t.relation = parse_relation(j.at("relation").get<std::string>());
    t.entity = j.at("tail").get<std::string>();
    t.sentences = j.at("sentences").get<std::set<std::size_t>>();
}

inline void to_json(nlohmann::json& j, const QueryResult& r) {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [label, nodes] : r.neighbors) groups[std::string(to_string(label))] = nodes;
    j = {{"centers", r.centers}, {"neighbors", groups}, {"triples", r.triples}};
}
inline void from_json(const nlohmann::json& j, QueryResult& r) {
    r = QueryResult{};
    r.centers = j.at("centers").get<std::vector<Node>>();
    for (const auto& [label, nodes] : j.at("neighbors").items())
        r.neighbors[parse_node_label(label)] = nodes.get<std::vector<Node>>();
    r.triples = j.at("triples").get<std::vector<Triple>>();
}

inline void to_json(nlohmann::json& j, const CooccurrenceRow& r) {
    j = {{"gene", r.gene}, {"disease", r.disease}, {"support", r.support}, {"articles", r.articles}};
}
inline void from_json(const nlohmann::json& j, CooccurrenceRow& r) {
    r.gene = j.at("gene").get<std::string>();
    r.disease = j.at("disease").get<std::string>();
    r.support = j.at("support").get<std::size_t>();
    r.articles = j.at("articles").get<std::vector<std::string>>();
}

inline void to_json(nlohmann::json& j, const GraphStats& s) {
    j = {{"triples", s.triples},
         {"entities", s.entities},
         {"pubmed_ids", s.pubmed_ids},
         {"genes", s.genes},
         {"diseases", s.diseases}};
}
inline void from_json(const nlohmann::json& j, GraphStats& s) {
    s.triples = j.at("triples").get<std::size_t>();
    s.entities = j.at("entities").get<std::size_t>();
    s.pubmed_ids = j.at("pubmed_ids").get<std::size_t>();
    s.genes = j.at("genes").get<std::size_t>();
    s.diseases = j.at("diseases").get<std::size_t>();
}

} // namespace germkg

#endif
