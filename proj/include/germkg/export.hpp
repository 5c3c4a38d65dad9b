#ifndef GERMKG_EXPORT_HPP
#define GERMKG_EXPORT_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "germkg/csv.hpp"
#include "germkg/error.hpp"
#include "germkg/kg.hpp"
#include "germkg/text.hpp"

namespace germkg::exporter {

enum class Format { cypher, ntriples, graphml, csv };

inline Format parse_format(std::string_view name) {
    if (name == "cypher") return Format::cypher;
    if (name == "ntriples") return Format::ntriples;
    if (name == "graphml") return Format::graphml;
    if (name == "csv") return Format::csv;
    throw ValidationError("unknown export format '" + std::string(name) + "' (expected cypher, ntriples, graphml or csv)");
}

struct Document {
    std::string filename;
    std::string content;

    bool operator==(const Document&) const = default;
};

inline std::string join_sentences(const std::set<std::size_t>& sentences, std::string_view sep) {
    std::string out;
    for (auto s : sentences) {
        if (!out.empty()) out += sep;
        out += std::to_string(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cypher
//
//   node:  MERGE (:<Label> {id: '<id>', name: '<name>'});
//   edge:  MATCH (h:PubMedID {id: '<id>'}), (t:<Label> {id: '<id>'})
//          MERGE (h)-[:<REL> {sentences: [i, j]}]->(t);      (one line)
//
// Strings are single-quoted; backslash escapes \\ \' \n \r \t.

inline constexpr std::string_view cypher_header = "// germkg cypher export v1";

inline std::string cypher_quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\'': out += "\\'"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '\'';
    return out;
}

inline std::string to_cypher(const KnowledgeGraph& g) {
    std::string out(cypher_header);
    out += '\n';
    for (auto n : g.canonical_nodes()) {
        const auto& node = g.node(n);
        out += "MERGE (:" + std::string(to_string(node.label)) + " {id: " + cypher_quote(node.id) +
               ", name: " + cypher_quote(node.name) + "});\n";
    }
    for (auto t : g.canonical_triples()) {
        const auto& tr = g.triple(t);
        const auto& head = g.node(g.head_of(t));
        const auto& tail = g.node(g.tail_of(t));
        out += "MATCH (h:PubMedID {id: " + cypher_quote(head.id) + "}), (t:" + std::string(to_string(tail.label)) +
               " {id: " + cypher_quote(tail.id) + "}) MERGE (h)-[:" + std::string(to_string(tr.relation)) +
               " {sentences: [" + join_sentences(tr.sentences, ", ") + "]}]->(t);\n";
    }
    return out;
}

namespace detail {

/// Minimal cursor over one statement of the emission grammar.
class CypherCursor {
public:
    CypherCursor(std::string_view s, std::size_t line) : s_(s), line_(line) {}

    void expect(std::string_view lit) {
        if (s_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'");
        pos_ += lit.size();
    }

    bool try_consume(std::string_view lit) {
        if (s_.substr(pos_, lit.size()) != lit) return false;
        pos_ += lit.size();
        return true;
    }

    std::string identifier() {
        auto start = pos_;
        while (pos_ < s_.size() && (text::is_alnum(s_[pos_]) || s_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected identifier");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string quoted() {
        expect("'");
        std::string out;
        for (;;) {
            if (pos_ >= s_.size()) fail("unterminated string");
            char c = s_[pos_++];
            if (c == '\'') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= s_.size()) fail("dangling escape");
            char e = s_[pos_++];
            switch (e) {
            case '\\': out += '\\'; break;
            case '\'': out += '\''; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 't': out += '\t'; break;
            default: fail(std::string("bad escape \\") + e);
            }
        }
        return out;
    }

    std::size_t number() {
        auto start = pos_;
        while (pos_ < s_.size() && text::is_digit(s_[pos_])) ++pos_;
        if (start == pos_) fail("expected integer");
        return std::stoull(std::string(s_.substr(start, pos_ - start)));
    }

    void finish() {
        if (pos_ != s_.size()) fail("trailing characters");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("cypher line " + std::to_string(line_) + ", column " + std::to_string(pos_ + 1) + ": " +
                              what);
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

} // namespace detail

/// Parses text produced by to_cypher back into a graph. Anything outside the
/// emission grammar is rejected, including edges before nodes.
inline KnowledgeGraph parse_cypher(std::string_view content) {
    KnowledgeGraph g;
    auto lines = fs_util::split_lines(content);
    bool seen_edge = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = lines[i];
        if (line.empty() || line.starts_with("//")) continue;
        detail::CypherCursor c(line, i + 1);
        if (c.try_consume("MERGE (:")) {
            if (seen_edge) c.fail("node statement after relationship statements");
            auto label = parse_node_label(c.identifier());
            c.expect(" {id: ");
            auto id = c.quoted();
            c.expect(", name: ");
            auto name = c.quoted();
            c.expect("});");
            c.finish();
            auto idx = g.add_node(label, name);
            if (g.node(idx).id != id) c.fail("id '" + id + "' does not match name '" + name + "'");
        } else if (c.try_consume("MATCH (h:PubMedID {id: ")) {
            seen_edge = true;
            auto head_id = c.quoted();
            c.expect("}), (t:");
            auto tail_label_name = parse_node_label(c.identifier());
            c.expect(" {id: ");
            auto tail_id = c.quoted();
            c.expect("}) MERGE (h)-[:");
            auto relation = parse_relation(c.identifier());
            c.expect(" {sentences: [");
            std::set<std::size_t> sentences;
            if (!c.try_consume("]")) {
                do sentences.insert(c.number());
                while (c.try_consume(", "));
                c.expect("]");
            }
            c.expect("}]->(t);");
            c.finish();
            auto head = g.find_id(head_id);
            auto tail = g.find_id(tail_id);
            if (!head || !tail) c.fail("relationship references an undeclared node");
            if (g.node(*tail).label != tail_label_name || tail_label(relation) != tail_label_name)
                c.fail("relationship endpoint labels do not fit " + std::string(to_string(relation)));
            g.add_triple({g.node(*head).name, relation, g.node(*tail).name, std::move(sentences)});
        } else {
            c.fail("unrecognized statement");
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// N-Triples. Each node contributes an rdf:type and an rdfs:label line; each
// graph triple is one line. Provenance is not exported.

inline constexpr std::string_view ntriples_header = "# germkg n-triples export v1";
inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view rdfs_label = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view node_iri_prefix = "urn:germkg:node:";
inline constexpr std::string_view class_iri_prefix = "urn:germkg:class:";
inline constexpr std::string_view relation_iri_prefix = "urn:germkg:rel:";

inline std::string ntriples_literal(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

inline std::string iri(std::string_view prefix, std::string_view local) {
    return "<" + std::string(prefix) + std::string(local) + ">";
}

inline std::string to_ntriples(const KnowledgeGraph& g) {
    std::string out(ntriples_header);
    out += '\n';
    for (auto n : g.canonical_nodes()) {
        const auto& node = g.node(n);
        auto subject = iri(node_iri_prefix, node.id);
        out += subject + " <" + std::string(rdf_type) + "> " + iri(class_iri_prefix, to_string(node.label)) + " .\n";
        out += subject + " <" + std::string(rdfs_label) + "> " + ntriples_literal(node.name) + " .\n";
    }
    for (auto t : g.canonical_triples()) {
        out += iri(node_iri_prefix, g.node(g.head_of(t)).id) + " " +
               iri(relation_iri_prefix, to_string(g.triple(t).relation)) + " " +
               iri(node_iri_prefix, g.node(g.tail_of(t)).id) + " .\n";
    }
    return out;
}

namespace detail {

struct NtTerm {
    bool literal = false;
    std::string value;
};

inline NtTerm nt_term(std::string_view line, std::size_t& pos, std::size_t lineno) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("n-triples line " + std::to_string(lineno) + ": " + what);
    };
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) fail("unexpected end of line");
    if (line[pos] == '<') {
        auto end = line.find('>', pos);
        if (end == std::string_view::npos) fail("unterminated IRI");
        NtTerm t{false, std::string(line.substr(pos + 1, end - pos - 1))};
        pos = end + 1;
        return t;
    }
    if (line[pos] == '"') {
        NtTerm t{true, {}};
        ++pos;
        for (;;) {
            if (pos >= line.size()) fail("unterminated literal");
            char c = line[pos++];
            if (c == '"') break;
            if (c != '\\') {
                t.value += c;
                continue;
            }
            if (pos >= line.size()) fail("dangling escape");
            char e = line[pos++];
            switch (e) {
            case '\\': t.value += '\\'; break;
            case '"': t.value += '"'; break;
            case 'n': t.value += '\n'; break;
            case 'r': t.value += '\r'; break;
            case 't': t.value += '\t'; break;
            default: fail(std::string("unsupported escape \\") + e);
            }
        }
        return t;
    }
    throw ValidationError("n-triples line " + std::to_string(lineno) + ": expected IRI or literal");
}

inline std::string strip_prefix(const std::string& value, std::string_view prefix, std::size_t lineno) {
    if (!std::string_view(value).starts_with(prefix))
        throw ValidationError("n-triples line " + std::to_string(lineno) + ": unexpected IRI <" + value + ">");
    return value.substr(prefix.size());
}

} // namespace detail

/// Reads N-Triples in the layout written by to_ntriples (statement order is
/// free). Imported triples carry no provenance.
inline KnowledgeGraph parse_ntriples(std::string_view content) {
    struct NodeInfo {
        std::optional<NodeLabel> label;
        std::optional<std::string> name;
        std::size_t line = 0;
    };
    std::map<std::string, NodeInfo> nodes;
    struct Edge {
        std::string head, tail;
        Relation relation;
        std::size_t line;
    };
    std::vector<Edge> edges;

    auto lines = fs_util::split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = text::trim(lines[i]);
        auto lineno = i + 1;
        if (line.empty() || line.front() == '#') continue;
        std::size_t pos = 0;
        auto s = detail::nt_term(line, pos, lineno);
        auto p = detail::nt_term(line, pos, lineno);
        auto o = detail::nt_term(line, pos, lineno);
        auto rest = text::trim(line.substr(pos));
        if (rest != ".") throw ValidationError("n-triples line " + std::to_string(lineno) + ": expected ' .'");
        if (s.literal || p.literal)
            throw ValidationError("n-triples line " + std::to_string(lineno) + ": literal in subject or predicate");
        auto subject = detail::strip_prefix(s.value, node_iri_prefix, lineno);
        auto& info = nodes[subject];
        if (!info.line) info.line = lineno;
        if (p.value == rdf_type) {
            info.label = parse_node_label(detail::strip_prefix(o.value, class_iri_prefix, lineno));
        } else if (p.value == rdfs_label) {
            if (!o.literal) throw ValidationError("n-triples line " + std::to_string(lineno) + ": label must be a literal");
            info.name = o.value;
        } else {
            auto relation = parse_relation(detail::strip_prefix(p.value, relation_iri_prefix, lineno));
            if (o.literal) throw ValidationError("n-triples line " + std::to_string(lineno) + ": object must be an IRI");
            edges.push_back({subject, detail::strip_prefix(o.value, node_iri_prefix, lineno), relation, lineno});
        }
    }

    KnowledgeGraph g;
    for (const auto& [id, info] : nodes) {
        if (!info.label || !info.name)
            throw ValidationError("n-triples: node " + id + " lacks a type or label (first seen line " +
                                  std::to_string(info.line) + ")");
        auto idx = g.add_node(*info.label, *info.name);
        if (g.node(idx).id != id) throw ValidationError("n-triples: node IRI " + id + " does not match its label");
    }
    for (const auto& e : edges) {
        auto head = g.find_id(e.head);
        auto tail = g.find_id(e.tail);
        if (!head || !tail)
            throw ValidationError("n-triples line " + std::to_string(e.line) + ": edge references an undescribed node");
        if (g.node(*head).label != NodeLabel::pubmed_id || g.node(*tail).label != tail_label(e.relation))
            throw ValidationError("n-triples line " + std::to_string(e.line) + ": endpoints do not fit relation");
        g.add_triple({g.node(*head).name, e.relation, g.node(*tail).name, {}});
    }
    return g;
}

// ---------------------------------------------------------------------------
// GraphML

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string to_graphml(const KnowledgeGraph& g) {
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
        "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
        "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
        "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
        "  <key id=\"relation\" for=\"edge\" attr.name=\"relation\" attr.type=\"string\"/>\n"
        "  <key id=\"sentences\" for=\"edge\" attr.name=\"sentences\" attr.type=\"string\"/>\n"
        "  <graph id=\"germkg\" edgedefault=\"directed\">\n";
    for (auto n : g.canonical_nodes()) {
        const auto& node = g.node(n);
        out += "    <node id=\"" + xml_escape(node.id) + "\"><data key=\"label\">" +
               std::string(to_string(node.label)) + "</data><data key=\"name\">" + xml_escape(node.name) +
               "</data></node>\n";
    }
    std::size_t e = 0;
    for (auto t : g.canonical_triples()) {
        const auto& tr = g.triple(t);
        out += "    <edge id=\"e" + std::to_string(e++) + "\" source=\"" + xml_escape(g.node(g.head_of(t)).id) +
               "\" target=\"" + xml_escape(g.node(g.tail_of(t)).id) + "\"><data key=\"relation\">" +
               std::string(to_string(tr.relation)) + "</data><data key=\"sentences\">" +
               join_sentences(tr.sentences, ";") + "</data></edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

// ---------------------------------------------------------------------------
// CSV: nodes.csv (id,label,name) and edges.csv (head_id,relation,tail_id,sentences)

inline std::string to_nodes_csv(const KnowledgeGraph& g) {
    std::string out = csv::format_row({"id", "label", "name"});
    for (auto n : g.canonical_nodes()) {
        const auto& node = g.node(n);
        out += csv::format_row({node.id, std::string(to_string(node.label)), node.name});
    }
    return out;
}

inline std::string to_edges_csv(const KnowledgeGraph& g) {
    std::string out = csv::format_row({"head_id", "relation", "tail_id", "sentences"});
    for (auto t : g.canonical_triples()) {
        const auto& tr = g.triple(t);
        out += csv::format_row({g.node(g.head_of(t)).id, std::string(to_string(tr.relation)),
                                g.node(g.tail_of(t)).id, join_sentences(tr.sentences, ";")});
    }
    return out;
}

inline std::vector<Document> export_graph(const KnowledgeGraph& g, Format format) {
    switch (format) {
    case Format::cypher: return {{"graph.cypher", to_cypher(g)}};
    case Format::ntriples: return {{"graph.nt", to_ntriples(g)}};
    case Format::graphml: return {{"graph.graphml", to_graphml(g)}};
    case Format::csv: return {{"nodes.csv", to_nodes_csv(g)}, {"edges.csv", to_edges_csv(g)}};
    }
    throw ValidationError("unknown export format");
}

} // namespace germkg::exporter

#endif
