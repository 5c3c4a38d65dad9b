// germkg: build, export, query and serve a gene-disease knowledge graph.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "germkg/error.hpp"
#include "germkg/export.hpp"
#include "germkg/pipeline.hpp"
#include "germkg/query.hpp"
#include "germkg/server.hpp"
#include "germkg/store.hpp"

namespace fs = std::filesystem;
using namespace germkg;

namespace {

struct BuildOptions {
    std::string corpus, corpus_format, genes, diseases, annotations, abbrev, out, report, drop_log, dump_dir;
    bool gazetteer = false;
    std::size_t max_chars = default_max_segment_chars;
    double threshold = default_similarity_threshold;
};

PipelineConfig to_config(const BuildOptions& o) {
    PipelineConfig cfg;
    cfg.corpus = o.corpus;
    if (!o.corpus_format.empty()) cfg.corpus_format = ingest::parse_corpus_format(o.corpus_format);
    cfg.genes = o.genes;
    cfg.diseases = o.diseases;
    if (!o.annotations.empty()) cfg.annotations = o.annotations;
    cfg.gazetteer = o.gazetteer;
    cfg.max_segment_chars = o.max_chars;
    cfg.threshold = o.threshold;
    if (!o.abbrev.empty()) cfg.abbrev = o.abbrev;
    cfg.out = o.out;
    if (!o.report.empty()) cfg.report = o.report;
    if (!o.drop_log.empty()) cfg.drop_log = o.drop_log;
    if (!o.dump_dir.empty()) cfg.dump_dir = o.dump_dir;
    return cfg;
}

int cmd_build(const BuildOptions& o) {
    auto cfg = to_config(o);
    auto result = pipeline::run(cfg);
    pipeline::write_outputs(result, cfg);
    if (result.report.dropped_entities > 0)
        std::cerr << "lexnorm: dropped " << result.report.dropped_entities << " unmatched mention(s)\n";
    std::cout << result.report.to_table();
    return 0;
}

int cmd_export(const std::string& graph_path, const std::string& format_name, const std::string& out) {
    auto format = exporter::parse_format(format_name);
    auto graph = store::load(graph_path);
    auto docs = exporter::export_graph(graph, format);
    if (docs.size() == 1) {
        fs_util::write_file_atomic(out, docs.front().content);
        return 0;
    }
    // multi-file formats write into a directory
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create directory " + out);
    for (const auto& d : docs) fs_util::write_file_atomic(fs::path(out) / d.filename, d.content);
    return 0;
}

struct QueryOptions {
    std::string graph;
    std::optional<std::string> disease, gene, article, cooccurrence, neighborhood, search;
    std::optional<std::string> with_gene, with_disease;
    int depth = 1;
    std::size_t limit = query::default_search_limit;
};

int cmd_query(const QueryOptions& o) {
    int selected = o.disease.has_value() + o.gene.has_value() + o.article.has_value() + o.cooccurrence.has_value() +
                   o.neighborhood.has_value() + o.search.has_value();
    if (selected != 1)
        throw ValidationError("choose exactly one of --disease, --gene, --article, --cooccurrence, --neighborhood, --search");
    auto g = store::load(o.graph);
    nlohmann::json out;
    if (o.disease) {
        out = query::articles_and_genes_for_disease(g, *o.disease);
    } else if (o.gene) {
        out = query::articles_and_diseases_for_gene(g, *o.gene);
    } else if (o.article) {
        out = query::entities_for_article(g, *o.article);
    } else if (o.cooccurrence) {
        auto rows = query::cooccurrence(g, parse_cooccurrence_level(*o.cooccurrence), {o.with_gene, o.with_disease});
        out = {{"level", *o.cooccurrence}, {"rows", rows}};
    } else if (o.neighborhood) {
        out = query::neighborhood(g, *o.neighborhood, o.depth);
    } else {
        out = {{"query", *o.search}, {"results", query::search(g, *o.search, o.limit)}};
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_serve(const std::string& graph_path, const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw ValidationError("--addr must look like host:port");
    auto host = addr.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        throw ValidationError("bad port in --addr '" + addr + "'");
    }
    auto g = store::load(graph_path);
    std::cerr << "serving " << graph_path << " on http://" << addr << '\n';
    server::serve(g, host, port);
    return 0;
}

int cmd_stats(const std::string& graph_path) {
    auto g = store::load(graph_path);
    std::cout << nlohmann::json(kg::stats(g)).dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"germkg - gene-disease knowledge graph builder"};
    app.require_subcommand(1);

    BuildOptions b;
    auto* build = app.add_subcommand("build", "run ingest, NER, normalization and graph assembly");
    app.set_config("--config", "", "INI file; a [build] section mirrors the build flags");
    build->add_option("--corpus", b.corpus, "abstracts (JSONL or CSV)")->required();
    build->add_option("--corpus-format", b.corpus_format, "jsonl or csv (default: from extension)")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    build->add_option("--genes", b.genes, "gene lexicon CSV")->required();
    build->add_option("--diseases", b.diseases, "disease lexicon CSV")->required();
    auto* ann = build->add_option("--annotations", b.annotations, "BIO annotation JSONL from an external tagger");
    auto* gaz = build->add_flag("--gazetteer", b.gazetteer, "tag with the built-in lexicon scanner");
    ann->excludes(gaz);
    gaz->excludes(ann);
    build->add_option("--max-chars", b.max_chars, "segment budget in UTF-8 bytes (at least 32)")->capture_default_str();
    build->add_option("--threshold", b.threshold, "approximate-match similarity threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    build->add_option("--abbrev", b.abbrev, "abbreviation list");
    build->add_option("--out", b.out, "graph file to write")->required();
    build->add_option("--report", b.report, "JSON run report");
    build->add_option("--drop-log", b.drop_log, "TSV of mentions that matched no master term");
    build->add_option("--dump-dir", b.dump_dir, "directory for per-stage JSONL dumps");

    std::string export_graph, export_format, export_out;
    auto* exp = app.add_subcommand("export", "export a graph as cypher, ntriples, graphml or csv");
    exp->add_option("--graph", export_graph, "graph file")->required();
    exp->add_option("--format", export_format, "cypher|ntriples|graphml|csv")
        ->required()
        ->check(CLI::IsMember({"cypher", "ntriples", "graphml", "csv"}));
    exp->add_option("--out", export_out, "output file (directory for csv)")->required();

    QueryOptions q;
    auto* qry = app.add_subcommand("query", "run one query and print JSON");
    qry->add_option("--graph", q.graph, "graph file")->required();
    qry->add_option("--disease", q.disease, "articles and genes for a disease");
    qry->add_option("--gene", q.gene, "articles and diseases for a gene");
    qry->add_option("--article", q.article, "genes and diseases of an article");
    qry->add_option("--cooccurrence", q.cooccurrence, "article or sentence")->check(CLI::IsMember({"article", "sentence"}));
    qry->add_option("--with-gene", q.with_gene, "co-occurrence gene filter");
    qry->add_option("--with-disease", q.with_disease, "co-occurrence disease filter");
    qry->add_option("--neighborhood", q.neighborhood, "expand around a node name");
    qry->add_option("--depth", q.depth, "neighborhood depth (1-3)")->capture_default_str();
    qry->add_option("--search", q.search, "prefix search over node names");
    qry->add_option("--limit", q.limit, "maximum search results")->capture_default_str();

    std::string serve_graph, serve_addr = "127.0.0.1:8080";
    auto* srv = app.add_subcommand("serve", "serve the read-only HTTP API");
    srv->add_option("--graph", serve_graph, "graph file")->required();
    srv->add_option("--addr", serve_addr, "bind address host:port")->capture_default_str();

    std::string stats_graph;
    auto* st = app.add_subcommand("stats", "print node and triple counts");
    st->add_option("--graph", stats_graph, "graph file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorKind::validation);
    }

    try {
        if (*build) return cmd_build(b);
        if (*exp) return cmd_export(export_graph, export_format, export_out);
        if (*qry) return cmd_query(q);
        if (*srv) return cmd_serve(serve_graph, serve_addr);
        if (*st) return cmd_stats(stats_graph);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::validation);
    }
    return 0;
}
