#ifndef GERMKG_PIPELINE_HPP
#define GERMKG_PIPELINE_HPP

#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "germkg/error.hpp"
#include "germkg/ingest.hpp"
#include "germkg/kg.hpp"
#include "germkg/lexnorm.hpp"
#include "germkg/ner.hpp"
#include "germkg/store.hpp"

namespace germkg {

struct PipelineConfig {
    std::filesystem::path corpus;
    std::optional<CorpusFormat> corpus_format; // inferred from the extension when unset
    std::filesystem::path genes;
    std::filesystem::path diseases;
    std::optional<std::filesystem::path> annotations;
    bool gazetteer = false;
    std::size_t max_segment_chars = default_max_segment_chars;
    double threshold = default_similarity_threshold;
    std::optional<std::filesystem::path> abbrev;
    std::filesystem::path out;
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> drop_log;
    std::optional<std::filesystem::path> dump_dir;

    void validate() const {
        if (annotations.has_value() == gazetteer)
            throw ValidationError("select exactly one NER source: --annotations or --gazetteer");
        if (!(threshold >= 0.0 && threshold <= 1.0))
            throw ValidationError("threshold must lie in [0, 1]");
        if (max_segment_chars < min_segment_chars)
            throw ValidationError("max-chars must be at least " + std::to_string(min_segment_chars));
        if (corpus.empty()) throw ValidationError("--corpus is required");
        if (genes.empty() || diseases.empty()) throw ValidationError("--genes and --diseases are required");
        if (out.empty()) throw ValidationError("--out is required");
    }
};

struct BuildReport {
    std::size_t abstracts = 0;
    std::size_t sentences = 0;
    std::size_t segments = 0;
    std::size_t gene_mentions = 0;
    std::size_t disease_mentions = 0;
    std::size_t normalized_entities = 0;
    std::size_t normalized_exact = 0;
    std::size_t normalized_split = 0;
    std::size_t normalized_approximate = 0;
    std::size_t dropped_entities = 0;
    std::size_t nodes = 0;
    std::size_t pubmed_ids = 0;
    std::size_t genes = 0;
    std::size_t diseases = 0;
    std::size_t triples = 0;

    bool operator==(const BuildReport&) const = default;

    /// Stage order mirrors the pipeline.
    std::vector<std::pair<std::string, std::size_t>> fields() const {
        return {{"abstracts", abstracts},
                {"sentences", sentences},
                {"segments", segments},
                {"gene_mentions", gene_mentions},
                {"disease_mentions", disease_mentions},
                {"normalized_entities", normalized_entities},
                {"normalized_exact", normalized_exact},
                {"normalized_split", normalized_split},
                {"normalized_approximate", normalized_approximate},
                {"dropped_entities", dropped_entities},
                {"nodes", nodes},
                {"pubmed_ids", pubmed_ids},
                {"genes", genes},
                {"diseases", diseases},
                {"triples", triples}};
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : fields()) j[k] = v;
        return j;
    }

    static BuildReport from_json(const nlohmann::json& j) {
        BuildReport r;
        auto get = [&](const char* k) { return j.at(k).get<std::size_t>(); };
        r.abstracts = get("abstracts");
        r.sentences = get("sentences");
        r.segments = get("segments");
        r.gene_mentions = get("gene_mentions");
        r.disease_mentions = get("disease_mentions");
        r.normalized_entities = get("normalized_entities");
        r.normalized_exact = get("normalized_exact");
        r.normalized_split = get("normalized_split");
        r.normalized_approximate = get("normalized_approximate");
        r.dropped_entities = get("dropped_entities");
        r.nodes = get("nodes");
        r.pubmed_ids = get("pubmed_ids");
        r.genes = get("genes");
        r.diseases = get("diseases");
        r.triples = get("triples");
        return r;
    }

    std::string to_table() const {
        std::ostringstream out;
        out << std::left << std::setw(24) << "stage" << "count\n";
        for (const auto& [k, v] : fields()) out << std::left << std::setw(24) << k << v << '\n';
        return out.str();
    }
};

struct BuildResult {
    KnowledgeGraph graph;
    BuildReport report;
    std::vector<Sentence> sentences;
    std::vector<EntityMention> mentions;
    std::vector<NormalizedEntity> normalized;
    std::vector<EntityMention> dropped;
};

namespace pipeline {

/// Runs `fn`, prefixing any library error with the stage name.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("[") + stage + "] " + e.what());
    }
}

struct Inputs {
    std::vector<AbstractRecord> corpus;
    const Lexicon* genes = nullptr;
    const Lexicon* diseases = nullptr;
    std::vector<std::string> abbreviations = ingest::default_abbreviations();
    std::optional<std::vector<ner::AnnotationRecord>> annotations; // gazetteer when absent
    std::size_t max_segment_chars = default_max_segment_chars;
    double threshold = default_similarity_threshold;
};

/// ingest -> ner -> lexnorm -> kg over in-memory inputs.
inline BuildResult run(Inputs in) {
    BuildResult out;
    auto& rep = out.report;

    std::vector<Segment> segments;
    in_stage("ingest", [&] {
        if (in.corpus.empty()) throw ValidationError("corpus is empty");
        for (const auto& rec : in.corpus) {
            auto sentences = ingest::split_sentences(rec, in.abbreviations);
            for (const auto& s : sentences) {
                auto segs = ingest::segment(s, in.max_segment_chars);
                segments.insert(segments.end(), segs.begin(), segs.end());
            }
            out.sentences.insert(out.sentences.end(), sentences.begin(), sentences.end());
        }
        rep.abstracts = in.corpus.size();
        rep.sentences = out.sentences.size();
        rep.segments = segments.size();
    });

    in_stage("ner", [&] {
        if (!in.annotations) {
            for (const auto& seg : segments) {
                auto labeled = ner::gazetteer_ner(seg, *in.genes, *in.diseases);
                auto ms = ner::decode_bio(labeled, {seg.pubmed_id, seg.sentence_index, seg.segment_index});
                out.mentions.insert(out.mentions.end(), ms.begin(), ms.end());
            }
        } else {
            auto& records = *in.annotations;
            ner::align_annotations(records, out.sentences);
            std::map<std::string, std::size_t> article_order;
            for (std::size_t i = 0; i < in.corpus.size(); ++i) article_order[in.corpus[i].pubmed_id] = i;
            std::stable_sort(records.begin(), records.end(), [&](const auto& a, const auto& b) {
                return std::make_pair(article_order.at(a.pubmed_id), a.sentence_index) <
                       std::make_pair(article_order.at(b.pubmed_id), b.sentence_index);
            });
            std::map<std::pair<std::string, std::size_t>, std::size_t> next_segment;
            for (const auto& rec : records) {
                auto seg_idx = next_segment[{rec.pubmed_id, rec.sentence_index}]++;
                auto ms = ner::decode_bio(rec.tokens, {rec.pubmed_id, rec.sentence_index, seg_idx});
                out.mentions.insert(out.mentions.end(), ms.begin(), ms.end());
            }
        }
        for (const auto& m : out.mentions) (m.kind == Kind::gene ? rep.gene_mentions : rep.disease_mentions)++;
    });

    in_stage("lexnorm", [&] {
        for (const auto& m : out.mentions) {
            const auto& lex = m.kind == Kind::gene ? *in.genes : *in.diseases;
            if (auto n = normalize(m, lex, in.threshold)) {
                switch (n->method) {
                case MatchMethod::exact: ++rep.normalized_exact; break;
                case MatchMethod::split: ++rep.normalized_split; break;
                case MatchMethod::approximate: ++rep.normalized_approximate; break;
                }
                out.normalized.push_back(std::move(*n));
            } else {
                out.dropped.push_back(m);
            }
        }
        rep.normalized_entities = out.normalized.size();
        rep.dropped_entities = out.dropped.size();
    });

    in_stage("kg", [&] {
        std::map<std::string, std::vector<NormalizedEntity>> by_article;
        for (const auto& n : out.normalized) by_article[n.source.pubmed_id].push_back(n);
        std::vector<Triple> triples;
        for (const auto& rec : in.corpus) {
            auto it = by_article.find(rec.pubmed_id);
            if (it == by_article.end()) continue;
            auto ts = kg::build_triples(rec.pubmed_id, it->second);
            triples.insert(triples.end(), ts.begin(), ts.end());
        }
        out.graph = kg::assemble_graph(triples);
        auto st = kg::stats(out.graph);
        rep.nodes = st.entities;
        rep.pubmed_ids = st.pubmed_ids;
        rep.genes = st.genes;
        rep.diseases = st.diseases;
        rep.triples = st.triples;
    });
    return out;
}

/// Loads every input named by the config and runs the pipeline in memory.
inline BuildResult run(const PipelineConfig& cfg) {
    cfg.validate();
    auto corpus = in_stage("ingest", [&] {
        auto records = ingest::load_corpus(cfg.corpus, cfg.corpus_format.value_or(ingest::format_from_path(cfg.corpus)));
        if (records.empty()) throw ValidationError("corpus " + cfg.corpus.string() + " is empty");
        return records;
    });
    auto abbrevs = in_stage("ingest", [&] {
        return cfg.abbrev ? ingest::load_abbreviations(*cfg.abbrev) : ingest::default_abbreviations();
    });
    auto genes = in_stage("lexnorm", [&] { return load_lexicon(cfg.genes, Kind::gene); });
    auto diseases = in_stage("lexnorm", [&] { return load_lexicon(cfg.diseases, Kind::disease); });
    std::optional<std::vector<ner::AnnotationRecord>> annotations;
    if (cfg.annotations) annotations = in_stage("ner", [&] { return ner::load_annotations(*cfg.annotations); });

    Inputs in{std::move(corpus), &genes, &diseases, std::move(abbrevs), std::move(annotations), cfg.max_segment_chars,
              cfg.threshold};
    return run(std::move(in));
}

inline std::string tsv_field(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
}

inline std::string drop_log_tsv(const std::vector<EntityMention>& dropped) {
    std::string out = "pubmed_id\tsentence_index\tkind\tsurface\n";
    for (const auto& m : dropped)
        out += m.pubmed_id + "\t" + std::to_string(m.sentence_index) + "\t" + std::string(to_string(m.kind)) + "\t" +
               tsv_field(m.surface) + "\n";
    return out;
}

inline std::string sentences_jsonl(const std::vector<Sentence>& sentences) {
    std::string out;
    for (const auto& s : sentences)
        out += nlohmann::ordered_json{{"pubmed_id", s.pubmed_id},
                                      {"sentence_index", s.sentence_index},
                                      {"start", s.char_span.begin},
                                      {"end", s.char_span.end},
                                      {"text", s.text}}
                   .dump() +
               "\n";
    return out;
}

inline nlohmann::ordered_json mention_json(const EntityMention& m) {
    return {{"pubmed_id", m.pubmed_id},
            {"sentence_index", m.sentence_index},
            {"segment_index", m.segment_index},
            {"kind", to_string(m.kind)},
            {"surface", m.surface},
            {"first_token", m.token_span.first},
            {"last_token", m.token_span.last}};
}

inline std::string mentions_jsonl(const std::vector<EntityMention>& mentions) {
    std::string out;
    for (const auto& m : mentions) out += mention_json(m).dump() + "\n";
    return out;
}

inline std::string normalized_jsonl(const std::vector<NormalizedEntity>& normalized) {
    std::string out;
    for (const auto& n : normalized) {
        auto j = mention_json(n.source);
        j["masters"] = n.masters;
        j["method"] = to_string(n.method);
        j["similarity"] = n.similarity;
        out += j.dump() + "\n";
    }
    return out;
}

/// Writes the drop log, report and optional stage dumps, then the graph
/// itself last (atomically).
inline void write_outputs(const BuildResult& result, const PipelineConfig& cfg) {
    if (cfg.drop_log) fs_util::write_file_atomic(*cfg.drop_log, drop_log_tsv(result.dropped));
    if (cfg.report) fs_util::write_file_atomic(*cfg.report, result.report.to_json().dump(2) + "\n");
    if (cfg.dump_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*cfg.dump_dir, ec);
        if (ec) throw IoError("cannot create " + cfg.dump_dir->string());
        fs_util::write_file_atomic(*cfg.dump_dir / "sentences.jsonl", sentences_jsonl(result.sentences));
        fs_util::write_file_atomic(*cfg.dump_dir / "mentions.jsonl", mentions_jsonl(result.mentions));
        fs_util::write_file_atomic(*cfg.dump_dir / "normalized.jsonl", normalized_jsonl(result.normalized));
    }
    store::save(result.graph, cfg.out);
}

} // namespace pipeline
} // namespace germkg

#endif
