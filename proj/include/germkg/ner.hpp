#ifndef GERMKG_NER_HPP
#define GERMKG_NER_HPP

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "germkg/entity.hpp"
#include "germkg/error.hpp"
#include "germkg/ingest.hpp"
#include "germkg/lexnorm.hpp"
#include "germkg/text.hpp"
#include "germkg/tokenize.hpp"

namespace germkg {

/// Where a labeled sequence came from; copied onto every decoded mention.
struct SequenceOrigin {
    std::string pubmed_id;
    std::size_t sentence_index = 0;
    std::size_t segment_index = 0;
};

namespace ner {

/// Lenient BIO decoding. B always opens a mention; I extends an open mention
/// of the same kind and otherwise opens a new one; O closes.
inline std::vector<EntityMention> decode_bio(std::span<const LabeledToken> tokens, const SequenceOrigin& origin = {}) {
    std::vector<EntityMention> out;
    std::vector<std::string> words;
    std::optional<Kind> open;
    std::size_t first = 0;

    auto close = [&](std::size_t last) {
        if (!open) return;
        out.push_back({text::join(words, " "), *open, origin.pubmed_id, origin.sentence_index, origin.segment_index,
                       {first, last}});
        open.reset();
        words.clear();
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto label = tokens[i].label;
        auto kind = kind_of(label);
        if (!kind) {
            if (open) close(i - 1);
            continue;
        }
        if (is_begin(label) || !open || *open != *kind) {
            if (open) close(i - 1);
            open = kind;
            first = i;
        }
        words.push_back(tokens[i].text);
    }
    if (open) close(tokens.size() - 1);
    return out;
}

/// Inverse of decode_bio: B on each mention's first token, I on the rest.
inline std::vector<Label> encode_bio(std::span<const EntityMention> mentions, std::size_t length) {
    std::vector<Label> labels(length, Label::O);
    for (const auto& m : mentions) {
        labels.at(m.token_span.first) = begin_label(m.kind);
        for (auto i = m.token_span.first + 1; i <= m.token_span.last; ++i) labels.at(i) = inside_label(m.kind);
    }
    return labels;
}

/// Gazetteer tagging: greedy left-to-right longest match over word tokens.
/// At equal length the gene lexicon wins. Matches never start or end on a
/// token whose lexical key is empty (bare punctuation).
inline std::vector<LabeledToken> gazetteer_ner(std::string_view segment_text, const Lexicon& genes,
                                               const Lexicon& diseases) {
    auto words = tokenize_words(segment_text);
    std::vector<LabeledToken> out;
    out.reserve(words.size());
    std::vector<std::string> keys;
    keys.reserve(words.size());
    for (auto& w : words) {
        keys.push_back(lexical_key(w.text));
        out.push_back({w.text, Label::O, w.span});
    }
    auto max_key = std::max(genes.max_key_length(), diseases.max_key_length());

    std::size_t i = 0;
    while (i < words.size()) {
        if (keys[i].empty()) {
            ++i;
            continue;
        }
        std::size_t best_len = 0;
        Kind best_kind = Kind::gene;
        std::string acc;
        for (std::size_t j = i; j < words.size(); ++j) {
            acc += keys[j];
            if (acc.size() > max_key) break;
            if (keys[j].empty()) continue;
            if (genes.lookup(acc)) {
                best_len = j - i + 1;
                best_kind = Kind::gene;
            } else if (diseases.lookup(acc)) {
                best_len = j - i + 1;
                best_kind = Kind::disease;
            }
        }
        if (best_len == 0) {
            ++i;
            continue;
        }
        out[i].label = begin_label(best_kind);
        for (std::size_t k = i + 1; k < i + best_len; ++k) out[k].label = inside_label(best_kind);
        i += best_len;
    }
    return out;
}

inline std::vector<LabeledToken> gazetteer_ner(const Segment& segment, const Lexicon& genes, const Lexicon& diseases) {
    return gazetteer_ner(segment.text, genes, diseases);
}

/// One labeled sequence from an external tagger.
struct AnnotationRecord {
    std::string pubmed_id;
    std::size_t sentence_index = 0;
    std::vector<LabeledToken> tokens;
    std::size_t line = 0;
};

inline std::vector<AnnotationRecord> parse_annotations(std::string_view content) {
    std::vector<AnnotationRecord> out;
    auto lines = fs_util::split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = text::trim(lines[i]);
        if (line.empty()) continue;
        auto where = "line " + std::to_string(i + 1) + ": ";
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(where + "malformed JSON (" + e.what() + ")");
        }
        try {
            AnnotationRecord rec;
            rec.line = i + 1;
            rec.pubmed_id = obj.at("pubmed_id").get<std::string>();
            rec.sentence_index = obj.at("sentence_index").get<std::size_t>();
            auto tokens = obj.at("tokens").get<std::vector<std::string>>();
            auto labels = obj.at("labels").get<std::vector<std::string>>();
            if (tokens.size() != labels.size())
                throw ValidationError("tokens and labels differ in length (" + std::to_string(tokens.size()) +
                                      " vs " + std::to_string(labels.size()) + ")");
            for (std::size_t k = 0; k < tokens.size(); ++k) {
                if (tokens[k].empty()) throw ValidationError("empty token at position " + std::to_string(k));
                rec.tokens.push_back({std::move(tokens[k]), parse_label(labels[k]), std::nullopt});
            }
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(where + "bad annotation record (" + e.what() + ")");
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
    }
    return out;
}

/// Checks every record against the ingested sentences and recovers token
/// offsets by scanning the sentence text left to right.
inline void align_annotations(std::vector<AnnotationRecord>& records, const std::vector<Sentence>& sentences) {
    std::map<std::pair<std::string, std::size_t>, const Sentence*> index;
    for (const auto& s : sentences) index[{s.pubmed_id, s.sentence_index}] = &s;
    for (auto& rec : records) {
        auto it = index.find({rec.pubmed_id, rec.sentence_index});
        if (it == index.end())
            throw ValidationError("line " + std::to_string(rec.line) + ": unknown sentence " + rec.pubmed_id + "/" +
                                  std::to_string(rec.sentence_index));
        std::string_view sentence = it->second->text;
        std::size_t cursor = 0;
        for (auto& tok : rec.tokens) {
            auto pos = sentence.find(tok.text, cursor);
            if (pos == std::string_view::npos) continue;
            tok.char_span = Span{pos, pos + tok.text.size()};
            cursor = pos + tok.text.size();
        }
    }
}

inline std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
    try {
        return parse_annotations(fs_util::read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

} // namespace ner
} // namespace germkg

#endif
