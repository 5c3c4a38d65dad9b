#ifndef GERMKG_INGEST_HPP
#define GERMKG_INGEST_HPP

#include <algorithm>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "germkg/csv.hpp"
#include "germkg/error.hpp"
#include "germkg/text.hpp"

namespace germkg {

struct AbstractRecord {
    std::string pubmed_id;
    std::string text;

    bool operator==(const AbstractRecord&) const = default;
};

struct Sentence {
    std::string pubmed_id;
    std::size_t sentence_index = 0;
    std::string text;
    Span char_span; // offsets into the (line-break normalized) abstract

    bool operator==(const Sentence&) const = default;
};

struct Segment {
    std::string pubmed_id;
    std::size_t sentence_index = 0;
    std::size_t segment_index = 0;
    std::string text;
    Span char_span; // offsets into the abstract, like Sentence::char_span

    bool operator==(const Segment&) const = default;
};

enum class CorpusFormat { jsonl, csv };

inline constexpr std::size_t default_max_segment_chars = 512;
inline constexpr std::size_t min_segment_chars = 32;

namespace ingest {

inline CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "csv") return CorpusFormat::csv;
    throw ValidationError("unknown corpus format '" + std::string(name) + "' (expected jsonl or csv)");
}

/// Guesses the format from the file extension; anything other than .csv is JSONL.
inline CorpusFormat format_from_path(const std::filesystem::path& path) {
    auto ext = text::to_lower(path.extension().string());
    return ext == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
}

/// Collapses each run of CR/LF characters into one space.
inline std::string normalize_line_breaks(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_break = false;
    for (char c : s) {
        if (c == '\n' || c == '\r') {
            if (!in_break) out.push_back(' ');
            in_break = true;
        } else {
            out.push_back(c);
            in_break = false;
        }
    }
    return out;
}

inline bool is_pubmed_id(std::string_view id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) { return text::is_digit(c); });
}

namespace detail {

inline AbstractRecord make_record(std::string id, std::string_view body, std::size_t line) {
    auto where = "line " + std::to_string(line) + ": ";
    if (!is_pubmed_id(id)) throw ValidationError(where + "pubmed_id '" + id + "' is not a digit string");
    auto normalized = normalize_line_breaks(body);
    if (text::trim(normalized).empty()) throw ValidationError(where + "abstract is empty");
    return {std::move(id), std::move(normalized)};
}

inline std::vector<AbstractRecord> parse_jsonl(std::string_view content) {
    std::vector<AbstractRecord> records;
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
        if (!obj.is_object() || !obj.contains("pubmed_id") || !obj.contains("abstract"))
            throw ValidationError(where + "record needs 'pubmed_id' and 'abstract'");
        const auto& id = obj["pubmed_id"];
        const auto& body = obj["abstract"];
        std::string id_str;
        if (id.is_string())
            id_str = id.get<std::string>();
        else if (id.is_number_unsigned())
            id_str = std::to_string(id.get<std::uint64_t>());
        else
            throw ValidationError(where + "'pubmed_id' must be a string");
        if (!body.is_string()) throw ValidationError(where + "'abstract' must be a string");
        records.push_back(make_record(std::move(id_str), body.get_ref<const std::string&>(), i + 1));
    }
    return records;
}

inline std::vector<AbstractRecord> parse_csv(std::string_view content) {
    auto rows = csv::parse(content);
    std::vector<AbstractRecord> records;
    if (rows.empty()) return records;
    const auto& header = rows.front().fields;
    auto column = [&](std::string_view name) -> std::size_t {
        auto it = std::find_if(header.begin(), header.end(),
                               [&](const std::string& h) { return text::trim(h) == name; });
        if (it == header.end())
            throw ValidationError("line 1: CSV header must contain pubmed_id and abstract");
        return static_cast<std::size_t>(it - header.begin());
    };
    auto id_col = column("pubmed_id");
    auto text_col = column("abstract");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            throw ValidationError("line " + std::to_string(row.line) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(row.fields.size()));
        records.push_back(make_record(std::string(text::trim(row.fields[id_col])), row.fields[text_col], row.line));
    }
    return records;
}

} // namespace detail

/// Parses corpus content already in memory. Duplicate IDs are rejected.
inline std::vector<AbstractRecord> parse_corpus(std::string_view content, CorpusFormat format) {
    auto records = format == CorpusFormat::jsonl ? detail::parse_jsonl(content) : detail::parse_csv(content);
    std::unordered_set<std::string> seen;
    for (const auto& r : records)
        if (!seen.insert(r.pubmed_id).second) throw ValidationError("duplicate pubmed_id " + r.pubmed_id);
    return records;
}

inline std::vector<AbstractRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    return parse_corpus(fs_util::read_file(path), format);
}

inline std::vector<std::string> default_abbreviations() {
    return {"et al.", "Fig.", "Figs.", "fig.", "vs.", "e.g.", "i.e.", "cf.", "approx.", "ca.", "Dr.",
            "Drs.",   "Prof.", "Mr.", "Mrs.", "Ms.", "No.", "no.", "Nos.", "Ref.", "Refs.", "Eq.",
            "Eqs.",   "Tab.", "Suppl.", "vol.", "Vol.", "pp.", "resp.", "St.", "Jr.", "Sr.", "Inc.",
            "Ltd.",   "Co.", "Corp.", "spp.", "sp.", "var.", "min.", "max.", "Jan.", "Feb.", "Mar.",
            "Apr.",   "Jun.", "Jul.", "Aug.", "Sep.", "Sept.", "Oct.", "Nov.", "Dec."};
}

/// Parses an abbreviation list: one entry per line, '#' starts a comment.
/// A missing trailing period is added.
inline std::vector<std::string> parse_abbreviations(std::string_view content) {
    std::vector<std::string> out;
    for (auto line : fs_util::split_lines(content)) {
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        std::string entry(line);
        if (entry.back() != '.') entry += '.';
        out.push_back(std::move(entry));
    }
    return out;
}

inline std::vector<std::string> load_abbreviations(const std::filesystem::path& path) {
    return parse_abbreviations(fs_util::read_file(path));
}

/// True when the terminator at `pos` may end a sentence.
inline bool is_sentence_boundary(std::string_view s, std::size_t pos, const std::vector<std::string>& abbrevs) {
    char c = s[pos];
    if (c != '.' && c != '!' && c != '?') return false;
    std::size_t next = pos + 1;
    if (next >= s.size() || !text::is_space(s[next])) return false;
    while (next < s.size() && text::is_space(s[next])) ++next;
    if (next >= s.size() || !(text::is_upper(s[next]) || text::is_digit(s[next]))) return false;
    if (c != '.') return true;

    if (pos > 0 && pos + 1 < s.size() && text::is_digit(s[pos - 1]) && text::is_digit(s[pos + 1])) return false;
    // single uppercase initial, e.g. "J. Smith"
    if (pos >= 1 && text::is_upper(s[pos - 1]) && (pos == 1 || !text::is_alnum(s[pos - 2]))) return false;
    for (const auto& a : abbrevs) {
        if (a.size() > pos + 1) continue;
        std::size_t start = pos + 1 - a.size();
        if (s.compare(start, a.size(), a) != 0) continue;
        if (start == 0 || !text::is_alnum(s[start - 1])) return false;
    }
    return true;
}

/// Splits an abstract into sentences. Whitespace between sentences belongs to
/// no sentence; the text with those separators reconstructs the abstract.
inline std::vector<Sentence> split_sentences(const AbstractRecord& record, const std::vector<std::string>& abbrevs) {
    std::string_view s = record.text;
    std::vector<Sentence> out;
    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && text::is_space(s[begin])) ++begin;
        while (end > begin && text::is_space(s[end - 1])) --end;
        if (begin == end) return;
        out.push_back({record.pubmed_id, out.size(), std::string(s.substr(begin, end - begin)), {begin, end}});
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (is_sentence_boundary(s, i, abbrevs)) {
            emit(start, i + 1);
            start = i + 1;
        }
    }
    emit(start, s.size());
    return out;
}

/// Cuts a sentence into pieces of at most `max_chars` bytes, breaking at the
/// last whitespace within the budget. A token longer than the budget is cut
/// hard, never inside a UTF-8 sequence.
inline std::vector<Segment> segment(const Sentence& sentence, std::size_t max_chars = default_max_segment_chars) {
    if (max_chars < min_segment_chars)
        throw ValidationError("max_chars must be at least " + std::to_string(min_segment_chars));
    std::string_view s = sentence.text;
    std::vector<Segment> out;
    auto emit = [&](std::size_t begin, std::size_t end) {
        out.push_back({sentence.pubmed_id, sentence.sentence_index, out.size(),
                       std::string(s.substr(begin, end - begin)),
                       {sentence.char_span.begin + begin, sentence.char_span.begin + end}});
    };
    std::size_t pos = 0;
    while (pos < s.size() && text::is_space(s[pos])) ++pos;
    while (pos < s.size()) {
        if (s.size() - pos <= max_chars) {
            auto end = s.size();
            while (end > pos && text::is_space(s[end - 1])) --end;
            emit(pos, end);
            break;
        }
        std::size_t limit = pos + max_chars; // s[limit] exists here
        std::size_t cut = limit;
        while (cut > pos && !text::is_space(s[cut])) --cut;
        std::size_t end;
        std::size_t next;
        if (cut > pos) {
            end = cut;
            while (end > pos && text::is_space(s[end - 1])) --end;
            next = cut;
        } else {
            end = limit;
            while (end > pos + 1 && text::is_continuation_byte(s[end])) --end;
            next = end;
        }
        emit(pos, end);
        pos = next;
        while (pos < s.size() && text::is_space(s[pos])) ++pos;
    }
    return out;
}

} // namespace ingest
} // namespace germkg

#endif
