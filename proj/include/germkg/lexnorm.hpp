#ifndef GERMKG_LEXNORM_HPP
#define GERMKG_LEXNORM_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "germkg/csv.hpp"
#include "germkg/entity.hpp"
#include "germkg/error.hpp"
#include "germkg/text.hpp"
#include "germkg/tokenize.hpp"

namespace germkg {

inline constexpr double default_similarity_threshold = 0.85;

namespace lexnorm_detail {

inline bool drop_code_point(char32_t cp) noexcept {
    return (cp >= 0x80 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 || (cp >= 0x2000 && cp <= 0x206F) ||
           (cp >= 0x3000 && cp <= 0x303F) || cp == 0xFEFF;
}

inline char32_t lower_code_point(char32_t cp) noexcept {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32; // Greek capitals
    return cp;
}

} // namespace lexnorm_detail

/// Canonical matching key: lowercase, with whitespace and punctuation removed.
/// ASCII keeps only letters and digits; non-ASCII letters (Greek, accented
/// Latin) are kept, Unicode punctuation blocks are dropped.
inline std::string lexical_key(std::string_view term) {
    std::string out;
    out.reserve(term.size());
    for (char32_t cp : text::decode_utf8(term)) {
        if (cp < 0x80) {
            auto c = static_cast<char>(cp);
            if (text::is_alnum(c)) out.push_back(text::to_lower(c));
            continue;
        }
        if (lexnorm_detail::drop_code_point(cp)) continue;
        text::append_utf8(out, lexnorm_detail::lower_code_point(cp));
    }
    return out;
}

/// Levenshtein distance over code points (unit costs), two-row dynamic program.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

/// 1 - distance / max(length), lengths in code points. Two empty keys are identical.
inline double similarity(std::string_view a, std::string_view b) {
    auto ua = text::decode_utf8(a);
    auto ub = text::decode_utf8(b);
    auto longest = std::max(ua.size(), ub.size());
    if (longest == 0) return 1.0;
    return static_cast<double>(longest - edit_distance(ua, ub)) / static_cast<double>(longest);
}

/// Master terms and synonyms of one kind, indexed by lexical key.
class Lexicon {
public:
    struct Candidate {
        std::string key;
        std::u32string code_points;
        std::size_t master = 0;
    };

    explicit Lexicon(Kind kind) : kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

    /// Adds `term` as a name of `master`. The master's own name is always
    /// registered too. Throws when a key already belongs to another master.
    void add(std::string_view master, std::string_view term) {
        auto master_idx = intern_master(master);
        add_key(master_idx, term);
    }

    std::optional<std::string_view> lookup(std::string_view key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return std::string_view(masters_[it->second]);
    }

    bool contains_master(std::string_view name) const {
        return std::find(masters_.begin(), masters_.end(), name) != masters_.end();
    }

    const std::vector<std::string>& masters() const noexcept { return masters_; }
    const std::map<std::string, std::size_t, std::less<>>& entries() const noexcept { return entries_; }
    const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
    std::size_t key_count() const noexcept { return entries_.size(); }
    std::size_t term_count() const noexcept { return terms_.size(); }
    std::size_t max_key_length() const noexcept { return max_key_length_; }
    bool empty() const noexcept { return entries_.empty(); }

private:
    std::size_t intern_master(std::string_view master) {
        auto trimmed = text::trim(master);
        if (trimmed.empty()) throw ValidationError("empty master term");
        auto it = std::find(masters_.begin(), masters_.end(), trimmed);
        if (it != masters_.end()) return static_cast<std::size_t>(it - masters_.begin());
        masters_.emplace_back(trimmed);
        auto idx = masters_.size() - 1;
        add_key(idx, trimmed);
        return idx;
    }

    void add_key(std::size_t master_idx, std::string_view term) {
        auto key = lexical_key(term);
        if (key.empty()) throw ValidationError("term '" + std::string(term) + "' has an empty lexical key");
        terms_.emplace(text::trim(term));
        auto [it, inserted] = entries_.try_emplace(key, master_idx);
        if (!inserted) {
            if (it->second != master_idx)
                throw ValidationError("key '" + key + "' maps to both '" + masters_[it->second] + "' and '" +
                                      masters_[master_idx] + "'");
            return;
        }
        candidates_.push_back({key, text::decode_utf8(key), master_idx});
        max_key_length_ = std::max(max_key_length_, key.size());
    }

    Kind kind_;
    std::vector<std::string> masters_;
    std::map<std::string, std::size_t, std::less<>> entries_;
    std::set<std::string, std::less<>> terms_;
    std::vector<Candidate> candidates_;
    std::size_t max_key_length_ = 0;
};

/// Builds a lexicon from `master_term,synonym` CSV content. A row may leave
/// the synonym empty to register only the master.
inline Lexicon parse_lexicon(std::string_view content, Kind kind) {
    auto rows = csv::parse(content);
    if (rows.empty()) throw ValidationError("lexicon is empty");
    const auto& header = rows.front().fields;
    if (header.size() < 2 || text::trim(header[0]) != "master_term" || text::trim(header[1]) != "synonym")
        throw ValidationError("line 1: lexicon header must be 'master_term,synonym'");
    Lexicon lex(kind);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto where = "line " + std::to_string(row.line) + ": ";
        if (row.fields.empty() || row.fields.size() > 2)
            throw ValidationError(where + "expected 2 fields, got " + std::to_string(row.fields.size()));
        try {
            if (row.fields.size() == 1 || text::trim(row.fields[1]).empty())
                lex.add(row.fields[0], row.fields[0]);
            else
                lex.add(row.fields[0], row.fields[1]);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
    }
    if (lex.empty()) throw ValidationError("lexicon is empty");
    return lex;
}

inline Lexicon load_lexicon(const std::filesystem::path& path, Kind kind) {
    try {
        return parse_lexicon(fs_util::read_file(path), kind);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

struct ApproximateMatch {
    std::string master;
    std::string candidate_key;
    std::size_t distance = 0;
    double similarity = 0.0;
};

/// Best approximate candidate for `key`, or nothing if the best similarity
/// falls below `threshold`. Ranking: similarity, then longer candidate key,
/// then the lexicographically smallest master.
inline std::optional<ApproximateMatch> string_match(std::string_view key, const Lexicon& lexicon,
                                                    double threshold) {
    if (key.empty()) return std::nullopt;
    auto query = text::decode_utf8(key);
    const Lexicon::Candidate* best = nullptr;
    std::size_t best_dist = 0, best_len = 0;

    for (const auto& cand : lexicon.candidates()) {
        auto len = std::max(query.size(), cand.code_points.size());
        auto diff = query.size() > cand.code_points.size() ? query.size() - cand.code_points.size()
                                                            : cand.code_points.size() - query.size();
        // the length difference bounds the distance from below
        if (static_cast<double>(len - diff) / static_cast<double>(len) < threshold) continue;
        auto dist = edit_distance(query, cand.code_points);
        if (!best) {
            best = &cand;
            best_dist = dist;
            best_len = len;
            continue;
        }
        // compare (len - dist) / len against the incumbent without rounding
        auto lhs = (len - dist) * best_len;
        auto rhs = (best_len - best_dist) * len;
        bool better = lhs > rhs;
        if (lhs == rhs) {
            if (cand.code_points.size() != best->code_points.size())
                better = cand.code_points.size() > best->code_points.size();
            else
                better = lexicon.masters()[cand.master] < lexicon.masters()[best->master];
        }
        if (better) {
            best = &cand;
            best_dist = dist;
            best_len = len;
        }
    }
    if (!best) return std::nullopt;
    double sim = static_cast<double>(best_len - best_dist) / static_cast<double>(best_len);
    if (sim < threshold) return std::nullopt;
    return ApproximateMatch{lexicon.masters()[best->master], best->key, best_dist, sim};
}

enum class MatchMethod { exact, split, approximate };

inline std::string_view to_string(MatchMethod m) noexcept {
    switch (m) {
    case MatchMethod::exact: return "exact";
    case MatchMethod::split: return "split";
    case MatchMethod::approximate: return "approximate";
    }
    return "exact";
}

struct NormalizedEntity {
    std::vector<std::string> masters; // sorted, unique, non-empty
    Kind kind = Kind::gene;
    MatchMethod method = MatchMethod::exact;
    double similarity = 1.0;
    EntityMention source;

    bool operator==(const NormalizedEntity&) const = default;
};

inline bool is_connector(std::string_view token) {
    return token == "," || token == "/" || token == "&" || text::iequals(token, "and") || text::iequals(token, "or");
}

/// Splits a surface on connector tokens and returns the lexical key of each
/// remaining token group. Slashes inside a token ("BRCA1/BRCA2") also split.
inline std::vector<std::string> connector_group_keys(std::string_view surface) {
    std::vector<std::string> keys;
    std::vector<std::string> group;
    auto flush = [&] {
        if (!group.empty()) {
            auto key = lexical_key(text::join(group, " "));
            if (!key.empty()) keys.push_back(std::move(key));
        }
        group.clear();
    };
    for (const auto& tok : tokenize_words(surface)) {
        std::string_view rest = tok.text;
        for (;;) {
            auto slash = rest.find('/');
            auto piece = rest.substr(0, slash);
            if (!piece.empty()) {
                if (is_connector(piece))
                    flush();
                else
                    group.emplace_back(piece);
            }
            if (slash == std::string_view::npos) break;
            flush();
            rest.remove_prefix(slash + 1);
        }
    }
    flush();
    return keys;
}

/// Resolves a mention against a lexicon of the same kind: exact key, then
/// connector split (two or more exact group hits), then approximate match.
/// Returns nothing when every stage misses.
inline std::optional<NormalizedEntity> normalize(const EntityMention& mention, const Lexicon& lexicon,
                                                 double threshold = default_similarity_threshold) {
    if (mention.kind != lexicon.kind())
        throw ValidationError("mention kind " + std::string(to_string(mention.kind)) + " does not match lexicon kind " +
                              std::string(to_string(lexicon.kind())));
    auto key = lexical_key(mention.surface);
    if (key.empty()) return std::nullopt;

    if (auto master = lexicon.lookup(key))
        return NormalizedEntity{{std::string(*master)}, mention.kind, MatchMethod::exact, 1.0, mention};

    std::size_t hits = 0;
    std::set<std::string> hit_masters;
    for (const auto& group_key : connector_group_keys(mention.surface)) {
        if (auto master = lexicon.lookup(group_key)) {
            ++hits;
            hit_masters.emplace(*master);
        }
    }
    if (hits >= 2)
        return NormalizedEntity{{hit_masters.begin(), hit_masters.end()}, mention.kind, MatchMethod::split, 1.0,
                                mention};

    if (auto m = string_match(key, lexicon, threshold))
        return NormalizedEntity{{m->master}, mention.kind, MatchMethod::approximate, m->similarity, mention};
    return std::nullopt;
}

} // namespace germkg

#endif
