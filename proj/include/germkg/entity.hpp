#ifndef GERMKG_ENTITY_HPP
#define GERMKG_ENTITY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "germkg/error.hpp"
#include "germkg/text.hpp"

namespace germkg {

enum class Kind : std::uint8_t { gene, disease };

inline std::string_view to_string(Kind k) noexcept { return k == Kind::gene ? "gene" : "disease"; }

inline Kind parse_kind(std::string_view s) {
    if (s == "gene") return Kind::gene;
    if (s == "disease") return Kind::disease;
    throw ValidationError("unknown entity kind '" + std::string(s) + "'");
}

/// BIO label alphabet. `O` carries no kind.
enum class Label : std::uint8_t { O, B_GENE, I_GENE, B_DISEASE, I_DISEASE };

inline constexpr std::array<Label, 5> all_labels = {Label::O, Label::B_GENE, Label::I_GENE, Label::B_DISEASE,
                                                    Label::I_DISEASE};

inline bool is_begin(Label l) noexcept { return l == Label::B_GENE || l == Label::B_DISEASE; }
inline bool is_inside(Label l) noexcept { return l == Label::I_GENE || l == Label::I_DISEASE; }

inline std::optional<Kind> kind_of(Label l) noexcept {
    switch (l) {
    case Label::B_GENE:
    case Label::I_GENE: return Kind::gene;
    case Label::B_DISEASE:
    case Label::I_DISEASE: return Kind::disease;
    case Label::O: break;
    }
    return std::nullopt;
}

inline Label begin_label(Kind k) noexcept { return k == Kind::gene ? Label::B_GENE : Label::B_DISEASE; }
inline Label inside_label(Kind k) noexcept { return k == Kind::gene ? Label::I_GENE : Label::I_DISEASE; }

inline std::string_view to_string(Label l) noexcept {
    switch (l) {
    case Label::O: return "O";
    case Label::B_GENE: return "B-GENE";
    case Label::I_GENE: return "I-GENE";
    case Label::B_DISEASE: return "B-DISEASE";
    case Label::I_DISEASE: return "I-DISEASE";
    }
    return "O";
}

inline Label parse_label(std::string_view s) {
    for (auto l : all_labels)
        if (to_string(l) == s) return l;
    throw ValidationError("unknown label " + std::string(s));
}

struct LabeledToken {
    std::string text;
    Label label = Label::O;
    std::optional<Span> char_span; // into the segment; absent when it could not be aligned

    bool operator==(const LabeledToken&) const = default;
};

/// Inclusive token index range [first, last].
struct TokenRange {
    std::size_t first = 0;
    std::size_t last = 0;

    bool operator==(const TokenRange&) const = default;
};

struct EntityMention {
    std::string surface;
    Kind kind = Kind::gene;
    std::string pubmed_id;
    std::size_t sentence_index = 0;
    std::size_t segment_index = 0;
    TokenRange token_span;

    bool operator==(const EntityMention&) const = default;
};

} // namespace germkg

#endif
