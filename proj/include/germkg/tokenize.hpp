#ifndef GERMKG_TOKENIZE_HPP
#define GERMKG_TOKENIZE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "germkg/text.hpp"

namespace germkg {

struct WordToken {
    std::string text;
    Span span;

    bool operator==(const WordToken&) const = default;
};

/// Whitespace tokenization with leading and trailing ASCII punctuation split
/// off one character at a time. Inner punctuation ("BRCA-1", "2.5") stays.
inline std::vector<WordToken> tokenize_words(std::string_view s) {
    std::vector<WordToken> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && text::is_space(s[i])) ++i;
        if (i >= s.size()) break;
        std::size_t begin = i;
        while (i < s.size() && !text::is_space(s[i])) ++i;
        std::size_t end = i;

        std::size_t core_begin = begin;
        while (core_begin < end && text::is_punct(s[core_begin])) ++core_begin;
        std::size_t core_end = end;
        while (core_end > core_begin && text::is_punct(s[core_end - 1])) --core_end;

        for (std::size_t k = begin; k < core_begin; ++k) out.push_back({std::string(1, s[k]), {k, k + 1}});
        if (core_begin < core_end)
            out.push_back({std::string(s.substr(core_begin, core_end - core_begin)), {core_begin, core_end}});
        for (std::size_t k = core_end; k < end; ++k) out.push_back({std::string(1, s[k]), {k, k + 1}});
    }
    return out;
}

} // namespace germkg

#endif
