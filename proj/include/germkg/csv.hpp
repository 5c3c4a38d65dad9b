#ifndef GERMKG_CSV_HPP
#define GERMKG_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

#include "germkg/error.hpp"

namespace germkg::csv {

struct Row {
    std::size_t line = 0; // 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// RFC-4180 reader. Quoted fields may contain commas, doubled quotes and line
/// breaks. A UTF-8 byte-order mark is skipped. Blank lines are ignored.
inline std::vector<Row> parse(std::string_view data) {
    if (data.substr(0, 3) == "\xEF\xBB\xBF") data.remove_prefix(3);

    std::vector<Row> rows;
    Row row;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool record_started = false;
    bool field_quoted = false;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        bool blank = row.fields.size() == 1 && row.fields[0].empty() && !field_quoted;
        if (!blank) rows.push_back(std::move(row));
        row = Row{};
        record_started = false;
    };

    while (i < data.size()) {
        char c = data[i];
        if (!record_started) {
            row.line = line;
            record_started = true;
        }
        if (c == '"' && field.empty() && !field_quoted) {
            field_quoted = true;
            std::size_t start_line = line;
            ++i;
            for (;;) {
                if (i >= data.size())
                    throw ValidationError("line " + std::to_string(start_line) + ": unterminated quoted field");
                char q = data[i];
                if (q == '"') {
                    if (i + 1 < data.size() && data[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (q == '\n') ++line;
                field.push_back(q);
                ++i;
            }
            if (i < data.size() && data[i] != ',' && data[i] != '\n' && data[i] != '\r')
                throw ValidationError("line " + std::to_string(line) + ": unexpected character after closing quote");
            continue;
        }
        if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
            ++i;
            ++line;
        } else {
            if (field_quoted)
                throw ValidationError("line " + std::to_string(line) + ": unexpected character after closing quote");
            field.push_back(c);
            ++i;
        }
    }
    if (record_started) end_record();
    return rows;
}

inline std::string quote(std::string_view field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                 (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += quote(fields[i]);
    }
    out += '\n';
    return out;
}

} // namespace germkg::csv

#endif
