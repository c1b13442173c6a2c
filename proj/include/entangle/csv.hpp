#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace entangle {

/// Split one CSV record with RFC 4180 quoting ("" escapes a quote inside a
/// quoted field). Records never span lines in this toolkit's formats.
/// Returns nullopt on unbalanced quoting or garbage after a closing quote.
inline std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (true) {
        cur.clear();
        if (i < n && line[i] == '"') {
            ++i;
            bool closed = false;
            while (i < n) {
                if (line[i] == '"') {
                    if (i + 1 < n && line[i + 1] == '"') {
                        cur.push_back('"');
                        i += 2;
                    } else {
                        ++i;
                        closed = true;
                        break;
                    }
                } else {
                    cur.push_back(line[i]);
                    ++i;
                }
            }
            if (!closed) return std::nullopt;
            if (i < n && line[i] != ',') return std::nullopt;
        } else {
            while (i < n && line[i] != ',') {
                if (line[i] == '"') return std::nullopt;
                cur.push_back(line[i]);
                ++i;
            }
        }
        fields.push_back(cur);
        if (i >= n) break;
        ++i; // consume comma; a trailing comma yields a final empty field
        if (i == n) {
            fields.emplace_back();
            break;
        }
    }
    return fields;
}

/// Quote a field only when it needs it.
inline std::string csv_escape(std::string_view field) {
    bool needs = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs = true;
            break;
        }
    }
    if (!needs) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Strip one trailing '\r' (CRLF input read with getline).
inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

} // namespace entangle
