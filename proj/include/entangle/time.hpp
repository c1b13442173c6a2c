#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "entangle/common.hpp"

namespace entangle {

/// Milliseconds since the Unix epoch, always UTC.
using Instant = std::int64_t;
using DurationMs = std::int64_t;

inline constexpr DurationMs kMsPerSecond = 1000;
inline constexpr DurationMs kMsPerMinute = 60 * kMsPerSecond;
inline constexpr DurationMs kMsPerHour = 60 * kMsPerMinute;
inline constexpr DurationMs kMsPerDay = 24 * kMsPerHour;

inline DurationMs days_to_ms(double days) {
    return static_cast<DurationMs>(std::llround(days * static_cast<double>(kMsPerDay)));
}

inline DurationMs hours_to_ms(double hours) {
    return static_cast<DurationMs>(std::llround(hours * static_cast<double>(kMsPerHour)));
}

inline double ms_to_hours(DurationMs ms) {
    return static_cast<double>(ms) / static_cast<double>(kMsPerHour);
}

namespace detail {

// Gregorian civil-date conversions (proleptic), valid over all int64 ranges
// this toolkit can see.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
    y += (m <= 2);
}

inline bool is_leap(std::int64_t y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
}

inline bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}

} // namespace detail

/// Result of reading one RFC 3339 timestamp. Timestamps without a UTC
/// offset ("naive") are read as if they were UTC; normalize_timezones
/// applies the configured default offset later.
struct ParsedTimestamp {
    Instant utc_ms = 0;
    bool has_offset = false;
};

/// Parse `YYYY-MM-DDThh:mm:ss[.frac][Z|+hh:mm|-hh:mm]`. 'T' may be lowercase
/// or a space; 'Z' may be lowercase; the offset colon is optional. Returns
/// nullopt on anything malformed (including out-of-range fields).
inline std::optional<ParsedTimestamp> parse_rfc3339(std::string_view s) {
    using namespace detail;
    unsigned year4 = 0, mon = 0, day = 0, hh = 0, mm = 0, ss = 0;
    if (s.size() < 19) return std::nullopt;
    if (!parse_fixed_uint(s, 0, 4, year4) || s[4] != '-' ||
        !parse_fixed_uint(s, 5, 2, mon) || s[7] != '-' ||
        !parse_fixed_uint(s, 8, 2, day)) {
        return std::nullopt;
    }
    const char sep = s[10];
    if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
    if (!parse_fixed_uint(s, 11, 2, hh) || s[13] != ':' ||
        !parse_fixed_uint(s, 14, 2, mm) || s[16] != ':' ||
        !parse_fixed_uint(s, 17, 2, ss)) {
        return std::nullopt;
    }
    const std::int64_t year = static_cast<std::int64_t>(year4);
    if (mon < 1 || mon > 12 || day < 1 || day > days_in_month(year, mon)) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;

    std::size_t pos = 19;
    std::int64_t frac_ms = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t ndigits = 0;
        std::int64_t scale = 100;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (ndigits < 3) {
                frac_ms += static_cast<std::int64_t>(s[pos] - '0') * scale;
                scale /= 10;
            }
            ++ndigits;
            ++pos;
        }
        if (ndigits == 0) return std::nullopt;
    }

    bool has_offset = false;
    std::int64_t offset_min = 0;
    if (pos < s.size()) {
        const char c = s[pos];
        if (c == 'Z' || c == 'z') {
            has_offset = true;
            ++pos;
        } else if (c == '+' || c == '-') {
            unsigned oh = 0, om = 0;
            if (!parse_fixed_uint(s, pos + 1, 2, oh)) return std::nullopt;
            std::size_t opos = pos + 3;
            if (opos < s.size() && s[opos] == ':') ++opos;
            if (!parse_fixed_uint(s, opos, 2, om)) return std::nullopt;
            if (oh > 23 || om > 59) return std::nullopt;
            offset_min = static_cast<std::int64_t>(oh) * 60 + om;
            if (c == '-') offset_min = -offset_min;
            has_offset = true;
            pos = opos + 2;
        } else {
            return std::nullopt;
        }
    }
    if (pos != s.size()) return std::nullopt;

    const std::int64_t days = days_from_civil(year, mon, day);
    Instant ms = days * kMsPerDay + hh * kMsPerHour + mm * kMsPerMinute + ss * kMsPerSecond + frac_ms;
    ms -= offset_min * kMsPerMinute; // local time minus offset gives UTC
    return ParsedTimestamp{ms, has_offset};
}

/// Canonical UTC rendering; fractional milliseconds printed only when nonzero.
inline std::string format_rfc3339_utc(Instant ms) {
    std::int64_t days = ms / kMsPerDay;
    std::int64_t rem = ms % kMsPerDay;
    if (rem < 0) {
        rem += kMsPerDay;
        --days;
    }
    std::int64_t y;
    unsigned mon, day;
    detail::civil_from_days(days, y, mon, day);
    const unsigned hh = static_cast<unsigned>(rem / kMsPerHour);
    const unsigned mm = static_cast<unsigned>((rem / kMsPerMinute) % 60);
    const unsigned ss = static_cast<unsigned>((rem / kMsPerSecond) % 60);
    const unsigned frac = static_cast<unsigned>(rem % kMsPerSecond);
    char buf[40];
    if (frac != 0) {
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02u:%02u:%02u.%03uZ",
                      static_cast<long long>(y), mon, day, hh, mm, ss, frac);
    } else {
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02u:%02u:%02uZ",
                      static_cast<long long>(y), mon, day, hh, mm, ss);
    }
    return std::string(buf);
}

} // namespace entangle
