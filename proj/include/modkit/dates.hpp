#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "modkit/errors.hpp"

namespace modkit {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
inline std::int64_t days_from_civil(std::int64_t y, std::int64_t m, std::int64_t d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const std::int64_t yoe = y - era * 400;
    const std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, std::int64_t& m, std::int64_t& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

// Calendar date with week arithmetic, stored as days since the epoch.
struct Date {
    std::int64_t days = 0;

    static Date from_ymd(std::int64_t y, std::int64_t m, std::int64_t d) {
        if (m < 1 || m > 12 || d < 1 || d > 31) throw DataError("invalid calendar date");
        return Date{days_from_civil(y, m, d)};
    }

    static Date parse(std::string_view s) {
        int y = 0, m = 0, d = 0;
        if (std::sscanf(std::string(s).c_str(), "%d-%d-%d", &y, &m, &d) != 3) {
            throw DataError("cannot parse date (want YYYY-MM-DD): '" + std::string(s) + "'");
        }
        return from_ymd(y, m, d);
    }

    std::string to_string() const {
        std::int64_t y, m, d;
        civil_from_days(days, y, m, d);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%04lld-%02lld-%02lld", static_cast<long long>(y),
                      static_cast<long long>(m), static_cast<long long>(d));
        return buf;
    }

    Date plus_weeks(std::int64_t w) const { return Date{days + 7 * w}; }
    auto operator<=>(const Date&) const = default;
};

// Seconds since the epoch for "YYYY-MM-DD[ T]hh:mm:ss[Z]" or plain integer text.
inline std::int64_t parse_timestamp(std::string_view s) {
    const std::string text(s);
    if (text.find('-') != std::string::npos) {
        int y = 0, mo = 0, d = 0, h = 0, mi = 0;
        double sec = 0.0;
        const int got = std::sscanf(text.c_str(), "%d-%d-%d%*1[T ]%d:%d:%lf", &y, &mo, &d, &h, &mi, &sec);
        if (got >= 3) {
            if (got < 6) { h = mi = 0; sec = 0.0; }
            return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 +
                   static_cast<std::int64_t>(sec);
        }
        throw DataError("cannot parse timestamp: '" + text + "'");
    }
    std::int64_t v = 0;
    try {
        std::size_t pos = 0;
        v = std::stoll(text, &pos);
        if (pos != text.size()) throw DataError("trailing garbage");
    } catch (...) {
        throw DataError("cannot parse timestamp: '" + text + "'");
    }
    return v;
}

}  // namespace modkit
