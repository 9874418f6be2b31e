#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "modkit/dates.hpp"
#include "modkit/errors.hpp"
#include "modkit/text.hpp"

namespace modkit::coord {

struct ShareEvent {
    std::string venue_id;
    std::string url;
    std::int64_t timestamp = 0;  // seconds since epoch
};

// Lowercases and strips query/fragment. That is the whole canonicalization.
inline std::string normalize_url(std::string_view url, bool strip_query = true) {
    std::string out(url);
    if (strip_query) {
        const auto cut = out.find_first_of("?#");
        if (cut != std::string::npos) out.resize(cut);
    }
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct Interarrival {
    double seconds = 0.0;
    std::string venue_a;  // earlier share
    std::string venue_b;  // later share
};

// Per URL, sorts shares by (timestamp, venue) and emits successive-pair
// deltas. URLs shared once contribute nothing. Input order is irrelevant.
inline std::vector<Interarrival> interarrival_times(std::vector<ShareEvent> events) {
    std::stable_sort(events.begin(), events.end(), [](const ShareEvent& a, const ShareEvent& b) {
        if (a.url != b.url) return a.url < b.url;
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.venue_id < b.venue_id;
    });
    std::vector<Interarrival> out;
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].url != events[i - 1].url) continue;
        out.push_back({static_cast<double>(events[i].timestamp - events[i - 1].timestamp),
                       events[i - 1].venue_id, events[i].venue_id});
    }
    return out;
}

// Exponential support is positive; ties at second resolution are clamped up.
inline std::vector<double> durations_for_fitting(const std::vector<Interarrival>& deltas,
                                                 double floor_seconds = 0.5) {
    std::vector<double> out;
    out.reserve(deltas.size());
    for (const auto& d : deltas) out.push_back(std::max(d.seconds, floor_seconds));
    return out;
}

// Reads "venue_id,url,timestamp" rows; timestamps may be ISO-8601 or epoch
// seconds. Errors carry 1-based line numbers.
inline std::vector<ShareEvent> parse_share_events(const std::string& text,
                                                  bool strip_query = true) {
    std::vector<ShareEvent> events;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool saw_header = false;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line(text.data() + start,
                              (end == std::string::npos ? text.size() : end) - start);
        start = (end == std::string::npos) ? text.size() + 1 : end + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "venue_id,url,timestamp") {
                throw DataError("events line 1: expected header 'venue_id,url,timestamp'");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw DataError("events line " + std::to_string(line_no) + ": expected 3 fields");
        }
        ShareEvent e;
        e.venue_id = std::string(trim(fields[0]));
        e.url = normalize_url(trim(fields[1]), strip_query);
        try {
            e.timestamp = parse_timestamp(trim(fields[2]));
        } catch (const DataError& err) {
            throw DataError("events line " + std::to_string(line_no) + ": " + err.what());
        }
        if (e.url.empty()) {
            throw DataError("events line " + std::to_string(line_no) + ": empty url");
        }
        if (e.timestamp < 0) {
            throw DataError("events line " + std::to_string(line_no) + ": negative timestamp");
        }
        events.push_back(std::move(e));
    }
    if (!saw_header) throw DataError("events file is empty");
    return events;
}

}  // namespace modkit::coord
