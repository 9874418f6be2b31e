#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modkit/dates.hpp"
#include "modkit/errors.hpp"
#include "modkit/text.hpp"

namespace modkit::its {

// Weekly observations from start_date onward; gaps are explicit missing values.
struct WeeklySeries {
    Date start_date;
    std::vector<std::optional<double>> values;
    std::string label;

    Date date_of(std::size_t week_index) const {
        return start_date.plus_weeks(static_cast<std::int64_t>(week_index));
    }
};

enum class Transform { Identity, Log, Logit };

inline Transform parse_transform(std::string_view name) {
    if (name == "none" || name == "identity") return Transform::Identity;
    if (name == "log") return Transform::Log;
    if (name == "logit") return Transform::Logit;
    throw DataError("unknown transform: '" + std::string(name) + "' (want log, logit, none)");
}

// Boundary points that the transform cannot represent become missing (a
// zero-count week carries no usable signal on the log scale); values outside
// the domain are data errors.
inline WeeklySeries preprocess(const WeeklySeries& series, Transform transform) {
    WeeklySeries out = series;
    for (auto& v : out.values) {
        if (!v) continue;
        switch (transform) {
            case Transform::Identity:
                break;
            case Transform::Log:
                if (*v < 0.0) throw DataError("log transform: negative value");
                if (*v == 0.0) v.reset();
                else v = std::log(*v);
                break;
            case Transform::Logit:
                if (*v < 0.0 || *v > 1.0) throw DataError("logit transform: value outside [0,1]");
                if (*v == 0.0 || *v == 1.0) v.reset();
                else v = std::log(*v / (1.0 - *v));
                break;
        }
    }
    return out;
}

inline double inverse_transform(double value, Transform transform) {
    switch (transform) {
        case Transform::Identity: return value;
        case Transform::Log: return std::exp(value);
        case Transform::Logit: return 1.0 / (1.0 + std::exp(-value));
    }
    return value;
}

// Divides each week by that week's venue count (positive, aligned).
inline WeeklySeries normalize_by_venue_count(const WeeklySeries& series,
                                             const std::vector<double>& counts) {
    if (counts.size() != series.values.size()) {
        throw DataError("venue-count normalization: counts not aligned to weeks");
    }
    WeeklySeries out = series;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!out.values[i]) continue;
        if (!(counts[i] > 0.0)) throw DataError("venue-count normalization: nonpositive count");
        out.values[i] = *out.values[i] / counts[i];
    }
    return out;
}

// d-fold first differences of a contiguous segment.
inline std::vector<double> difference(std::vector<double> xs, int d) {
    if (d < 0) throw ParamError("difference: d must be >= 0");
    for (int round = 0; round < d; ++round) {
        if (xs.size() < 2) throw DataError("difference: series too short");
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) xs[i] = xs[i + 1] - xs[i];
        xs.pop_back();
    }
    return xs;
}

// Exact inverse given the retained heads: initials[j] is the first element of
// the j-times-differenced series.
inline std::vector<double> invert_difference(std::vector<double> diffed,
                                             const std::vector<double>& initials, int d) {
    if (static_cast<int>(initials.size()) != d) {
        throw ParamError("invert_difference: need exactly d initial values");
    }
    for (int level = d - 1; level >= 0; --level) {
        std::vector<double> undone;
        undone.reserve(diffed.size() + 1);
        undone.push_back(initials[static_cast<std::size_t>(level)]);
        for (const double delta : diffed) undone.push_back(undone.back() + delta);
        diffed = std::move(undone);
    }
    return diffed;
}

inline std::vector<double> difference_heads(const std::vector<double>& xs, int d) {
    std::vector<double> heads;
    std::vector<double> cur = xs;
    for (int j = 0; j < d; ++j) {
        if (cur.empty()) throw DataError("difference: series too short");
        heads.push_back(cur.front());
        cur = difference(cur, 1);
    }
    return heads;
}

// Longest contiguous run of present values in [lo, hi); ties keep the later
// run (closer to the forecast origin). Returns {start, length}.
inline std::pair<std::size_t, std::size_t> longest_contiguous_run(
    const std::vector<std::optional<double>>& values, std::size_t lo, std::size_t hi) {
    std::size_t best_start = lo, best_len = 0;
    std::size_t cur_start = lo, cur_len = 0;
    for (std::size_t i = lo; i < hi; ++i) {
        if (values[i].has_value()) {
            if (cur_len == 0) cur_start = i;
            ++cur_len;
            if (cur_len >= best_len) {
                best_len = cur_len;
                best_start = cur_start;
            }
        } else {
            cur_len = 0;
        }
    }
    return {best_start, best_len};
}

// Reads "date,value" rows (blank value = missing); dates must advance in
// exact one-week steps.
inline WeeklySeries parse_weekly_series(const std::string& text, std::string label = "") {
    WeeklySeries series;
    series.label = std::move(label);
    std::size_t line_no = 0;
    bool saw_header = false;
    bool have_start = false;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line(text.data() + start,
                              (end == std::string::npos ? text.size() : end) - start);
        start = (end == std::string::npos) ? text.size() + 1 : end + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "date,value") {
                throw DataError("series line 1: expected header 'date,value'");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 2) {
            throw DataError("series line " + std::to_string(line_no) + ": expected 2 fields");
        }
        Date date;
        try {
            date = Date::parse(trim(fields[0]));
        } catch (const DataError& e) {
            throw DataError("series line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!have_start) {
            series.start_date = date;
            have_start = true;
        } else {
            const Date expected = series.start_date.plus_weeks(
                static_cast<std::int64_t>(series.values.size()));
            if (date != expected) {
                throw DataError("series line " + std::to_string(line_no) +
                                ": expected week " + expected.to_string() + ", got " +
                                date.to_string());
            }
        }
        const std::string_view value_text = trim(fields[1]);
        if (value_text.empty()) {
            series.values.push_back(std::nullopt);
        } else {
            series.values.push_back(parse_double(value_text, "value"));
        }
    }
    if (!saw_header) throw DataError("series file is empty");
    if (series.values.empty()) throw DataError("series file has no rows");
    return series;
}

inline std::string write_weekly_series(const WeeklySeries& series) {
    std::string out = "date,value\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out += series.date_of(i).to_string();
        out += ',';
        if (series.values[i]) out += format_double(*series.values[i]);
        out += '\n';
    }
    return out;
}

}  // namespace modkit::its
