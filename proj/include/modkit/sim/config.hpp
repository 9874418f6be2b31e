#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <variant>

#include "modkit/distributions.hpp"
#include "modkit/errors.hpp"
#include "modkit/rng.hpp"
#include "modkit/text.hpp"

namespace modkit::sim {

// Sentinel for "no moderator limit": removal waves never trigger.
inline constexpr std::int64_t kNoModeratorLimit = std::numeric_limits<std::int64_t>::max();

// Per-venue generative parameters, drawn once from the archetype at init.
struct VenueParams {
    double log_post_mean = 0.0;  // a_v; mean weekly posts is exp(a_v)
    double dispersion = 1.0;     // b_v > 0
    double lambda0 = 0.0;        // initial engagements-per-post rate, >= 0
};

// The three archetype draws a venue is built from.
struct Archetype {
    DistributionSpec log_post_mean;
    DistributionSpec dispersion;
    DistributionSpec lambda;
};

struct SimConfig {
    double decay = 0.0;              // d, engagement-rate decay fraction per week, [0,1)
    std::int64_t m0 = 0;             // initial content moderators at policy start
    double reproduction = 0.0;       // r, moderator reproduction probability, [0,1]
    double conversion = 0.0;         // g, demand conversion fraction per week, [0,1]
    std::int64_t wave_threshold = kNoModeratorLimit;  // T
    std::int64_t w_min = 1;
    std::int64_t w_max = 1;
    std::int64_t v_initial = 1;
    std::int64_t v_max = 1;
    std::int64_t t_max_venues = 1;   // week by which all venues are active
    std::int64_t t_policy = 1;       // first week moderation acts
    std::int64_t t_max = 1;
    double nudge = 0.0;              // n, post-policy engagement attenuation, [0,1)
    std::int64_t vcb_cap = -1;       // engagement cap per post; < 0 = off
    bool deplete_demand = true;      // h <- h*(1-g) after conversion
    // Whether the demand-converted rate component decays like the organic one.
    // Converted engagements come from users who actively seek the content, so
    // by default they are immune to the weekly decay.
    bool converted_rate_decays = false;
    // Demand conversion splits h*g by each venue's share of this week's
    // generated posts; the alternative uses posts surviving moderation.
    bool convert_by_generated_posts = true;
    bool wave_weight_by_moderators = true;
    Archetype archetype{NormalSpec{0.0, 1.0}, LogNormalSpec{0.0, 1.0}, LogNormalSpec{0.0, 1.0}};

    bool vcb_enabled() const { return vcb_cap >= 0; }
};

inline void validate(const SimConfig& c) {
    if (!(c.decay >= 0.0 && c.decay < 1.0)) throw ParamError("config: d must be in [0,1)");
    if (c.m0 < 0) throw ParamError("config: m0 must be >= 0");
    if (!(c.reproduction >= 0.0 && c.reproduction <= 1.0)) throw ParamError("config: r must be in [0,1]");
    if (!(c.conversion >= 0.0 && c.conversion <= 1.0)) throw ParamError("config: g must be in [0,1]");
    if (c.wave_threshold < 1) throw ParamError("config: T must be positive");
    if (c.w_min < 1 || c.w_max < c.w_min) throw ParamError("config: need 1 <= w_min <= w_max");
    if (c.v_initial < 1 || c.v_max < c.v_initial) throw ParamError("config: need 1 <= v_initial <= v_max");
    if (c.t_max_venues < 1) throw ParamError("config: t_max_venues must be positive");
    if (c.t_policy < 1) throw ParamError("config: t_policy must be positive");
    if (c.t_max < c.t_policy) throw ParamError("config: t_policy must be <= t_max");
    if (!(c.nudge >= 0.0 && c.nudge < 1.0)) throw ParamError("config: nudge must be in [0,1)");
    validate(c.archetype.log_post_mean);
    validate(c.archetype.dispersion);
    validate(c.archetype.lambda);
}

// Draws one venue's parameters. The post mean lives on the log scale, the
// dispersion and engagement-rate draws are used directly (rate floor at 0).
inline VenueParams sample_venue_params(const Archetype& archetype, RngStream& rng) {
    VenueParams p;
    p.log_post_mean = sample(archetype.log_post_mean, rng);
    p.dispersion = sample(archetype.dispersion, rng);
    if (!(p.dispersion > 0.0)) {
        throw ParamError("archetype: dispersion draw must be strictly positive");
    }
    p.lambda0 = std::max(0.0, sample(archetype.lambda, rng));
    return p;
}

// --- interventions -----------------------------------------------------------

struct ScaleG { double factor; };
struct SetG { double value; };
struct ScaleR { double factor; };
struct ScaleM0 { double factor; };
struct ScaleT { double factor; };
struct ScaleWmax { double factor; };
struct NoVenueLimit {};
struct Nudge { double n; };
struct Vcb { std::int64_t cap; };

using Intervention =
    std::variant<ScaleG, SetG, ScaleR, ScaleM0, ScaleT, ScaleWmax, NoVenueLimit, Nudge, Vcb>;

inline SimConfig apply_intervention(const SimConfig& base, const Intervention& iv) {
    SimConfig c = base;
    std::visit(
        [&c](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ScaleG>) {
                c.conversion *= v.factor;
            } else if constexpr (std::is_same_v<T, SetG>) {
                c.conversion = v.value;
            } else if constexpr (std::is_same_v<T, ScaleR>) {
                c.reproduction *= v.factor;
            } else if constexpr (std::is_same_v<T, ScaleM0>) {
                c.m0 = std::llround(static_cast<double>(c.m0) * v.factor);
            } else if constexpr (std::is_same_v<T, ScaleT>) {
                c.wave_threshold = std::llround(static_cast<double>(c.wave_threshold) * v.factor);
            } else if constexpr (std::is_same_v<T, ScaleWmax>) {
                c.w_max = std::llround(static_cast<double>(c.w_max) * v.factor);
            } else if constexpr (std::is_same_v<T, NoVenueLimit>) {
                c.wave_threshold = kNoModeratorLimit;
            } else if constexpr (std::is_same_v<T, Nudge>) {
                c.nudge = v.n;
            } else if constexpr (std::is_same_v<T, Vcb>) {
                if (v.cap < 0) throw ParamError("vcb: cap must be >= 0");
                c.vcb_cap = v.cap;
            }
        },
        iv);
    validate(c);
    return c;
}

// Parses one intervention line, e.g. "scale_g 0.2", "no_venue_limit", "vcb 100".
inline Intervention parse_intervention(std::string_view line) {
    const auto fields = split(std::string_view(trim(line)), ' ');
    const std::string_view name = fields.empty() ? std::string_view{} : trim(fields[0]);
    const auto arg = [&](std::string_view what) -> std::string_view {
        if (fields.size() < 2) throw DataError("intervention '" + std::string(name) +
                                               "' needs an argument (" + std::string(what) + ")");
        return fields[1];
    };
    if (name == "scale_g") return ScaleG{parse_double(arg("factor"), "scale_g")};
    if (name == "set_g") return SetG{parse_double(arg("value"), "set_g")};
    if (name == "scale_r") return ScaleR{parse_double(arg("factor"), "scale_r")};
    if (name == "scale_m0") return ScaleM0{parse_double(arg("factor"), "scale_m0")};
    if (name == "scale_t") return ScaleT{parse_double(arg("factor"), "scale_t")};
    if (name == "scale_wmax") return ScaleWmax{parse_double(arg("factor"), "scale_wmax")};
    if (name == "no_venue_limit") return NoVenueLimit{};
    if (name == "nudge") return Nudge{parse_double(arg("n"), "nudge")};
    if (name == "vcb") return Vcb{parse_int(arg("cap"), "vcb")};
    throw DataError("unknown intervention: '" + std::string(name) + "'");
}

inline std::string intervention_label(const Intervention& iv) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ScaleG>) return "scale_g " + format_double(v.factor);
            else if constexpr (std::is_same_v<T, SetG>) return "set_g " + format_double(v.value);
            else if constexpr (std::is_same_v<T, ScaleR>) return "scale_r " + format_double(v.factor);
            else if constexpr (std::is_same_v<T, ScaleM0>) return "scale_m0 " + format_double(v.factor);
            else if constexpr (std::is_same_v<T, ScaleT>) return "scale_t " + format_double(v.factor);
            else if constexpr (std::is_same_v<T, ScaleWmax>) return "scale_wmax " + format_double(v.factor);
            else if constexpr (std::is_same_v<T, NoVenueLimit>) return "no_venue_limit";
            else if constexpr (std::is_same_v<T, Nudge>) return "nudge " + format_double(v.n);
            else return "vcb " + std::to_string(v.cap);
        },
        iv);
}

// --- config file format ------------------------------------------------------
//
// Key/value lines plus one nested archetype block:
//
//   d = 0.018
//   ...
//   archetype {
//     a = normal(2.03, 1.2)
//     b = lognormal(-0.79, 1.19)
//     lambda = exp_uniform_minus_one(6.43)
//   }

namespace detail {

inline std::string spec_to_string(const DistributionSpec& s) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NegBinomialSpec>) {
                return "neg_binomial(" + format_double(v.mean) + ", " + format_double(v.dispersion) + ")";
            } else if constexpr (std::is_same_v<T, PoissonSpec>) {
                return "poisson(" + format_double(v.rate) + ")";
            } else if constexpr (std::is_same_v<T, TruncatedPoissonSpec>) {
                return "truncated_poisson(" + format_double(v.rate) + ", " + std::to_string(v.cap) + ")";
            } else if constexpr (std::is_same_v<T, NormalSpec>) {
                return "normal(" + format_double(v.mu) + ", " + format_double(v.sigma) + ")";
            } else if constexpr (std::is_same_v<T, LogNormalSpec>) {
                return "lognormal(" + format_double(v.mu) + ", " + format_double(v.sigma) + ")";
            } else if constexpr (std::is_same_v<T, UniformSpec>) {
                return "uniform(" + format_double(v.lo) + ", " + format_double(v.hi) + ")";
            } else {
                return "exp_uniform_minus_one(" + format_double(v.hi) + ")";
            }
        },
        s);
}

inline DistributionSpec parse_spec(std::string_view text, std::string_view what) {
    const std::string_view t = trim(text);
    const auto open = t.find('(');
    if (open == std::string_view::npos || t.back() != ')') {
        throw DataError("bad distribution for " + std::string(what) + ": '" + std::string(t) + "'");
    }
    const std::string_view name = trim(t.substr(0, open));
    const auto args = split(t.substr(open + 1, t.size() - open - 2), ',');
    const auto need = [&](std::size_t n) {
        if (args.size() != n) {
            throw DataError("distribution '" + std::string(name) + "' expects " +
                            std::to_string(n) + " argument(s)");
        }
    };
    if (name == "neg_binomial") {
        need(2);
        return NegBinomialSpec{parse_double(args[0], what), parse_double(args[1], what)};
    }
    if (name == "poisson") {
        need(1);
        return PoissonSpec{parse_double(args[0], what)};
    }
    if (name == "truncated_poisson") {
        need(2);
        return TruncatedPoissonSpec{parse_double(args[0], what), parse_int(args[1], what)};
    }
    if (name == "normal") {
        need(2);
        return NormalSpec{parse_double(args[0], what), parse_double(args[1], what)};
    }
    if (name == "lognormal") {
        need(2);
        return LogNormalSpec{parse_double(args[0], what), parse_double(args[1], what)};
    }
    if (name == "uniform") {
        need(2);
        return UniformSpec{parse_double(args[0], what), parse_double(args[1], what)};
    }
    if (name == "exp_uniform_minus_one") {
        need(1);
        return ExpOfUniformMinusOneSpec{parse_double(args[0], what)};
    }
    throw DataError("unknown distribution '" + std::string(name) + "' for " + std::string(what));
}

}  // namespace detail

inline std::string write_config(const SimConfig& c) {
    std::ostringstream out;
    out << "d = " << format_double(c.decay) << "\n";
    out << "m0 = " << c.m0 << "\n";
    out << "r = " << format_double(c.reproduction) << "\n";
    out << "g = " << format_double(c.conversion) << "\n";
    if (c.wave_threshold == kNoModeratorLimit) {
        out << "T = none\n";
    } else {
        out << "T = " << c.wave_threshold << "\n";
    }
    out << "w_min = " << c.w_min << "\n";
    out << "w_max = " << c.w_max << "\n";
    out << "v_initial = " << c.v_initial << "\n";
    out << "v_max = " << c.v_max << "\n";
    out << "t_max_venues = " << c.t_max_venues << "\n";
    out << "t_policy = " << c.t_policy << "\n";
    out << "t_max = " << c.t_max << "\n";
    out << "nudge = " << format_double(c.nudge) << "\n";
    if (c.vcb_enabled()) {
        out << "vcb_cap = " << c.vcb_cap << "\n";
    } else {
        out << "vcb_cap = none\n";
    }
    out << "deplete_demand = " << (c.deplete_demand ? "true" : "false") << "\n";
    out << "converted_rate_decays = " << (c.converted_rate_decays ? "true" : "false") << "\n";
    out << "convert_by_generated_posts = " << (c.convert_by_generated_posts ? "true" : "false") << "\n";
    out << "wave_weight_by_moderators = " << (c.wave_weight_by_moderators ? "true" : "false") << "\n";
    out << "archetype {\n";
    out << "  a = " << detail::spec_to_string(c.archetype.log_post_mean) << "\n";
    out << "  b = " << detail::spec_to_string(c.archetype.dispersion) << "\n";
    out << "  lambda = " << detail::spec_to_string(c.archetype.lambda) << "\n";
    out << "}\n";
    return out.str();
}

inline SimConfig parse_config(const std::string& text) {
    SimConfig c;
    bool in_archetype = false;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line == "archetype {") {
            in_archetype = true;
            continue;
        }
        if (line == "}") {
            in_archetype = false;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw DataError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (in_archetype) {
            if (key == "a") c.archetype.log_post_mean = detail::parse_spec(value, "archetype.a");
            else if (key == "b") c.archetype.dispersion = detail::parse_spec(value, "archetype.b");
            else if (key == "lambda") c.archetype.lambda = detail::parse_spec(value, "archetype.lambda");
            else throw DataError("config line " + std::to_string(line_no) + ": unknown archetype key");
            continue;
        }
        if (key == "d") c.decay = parse_double(value, key);
        else if (key == "m0") c.m0 = parse_int(value, key);
        else if (key == "r") c.reproduction = parse_double(value, key);
        else if (key == "g") c.conversion = parse_double(value, key);
        else if (key == "T") c.wave_threshold = (value == "none") ? kNoModeratorLimit : parse_int(value, key);
        else if (key == "w_min") c.w_min = parse_int(value, key);
        else if (key == "w_max") c.w_max = parse_int(value, key);
        else if (key == "v_initial") c.v_initial = parse_int(value, key);
        else if (key == "v_max") c.v_max = parse_int(value, key);
        else if (key == "t_max_venues") c.t_max_venues = parse_int(value, key);
        else if (key == "t_policy") c.t_policy = parse_int(value, key);
        else if (key == "t_max") c.t_max = parse_int(value, key);
        else if (key == "nudge") c.nudge = parse_double(value, key);
        else if (key == "vcb_cap") c.vcb_cap = (value == "none") ? -1 : parse_int(value, key);
        else if (key == "deplete_demand") c.deplete_demand = parse_bool(value, key);
        else if (key == "converted_rate_decays") c.converted_rate_decays = parse_bool(value, key);
        else if (key == "convert_by_generated_posts") c.convert_by_generated_posts = parse_bool(value, key);
        else if (key == "wave_weight_by_moderators") c.wave_weight_by_moderators = parse_bool(value, key);
        else throw DataError("config line " + std::to_string(line_no) + ": unknown key '" +
                             std::string(key) + "'");
    }
    validate(c);
    return c;
}

}  // namespace modkit::sim
