#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

#include "modkit/errors.hpp"
#include "modkit/rng.hpp"

namespace modkit {

inline double sample_uniform(double lo, double hi, RngStream& rng) {
    if (!(lo <= hi)) throw ParamError("sample_uniform: lo > hi");
    return lo + rng.next_double() * (hi - lo);
}

// Box-Muller; consumes exactly two uniforms per call.
inline double sample_normal(double mu, double sigma, RngStream& rng) {
    if (sigma < 0.0 || !std::isfinite(sigma)) throw ParamError("sample_normal: sigma must be >= 0");
    const double u1 = rng.next_open();
    const double u2 = rng.next_double();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    return mu + sigma * z;
}

inline double sample_lognormal(double mu, double sigma, RngStream& rng) {
    return std::exp(sample_normal(mu, sigma, rng));
}

inline double sample_exponential(double mean, RngStream& rng) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw ParamError("sample_exponential: mean must be > 0");
    return -mean * std::log(rng.next_open());
}

namespace detail {

// Knuth's product-of-uniforms method; O(rate), fine below the PTRD cutoff.
inline std::int64_t poisson_small(double rate, RngStream& rng) {
    const double limit = std::exp(-rate);
    std::int64_t k = 0;
    double prod = rng.next_open();
    while (prod > limit) {
        ++k;
        prod *= rng.next_open();
    }
    return k;
}

// Hormann's transformed-rejection sampler with squeeze, for rate >= 10.
inline std::int64_t poisson_ptrs(double rate, RngStream& rng) {
    const double slam = std::sqrt(rate);
    const double loglam = std::log(rate);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_double();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -rate + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

}  // namespace detail

inline std::int64_t sample_poisson(double rate, RngStream& rng) {
    if (rate < 0.0 || !std::isfinite(rate)) throw ParamError("sample_poisson: rate must be finite and >= 0");
    if (rate == 0.0) return 0;
    if (rate < 10.0) return detail::poisson_small(rate, rng);
    return detail::poisson_ptrs(rate, rng);
}

// Clamped Poisson: min(X, cap). Posts still occur; engagements are capped.
inline std::int64_t sample_truncated_poisson(double rate, std::int64_t cap, RngStream& rng) {
    if (cap < 0) throw ParamError("sample_truncated_poisson: cap must be >= 0");
    if (cap == 0) {
        if (rate < 0.0 || !std::isfinite(rate)) throw ParamError("sample_truncated_poisson: bad rate");
        return 0;
    }
    return std::min(sample_poisson(rate, rng), cap);
}

// Marsaglia-Tsang, with the shape<1 boost via U^(1/shape).
inline double sample_gamma(double shape, double scale, RngStream& rng) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw ParamError("sample_gamma: shape and scale must be > 0");
    if (shape < 1.0) {
        const double u = rng.next_open();
        return sample_gamma(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = sample_normal(0.0, 1.0, rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

// Negative binomial parameterized by mean and dispersion b, so that
// Var = mean + mean^2/b. Sampled as the Gamma(b, mean/b) mixture of Poissons.
inline std::int64_t sample_neg_binomial(double mean, double dispersion, RngStream& rng) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw ParamError("sample_neg_binomial: mean must be > 0");
    if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
        throw ParamError("sample_neg_binomial: dispersion must be > 0");
    }
    const double lambda = sample_gamma(dispersion, mean / dispersion, rng);
    return sample_poisson(lambda, rng);
}

// e^(U[0, hi]) - 1; support [0, e^hi - 1).
inline double sample_exp_of_uniform_minus_one(double hi, RngStream& rng) {
    if (!(hi >= 0.0)) throw ParamError("sample_exp_of_uniform_minus_one: hi must be >= 0");
    return std::exp(sample_uniform(0.0, hi, rng)) - 1.0;
}

// ---------------------------------------------------------------------------
// Tagged distribution spec, the unit the simulator's archetype blocks are
// written in.

struct NegBinomialSpec { double mean; double dispersion; };
struct PoissonSpec { double rate; };
struct TruncatedPoissonSpec { double rate; std::int64_t cap; };
struct NormalSpec { double mu; double sigma; };
struct LogNormalSpec { double mu; double sigma; };
struct UniformSpec { double lo; double hi; };
struct ExpOfUniformMinusOneSpec { double hi; };

using DistributionSpec =
    std::variant<NegBinomialSpec, PoissonSpec, TruncatedPoissonSpec, NormalSpec,
                 LogNormalSpec, UniformSpec, ExpOfUniformMinusOneSpec>;

inline void validate(const DistributionSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, NegBinomialSpec>) {
                if (!(s.mean > 0.0) || !(s.dispersion > 0.0)) {
                    throw ParamError("NegBinomial: mean and dispersion must be > 0");
                }
            } else if constexpr (std::is_same_v<T, PoissonSpec>) {
                if (!(s.rate >= 0.0)) throw ParamError("Poisson: rate must be >= 0");
            } else if constexpr (std::is_same_v<T, TruncatedPoissonSpec>) {
                if (!(s.rate >= 0.0) || s.cap < 0) {
                    throw ParamError("TruncatedPoisson: rate must be >= 0 and cap >= 0");
                }
            } else if constexpr (std::is_same_v<T, NormalSpec> ||
                                 std::is_same_v<T, LogNormalSpec>) {
                if (!(s.sigma >= 0.0)) throw ParamError("Normal/LogNormal: sigma must be >= 0");
            } else if constexpr (std::is_same_v<T, UniformSpec>) {
                if (!(s.lo <= s.hi)) throw ParamError("Uniform: lo must be <= hi");
            } else if constexpr (std::is_same_v<T, ExpOfUniformMinusOneSpec>) {
                if (!(s.hi >= 0.0)) throw ParamError("ExpOfUniformMinusOne: hi must be >= 0");
            }
        },
        spec);
}

inline double sample(const DistributionSpec& spec, RngStream& rng) {
    return std::visit(
        [&rng](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, NegBinomialSpec>) {
                return static_cast<double>(sample_neg_binomial(s.mean, s.dispersion, rng));
            } else if constexpr (std::is_same_v<T, PoissonSpec>) {
                return static_cast<double>(sample_poisson(s.rate, rng));
            } else if constexpr (std::is_same_v<T, TruncatedPoissonSpec>) {
                return static_cast<double>(sample_truncated_poisson(s.rate, s.cap, rng));
            } else if constexpr (std::is_same_v<T, NormalSpec>) {
                return sample_normal(s.mu, s.sigma, rng);
            } else if constexpr (std::is_same_v<T, LogNormalSpec>) {
                return sample_lognormal(s.mu, s.sigma, rng);
            } else if constexpr (std::is_same_v<T, UniformSpec>) {
                return sample_uniform(s.lo, s.hi, rng);
            } else {
                return sample_exp_of_uniform_minus_one(s.hi, rng);
            }
        },
        spec);
}

}  // namespace modkit
