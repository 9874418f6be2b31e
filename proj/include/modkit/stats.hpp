#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "modkit/errors.hpp"

namespace modkit {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw ParamError("mean: empty input");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased (n-1) sample variance.
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw ParamError("sample_variance: need at least 2 values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

inline double population_variance(std::span<const double> xs) {
    if (xs.empty()) throw ParamError("population_variance: empty input");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size());
}

// Linear-interpolation quantile on a sorted range (the convention most
// numeric toolkits default to).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ParamError("quantile: empty input");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, q);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

// Inverse standard normal CDF: Acklam's rational approximation polished with
// one Halley step against erfc, good to ~1e-15.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParamError("normal_quantile: p outside (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement.
    const double e = 0.5 * std::erfc(-x / 1.4142135623730951) - p;
    const double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

namespace detail {

// Regularized lower incomplete gamma P(a, x) by series expansion.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// P(a, x): regularized lower incomplete gamma.
inline double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw ParamError("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw ParamError("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Upper-tail probability of a chi-square with dof degrees of freedom.
inline double chi2_sf(double x, double dof) {
    if (dof <= 0.0) throw ParamError("chi2_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * x);
}

inline double ln_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// One-sided exact binomial tail P(X >= k | n, p), direct summation in
// log-space around the largest term.
inline double binomial_sf(std::int64_t k, std::int64_t n, double p) {
    if (n < 0 || k < 0 || k > n) throw ParamError("binomial_sf: require 0 <= k <= n");
    if (!(p > 0.0 && p < 1.0)) throw ParamError("binomial_sf: p outside (0,1)");
    if (k == 0) return 1.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double max_lt = -std::numeric_limits<double>::infinity();
    std::vector<double> lts;
    lts.reserve(static_cast<std::size_t>(n - k + 1));
    for (std::int64_t i = k; i <= n; ++i) {
        const double lt = ln_choose(static_cast<double>(n), static_cast<double>(i)) +
                          static_cast<double>(i) * lp + static_cast<double>(n - i) * lq;
        lts.push_back(lt);
        max_lt = std::max(max_lt, lt);
    }
    double acc = 0.0;
    for (double lt : lts) acc += std::exp(lt - max_lt);
    const double result = std::exp(max_lt + std::log(acc));
    return std::min(result, 1.0);
}

// Holm-Bonferroni step-down rejection flags at family-wise level alpha.
inline std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha) {
    const std::size_t m = p_values.size();
    std::vector<bool> reject(m, false);
    if (m == 0) return reject;
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    for (std::size_t i = 0; i < m; ++i) {
        const double threshold = alpha / static_cast<double>(m - i);
        if (p_values[order[i]] <= threshold) {
            reject[order[i]] = true;
        } else {
            break;
        }
    }
    return reject;
}

}  // namespace modkit
