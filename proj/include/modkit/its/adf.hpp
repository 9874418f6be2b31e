#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "modkit/errors.hpp"
#include "modkit/linalg.hpp"

namespace modkit::its {

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int lags = 0;  // lagged-difference terms included
    std::size_t n_obs = 0;
};

namespace detail {

// Dickey-Fuller tau_mu critical values (constant-only regression) on a grid of
// sample sizes; interpolated in 1/n and in the statistic, clamped outside.
inline double adf_p_value_const(double stat, std::size_t n) {
    static constexpr double kLevels[4] = {0.01, 0.025, 0.05, 0.10};
    static constexpr double kInvN[6] = {1.0 / 25, 1.0 / 50, 1.0 / 100, 1.0 / 250, 1.0 / 500, 0.0};
    static constexpr double kCrit[6][4] = {
        {-3.75, -3.33, -3.00, -2.63},  // n = 25
        {-3.58, -3.22, -2.93, -2.60},  // n = 50
        {-3.51, -3.17, -2.89, -2.58},  // n = 100
        {-3.46, -3.14, -2.88, -2.57},  // n = 250
        {-3.44, -3.13, -2.87, -2.57},  // n = 500
        {-3.43, -3.12, -2.86, -2.57},  // asymptotic
    };
    const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(n, 25));
    double cv[4];
    if (inv_n >= kInvN[0]) {
        for (int j = 0; j < 4; ++j) cv[j] = kCrit[0][j];
    } else {
        int row = 0;
        while (row < 5 && inv_n < kInvN[row + 1]) ++row;
        const double t = (inv_n - kInvN[row]) / (kInvN[row + 1] - kInvN[row]);
        for (int j = 0; j < 4; ++j) cv[j] = kCrit[row][j] + t * (kCrit[row + 1][j] - kCrit[row][j]);
    }
    if (stat <= cv[0]) return 0.001;
    if (stat >= cv[3]) return 0.999;
    for (int j = 0; j < 3; ++j) {
        if (stat <= cv[j + 1]) {
            const double t = (stat - cv[j]) / (cv[j + 1] - cv[j]);
            return kLevels[j] + t * (kLevels[j + 1] - kLevels[j]);
        }
    }
    return 0.999;
}

struct AdfRegression {
    double t_stat = 0.0;
    double sse = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
};

// Regression dy_t = a + rho*y_{t-1} + sum gamma_i dy_{t-i}; start_offset fixes
// the estimation sample so AICs are comparable across lag orders.
inline AdfRegression adf_regression(std::span<const double> y, int lags, std::size_t start_offset) {
    const std::size_t n = y.size();
    std::vector<double> dy(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) dy[i] = y[i + 1] - y[i];

    const std::size_t first = start_offset;  // index into dy
    if (first < static_cast<std::size_t>(lags)) throw ParamError("adf: offset below lag order");
    const std::size_t rows = dy.size() - first;
    const std::size_t k = 2 + static_cast<std::size_t>(lags);
    if (rows <= k + 1) throw DataError("adf: not enough observations for the lag order");

    Matrix x(rows, k);
    std::vector<double> target(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;  // dy index being explained
        x(r, 0) = 1.0;
        x(r, 1) = y[t];  // level lagged one step
        for (int j = 0; j < lags; ++j) x(r, 2 + static_cast<std::size_t>(j)) = dy[t - 1 - static_cast<std::size_t>(j)];
        target[r] = dy[t];
    }
    const auto fit = ols(x, target);
    AdfRegression reg;
    reg.t_stat = fit.coef[1] / fit.std_err[1];
    reg.sse = fit.sse;
    reg.n = rows;
    reg.k = k;
    return reg;
}

}  // namespace detail

// Augmented Dickey-Fuller test with a constant; the lagged-difference order is
// chosen by AIC over a common sample, then the statistic comes from a refit on
// the full usable sample.
inline AdfResult adf_test(std::span<const double> values, int max_lag = -1) {
    const std::size_t n = values.size();
    if (n < 20) throw DataError("adf_test: need at least 20 contiguous observations");

    double lo = values[0], hi = values[0];
    for (const double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12 * (1.0 + std::fabs(hi))) {
        throw DataError("adf_test: constant series");
    }

    if (max_lag < 0) {
        // Schwert-style rule of thumb, bounded so the common sample stays sane.
        max_lag = static_cast<int>(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25));
    }
    max_lag = std::min<int>(max_lag, static_cast<int>(n / 2) - 3);
    max_lag = std::max(max_lag, 0);

    int best_lag = 0;
    double best_aic = 0.0;
    bool have = false;
    for (int lag = 0; lag <= max_lag; ++lag) {
        try {
            const auto reg = detail::adf_regression(values, lag, static_cast<std::size_t>(max_lag));
            const double aic = static_cast<double>(reg.n) *
                                   std::log(reg.sse / static_cast<double>(reg.n)) +
                               2.0 * static_cast<double>(reg.k);
            if (!have || aic < best_aic) {
                have = true;
                best_aic = aic;
                best_lag = lag;
            }
        } catch (const NumericError&) {
            // collinear at this order; skip
        }
    }
    if (!have) throw NumericError("adf_test: every lag order failed");

    const auto reg = detail::adf_regression(values, best_lag, static_cast<std::size_t>(best_lag));
    AdfResult result;
    result.statistic = reg.t_stat;
    result.lags = best_lag;
    result.n_obs = reg.n;
    result.p_value = detail::adf_p_value_const(reg.t_stat, reg.n);
    return result;
}

}  // namespace modkit::its
