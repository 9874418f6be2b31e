#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "modkit/errors.hpp"
#include "modkit/its/arima.hpp"
#include "modkit/its/series.hpp"
#include "modkit/stats.hpp"

namespace modkit::its {

struct Forecast {
    std::vector<double> mean;  // on the scale the model was fit on
    std::vector<double> se;    // non-decreasing in the horizon
    double level = 0.90;
    double z = 1.6448536269514722;

    double lo(std::size_t h) const { return mean[h] - z * se[h]; }
    double hi(std::size_t h) const { return mean[h] + z * se[h]; }
};

namespace detail {

// psi weights (MA-infinity) of the full ARIMA process: the AR side is
// phi(B)*(1-B)^d expanded into one polynomial.
inline std::vector<double> psi_weights(const ArimaFit& fit, std::size_t horizon) {
    std::vector<double> ar_full(static_cast<std::size_t>(fit.spec.p + fit.spec.d) + 1, 0.0);
    // Start with phi(B) coefficients in "x_t = sum a_i x_{t-i}" form.
    std::vector<double> poly = {1.0};  // coefficients of phi(B)(1-B)^d, constant first
    for (int i = 0; i < fit.spec.p; ++i) poly.push_back(-fit.ar[static_cast<std::size_t>(i)]);
    for (int round = 0; round < fit.spec.d; ++round) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i];
        }
        poly = std::move(next);
    }
    // a_i = -poly[i] for i >= 1.
    for (std::size_t i = 1; i < poly.size(); ++i) ar_full[i] = -poly[i];

    std::vector<double> psi(horizon, 0.0);
    if (horizon == 0) return psi;
    psi[0] = 1.0;
    for (std::size_t j = 1; j < horizon; ++j) {
        double acc = (j <= static_cast<std::size_t>(fit.spec.q)) ? fit.ma[j - 1] : 0.0;
        const std::size_t imax = std::min(j, ar_full.size() - 1);
        for (std::size_t i = 1; i <= imax; ++i) acc += ar_full[i] * psi[j - i];
        psi[j] = acc;
    }
    return psi;
}

}  // namespace detail

// Mean path by iterating the fitted difference equation with future shocks at
// zero; spread from the psi-weight recursion, se_h = sigma * sqrt(sum psi^2).
inline Forecast forecast(const ArimaFit& fit, std::span<const double> history, std::size_t horizon,
                         double level = 0.90) {
    if (horizon < 1) throw ParamError("forecast: horizon must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw ParamError("forecast: level in (0,1)");
    if (history.size() <= static_cast<std::size_t>(fit.spec.d + fit.spec.p)) {
        throw DataError("forecast: history too short");
    }

    std::vector<double> w =
        difference(std::vector<double>(history.begin(), history.end()), fit.spec.d);
    std::vector<double> resid;
    detail::css_objective(w, fit.intercept, fit.ar, fit.ma, &resid);

    // Forecast on the differenced scale.
    std::vector<double> w_ext = w;
    std::vector<double> e_ext = resid;
    for (std::size_t h = 0; h < horizon; ++h) {
        double pred = fit.intercept;
        for (int i = 0; i < fit.spec.p; ++i) {
            pred += fit.ar[static_cast<std::size_t>(i)] * w_ext[w_ext.size() - 1 - static_cast<std::size_t>(i)];
        }
        for (int j = 0; j < fit.spec.q; ++j) {
            const std::size_t idx = e_ext.size() - 1 - static_cast<std::size_t>(j);
            if (idx < e_ext.size()) pred += fit.ma[static_cast<std::size_t>(j)] * e_ext[idx];
        }
        w_ext.push_back(pred);
        e_ext.push_back(0.0);
    }

    // Integrate back to the level of the original series.
    Forecast out;
    out.level = level;
    out.z = normal_quantile(0.5 + level / 2.0);
    out.mean.reserve(horizon);
    if (fit.spec.d == 0) {
        out.mean.assign(w_ext.begin() + static_cast<std::ptrdiff_t>(w.size()), w_ext.end());
    } else {
        // Tails of each differencing level, updated as the forecasts arrive.
        std::vector<double> lasts(static_cast<std::size_t>(fit.spec.d));
        std::vector<double> cur(history.begin(), history.end());
        for (int j = 0; j < fit.spec.d; ++j) {
            lasts[static_cast<std::size_t>(j)] = cur.back();
            cur = difference(cur, 1);
        }
        for (std::size_t h = 0; h < horizon; ++h) {
            double val = w_ext[w.size() + h];
            for (int j = fit.spec.d - 1; j >= 0; --j) {
                val = lasts[static_cast<std::size_t>(j)] + val;
                lasts[static_cast<std::size_t>(j)] = val;
            }
            out.mean.push_back(val);
        }
    }

    const auto psi = detail::psi_weights(fit, horizon);
    const double sigma = std::sqrt(fit.sigma2);
    out.se.reserve(horizon);
    double acc = 0.0;
    for (std::size_t h = 0; h < horizon; ++h) {
        acc += psi[h] * psi[h];
        out.se.push_back(sigma * std::sqrt(acc));
    }
    return out;
}

struct GofResult {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Standardizes each non-missing post-policy point by its per-horizon forecast
// standard error; missing points drop out of the dof.
inline GofResult chi_square_gof(const std::vector<std::optional<double>>& observed,
                                const Forecast& fc) {
    if (observed.size() > fc.mean.size()) {
        throw ParamError("chi_square_gof: more observations than forecast horizon");
    }
    GofResult result;
    for (std::size_t h = 0; h < observed.size(); ++h) {
        if (!observed[h]) continue;
        if (!(fc.se[h] > 0.0)) throw NumericError("chi_square_gof: zero forecast spread");
        const double z = (*observed[h] - fc.mean[h]) / fc.se[h];
        result.chi2 += z * z;
        ++result.dof;
    }
    if (result.dof == 0) throw DataError("chi_square_gof: no usable observations");
    result.p_value = chi2_sf(result.chi2, result.dof);
    return result;
}

struct PercentChange {
    double mean_pct = 0.0;  // average weekly percent difference, observed vs predicted
    int n_used = 0;
    int n_excluded = 0;  // predictions at or below zero
};

// Mean of weekly ratios on the original scale.
inline PercentChange percent_change(const std::vector<std::optional<double>>& observed,
                                    const std::vector<double>& predicted) {
    if (observed.size() > predicted.size()) {
        throw ParamError("percent_change: more observations than predictions");
    }
    PercentChange out;
    double acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!observed[i]) continue;
        if (!(predicted[i] > 0.0)) {
            ++out.n_excluded;
            continue;
        }
        acc += 100.0 * (*observed[i] - predicted[i]) / predicted[i];
        ++out.n_used;
    }
    if (out.n_used == 0) throw DataError("percent_change: no usable weeks");
    out.mean_pct = acc / static_cast<double>(out.n_used);
    return out;
}

}  // namespace modkit::its
