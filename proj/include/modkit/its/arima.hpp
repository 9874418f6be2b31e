#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "modkit/errors.hpp"
#include "modkit/its/series.hpp"
#include "modkit/linalg.hpp"
#include "modkit/optim.hpp"
#include "modkit/stats.hpp"

namespace modkit::its {

struct ArimaSpec {
    int p = 0;
    int d = 0;
    int q = 0;
    bool with_intercept = true;

    int n_params() const { return p + q + (with_intercept ? 1 : 0); }
    auto operator<=>(const ArimaSpec&) const = default;
};

struct ArimaFit {
    ArimaSpec spec;
    double intercept = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    double sigma2 = 0.0;
    double css = 0.0;             // conditional sum of squared innovations
    double log_likelihood = 0.0;  // Gaussian, on the effective sample
    double aic = 0.0;
    double aicc = 0.0;
    int n_effective = 0;
    std::vector<double> residuals;     // innovations, aligned to the differenced series
    std::vector<double> coef_std_err;  // [intercept?, ar..., ma...]; NaN when unavailable
};

namespace detail {

// Durbin-Levinson map from partial autocorrelations in (-1,1) to a stationary
// AR coefficient vector.
inline std::vector<double> pacf_to_ar(std::span<const double> pacf) {
    std::vector<double> phi(pacf.begin(), pacf.end());
    std::vector<double> prev(phi.size());
    for (std::size_t k = 1; k < phi.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) prev[j] = phi[j];
        for (std::size_t j = 0; j < k; ++j) {
            phi[j] = prev[j] - pacf[k] * prev[k - 1 - j];
        }
        phi[k] = pacf[k];
    }
    return phi;
}

// Unconstrained -> stationary AR / invertible MA coefficients.
inline std::vector<double> constrain(std::span<const double> raw, bool flip_sign) {
    std::vector<double> pacf(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) pacf[i] = std::tanh(raw[i]);
    auto coef = pacf_to_ar(pacf);
    if (flip_sign) {
        for (auto& c : coef) c = -c;
    }
    return coef;
}

// Innovations of the intercept-form ARMA on the differenced scale:
// e_t = w_t - c - sum phi_i w_{t-i} - sum theta_j e_{t-j}, zero-initialized.
// The sum conditions on the first n_condition values (n_condition >= p), so
// fits with different orders can share an estimation sample.
inline double css_objective(std::span<const double> w, double c, std::span<const double> phi,
                            std::span<const double> theta, std::vector<double>* residuals,
                            int n_condition = -1) {
    const int p = static_cast<int>(phi.size());
    const int q = static_cast<int>(theta.size());
    const int n = static_cast<int>(w.size());
    const int cond = (n_condition < p) ? p : n_condition;
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    double sse = 0.0;
    for (int t = cond; t < n; ++t) {
        double pred = c;
        for (int i = 0; i < p; ++i) pred += phi[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(t - 1 - i)];
        for (int j = 0; j < q; ++j) {
            const int s = t - 1 - j;
            if (s >= cond) pred += theta[static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(s)];
        }
        const double innov = w[static_cast<std::size_t>(t)] - pred;
        e[static_cast<std::size_t>(t)] = innov;
        sse += innov * innov;
    }
    if (residuals) *residuals = e;
    return sse;
}

struct ParamLayout {
    bool with_intercept;
    int p;
    int q;

    int dim() const { return (with_intercept ? 1 : 0) + p + q; }

    void unpack(const std::vector<double>& u, double& c, std::vector<double>& phi,
                std::vector<double>& theta) const {
        int at = 0;
        c = with_intercept ? u[0] : 0.0;
        at += with_intercept ? 1 : 0;
        phi = constrain(std::span<const double>(u.data() + at, static_cast<std::size_t>(p)), false);
        at += p;
        // Invertible MA region mirrors the stationary AR region under a sign flip.
        theta = constrain(std::span<const double>(u.data() + at, static_cast<std::size_t>(q)), true);
    }
};

}  // namespace detail

// Conditional-sum-of-squares ARIMA fit on a contiguous series. AR and MA
// parameters are searched in a partial-autocorrelation parameterization, so
// stationarity and invertibility hold by construction. n_condition fixes the
// number of presample values excluded from the innovation sum (defaults to p);
// order selection passes a common value so candidate AICcs are comparable.
inline ArimaFit fit_arima(std::span<const double> values, const ArimaSpec& spec,
                          int n_condition = -1) {
    if (spec.p < 0 || spec.d < 0 || spec.q < 0) throw ParamError("fit_arima: negative order");
    const std::size_t min_len =
        static_cast<std::size_t>(3 * (spec.p + spec.q) + spec.d + 10);
    if (values.size() <= min_len) {
        throw DataError("fit_arima: series too short for the requested order");
    }
    const std::vector<double> w = difference(std::vector<double>(values.begin(), values.end()), spec.d);
    const int n = static_cast<int>(w.size());
    const int cond = std::max(n_condition, spec.p);
    if (n - cond < spec.n_params() + 2) throw DataError("fit_arima: conditioning leaves no sample");

    ArimaFit fit;
    fit.spec = spec;
    fit.n_effective = n - cond;

    // Scale anchors for the optimizer, homogeneous of degree one in the data.
    double w_mean = 0.0, w_rms = 0.0;
    for (const double v : w) {
        w_mean += v;
        w_rms += v * v;
    }
    w_mean /= static_cast<double>(n);
    w_rms = std::sqrt(w_rms / static_cast<double>(n));

    if (spec.p == 0 && spec.q == 0) {
        if (spec.with_intercept) {
            double acc = 0.0;
            for (int t = cond; t < n; ++t) acc += w[static_cast<std::size_t>(t)];
            fit.intercept = acc / static_cast<double>(n - cond);
        }
        fit.css = detail::css_objective(w, fit.intercept, {}, {}, &fit.residuals, cond);
        if (spec.with_intercept) {
            fit.coef_std_err = {std::sqrt(fit.css) / static_cast<double>(fit.n_effective)};
        }
    } else {
        const detail::ParamLayout layout{spec.with_intercept, spec.p, spec.q};
        const auto objective = [&](const std::vector<double>& u) {
            double c;
            std::vector<double> phi, theta;
            layout.unpack(u, c, phi, theta);
            return detail::css_objective(w, c, phi, theta, nullptr, cond);
        };

        std::vector<double> start(static_cast<std::size_t>(layout.dim()), 0.0);
        if (spec.with_intercept) start[0] = w_mean;
        std::vector<double> step(start.size(), 0.25);
        if (spec.with_intercept) {
            const double scale = std::fabs(w_mean) + w_rms;
            step[0] = (scale > 0.0) ? 0.1 * scale : 0.1;
        }

        NelderMeadResult best;
        for (int attempt = 0; attempt < 3; ++attempt) {
            const auto res = nelder_mead(objective, start, step, 1e-12,
                                         800 * layout.dim());
            if (attempt == 0 || res.value < best.value) best = res;
            if (best.converged) break;
            start = best.x;  // restart the simplex around the best point
            for (auto& s : step) s *= 0.5;
        }
        if (!best.converged && !std::isfinite(best.value)) {
            throw NumericError("fit_arima: optimizer failed (best CSS " +
                               std::to_string(best.value) + ")");
        }

        std::vector<double> phi, theta;
        layout.unpack(best.x, fit.intercept, phi, theta);
        fit.ar = phi;
        fit.ma = theta;
        fit.css = detail::css_objective(w, fit.intercept, phi, theta, &fit.residuals, cond);

        // Standard errors from a central-difference Hessian of CSS/2 in the
        // natural parameter space, covariance sigma2 * H^{-1}.
        fit.coef_std_err.assign(static_cast<std::size_t>(layout.dim()),
                                std::numeric_limits<double>::quiet_NaN());
        const auto natural_css = [&](const std::vector<double>& nat) {
            const double c = spec.with_intercept ? nat[0] : 0.0;
            const int base = spec.with_intercept ? 1 : 0;
            std::vector<double> a(nat.begin() + base, nat.begin() + base + spec.p);
            std::vector<double> m(nat.begin() + base + spec.p, nat.end());
            return 0.5 * detail::css_objective(w, c, a, m, nullptr, cond);
        };
        std::vector<double> nat;
        if (spec.with_intercept) nat.push_back(fit.intercept);
        nat.insert(nat.end(), phi.begin(), phi.end());
        nat.insert(nat.end(), theta.begin(), theta.end());
        try {
            const std::size_t dim = nat.size();
            Matrix hessian(dim, dim);
            const double base_val = natural_css(nat);
            std::vector<double> h(dim);
            for (std::size_t i = 0; i < dim; ++i) h[i] = 1e-4 * (1.0 + std::fabs(nat[i]));
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = i; j < dim; ++j) {
                    auto at = [&](double di, double dj) {
                        auto point = nat;
                        point[i] += di;
                        point[j] += dj;
                        return natural_css(point);
                    };
                    double second;
                    if (i == j) {
                        second = (at(h[i], 0.0) - 2.0 * base_val + at(-h[i], 0.0)) / (h[i] * h[i]);
                    } else {
                        second = (at(h[i], h[j]) - at(h[i], -h[j]) - at(-h[i], h[j]) +
                                  at(-h[i], -h[j])) /
                                 (4.0 * h[i] * h[j]);
                    }
                    hessian(i, j) = second;
                    hessian(j, i) = second;
                }
            }
            const double sigma2 = fit.css / static_cast<double>(fit.n_effective);
            const Matrix cov = invert(hessian);
            for (std::size_t i = 0; i < dim; ++i) {
                const double var = sigma2 * cov(i, i);
                if (var > 0.0) fit.coef_std_err[i] = std::sqrt(var);
            }
        } catch (const NumericError&) {
            // singular Hessian: standard errors stay NaN
        }
    }

    const double n_eff = static_cast<double>(fit.n_effective);
    fit.sigma2 = fit.css / n_eff;
    if (fit.sigma2 <= 0.0) fit.sigma2 = 1e-300;
    fit.log_likelihood = -0.5 * n_eff * (std::log(2.0 * 3.141592653589793 * fit.sigma2) + 1.0);
    const double k = static_cast<double>(spec.n_params() + 1);  // + sigma2
    fit.aic = 2.0 * k - 2.0 * fit.log_likelihood;
    fit.aicc = (n_eff > k + 1.0)
                   ? fit.aic + 2.0 * k * (k + 1.0) / (n_eff - k - 1.0)
                   : std::numeric_limits<double>::infinity();
    return fit;
}

struct OrderSelection {
    ArimaSpec spec;
    ArimaFit fit;
    std::vector<std::pair<ArimaSpec, double>> tried;  // spec -> AICc (or inf on failure)
};

// Exhaustive (p, q) grid at fixed d; smallest AICc wins, ties go to fewer
// parameters then lower p.
inline OrderSelection select_order(std::span<const double> values, int max_p, int max_q, int d,
                                   bool with_intercept = true) {
    if (max_p < 0 || max_q < 0) throw ParamError("select_order: negative bound");
    OrderSelection sel;
    bool have = false;
    double best_aicc = 0.0;
    for (int p = 0; p <= max_p; ++p) {
        for (int q = 0; q <= max_q; ++q) {
            const ArimaSpec spec{p, d, q, with_intercept};
            double aicc = std::numeric_limits<double>::infinity();
            try {
                ArimaFit fit = fit_arima(values, spec, max_p);
                aicc = fit.aicc;
                const bool better =
                    !have || aicc < best_aicc ||
                    (aicc == best_aicc && spec.n_params() < sel.spec.n_params()) ||
                    (aicc == best_aicc && spec.n_params() == sel.spec.n_params() && p < sel.spec.p);
                if (better) {
                    have = true;
                    best_aicc = aicc;
                    sel.spec = spec;
                    sel.fit = std::move(fit);
                }
            } catch (const std::exception&) {
                // recorded below; the grid continues
            }
            sel.tried.emplace_back(spec, aicc);
        }
    }
    if (!have) throw NumericError("select_order: every candidate order failed to fit");
    return sel;
}

}  // namespace modkit::its
