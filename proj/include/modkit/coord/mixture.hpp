#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "modkit/distributions.hpp"
#include "modkit/errors.hpp"
#include "modkit/rng.hpp"
#include "modkit/stats.hpp"

namespace modkit::coord {

struct ExpComponent {
    double mu = 1.0;  // mean interarrival, seconds
    double pi = 1.0;  // mixture weight
};

struct ExpMixture {
    std::vector<ExpComponent> components;  // canonicalized: mu ascending
    double log_likelihood = 0.0;
    std::size_t n = 0;
    std::vector<double> ll_trace;  // per-iteration log-likelihood of the kept fit
};

// EM from an explicit starting point. Each iteration evaluates the current
// parameters' log-likelihood during the E-step, so the reported components and
// likelihood always correspond; the trace is non-decreasing by construction.
// Convergence is a relative likelihood gain below tol. Components collapsing
// to zero weight raise NumericError.
inline ExpMixture fit_exp_mixture_em(std::span<const double> durations, int k,
                                     const ExpMixture& init, double tol = 1e-12,
                                     int max_iter = 500) {
    const std::size_t n = durations.size();
    if (k < 1) throw ParamError("fit_exp_mixture_em: k must be >= 1");
    if (n == 0 || static_cast<std::size_t>(k) > n) {
        throw ParamError("fit_exp_mixture_em: need at least k observations");
    }
    for (const double x : durations) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw ParamError("fit_exp_mixture_em: durations must be positive and finite");
        }
    }
    if (init.components.size() != static_cast<std::size_t>(k)) {
        throw ParamError("fit_exp_mixture_em: init has wrong component count");
    }

    std::vector<ExpComponent> comps = init.components;
    for (auto& c : comps) {
        if (!(c.mu > 0.0) || !(c.pi > 0.0)) throw ParamError("fit_exp_mixture_em: bad init");
    }

    ExpMixture result;
    result.n = n;

    std::vector<double> log_coef(static_cast<std::size_t>(k));  // log(pi) - log(mu)
    std::vector<double> inv_mu(static_cast<std::size_t>(k));
    std::vector<double> t(static_cast<std::size_t>(k));
    std::vector<double> weight(static_cast<std::size_t>(k));
    std::vector<double> weighted_sum(static_cast<std::size_t>(k));

    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter <= max_iter; ++iter) {
        for (int j = 0; j < k; ++j) {
            log_coef[j] = std::log(comps[j].pi) - std::log(comps[j].mu);
            inv_mu[j] = 1.0 / comps[j].mu;
        }
        std::fill(weight.begin(), weight.end(), 0.0);
        std::fill(weighted_sum.begin(), weighted_sum.end(), 0.0);

        double ll = 0.0;
        for (const double x : durations) {
            int argmax = 0;
            for (int j = 0; j < k; ++j) {
                t[j] = log_coef[j] - x * inv_mu[j];
                if (t[j] > t[argmax]) argmax = j;
            }
            const double m = t[argmax];
            double denom = 1.0;
            for (int j = 0; j < k; ++j) {
                if (j == argmax) { t[j] = 1.0; continue; }
                t[j] = std::exp(t[j] - m);
                denom += t[j];
            }
            ll += m + std::log(denom);
            for (int j = 0; j < k; ++j) {
                const double r = t[j] / denom;
                weight[j] += r;
                weighted_sum[j] += r * x;
            }
        }
        result.ll_trace.push_back(ll);
        result.log_likelihood = ll;

        const bool converged = iter > 0 && (ll - prev_ll) < tol * (1.0 + std::fabs(ll));
        prev_ll = ll;
        if (converged || iter == max_iter) break;

        for (int j = 0; j < k; ++j) {
            if (weight[j] < 1e-8) {
                throw NumericError("fit_exp_mixture_em: component collapsed (pi < 1e-8)");
            }
            comps[j].mu = weighted_sum[j] / weight[j];
            comps[j].pi = weight[j] / static_cast<double>(n);
        }
    }

    std::sort(comps.begin(), comps.end(),
              [](const ExpComponent& a, const ExpComponent& b) { return a.mu < b.mu; });
    result.components = std::move(comps);
    return result;
}

// Quantile-split starting point: component j's mean is the mean of the j-th
// k-quantile chunk of the sorted durations, weights uniform.
inline ExpMixture quantile_init(std::span<const double> durations, int k) {
    if (k < 1) throw ParamError("quantile_init: k must be >= 1");
    if (durations.empty() || static_cast<std::size_t>(k) > durations.size()) {
        throw ParamError("quantile_init: need at least k observations");
    }
    std::vector<double> sorted(durations.begin(), durations.end());
    std::sort(sorted.begin(), sorted.end());
    ExpMixture init;
    const std::size_t n = sorted.size();
    for (int j = 0; j < k; ++j) {
        const std::size_t lo = n * static_cast<std::size_t>(j) / static_cast<std::size_t>(k);
        const std::size_t hi = n * static_cast<std::size_t>(j + 1) / static_cast<std::size_t>(k);
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += sorted[i];
        const double mu = (hi > lo) ? sum / static_cast<double>(hi - lo) : sorted[n / 2];
        init.components.push_back({std::max(mu, 1e-9), 1.0 / static_cast<double>(k)});
    }
    return init;
}

// Multi-restart driver: restart 0 uses the quantile split verbatim, the rest
// jitter it. Each restart gets a short exploratory run; the best short-run
// likelihood is then polished to full tolerance.
inline ExpMixture fit_exp_mixture_em(std::span<const double> durations, int k, std::uint64_t seed,
                                     double tol = 1e-12, int max_iter = 500, int restarts = 10) {
    const ExpMixture base = quantile_init(durations, k);
    RngStream rng(seed);
    ExpMixture best_short;
    bool have = false;
    std::string last_error = "no restarts ran";
    for (int r = 0; r < restarts; ++r) {
        ExpMixture init = base;
        if (r > 0) {
            for (auto& c : init.components) {
                c.mu *= std::exp(sample_normal(0.0, 0.5, rng));
            }
        }
        try {
            ExpMixture fit = fit_exp_mixture_em(durations, k, init, 1e-6, 30);
            if (!have || fit.log_likelihood > best_short.log_likelihood) {
                best_short = std::move(fit);
                have = true;
            }
        } catch (const NumericError& e) {
            last_error = e.what();
        }
    }
    if (!have) throw NumericError("fit_exp_mixture_em: all restarts failed: " + last_error);

    ExpMixture polish_init;
    polish_init.components = best_short.components;
    ExpMixture final_fit = fit_exp_mixture_em(durations, k, polish_init, tol, max_iter);
    // Stitch the exploratory trace onto the polished one (same parameter path).
    std::vector<double> trace = best_short.ll_trace;
    trace.insert(trace.end(), final_fit.ll_trace.begin(), final_fit.ll_trace.end());
    final_fit.ll_trace = std::move(trace);
    return final_fit;
}

struct MixtureOrderRow {
    int k = 0;
    bool ok = false;
    double log_likelihood = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::string error;
};

struct MixtureOrderResult {
    int best_k = 0;
    ExpMixture best_fit;
    std::vector<MixtureOrderRow> table;
};

// Fits each candidate k and scores with 2k-1 free parameters; BIC picks the
// order (ties go to the smaller k). Failed fits are recorded and skipped.
inline MixtureOrderResult select_mixture_order(std::span<const double> durations,
                                               const std::vector<int>& k_range,
                                               std::uint64_t seed, double tol = 1e-12,
                                               int max_iter = 500) {
    if (k_range.empty()) throw ParamError("select_mixture_order: empty k range");
    MixtureOrderResult result;
    const double log_n = std::log(static_cast<double>(durations.size()));
    bool have = false;
    double best_bic = 0.0;
    for (const int k : k_range) {
        MixtureOrderRow row;
        row.k = k;
        try {
            ExpMixture fit = fit_exp_mixture_em(durations, k,
                                                RngStream::derive_seed(seed, static_cast<std::uint64_t>(k)),
                                                tol, max_iter);
            const double free_params = 2.0 * k - 1.0;
            row.ok = true;
            row.log_likelihood = fit.log_likelihood;
            row.aic = 2.0 * free_params - 2.0 * fit.log_likelihood;
            row.bic = free_params * log_n - 2.0 * fit.log_likelihood;
            if (!have || row.bic < best_bic) {
                have = true;
                best_bic = row.bic;
                result.best_k = k;
                result.best_fit = fit;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        result.table.push_back(std::move(row));
    }
    if (!have) throw NumericError("select_mixture_order: every candidate order failed");
    return result;
}

// Unweighted density crossover of a two-component fit: the duration where the
// two exponential densities are equal.
inline double crossover_threshold(const ExpMixture& mixture) {
    if (mixture.components.size() != 2) {
        throw ParamError("crossover_threshold: need exactly two components");
    }
    double mu1 = mixture.components[0].mu;
    double mu2 = mixture.components[1].mu;
    if (mu1 > mu2) std::swap(mu1, mu2);
    if (!(mu1 > 0.0) || !(mu2 > 0.0) || mu1 == mu2) {
        throw NumericError("crossover_threshold: undefined for equal or degenerate means");
    }
    return std::log(mu2 / mu1) / (1.0 / mu1 - 1.0 / mu2);
}

// Chance that a non-simultaneous interarrival falls under the threshold.
inline double baseline_probability(double threshold_seconds, double mu_non) {
    if (threshold_seconds < 0.0) throw ParamError("baseline_probability: threshold must be >= 0");
    if (!(mu_non > 0.0)) throw ParamError("baseline_probability: mu_non must be > 0");
    return 1.0 - std::exp(-threshold_seconds / mu_non);
}

}  // namespace modkit::coord
