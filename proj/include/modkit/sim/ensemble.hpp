#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "modkit/sim/engine.hpp"
#include "modkit/stats.hpp"

namespace modkit::sim {

// Per-week 5th/50th/95th percentiles across runs.
struct EnsembleSummary {
    std::int64_t n_runs = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> posts_p05, posts_median, posts_p95;
    std::vector<double> eng_p05, eng_median, eng_p95;
    std::vector<double> moderators_median, demand_median, active_venues_median;

    std::size_t weeks() const { return posts_median.size(); }
};

namespace detail {

inline void percentile_rows(const std::vector<std::vector<double>>& per_run, std::size_t weeks,
                            std::vector<double>& p05, std::vector<double>& p50,
                            std::vector<double>& p95) {
    p05.resize(weeks);
    p50.resize(weeks);
    p95.resize(weeks);
    std::vector<double> column(per_run.size());
    for (std::size_t w = 0; w < weeks; ++w) {
        for (std::size_t r = 0; r < per_run.size(); ++r) column[r] = per_run[r][w];
        std::sort(column.begin(), column.end());
        p05[w] = quantile_sorted(column, 0.05);
        p50[w] = quantile_sorted(column, 0.50);
        p95[w] = quantile_sorted(column, 0.95);
    }
}

}  // namespace detail

// Runs n_runs independent replicates on sub-streams derived from
// (base_seed, run_index) and summarizes them. Replicates execute in parallel;
// the reduction is order-independent.
inline EnsembleSummary run_ensemble(const SimConfig& config, std::int64_t n_runs,
                                    std::uint64_t base_seed, unsigned n_threads = 0) {
    if (n_runs < 1) throw ParamError("run_ensemble: n_runs must be >= 1");
    validate(config);
    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_runs));

    std::vector<Trajectory> runs(static_cast<std::size_t>(n_runs));
    auto worker = [&](unsigned tid) {
        for (std::int64_t i = tid; i < n_runs; i += n_threads) {
            runs[static_cast<std::size_t>(i)] =
                run(config, RngStream::derive_seed(base_seed, static_cast<std::uint64_t>(i)));
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    const std::size_t weeks = static_cast<std::size_t>(config.t_max);
    EnsembleSummary s;
    s.n_runs = n_runs;
    s.base_seed = base_seed;

    auto field = [&](auto member) {
        std::vector<std::vector<double>> rows;
        rows.reserve(runs.size());
        for (const auto& r : runs) rows.push_back(r.*member);
        return rows;
    };
    detail::percentile_rows(field(&Trajectory::posts), weeks, s.posts_p05, s.posts_median, s.posts_p95);
    detail::percentile_rows(field(&Trajectory::engagements), weeks, s.eng_p05, s.eng_median, s.eng_p95);
    std::vector<double> lo, hi;
    detail::percentile_rows(field(&Trajectory::moderators), weeks, lo, s.moderators_median, hi);
    detail::percentile_rows(field(&Trajectory::demand), weeks, lo, s.demand_median, hi);
    detail::percentile_rows(field(&Trajectory::active_venues), weeks, lo, s.active_venues_median, hi);
    return s;
}

struct EffectCell {
    std::optional<double> posts_pct;  // empty when the baseline median is zero
    std::optional<double> eng_pct;
};

// Percent change of treated vs baseline medians at the requested weeks
// (1-based week indices).
inline std::map<std::int64_t, EffectCell> relative_effect(const EnsembleSummary& treated,
                                                          const EnsembleSummary& baseline,
                                                          const std::vector<std::int64_t>& weeks) {
    if (treated.weeks() != baseline.weeks()) {
        throw ParamError("relative_effect: summaries cover different horizons");
    }
    std::map<std::int64_t, EffectCell> out;
    for (const std::int64_t week : weeks) {
        if (week < 1 || static_cast<std::size_t>(week) > baseline.weeks()) {
            throw ParamError("relative_effect: week out of range");
        }
        const std::size_t i = static_cast<std::size_t>(week - 1);
        EffectCell cell;
        if (baseline.posts_median[i] != 0.0) {
            cell.posts_pct = 100.0 * (treated.posts_median[i] - baseline.posts_median[i]) /
                             baseline.posts_median[i];
        }
        if (baseline.eng_median[i] != 0.0) {
            cell.eng_pct = 100.0 * (treated.eng_median[i] - baseline.eng_median[i]) /
                           baseline.eng_median[i];
        }
        out[week] = cell;
    }
    return out;
}

}  // namespace modkit::sim
