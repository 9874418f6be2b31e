// Command-line front door: simulation ensembles, intervention sweeps,
// coordinated link-sharing detection, and interrupted-time-series reports.
// All subcommands are batch file-to-file operations; fixed seeds make reruns
// byte-identical.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modkit/coord/detect.hpp"
#include "modkit/coord/events.hpp"
#include "modkit/coord/mixture.hpp"
#include "modkit/errors.hpp"
#include "modkit/its/report.hpp"
#include "modkit/its/series.hpp"
#include "modkit/sim/config.hpp"
#include "modkit/sim/ensemble.hpp"
#include "modkit/text.hpp"

namespace fs = std::filesystem;
using namespace modkit;

namespace {

constexpr std::uint64_t kDefaultSeed = 20201118;  // policy week, YYYYMMDD
constexpr double kReferenceNonSimultaneousMean = 227.45;  // seconds

// Exit codes: 0 ok, 2 usage, 3 data, 4 numeric failure.
enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

struct OutputSet {
    fs::path dir;
    std::vector<std::pair<fs::path, std::string>> files;

    void add(const std::string& name, std::string content) {
        files.emplace_back(dir / name, std::move(content));
    }

    // Everything is computed before anything lands on disk.
    void commit() const {
        fs::create_directories(dir);
        for (const auto& [path, content] : files) write_file(path.string(), content);
    }
};

std::string effective_config_echo(const sim::SimConfig& config) {
    return "# effective configuration\n" + sim::write_config(config);
}

std::string trajectory_table(const sim::EnsembleSummary& s) {
    std::string out =
        "week,posts_p05,posts_median,posts_p95,eng_p05,eng_median,eng_p95,"
        "moderators_median,demand_median,active_venues_median\n";
    for (std::size_t w = 0; w < s.weeks(); ++w) {
        out += std::to_string(w + 1);
        for (const double v : {s.posts_p05[w], s.posts_median[w], s.posts_p95[w], s.eng_p05[w],
                               s.eng_median[w], s.eng_p95[w], s.moderators_median[w],
                               s.demand_median[w], s.active_venues_median[w]}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

int cmd_simulate(const std::string& config_path, std::int64_t runs, std::uint64_t seed,
                 unsigned threads, const std::string& out_dir) {
    const auto config = sim::parse_config(read_file(config_path));
    const auto summary = sim::run_ensemble(config, runs, seed, threads);

    OutputSet out{out_dir, {}};
    out.add("trajectory.csv", trajectory_table(summary));
    out.add("config_echo.cfg", effective_config_echo(config));

    const std::size_t last = summary.weeks() - 1;
    std::string text;
    text += "runs: " + std::to_string(summary.n_runs) + "\n";
    text += "base_seed: " + std::to_string(summary.base_seed) + "\n";
    text += "weeks: " + std::to_string(summary.weeks()) + "\n";
    text += "final_week_posts_median: " + format_double(summary.posts_median[last]) + "\n";
    text += "final_week_engagements_median: " + format_double(summary.eng_median[last]) + "\n";
    text += "final_week_moderators_median: " + format_double(summary.moderators_median[last]) + "\n";
    text += "final_week_demand_median: " + format_double(summary.demand_median[last]) + "\n";
    text += "final_week_active_venues_median: " +
            format_double(summary.active_venues_median[last]) + "\n";
    out.add("summary.txt", text);
    out.commit();
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& interventions_path,
              std::int64_t runs, std::uint64_t seed, unsigned threads,
              const std::vector<std::int64_t>& weeks, const std::string& out_dir) {
    const auto config = sim::parse_config(read_file(config_path));

    std::vector<sim::Intervention> interventions;
    for (const auto& line : split(read_file(interventions_path), '\n')) {
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        interventions.push_back(sim::parse_intervention(text));
    }
    if (interventions.empty()) {
        throw DataError("interventions file lists no interventions: " + interventions_path);
    }

    // Common random numbers: every arm reuses the same per-run sub-streams.
    const auto baseline = sim::run_ensemble(config, runs, seed, threads);

    std::string table = "intervention";
    for (const auto w : weeks) table += ",posts_" + std::to_string(w);
    for (const auto w : weeks) table += ",eng_" + std::to_string(w);
    table += '\n';

    for (const auto& iv : interventions) {
        const auto treated_config = sim::apply_intervention(config, iv);
        const auto treated = sim::run_ensemble(treated_config, runs, seed, threads);
        const auto cells = sim::relative_effect(treated, baseline, weeks);
        table += sim::intervention_label(iv);
        for (const auto w : weeks) {
            table += ',';
            const auto& cell = cells.at(w);
            if (cell.posts_pct) table += format_double(*cell.posts_pct);
            else table += "undefined";
        }
        for (const auto w : weeks) {
            table += ',';
            const auto& cell = cells.at(w);
            if (cell.eng_pct) table += format_double(*cell.eng_pct);
            else table += "undefined";
        }
        table += '\n';
    }

    OutputSet out{out_dir, {}};
    out.add("sweep.csv", table);
    out.add("baseline_trajectory.csv", trajectory_table(baseline));
    out.add("config_echo.cfg", effective_config_echo(config));
    out.commit();
    return kOk;
}

int cmd_detect(const std::string& events_path, int k_max, double threshold_override, double p0_override,
               double alpha, std::uint64_t seed, bool keep_url_query, const std::string& out_dir) {
    const auto events = coord::parse_share_events(read_file(events_path), !keep_url_query);
    const auto deltas = coord::interarrival_times(events);
    const auto durations = coord::durations_for_fitting(deltas);
    if (durations.size() < 2) {
        throw DataError("need at least 2 interarrival observations; got " +
                        std::to_string(durations.size()));
    }

    std::string summary;
    double threshold = threshold_override;
    double p0 = p0_override;
    const bool fit_needed = !(threshold > 0.0);

    if (fit_needed) {
        std::vector<int> k_range;
        for (int k = 1; k <= k_max; ++k) k_range.push_back(k);
        const auto order = coord::select_mixture_order(durations, k_range, seed);

        summary += "order_table:\n";
        summary += "  k,log_likelihood,aic,bic\n";
        for (const auto& row : order.table) {
            summary += "  " + std::to_string(row.k) + ",";
            if (row.ok) {
                summary += format_double(row.log_likelihood) + "," + format_double(row.aic) +
                           "," + format_double(row.bic);
            } else {
                summary += "failed: " + row.error;
            }
            summary += '\n';
        }
        summary += "best_k: " + std::to_string(order.best_k) + "\n";

        // The near-simultaneity threshold needs the two-component split.
        coord::ExpMixture two = (order.best_k == 2)
                                    ? order.best_fit
                                    : coord::fit_exp_mixture_em(durations, 2, seed);
        if (order.best_k != 2) {
            summary += "note: threshold derived from a two-component refit\n";
        }
        threshold = coord::crossover_threshold(two);
        if (!(p0 > 0.0)) p0 = coord::baseline_probability(threshold, two.components[1].mu);
        summary += "components:\n";
        summary += "  mu,pi\n";
        for (const auto& c : two.components) {
            summary += "  " + format_double(c.mu) + "," + format_double(c.pi) + "\n";
        }
    } else {
        summary += "threshold_override: true\n";
        if (!(p0 > 0.0)) {
            p0 = coord::baseline_probability(threshold, kReferenceNonSimultaneousMean);
            summary += "p0_from_reference_mean: " +
                       format_double(kReferenceNonSimultaneousMean) + "\n";
        }
    }

    summary += "threshold_seconds: " + format_double(threshold) + "\n";
    summary += "p0: " + format_double(p0) + "\n";
    summary += "alpha: " + format_double(alpha) + "\n";
    summary += "interarrivals: " + std::to_string(durations.size()) + "\n";

    const auto edges = coord::detect_coordination(events, threshold, p0, alpha);
    std::string edge_table = "venue_a,venue_b,n_pairs,k_near,p_value,significant\n";
    std::vector<coord::CoordinationEdge> significant;
    for (const auto& e : edges) {
        edge_table += e.venue_a + "," + e.venue_b + "," + std::to_string(e.n_pairs) + "," +
                      std::to_string(e.k_near) + "," + format_double(e.p_value) + "," +
                      (e.significant ? "1" : "0") + "\n";
        if (e.significant) significant.push_back(e);
    }

    std::set<std::string> venue_set;
    for (const auto& e : events) venue_set.insert(e.venue_id);
    const std::vector<std::string> venues(venue_set.begin(), venue_set.end());
    const auto clusters = coord::connected_components(significant, venues);
    std::string component_table = "component_id,venue_id\n";
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (const auto& v : clusters[c]) {
            component_table += std::to_string(c) + "," + v + "\n";
        }
    }
    summary += "significant_edges: " + std::to_string(significant.size()) + "\n";
    summary += "components: " + std::to_string(clusters.size()) + "\n";

    OutputSet out{out_dir, {}};
    out.add("mixture_summary.txt", summary);
    out.add("edges.csv", edge_table);
    out.add("components.csv", component_table);
    out.commit();
    return kOk;
}

int cmd_its(const std::string& series_path, const std::string& policy_date,
            const std::string& transform, int max_p, int max_q, double level,
            const std::string& out_dir) {
    its::ItsOptions options;
    options.transform = its::parse_transform(transform);
    options.max_p = max_p;
    options.max_q = max_q;
    options.level = level;
    options.policy_date = Date::parse(policy_date);

    const auto series = its::parse_weekly_series(read_file(series_path),
                                                 fs::path(series_path).stem().string());
    // The CLI contract asks for a real pre-policy window up front.
    std::size_t pre_weeks = 0;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (series.date_of(i) < options.policy_date) ++pre_weeks;
    }
    if (pre_weeks < 20) throw DataError("need at least 20 pre-policy weeks in the series");

    const auto report = its::run_its(series, options);

    OutputSet out{out_dir, {}};
    out.add("report.txt", its::render_report(report, series.label));
    out.add("bands.csv", its::render_band_table(report));
    out.commit();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moderation-dynamics toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a seeded simulation ensemble");
    std::string sim_config, sim_out;
    std::int64_t sim_runs = 500;
    std::uint64_t sim_seed = kDefaultSeed;
    unsigned sim_threads = 0;
    simulate->add_option("--config", sim_config, "simulation config file")->required();
    simulate->add_option("--runs", sim_runs, "ensemble size");
    simulate->add_option("--seed", sim_seed, "base seed");
    simulate->add_option("--threads", sim_threads, "worker threads (0 = auto)");
    simulate->add_option("--out", sim_out, "output directory")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "compare interventions against a baseline");
    std::string sweep_config, sweep_interventions, sweep_out;
    std::int64_t sweep_runs = 500;
    std::uint64_t sweep_seed = kDefaultSeed;
    unsigned sweep_threads = 0;
    std::vector<std::int64_t> sweep_weeks = {60, 90, 119};
    sweep->add_option("--config", sweep_config, "baseline config file")->required();
    sweep->add_option("--interventions", sweep_interventions, "intervention list file")->required();
    sweep->add_option("--runs", sweep_runs, "ensemble size per arm");
    sweep->add_option("--seed", sweep_seed, "base seed (shared across arms)");
    sweep->add_option("--threads", sweep_threads, "worker threads (0 = auto)");
    sweep->add_option("--weeks", sweep_weeks, "report weeks")->delimiter(',');
    sweep->add_option("--out", sweep_out, "output directory")->required();

    // detect
    auto* detect = app.add_subcommand("detect", "detect coordinated link sharing");
    std::string detect_events, detect_out;
    int detect_kmax = 4;
    double detect_threshold = -1.0, detect_p0 = -1.0, detect_alpha = 0.05;
    std::uint64_t detect_seed = kDefaultSeed;
    bool detect_keep_query = false;
    detect->add_option("--events", detect_events, "share events file")->required();
    detect->add_option("--k-max", detect_kmax, "largest mixture order to try")
        ->check(CLI::Range(1, 10));
    detect->add_option("--threshold", detect_threshold,
                       "near-simultaneity threshold in seconds (bypasses fitting)");
    detect->add_option("--p0", detect_p0, "baseline near-simultaneity probability");
    detect->add_option("--alpha", detect_alpha, "family-wise significance level");
    detect->add_option("--seed", detect_seed, "seed for fit restarts");
    detect->add_flag("--keep-url-query", detect_keep_query,
                     "keep URL query strings and fragments");
    detect->add_option("--out", detect_out, "output directory")->required();

    // its
    auto* its_cmd = app.add_subcommand("its", "interrupted time series report");
    std::string its_series, its_policy, its_transform = "none", its_out;
    int its_max_p = 5, its_max_q = 5;
    double its_level = 0.90;
    its_cmd->add_option("--series", its_series, "weekly series file")->required();
    its_cmd->add_option("--policy-date", its_policy, "policy date YYYY-MM-DD")->required();
    its_cmd->add_option("--transform", its_transform, "log, logit, or none");
    its_cmd->add_option("--max-p", its_max_p, "largest AR order")->check(CLI::Range(0, 5));
    its_cmd->add_option("--max-q", its_max_q, "largest MA order")->check(CLI::Range(0, 5));
    its_cmd->add_option("--level", its_level, "projection band level");
    its_cmd->add_option("--out", its_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(sim_config, sim_runs, sim_seed, sim_threads, sim_out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_config, sweep_interventions, sweep_runs, sweep_seed,
                             sweep_threads, sweep_weeks, sweep_out);
        }
        if (detect->parsed()) {
            return cmd_detect(detect_events, detect_kmax, detect_threshold, detect_p0,
                              detect_alpha, detect_seed, detect_keep_query, detect_out);
        }
        if (its_cmd->parsed()) {
            return cmd_its(its_series, its_policy, its_transform, its_max_p, its_max_q,
                           its_level, its_out);
        }
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kNumeric;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kData;
    } catch (const ParamError& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return kData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumeric;
    }
    return kUsage;
}
