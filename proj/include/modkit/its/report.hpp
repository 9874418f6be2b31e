#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modkit/its/adf.hpp"
#include "modkit/its/arima.hpp"
#include "modkit/its/forecast.hpp"
#include "modkit/its/series.hpp"

namespace modkit::its {

struct ItsOptions {
    Transform transform = Transform::Identity;
    int max_p = 5;
    int max_q = 5;
    double level = 0.90;
    Date policy_date;
    int max_d = 2;
    double adf_alpha = 0.05;
};

struct BandRow {
    Date week;
    std::optional<double> observed;  // original scale
    double mean = 0.0;               // original scale
    double lo = 0.0;
    double hi = 0.0;
    std::optional<bool> inside;  // unset when the observation is missing
};

struct ItsReport {
    ArimaSpec spec;
    ArimaFit fit;
    int d_selected = 0;
    std::vector<AdfResult> adf_trail;  // one entry per differencing round tried
    Forecast projection;               // transformed scale
    GofResult gof;
    PercentChange pct;
    std::vector<BandRow> bands;  // post-policy weeks
    std::size_t pre_fit_start = 0;
    std::size_t pre_fit_length = 0;
    std::size_t post_start = 0;
};

// The whole interrupted-time-series pipeline: transform, ADF-driven
// differencing, AICc order search on the pre-policy window, counterfactual
// projection across the post-policy window, chi-square fit against it, and the
// average percent difference on the original scale.
inline ItsReport run_its(const WeeklySeries& series, const ItsOptions& options) {
    const std::size_t weeks = series.values.size();
    if (weeks == 0) throw DataError("run_its: empty series");
    if (options.policy_date <= series.start_date) {
        throw DataError("run_its: policy date precedes the series start");
    }

    // First week at or after the policy date.
    std::size_t post_start = weeks;
    for (std::size_t i = 0; i < weeks; ++i) {
        if (series.date_of(i) >= options.policy_date) {
            post_start = i;
            break;
        }
    }
    if (post_start == 0) throw DataError("run_its: no pre-policy weeks");
    if (post_start >= weeks) throw DataError("run_its: no post-policy weeks");

    const WeeklySeries transformed = preprocess(series, options.transform);

    bool any_post = false;
    for (std::size_t i = post_start; i < weeks; ++i) {
        if (transformed.values[i]) any_post = true;
    }
    if (!any_post) throw DataError("run_its: post-policy segment is entirely missing");

    const auto [run_start, run_len] =
        longest_contiguous_run(transformed.values, 0, post_start);
    if (run_len < 20) {
        throw DataError("run_its: need at least 20 contiguous non-missing pre-policy weeks");
    }

    std::vector<double> pre(run_len);
    for (std::size_t i = 0; i < run_len; ++i) pre[i] = *transformed.values[run_start + i];

    ItsReport report;
    report.pre_fit_start = run_start;
    report.pre_fit_length = run_len;
    report.post_start = post_start;

    // Difference until the ADF test rejects a unit root.
    int d = 0;
    std::vector<double> probe = pre;
    for (; d <= options.max_d; ++d) {
        const auto adf = adf_test(probe);
        report.adf_trail.push_back(adf);
        if (adf.p_value <= options.adf_alpha || d == options.max_d) break;
        probe = difference(probe, 1);
    }
    report.d_selected = d;

    auto selection = select_order(pre, options.max_p, options.max_q, d);
    report.spec = selection.spec;
    report.fit = std::move(selection.fit);

    // Project from the end of the fitted run across every remaining week.
    const std::size_t origin_end = run_start + run_len;  // first unfit index
    const std::size_t horizon = weeks - origin_end;
    if (horizon == 0) throw DataError("run_its: nothing to project");
    report.projection = forecast(report.fit, pre, horizon, options.level);

    // Post-policy observations on the transformed scale, aligned to horizons.
    std::vector<std::optional<double>> post_transformed;
    std::vector<std::optional<double>> post_raw;
    std::vector<double> post_pred_raw;
    for (std::size_t i = post_start; i < weeks; ++i) {
        const std::size_t h = i - origin_end;
        post_transformed.push_back(transformed.values[i]);
        post_raw.push_back(series.values[i]);
        post_pred_raw.push_back(inverse_transform(report.projection.mean[h], options.transform));
    }
    // Horizons before the policy week (gap weeks) are not evaluated.
    Forecast post_projection;
    post_projection.level = report.projection.level;
    post_projection.z = report.projection.z;
    for (std::size_t i = post_start; i < weeks; ++i) {
        const std::size_t h = i - origin_end;
        post_projection.mean.push_back(report.projection.mean[h]);
        post_projection.se.push_back(report.projection.se[h]);
    }

    report.gof = chi_square_gof(post_transformed, post_projection);
    report.pct = percent_change(post_raw, post_pred_raw);

    for (std::size_t i = post_start; i < weeks; ++i) {
        const std::size_t h = i - origin_end;
        BandRow row;
        row.week = series.date_of(i);
        row.observed = series.values[i];
        row.mean = inverse_transform(report.projection.mean[h], options.transform);
        row.lo = inverse_transform(report.projection.lo(h), options.transform);
        row.hi = inverse_transform(report.projection.hi(h), options.transform);
        if (transformed.values[i]) {
            const double v = *transformed.values[i];
            row.inside = v >= report.projection.lo(h) && v <= report.projection.hi(h);
        }
        report.bands.push_back(row);
    }
    return report;
}

// Text report in the shape of a fitted-model table: term, coefficient,
// standard error, then the fit statistics.
inline std::string render_report(const ItsReport& report, const std::string& label) {
    std::ostringstream out;
    out << "series: " << label << "\n";
    out << "model: ARIMA(" << report.spec.p << "," << report.spec.d << "," << report.spec.q
        << ")" << (report.spec.with_intercept ? " with intercept" : "") << "\n";
    out << "pre-policy fit window: weeks " << report.pre_fit_start << ".."
        << (report.pre_fit_start + report.pre_fit_length - 1) << " (" << report.pre_fit_length
        << " weeks)\n";
    for (std::size_t i = 0; i < report.adf_trail.size(); ++i) {
        const auto& adf = report.adf_trail[i];
        out << "adf d=" << i << ": stat " << format_double(adf.statistic) << ", p "
            << format_double(adf.p_value) << ", lags " << adf.lags << "\n";
    }
    out << "\nterm,coef,std_err\n";
    std::size_t se_at = 0;
    const auto se_text = [&](std::size_t idx) -> std::string {
        if (idx >= report.fit.coef_std_err.size() || !std::isfinite(report.fit.coef_std_err[idx])) {
            return "";
        }
        return format_double(report.fit.coef_std_err[idx]);
    };
    if (report.spec.with_intercept) {
        out << "intercept," << format_double(report.fit.intercept) << "," << se_text(se_at) << "\n";
        ++se_at;
    }
    for (int i = 0; i < report.spec.p; ++i, ++se_at) {
        out << "ar.L" << (i + 1) << "," << format_double(report.fit.ar[static_cast<std::size_t>(i)])
            << "," << se_text(se_at) << "\n";
    }
    for (int j = 0; j < report.spec.q; ++j, ++se_at) {
        out << "ma.L" << (j + 1) << "," << format_double(report.fit.ma[static_cast<std::size_t>(j)])
            << "," << se_text(se_at) << "\n";
    }
    out << "sigma2," << format_double(report.fit.sigma2) << ",\n";
    out << "\naicc," << format_double(report.fit.aicc) << "\n";
    out << "chi2," << format_double(report.gof.chi2) << "\n";
    out << "dof," << report.gof.dof << "\n";
    out << "p_value," << format_double(report.gof.p_value) << "\n";
    out << "percent_change," << format_double(report.pct.mean_pct) << "\n";
    out << "percent_change_weeks_used," << report.pct.n_used << "\n";
    out << "percent_change_weeks_excluded," << report.pct.n_excluded << "\n";
    int inside = 0, outside = 0;
    for (const auto& row : report.bands) {
        if (row.inside.has_value()) (*row.inside ? inside : outside) += 1;
    }
    out << "weeks_inside_band," << inside << "\n";
    out << "weeks_outside_band," << outside << "\n";
    return out.str();
}

inline std::string render_band_table(const ItsReport& report) {
    std::string out = "week,observed,mean,lo90,hi90,inside_band\n";
    for (const auto& row : report.bands) {
        out += row.week.to_string();
        out += ',';
        if (row.observed) out += format_double(*row.observed);
        out += ',';
        out += format_double(row.mean);
        out += ',';
        out += format_double(row.lo);
        out += ',';
        out += format_double(row.hi);
        out += ',';
        if (row.inside.has_value()) out += (*row.inside ? "1" : "0");
        out += '\n';
    }
    return out;
}

}  // namespace modkit::its
