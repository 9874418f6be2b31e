#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "modkit/coord/mixture.hpp"
#include "modkit/distributions.hpp"
#include "modkit/rng.hpp"
#include "modkit/stats.hpp"

using namespace modkit;
using namespace modkit::coord;

namespace {

std::vector<double> draw_two_component(std::size_t n, double pi1, double mu1, double mu2,
                                       RngStream& rng) {
    std::vector<double> xs;
    xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = (rng.next_double() < pi1) ? mu1 : mu2;
        xs.push_back(sample_exponential(mu, rng));
    }
    return xs;
}

}  // namespace

TEST_CASE("k=1 EM reduces to the analytic exponential MLE") {
    RngStream rng(5);
    std::vector<double> xs;
    for (int i = 0; i < 5000; ++i) xs.push_back(sample_exponential(42.0, rng));
    const auto fit = fit_exp_mixture_em(xs, 1, 99u);
    REQUIRE(fit.components.size() == 1);
    CHECK(fit.components[0].mu == Catch::Approx(mean(xs)).epsilon(1e-12));
    CHECK(fit.components[0].pi == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("EM recovers the two-component generating law") {
    RngStream rng(31337);
    const auto xs = draw_two_component(90000, 0.70, 10.0, 227.0, rng);
    const auto fit = fit_exp_mixture_em(xs, 2, 7u);
    REQUIRE(fit.components.size() == 2);
    CHECK(fit.components[0].mu == Catch::Approx(10.0).epsilon(0.05));
    CHECK(fit.components[1].mu == Catch::Approx(227.0).epsilon(0.05));
    CHECK(fit.components[0].pi == Catch::Approx(0.70).margin(0.02));
    CHECK(fit.components[1].pi == Catch::Approx(0.30).margin(0.02));
    CHECK(std::fabs(fit.components[0].pi + fit.components[1].pi - 1.0) < 1e-9);
}

TEST_CASE("log-likelihood is non-decreasing for random inits on random data") {
    RngStream rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xs;
        const std::size_t n = 200 + rng.next_below(400);
        for (std::size_t i = 0; i < n; ++i) {
            xs.push_back(sample_exponential(sample_uniform(1.0, 300.0, rng), rng));
        }
        ExpMixture init;
        init.components = {{sample_uniform(0.5, 50.0, rng), 0.5},
                           {sample_uniform(50.0, 400.0, rng), 0.5}};
        try {
            const auto fit = fit_exp_mixture_em(xs, 2, init, 1e-10, 200);
            for (std::size_t i = 1; i < fit.ll_trace.size(); ++i) {
                REQUIRE(fit.ll_trace[i] >= fit.ll_trace[i - 1] - 1e-9);
            }
        } catch (const NumericError&) {
            // collapse is a legal outcome on unlucky draws; nothing to assert
        }
    }
}

TEST_CASE("EM rejects bad inputs") {
    std::vector<double> xs = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_exp_mixture_em(std::vector<double>{}, 1, 1u), ParamError);
    CHECK_THROWS_AS(fit_exp_mixture_em(xs, 4, 1u), ParamError);
    CHECK_THROWS_AS(fit_exp_mixture_em(xs, 0, 1u), ParamError);
    std::vector<double> with_zero = {1.0, 0.0, 3.0};
    CHECK_THROWS_AS(fit_exp_mixture_em(with_zero, 1, 1u), ParamError);
}

TEST_CASE("BIC selects one component on single-exponential data") {
    int correct = 0;
    for (int rep = 0; rep < 20; ++rep) {
        RngStream rng(RngStream::derive_seed(808, rep));
        std::vector<double> xs;
        for (int i = 0; i < 10000; ++i) xs.push_back(sample_exponential(50.0, rng));
        const auto sel = select_mixture_order(xs, {1, 2, 3}, RngStream::derive_seed(909, rep));
        if (sel.best_k == 1) ++correct;
    }
    CHECK(correct >= 19);
}

TEST_CASE("BIC selects two components on the two-component law") {
    RngStream rng(515);
    const auto xs = draw_two_component(90000, 0.70, 10.0, 227.0, rng);
    const auto sel = select_mixture_order(xs, {1, 2, 3, 4}, 1234u);
    CHECK(sel.best_k == 2);
    // AIC and BIC differ by exactly (ln n - 2) * k' for every fitted order.
    const double log_n = std::log(static_cast<double>(xs.size()));
    for (const auto& row : sel.table) {
        if (!row.ok) continue;
        const double kp = 2.0 * row.k - 1.0;
        CHECK(row.bic - row.aic == Catch::Approx((log_n - 2.0) * kp).margin(1e-7));
    }
}

TEST_CASE("crossover threshold closed form and symmetry") {
    ExpMixture m;
    m.components = {{9.95, 0.7}, {227.45, 0.3}};
    const double t = crossover_threshold(m);
    CHECK(t == Catch::Approx(32.56).margin(0.01));

    ExpMixture swapped;
    swapped.components = {{227.45, 0.3}, {9.95, 0.7}};
    CHECK(crossover_threshold(swapped) == Catch::Approx(t).epsilon(1e-12));

    // Below the crossover the fast component's density dominates; above, the
    // slow one does.
    const auto density = [](double mu, double x) { return std::exp(-x / mu) / mu; };
    for (double x = 1.0; x < t; x += 1.0) {
        CHECK(density(9.95, x) > density(227.45, x));
    }
    for (double x = t + 0.5; x < 200.0; x += 1.0) {
        CHECK(density(9.95, x) < density(227.45, x));
    }

    ExpMixture degenerate;
    degenerate.components = {{10.0, 0.5}, {10.0, 0.5}};
    CHECK_THROWS_AS(crossover_threshold(degenerate), NumericError);
}

TEST_CASE("baseline probability from the exponential CDF") {
    const double t = std::log(227.45 / 9.95) / (1.0 / 9.95 - 1.0 / 227.45);
    CHECK(baseline_probability(t, 227.45) == Catch::Approx(0.1334).margin(0.0005));
    CHECK(baseline_probability(0.0, 227.45) == 0.0);
    CHECK(baseline_probability(2274.5, 227.45) > 0.9999);
    CHECK_THROWS_AS(baseline_probability(-1.0, 227.45), ParamError);
    CHECK_THROWS_AS(baseline_probability(10.0, 0.0), ParamError);
}

TEST_CASE("scale equivariance of the mixture pipeline") {
    RngStream rng(616);
    auto xs = draw_two_component(20000, 0.70, 10.0, 227.0, rng);
    const auto fit1 = fit_exp_mixture_em(xs, 2, 42u);
    const double t1 = crossover_threshold(fit1);
    const double p1 = baseline_probability(t1, fit1.components[1].mu);

    const double c = 3.75;
    for (auto& x : xs) x *= c;
    const auto fit2 = fit_exp_mixture_em(xs, 2, 42u);
    const double t2 = crossover_threshold(fit2);
    const double p2 = baseline_probability(t2, fit2.components[1].mu);

    CHECK(fit2.components[0].mu == Catch::Approx(c * fit1.components[0].mu).epsilon(1e-4));
    CHECK(fit2.components[1].mu == Catch::Approx(c * fit1.components[1].mu).epsilon(1e-4));
    CHECK(fit2.components[0].pi == Catch::Approx(fit1.components[0].pi).margin(1e-6));
    CHECK(t2 == Catch::Approx(c * t1).epsilon(1e-4));
    CHECK(p2 == Catch::Approx(p1).margin(1e-9));

    const auto sel1 = select_mixture_order(std::vector<double>(xs.begin(), xs.end()), {1, 2, 3}, 5u);
    CHECK(sel1.best_k == 2);
}
