#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "modkit/distributions.hpp"
#include "modkit/its/arima.hpp"
#include "modkit/rng.hpp"
#include "modkit/stats.hpp"

using namespace modkit;
using namespace modkit::its;

namespace {

std::vector<double> simulate_arma(int n, double c, std::vector<double> phi,
                                  std::vector<double> theta, double sigma, RngStream& rng,
                                  int burn = 100) {
    std::vector<double> x, e;
    const int total = n + burn;
    x.reserve(total);
    e.reserve(total);
    for (int t = 0; t < total; ++t) {
        const double innov = sample_normal(0.0, sigma, rng);
        double v = c + innov;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            if (t > static_cast<int>(i)) v += phi[i] * x[t - 1 - i];
        }
        for (std::size_t j = 0; j < theta.size(); ++j) {
            if (t > static_cast<int>(j)) v += theta[j] * e[t - 1 - j];
        }
        x.push_back(v);
        e.push_back(innov);
    }
    return { x.end() - n, x.end() };
}

}  // namespace

TEST_CASE("white-noise spec has closed-form estimates") {
    RngStream rng(1);
    std::vector<double> x;
    for (int i = 0; i < 400; ++i) x.push_back(sample_normal(3.0, 2.0, rng));
    const auto fit = fit_arima(x, ArimaSpec{0, 0, 0, true});
    CHECK(fit.intercept == Catch::Approx(mean(x)).epsilon(1e-12));
    CHECK(fit.sigma2 == Catch::Approx(population_variance(x)).epsilon(1e-12));
    CHECK(fit.n_effective == 400);
}

TEST_CASE("AR(1) coefficient recovery") {
    int inside = 0;
    for (int rep = 0; rep < 100; ++rep) {
        RngStream rng(RngStream::derive_seed(505, rep));
        const auto x = simulate_arma(500, 0.0, {0.7}, {}, 1.0, rng);
        const auto fit = fit_arima(x, ArimaSpec{1, 0, 0, true});
        if (fit.ar[0] >= 0.60 && fit.ar[0] <= 0.80) ++inside;
    }
    CHECK(inside >= 95);
}

TEST_CASE("MA(1) coefficient recovery") {
    int inside = 0;
    for (int rep = 0; rep < 100; ++rep) {
        RngStream rng(RngStream::derive_seed(606, rep));
        const auto x = simulate_arma(500, 0.0, {}, {0.5}, 1.0, rng);
        const auto fit = fit_arima(x, ArimaSpec{0, 0, 1, true});
        if (fit.ma[0] >= 0.35 && fit.ma[0] <= 0.65) ++inside;
    }
    CHECK(inside >= 95);
}

TEST_CASE("estimated AR and MA polynomials stay stationary and invertible") {
    RngStream rng(707);
    for (int rep = 0; rep < 10; ++rep) {
        const auto x = simulate_arma(300, 0.5, {0.5, 0.2}, {0.4}, 1.0, rng);
        const auto fit = fit_arima(x, ArimaSpec{2, 0, 1, true});
        // Stationarity check via the companion recursion: the impulse response
        // must decay.
        std::vector<double> psi = {1.0};
        for (int j = 1; j <= 200; ++j) {
            double v = 0.0;
            for (std::size_t i = 0; i < fit.ar.size(); ++i) {
                if (j > static_cast<int>(i)) v += fit.ar[i] * psi[j - 1 - i];
            }
            psi.push_back(v);
        }
        CHECK(std::fabs(psi.back()) < 1.0);
    }
}

TEST_CASE("fit on a differenced random walk recovers the drift") {
    RngStream rng(808);
    std::vector<double> x(400);
    double level = 10.0;
    for (auto& v : x) {
        level += 0.4 + sample_normal(0.0, 1.0, rng);
        v = level;
    }
    const auto fit = fit_arima(x, ArimaSpec{0, 1, 0, true});
    CHECK(fit.intercept == Catch::Approx(0.4).margin(0.15));
}

TEST_CASE("the optimizer never worsens the zero-start objective") {
    RngStream rng(909);
    for (int rep = 0; rep < 10; ++rep) {
        const auto x = simulate_arma(300, 0.0, {0.6}, {0.3}, 1.0, rng);
        const auto w = x;  // d = 0
        const auto fit = fit_arima(x, ArimaSpec{1, 0, 1, true});
        double w_mean = 0.0;
        for (const double v : w) w_mean += v;
        w_mean /= static_cast<double>(w.size());
        const std::vector<double> zero = {0.0};
        const double start_css =
            modkit::its::detail::css_objective(w, w_mean, zero, zero, nullptr);
        CHECK(fit.css <= start_css + 1e-9);
    }
}

TEST_CASE("too-short series and bad orders are rejected") {
    std::vector<double> x(12, 1.0);
    CHECK_THROWS_AS(fit_arima(x, ArimaSpec{1, 0, 1, true}), DataError);
    std::vector<double> y(100, 1.0);
    CHECK_THROWS_AS(fit_arima(y, ArimaSpec{-1, 0, 0, true}), ParamError);
}

TEST_CASE("AICc prefers white noise over spurious structure") {
    // The true (0,0) selection rate of an exhaustive AICc grid on white noise
    // is about 74% on a 1x1 grid (both here and in reference toolkits); this
    // guards against regressions rather than asserting an optimistic rate.
    int correct = 0;
    for (int rep = 0; rep < 100; ++rep) {
        RngStream rng(RngStream::derive_seed(1010, rep));
        std::vector<double> x;
        for (int i = 0; i < 300; ++i) x.push_back(sample_normal(0.0, 1.0, rng));
        const auto sel = select_order(x, 1, 1, 0);
        if (sel.spec.p == 0 && sel.spec.q == 0) ++correct;
    }
    CHECK(correct >= 65);
}

TEST_CASE("AICc finds the AR(2) signal") {
    int good = 0;
    for (int rep = 0; rep < 100; ++rep) {
        RngStream rng(RngStream::derive_seed(1111, rep));
        const auto x = simulate_arma(500, 0.0, {0.5, 0.3}, {}, 1.0, rng);
        const auto sel = select_order(x, 3, 2, 0);
        if (sel.spec.p >= 2 && sel.spec.q <= 2) ++good;
    }
    CHECK(good >= 70);
}

TEST_CASE("AICc exceeds AIC whenever the penalty applies") {
    RngStream rng(1212);
    const auto x = simulate_arma(120, 0.0, {0.4}, {}, 1.0, rng);
    for (int p = 0; p <= 2; ++p) {
        for (int q = 0; q <= 2; ++q) {
            const auto fit = fit_arima(x, ArimaSpec{p, 0, q, true});
            CHECK(fit.aicc > fit.aic);
        }
    }
}
