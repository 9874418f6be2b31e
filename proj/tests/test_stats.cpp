#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "modkit/stats.hpp"

using namespace modkit;

namespace {

// Exact upper tail for even dof: Q(x; 2m) = exp(-x/2) * sum_{j<m} (x/2)^j / j!.
double chi2_sf_even_dof_oracle(double x, int dof) {
    REQUIRE(dof % 2 == 0);
    const int m = dof / 2;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int j = 1; j < m; ++j) {
        term *= static_cast<long double>(x) / 2.0L / static_cast<long double>(j);
        sum += term;
    }
    return static_cast<double>(std::exp(-static_cast<long double>(x) / 2.0L) * sum);
}

// Multiplicative-recurrence binomial tail in long double.
double binomial_sf_oracle(std::int64_t k, std::int64_t n, double p) {
    const long double lp = p;
    const long double lq = 1.0L - lp;
    long double term = std::pow(lq, static_cast<long double>(n));  // P(X = 0)
    long double sum = (k <= 0) ? term : 0.0L;
    for (std::int64_t i = 0; i < n; ++i) {
        term *= static_cast<long double>(n - i) / static_cast<long double>(i + 1) * lp / lq;
        if (i + 1 >= k) sum += term;
    }
    return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("90% band multiplier") {
    CHECK(normal_quantile(0.95) == Catch::Approx(1.6449).margin(0.0001));
    CHECK(normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-12));
    CHECK(normal_quantile(0.975) == Catch::Approx(1.959963984540054).margin(1e-9));
    CHECK(normal_cdf(normal_quantile(0.123)) == Catch::Approx(0.123).margin(1e-12));
}

TEST_CASE("chi-square tail matches the even-dof closed form") {
    for (int dof : {2, 10, 66, 120}) {
        for (double x : {0.5, 5.0, 25.0, 66.0, 120.0, 250.0}) {
            const double got = chi2_sf(x, dof);
            const double want = chi2_sf_even_dof_oracle(x, dof);
            CHECK(got == Catch::Approx(want).epsilon(1e-10).margin(1e-300));
        }
    }
}

TEST_CASE("exact binomial tail matches the direct-summation oracle") {
    struct Case {
        std::int64_t k, n;
        double p;
    };
    const std::vector<Case> cases = {{50, 100, 0.1334}, {1, 10, 0.5},    {10, 10, 0.1334},
                                     {0, 7, 0.2},       {600, 1000, 0.5}, {3, 1000, 0.001},
                                     {130, 1000, 0.1334}};
    for (const auto& c : cases) {
        const double got = binomial_sf(c.k, c.n, c.p);
        const double want = binomial_sf_oracle(c.k, c.n, c.p);
        CHECK(got == Catch::Approx(want).epsilon(1e-10));
    }
    // Degenerate tail: P(X >= n) = p^n exactly.
    CHECK(binomial_sf(10, 10, 0.1334) ==
          Catch::Approx(std::pow(0.1334, 10)).epsilon(1e-12));
    // k = 0 tail is 1.
    CHECK(binomial_sf(0, 50, 0.3) == 1.0);
    // k/n <= p gives a one-sided p of at least ~0.5.
    CHECK(binomial_sf(13, 100, 0.1334) >= 0.5);
}

TEST_CASE("binomial tail strongly rejects planted coordination") {
    const double p = binomial_sf(50, 100, 0.1334);
    CHECK(p < 1e-12);
    // Still significant after a Holm correction across 10^4 tests.
    CHECK(p < 0.05 / 1e4);
}

TEST_CASE("holm-bonferroni is a step-down procedure") {
    // p-values chosen so the fourth-smallest fails its threshold.
    std::vector<double> ps = {0.001, 0.5, 0.012, 0.04, 0.0005};
    const auto reject = holm_bonferroni(ps, 0.05);
    CHECK(reject[4]);   // 0.0005 <= 0.05/5
    CHECK(reject[0]);   // 0.001  <= 0.05/4
    CHECK(reject[2]);   // 0.012  <= 0.05/3
    CHECK(!reject[3]);  // 0.04   >  0.05/2 -> stop
    CHECK(!reject[1]);
}

TEST_CASE("holm monotonicity: smaller p-values are rejected first") {
    std::vector<double> ps;
    for (int i = 0; i < 50; ++i) ps.push_back(0.6 * std::pow(0.7, i));
    const auto reject = holm_bonferroni(ps, 0.05);
    bool seen_not_rejected = false;
    // ps is decreasing, so walk from smallest to largest p.
    for (int i = 49; i >= 0; --i) {
        if (!reject[i]) seen_not_rejected = true;
        if (seen_not_rejected) CHECK(!reject[i]);
    }
}

TEST_CASE("quantiles and moments") {
    std::vector<double> xs = {4.0, 1.0, 3.0, 2.0, 5.0};
    CHECK(median(xs) == 3.0);
    CHECK(quantile(xs, 0.0) == 1.0);
    CHECK(quantile(xs, 1.0) == 5.0);
    CHECK(quantile(xs, 0.25) == 2.0);
    CHECK(quantile(xs, 0.1) == Catch::Approx(1.4));
    CHECK(mean(xs) == 3.0);
    CHECK(sample_variance(xs) == Catch::Approx(2.5));
    CHECK(population_variance(xs) == Catch::Approx(2.0));
}
