#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "modkit/distributions.hpp"
#include "modkit/sim/config.hpp"
#include "modkit/sim/engine.hpp"

using namespace modkit;
using namespace modkit::sim;

namespace {

SimConfig random_config(RngStream& rng) {
    SimConfig c;
    c.decay = sample_uniform(0.0, 0.2, rng);
    c.m0 = static_cast<std::int64_t>(rng.next_below(60));
    c.reproduction = sample_uniform(0.0, 0.5, rng);
    c.conversion = sample_uniform(0.0, 0.3, rng);
    c.wave_threshold = (rng.next_below(5) == 0) ? kNoModeratorLimit
                                                : 1 + static_cast<std::int64_t>(rng.next_below(80));
    c.w_min = 1 + static_cast<std::int64_t>(rng.next_below(3));
    c.w_max = c.w_min + static_cast<std::int64_t>(rng.next_below(5));
    c.v_max = 3 + static_cast<std::int64_t>(rng.next_below(22));
    c.v_initial = 1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(c.v_max)));
    c.t_max = 30 + static_cast<std::int64_t>(rng.next_below(40));
    c.t_policy = 10 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(c.t_max - 15)));
    c.t_max_venues = 1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(c.t_policy - 1)));
    c.nudge = (rng.next_below(2) == 0) ? 0.0 : sample_uniform(0.0, 0.5, rng);
    c.vcb_cap = (rng.next_below(2) == 0) ? -1 : static_cast<std::int64_t>(5 + rng.next_below(45));
    c.archetype.log_post_mean = UniformSpec{-1.0, 2.5};
    c.archetype.dispersion = LogNormalSpec{-0.8, 1.0};
    c.archetype.lambda = UniformSpec{0.0, 20.0};
    validate(c);
    return c;
}

}  // namespace

TEST_CASE("randomized runs keep demand nonnegative and accounting consistent") {
    RngStream meta(0xC0FFEE);
    for (int trial = 0; trial < 100; ++trial) {
        const auto cfg = random_config(meta);
        RngStream rng(RngStream::derive_seed(0xABCD, static_cast<std::uint64_t>(trial)));
        auto world = init_world(cfg, rng);
        double prev_active = 0.0;
        for (std::int64_t week = 1; week <= cfg.t_max; ++week) {
            step(world, cfg, rng);
            REQUIRE(world.potential_demand >= 0.0);

            std::int64_t mod_sum = 0;
            std::int64_t active = 0, removed = 0;
            for (const auto& v : world.venues) {
                mod_sum += v.moderators;
                if (v.removed) {
                    REQUIRE(v.moderators == 0);
                    REQUIRE(!v.active);
                    ++removed;
                }
                if (v.active) ++active;
                REQUIRE(v.lambda >= 0.0);
                REQUIRE(v.week_posts >= 0);
            }
            REQUIRE(world.total_moderators == mod_sum);

            if (week < cfg.t_policy) {
                REQUIRE(static_cast<double>(active) >= prev_active);
                REQUIRE(removed == 0);
                if (week >= cfg.t_max_venues) REQUIRE(active == cfg.v_max);
            } else {
                // Every scheduled venue either activated or was removed by a wave.
                REQUIRE(active + removed == cfg.v_max);
            }
            prev_active = static_cast<double>(active);
        }
    }
}

TEST_CASE("conversion conserves the transferred demand") {
    RngStream meta(0xFEED);
    for (int trial = 0; trial < 1000; ++trial) {
        WorldState world;
        const std::size_t n = 1 + meta.next_below(12);
        for (std::size_t i = 0; i < n; ++i) {
            VenueState v;
            v.active = meta.next_below(4) != 0;
            v.generated_posts = static_cast<std::int64_t>(meta.next_below(30));
            v.week_posts = v.generated_posts - static_cast<std::int64_t>(
                meta.next_below(static_cast<std::uint64_t>(v.generated_posts + 1)));
            v.lambda = sample_uniform(0.0, 10.0, meta);
            world.venues.push_back(v);
        }
        SimConfig cfg;
        cfg.conversion = sample_uniform(0.0, 1.0, meta);
        cfg.convert_by_generated_posts = meta.next_below(2) == 0;
        cfg.t_max = 10;
        cfg.t_policy = 1;
        world.potential_demand = sample_uniform(0.0, 500.0, meta);

        const double h_before = world.potential_demand;
        std::vector<double> rate_before;
        for (const auto& v : world.venues) rate_before.push_back(v.rate());

        convert_demand(world, cfg);

        double weight_total = 0.0;
        for (const auto& v : world.venues) {
            if (v.active && !v.removed) {
                weight_total += static_cast<double>(
                    cfg.convert_by_generated_posts ? v.generated_posts : v.week_posts);
            }
        }
        double increment_sum = 0.0;
        for (std::size_t i = 0; i < world.venues.size(); ++i) {
            increment_sum += world.venues[i].rate() - rate_before[i];
        }
        if (weight_total > 0.0) {
            const double expected = cfg.conversion * h_before;
            REQUIRE(std::fabs(increment_sum - expected) <=
                    1e-9 * std::max(1.0, std::fabs(expected)));
            REQUIRE(std::fabs(world.potential_demand - h_before * (1.0 - cfg.conversion)) <=
                    1e-9 * std::max(1.0, h_before));
        } else {
            REQUIRE(increment_sum == 0.0);
            REQUIRE(world.potential_demand == h_before);
        }
    }
}

TEST_CASE("decay-only worlds follow the closed form under randomized configs") {
    RngStream meta(0xDECA);
    for (int trial = 0; trial < 20; ++trial) {
        auto cfg = random_config(meta);
        cfg.m0 = 0;  // no moderation, no waves, no conversion inflow
        cfg.nudge = 0.0;
        cfg.vcb_cap = -1;
        RngStream rng(RngStream::derive_seed(0xBEE, static_cast<std::uint64_t>(trial)));
        auto world = init_world(cfg, rng);
        std::vector<double> lambda0;
        for (const auto& v : world.venues) lambda0.push_back(v.lambda);
        std::vector<std::int64_t> activated_at(world.venues.size(), 0);
        for (std::size_t i = 0; i < world.venues.size(); ++i) {
            activated_at[i] = world.venues[i].activation_week;
        }
        for (std::int64_t week = 1; week <= cfg.t_max; ++week) step(world, cfg, rng);

        for (std::size_t i = 0; i < world.venues.size(); ++i) {
            // A venue activating at the end of week a first decays in week a+1.
            const std::int64_t live_weeks = cfg.t_max - activated_at[i];
            double expected = lambda0[i];
            for (std::int64_t k = 0; k < live_weeks; ++k) expected *= (1.0 - cfg.decay);
            REQUIRE(world.venues[i].lambda ==
                    Catch::Approx(expected).epsilon(1e-12).margin(1e-300));
        }
    }
}

TEST_CASE("trajectories are bitwise deterministic under randomized configs") {
    RngStream meta(0x5EED);
    for (int trial = 0; trial < 10; ++trial) {
        const auto cfg = random_config(meta);
        const auto a = run(cfg, 1000 + static_cast<std::uint64_t>(trial));
        const auto b = run(cfg, 1000 + static_cast<std::uint64_t>(trial));
        REQUIRE(a.posts == b.posts);
        REQUIRE(a.engagements == b.engagements);
        REQUIRE(a.moderators == b.moderators);
        REQUIRE(a.demand == b.demand);
    }
}
