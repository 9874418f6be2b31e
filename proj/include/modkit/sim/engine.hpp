#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "modkit/distributions.hpp"
#include "modkit/errors.hpp"
#include "modkit/rng.hpp"
#include "modkit/sim/config.hpp"
#include "modkit/sim/world.hpp"

namespace modkit::sim {

namespace detail {

// Draws one index from weights (sum > 0) by inverting the cumulative table.
inline std::size_t draw_weighted(const std::vector<double>& cumulative, double total,
                                 RngStream& rng) {
    const double u = rng.next_double() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto idx = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(idx, cumulative.size() - 1);
}

// Cumulative weights over this week's generated posts; empty total means no
// venue posted.
inline double post_weight_table(const WorldState& world, std::vector<double>& cumulative) {
    cumulative.clear();
    cumulative.reserve(world.venues.size());
    double total = 0.0;
    for (const auto& v : world.venues) {
        if (v.active && !v.removed) total += static_cast<double>(v.generated_posts);
        cumulative.push_back(total);
    }
    return total;
}

}  // namespace detail

// Moderation phase for week `week` (>= t_policy): release m0 on the first
// policy week, remove up to one post per moderator, reproduce with probability
// r, convert removed engagements into potential demand, and reassign idle
// moderators in proportion to this week's generated posts.
inline RemovalRecord moderate(WorldState& world, const SimConfig& config, RngStream& rng,
                              std::int64_t week) {
    RemovalRecord record;
    record.week = week;

    std::vector<double> cumulative;
    const double total_posts = detail::post_weight_table(world, cumulative);

    // Initial moderator pulse, assigned in proportion to this week's posts.
    if (!world.m0_released) {
        bool any_active = false;
        for (const auto& v : world.venues) {
            if (v.active && !v.removed) { any_active = true; break; }
        }
        if (any_active) {
            for (std::int64_t i = 0; i < config.m0; ++i) {
                std::size_t target;
                if (total_posts > 0.0) {
                    target = detail::draw_weighted(cumulative, total_posts, rng);
                } else {
                    // Zero-post week: fall back to a uniform choice among active venues.
                    std::vector<std::size_t> active_idx;
                    for (std::size_t j = 0; j < world.venues.size(); ++j) {
                        if (world.venues[j].active && !world.venues[j].removed) active_idx.push_back(j);
                    }
                    target = active_idx[rng.next_below(active_idx.size())];
                }
                ++world.venues[target].moderators;
            }
            world.total_moderators += config.m0;
            world.m0_released = true;
        }
    }

    // Removal and reproduction, venue by venue. Removers (and their spawn)
    // stay put; everyone else is idle and gets reassigned below.
    std::vector<std::int64_t> idle(world.venues.size(), 0);
    std::int64_t spawned_total = 0;
    for (std::size_t j = 0; j < world.venues.size(); ++j) {
        auto& v = world.venues[j];
        if (v.removed || v.moderators == 0) continue;
        const std::int64_t removals = std::min(v.moderators, v.week_posts);
        idle[j] = v.moderators - removals;
        for (std::int64_t i = 0; i < removals; ++i) {
            const std::int64_t eng = v.post_engagements.back();
            v.post_engagements.pop_back();
            v.week_engagements -= static_cast<double>(eng);
            --v.week_posts;
            record.removed_posts += 1;
            record.removed_post_engagements += static_cast<double>(eng);
            if (rng.next_double() < config.reproduction) ++spawned_total, ++v.moderators;
        }
    }
    world.total_moderators += spawned_total;

    // Potential demand grows by the mean engagements per removed post.
    if (record.removed_posts > 0) {
        world.potential_demand +=
            record.removed_post_engagements / static_cast<double>(record.removed_posts);
    }

    // Idle moderators move to venues in proportion to generated posts.
    if (total_posts > 0.0) {
        std::vector<std::int64_t> incoming(world.venues.size(), 0);
        for (std::size_t j = 0; j < world.venues.size(); ++j) {
            if (idle[j] <= 0) continue;
            world.venues[j].moderators -= idle[j];
            for (std::int64_t i = 0; i < idle[j]; ++i) {
                const std::size_t target = detail::draw_weighted(cumulative, total_posts, rng);
                ++incoming[target];
            }
        }
        for (std::size_t j = 0; j < world.venues.size(); ++j) {
            world.venues[j].moderators += incoming[j];
        }
    }

    return record;
}

// Venue-removal wave: when total moderators exceed T, remove w ~ U[w_min,w_max]
// active venues (uniformly, or weighted by moderator count when configured).
// Each removed venue dumps its engagement rate into potential demand and loses
// its posts, engagements, and moderators.
inline std::vector<RemovedVenue> remove_venue_wave(WorldState& world, const SimConfig& config,
                                                   RngStream& rng) {
    std::vector<RemovedVenue> removed;
    if (world.total_moderators <= config.wave_threshold) return removed;

    const std::int64_t span = config.w_max - config.w_min + 1;
    const std::int64_t want = config.w_min +
        static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(span)));

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < world.venues.size(); ++i) {
        if (world.venues[i].active && !world.venues[i].removed) candidates.push_back(i);
    }
    const std::int64_t count = std::min<std::int64_t>(want, static_cast<std::int64_t>(candidates.size()));

    for (std::int64_t k = 0; k < count; ++k) {
        std::size_t pick_pos;
        if (config.wave_weight_by_moderators) {
            double total = 0.0;
            std::vector<double> cumulative;
            cumulative.reserve(candidates.size());
            for (auto idx : candidates) {
                // +1 keeps venues with zero moderators selectable.
                total += static_cast<double>(world.venues[idx].moderators) + 1.0;
                cumulative.push_back(total);
            }
            pick_pos = detail::draw_weighted(cumulative, total, rng);
        } else {
            pick_pos = static_cast<std::size_t>(rng.next_below(candidates.size()));
        }
        const std::size_t idx = candidates[pick_pos];
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick_pos));

        auto& v = world.venues[idx];
        removed.push_back({static_cast<std::int64_t>(idx), v.rate()});
        world.potential_demand += v.rate();
        world.total_moderators -= v.moderators;
        v.moderators = 0;
        v.week_posts = 0;
        v.generated_posts = 0;
        v.week_engagements = 0.0;
        v.post_engagements.clear();
        v.active = false;
        v.removed = true;
    }
    return removed;
}

// End-of-week conversion: each active venue's rate gains its share (by
// surviving posts) of h*g; the reservoir is then depleted by the converted
// fraction. Weeks with no surviving posts carry h over unchanged.
inline void convert_demand(WorldState& world, const SimConfig& config) {
    const auto weight = [&config](const VenueState& v) {
        return static_cast<double>(config.convert_by_generated_posts ? v.generated_posts
                                                                     : v.week_posts);
    };
    double total_posts = 0.0;
    for (const auto& v : world.venues) {
        if (v.active && !v.removed) total_posts += weight(v);
    }
    if (total_posts <= 0.0) return;
    const double h = world.potential_demand;
    for (auto& v : world.venues) {
        if (!v.active || v.removed) continue;
        const double w = weight(v);
        if (w <= 0.0) continue;
        v.lambda_converted += h * (w / total_posts) * config.conversion;
    }
    if (config.deplete_demand) {
        world.potential_demand = h * (1.0 - config.conversion);
    }
}

// One simulated week. Phases, in order: rate decay, post generation,
// engagement generation, venue activation (pre-policy), then the policy
// machinery (moderation, possible removal wave, demand conversion).
inline void step(WorldState& world, const SimConfig& config, RngStream& rng) {
    if (world.t >= config.t_max) throw ParamError("step: already at t_max");
    const std::int64_t week = world.t + 1;
    const bool policy_active = week >= config.t_policy;

    // 1. Engagement rates decay on active venues.
    for (auto& v : world.venues) {
        if (v.active && !v.removed) {
            v.lambda *= (1.0 - config.decay);
            if (config.converted_rate_decays) v.lambda_converted *= (1.0 - config.decay);
        }
    }

    // 2 & 3. Post and engagement generation.
    for (auto& v : world.venues) {
        v.generated_posts = 0;
        v.week_posts = 0;
        v.week_engagements = 0.0;
        v.post_engagements.clear();
        if (!v.active || v.removed) continue;
        const double post_mean = std::exp(v.params.log_post_mean);
        const std::int64_t n_posts = sample_neg_binomial(post_mean, v.params.dispersion, rng);
        const double rate = policy_active ? (1.0 - config.nudge) * v.rate() : v.rate();
        v.generated_posts = n_posts;
        v.week_posts = n_posts;
        v.post_engagements.reserve(static_cast<std::size_t>(n_posts));
        for (std::int64_t p = 0; p < n_posts; ++p) {
            const std::int64_t eng = (policy_active && config.vcb_enabled())
                                         ? sample_truncated_poisson(rate, config.vcb_cap, rng)
                                         : sample_poisson(rate, rng);
            v.post_engagements.push_back(eng);
            v.week_engagements += static_cast<double>(eng);
        }
    }

    // 4. Scheduled venue activation (pre-policy only).
    if (!policy_active) {
        for (auto& v : world.venues) {
            if (!v.active && !v.removed && v.activation_week == week) v.active = true;
        }
    }

    // 5. Policy machinery.
    if (policy_active) {
        RemovalRecord record = moderate(world, config, rng, week);
        record.removed_venues = remove_venue_wave(world, config, rng);
        convert_demand(world, config);
        world.removal_log.push_back(std::move(record));
    }

    world.t = week;
}

// Per-week totals over one full run.
struct Trajectory {
    std::vector<double> posts;
    std::vector<double> engagements;
    std::vector<double> moderators;
    std::vector<double> demand;
    std::vector<double> active_venues;
};

inline Trajectory run(const SimConfig& config, std::uint64_t seed) {
    validate(config);
    RngStream rng(seed);
    WorldState world = init_world(config, rng);
    Trajectory traj;
    traj.posts.reserve(static_cast<std::size_t>(config.t_max));
    for (std::int64_t week = 1; week <= config.t_max; ++week) {
        step(world, config, rng);
        double posts = 0.0, eng = 0.0, active = 0.0;
        for (const auto& v : world.venues) {
            if (v.active && !v.removed) {
                posts += static_cast<double>(v.week_posts);
                eng += v.week_engagements;
                active += 1.0;
            }
        }
        traj.posts.push_back(posts);
        traj.engagements.push_back(eng);
        traj.moderators.push_back(static_cast<double>(world.total_moderators));
        traj.demand.push_back(world.potential_demand);
        traj.active_venues.push_back(active);
    }
    return traj;
}

}  // namespace modkit::sim
