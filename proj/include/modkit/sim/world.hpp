#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "modkit/rng.hpp"
#include "modkit/sim/config.hpp"

namespace modkit::sim {

struct VenueState {
    VenueParams params;
    bool active = false;
    bool removed = false;
    std::int64_t activation_week = 0;  // 0 = active from the start
    double lambda = 0.0;            // organic engagements-per-post rate, decays
    double lambda_converted = 0.0;  // rate gained from potential demand
    std::int64_t moderators = 0;
    std::int64_t generated_posts = 0;        // this week's draw, before moderation
    std::int64_t week_posts = 0;             // surviving moderation
    double week_engagements = 0.0;           // surviving moderation
    std::vector<std::int64_t> post_engagements;  // per surviving post, this week

    // The rate the venue actually generates engagements at.
    double rate() const { return lambda + lambda_converted; }
};

struct RemovedVenue {
    std::int64_t venue = 0;
    double lambda = 0.0;  // rate at removal, the amount added to potential demand
};

struct RemovalRecord {
    std::int64_t week = 0;
    std::int64_t removed_posts = 0;
    double removed_post_engagements = 0.0;
    std::vector<RemovedVenue> removed_venues;
};

struct WorldState {
    std::int64_t t = 0;  // completed weeks
    std::vector<VenueState> venues;
    double potential_demand = 0.0;  // h_t
    std::int64_t total_moderators = 0;
    bool m0_released = false;
    std::vector<RemovalRecord> removal_log;
};

// Builds the initial world: v_max venues with archetype-sampled parameters,
// v_initial of them active, the rest scheduled on uniform activation weeks in
// {1..t_max_venues}. Potential demand starts at zero, no moderators yet.
inline WorldState init_world(const SimConfig& config, RngStream& rng) {
    validate(config);
    WorldState world;
    world.venues.reserve(static_cast<std::size_t>(config.v_max));
    for (std::int64_t i = 0; i < config.v_max; ++i) {
        VenueState v;
        v.params = sample_venue_params(config.archetype, rng);
        v.lambda = v.params.lambda0;
        if (i < config.v_initial) {
            v.active = true;
            v.activation_week = 0;
        } else {
            v.active = false;
            v.activation_week =
                1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(config.t_max_venues)));
        }
        world.venues.push_back(std::move(v));
    }
    return world;
}

}  // namespace modkit::sim
