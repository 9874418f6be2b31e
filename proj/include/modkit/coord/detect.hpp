#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "modkit/coord/events.hpp"
#include "modkit/errors.hpp"
#include "modkit/stats.hpp"

namespace modkit::coord {

struct CoordinationEdge {
    std::string venue_a;  // lexicographically smaller id
    std::string venue_b;
    std::int64_t n_pairs = 0;
    std::int64_t k_near = 0;
    double p_value = 1.0;
    bool significant = false;
};

// Per unordered venue pair: count successive same-URL share pairs and how many
// fell under the near-simultaneity threshold, then run one-sided exact
// binomial tests against p0 with Holm-Bonferroni across all pairs. Self-pairs
// (a venue following itself) carry no between-venue signal and are skipped.
inline std::vector<CoordinationEdge> detect_coordination(const std::vector<ShareEvent>& events,
                                                         double threshold_seconds, double p0,
                                                         double alpha) {
    if (!(p0 > 0.0 && p0 < 1.0)) throw ParamError("detect_coordination: p0 must be in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParamError("detect_coordination: alpha must be in (0,1)");

    std::map<std::pair<std::string, std::string>, std::pair<std::int64_t, std::int64_t>> pairs;
    for (const auto& d : interarrival_times(events)) {
        if (d.venue_a == d.venue_b) continue;
        auto key = std::minmax(d.venue_a, d.venue_b);
        auto& [n, k] = pairs[{key.first, key.second}];
        ++n;
        if (d.seconds < threshold_seconds) ++k;
    }

    std::vector<CoordinationEdge> edges;
    edges.reserve(pairs.size());
    std::vector<double> p_values;
    p_values.reserve(pairs.size());
    for (const auto& [key, nk] : pairs) {
        CoordinationEdge e;
        e.venue_a = key.first;
        e.venue_b = key.second;
        e.n_pairs = nk.first;
        e.k_near = nk.second;
        e.p_value = binomial_sf(e.k_near, e.n_pairs, p0);
        p_values.push_back(e.p_value);
        edges.push_back(std::move(e));
    }
    const auto reject = holm_bonferroni(p_values, alpha);
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].significant = reject[i];
    return edges;  // map iteration order: sorted by venue pair
}

// Partitions venues by transitive connectivity over significant edges.
// Clusters are sorted internally and by first member, singletons included.
inline std::vector<std::vector<std::string>> connected_components(
    const std::vector<CoordinationEdge>& edges, const std::vector<std::string>& venues) {
    std::map<std::string, std::size_t> index;
    for (const auto& v : venues) index.emplace(v, index.size());
    for (const auto& e : edges) {
        if (!index.count(e.venue_a) || !index.count(e.venue_b)) {
            throw ParamError("connected_components: edge endpoint not in venue set");
        }
    }

    std::vector<std::size_t> parent(index.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&parent](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : edges) {
        if (!e.significant) continue;
        const auto ra = find(index[e.venue_a]);
        const auto rb = find(index[e.venue_b]);
        if (ra != rb) parent[rb] = ra;
    }

    std::map<std::size_t, std::vector<std::string>> groups;
    for (const auto& [name, idx] : index) groups[find(idx)].push_back(name);
    std::vector<std::vector<std::string>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

}  // namespace modkit::coord
