#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "modkit/coord/detect.hpp"
#include "modkit/coord/events.hpp"
#include "modkit/coord/mixture.hpp"
#include "modkit/distributions.hpp"
#include "modkit/rng.hpp"

using namespace modkit;
using namespace modkit::coord;

TEST_CASE("interarrival deltas per URL with venue attribution") {
    std::vector<ShareEvent> events = {
        {"A", "u1", 0}, {"B", "u1", 10}, {"A", "u1", 43},
    };
    const auto deltas = interarrival_times(events);
    REQUIRE(deltas.size() == 2);
    CHECK(deltas[0].seconds == 10.0);
    CHECK(deltas[0].venue_a == "A");
    CHECK(deltas[0].venue_b == "B");
    CHECK(deltas[1].seconds == 33.0);
    CHECK(deltas[1].venue_a == "B");
    CHECK(deltas[1].venue_b == "A");
}

TEST_CASE("single-share URLs contribute nothing") {
    std::vector<ShareEvent> events = {{"A", "u1", 5}, {"B", "u2", 9}};
    CHECK(interarrival_times(events).empty());
}

TEST_CASE("shuffled input matches sorted input") {
    RngStream rng(11);
    std::vector<ShareEvent> events;
    for (int i = 0; i < 500; ++i) {
        events.push_back({std::string(1, static_cast<char>('A' + rng.next_below(6))),
                          "url" + std::to_string(rng.next_below(40)),
                          static_cast<std::int64_t>(rng.next_below(100000))});
    }
    auto sorted_out = interarrival_times(events);
    for (std::size_t i = events.size(); i > 1; --i) {
        std::swap(events[i - 1], events[rng.next_below(i)]);
    }
    auto shuffled_out = interarrival_times(events);
    REQUIRE(sorted_out.size() == shuffled_out.size());
    for (std::size_t i = 0; i < sorted_out.size(); ++i) {
        CHECK(sorted_out[i].seconds == shuffled_out[i].seconds);
        CHECK(sorted_out[i].venue_a == shuffled_out[i].venue_a);
        CHECK(sorted_out[i].venue_b == shuffled_out[i].venue_b);
    }
}

TEST_CASE("url normalization lowercases and strips query and fragment") {
    CHECK(normalize_url("HTTPS://Example.com/Path?q=1#frag") == "https://example.com/path");
    CHECK(normalize_url("HTTPS://Example.com/Path?q=1", false) == "https://example.com/path?q=1");
}

TEST_CASE("event parsing with ISO and epoch timestamps") {
    const std::string text =
        "venue_id,url,timestamp\n"
        "A,https://x.org/a?utm=1,2021-03-30T21:45:00\n"
        "B,https://x.org/A,1617140700\n";
    const auto events = parse_share_events(text);
    REQUIRE(events.size() == 2);
    CHECK(events[0].url == events[1].url);
    CHECK(events[0].timestamp == 1617140700);
    CHECK(events[1].timestamp == 1617140700);

    CHECK_THROWS_AS(parse_share_events("venue_id,url,timestamp\nA,u\n"), DataError);
    CHECK_THROWS_AS(parse_share_events(""), DataError);
    CHECK_THROWS_AS(parse_share_events("venue_id,url,timestamp\nA,u,notatime\n"), DataError);
}

TEST_CASE("identical timestamps clamp to half a second for fitting") {
    std::vector<ShareEvent> events = {{"A", "u", 100}, {"B", "u", 100}, {"C", "u", 130}};
    const auto deltas = interarrival_times(events);
    const auto durations = durations_for_fitting(deltas);
    REQUIRE(durations.size() == 2);
    CHECK(durations[0] == 0.5);
    CHECK(durations[1] == 30.0);
}

TEST_CASE("planted coordination is detected; background pairs are not") {
    RngStream rng(77);
    std::vector<ShareEvent> events;
    std::int64_t t = 0;
    // Coordinated pair: X follows Y within seconds on 60 URLs.
    for (int i = 0; i < 60; ++i) {
        t += 5000;
        events.push_back({"X", "c" + std::to_string(i), t});
        events.push_back({"Y", "c" + std::to_string(i), t + static_cast<std::int64_t>(rng.next_below(5))});
    }
    // Background: many venue pairs with exponential(227) gaps.
    for (int i = 0; i < 200; ++i) {
        t += 5000;
        const auto url = "b" + std::to_string(i);
        std::int64_t s = t;
        for (int j = 0; j < 4; ++j) {
            events.push_back({"V" + std::to_string(rng.next_below(12)), url, s});
            s += static_cast<std::int64_t>(sample_exponential(227.45, rng)) + 1;
        }
    }
    const auto edges = detect_coordination(events, 32.56, 0.1334, 0.05);
    bool planted_found = false;
    for (const auto& e : edges) {
        if (e.venue_a == "X" && e.venue_b == "Y") {
            planted_found = true;
            CHECK(e.significant);
            CHECK(e.n_pairs == 60);
            CHECK(e.k_near == 60);
        }
    }
    CHECK(planted_found);
    // The planted pair must dominate: no more than a stray background edge.
    int significant = 0;
    for (const auto& e : edges) significant += e.significant ? 1 : 0;
    CHECK(significant <= 2);
}

TEST_CASE("k equal to n gives the degenerate tail p0^n") {
    // 10 near-simultaneous pairs out of 10.
    std::vector<ShareEvent> events;
    for (int i = 0; i < 10; ++i) {
        events.push_back({"A", "u" + std::to_string(i), i * 1000});
        events.push_back({"B", "u" + std::to_string(i), i * 1000 + 3});
    }
    const auto edges = detect_coordination(events, 33.0, 0.1334, 0.05);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].p_value == Catch::Approx(std::pow(0.1334, 10)).epsilon(1e-9));
    CHECK(edges[0].significant);
}

TEST_CASE("rates at or below p0 are never significant") {
    // 2 of 20 near: k/n = 0.10 <= p0.
    std::vector<ShareEvent> events;
    for (int i = 0; i < 20; ++i) {
        const std::int64_t gap = (i < 2) ? 5 : 500;
        events.push_back({"A", "u" + std::to_string(i), i * 100000});
        events.push_back({"B", "u" + std::to_string(i), i * 100000 + gap});
    }
    const auto edges = detect_coordination(events, 32.56, 0.1334, 0.05);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].p_value >= 0.5);
    CHECK(!edges[0].significant);
}

TEST_CASE("no edges yield singleton components") {
    const auto comps = connected_components({}, {"c", "a", "b"});
    REQUIRE(comps.size() == 3);
    CHECK(comps[0] == std::vector<std::string>{"a"});
    CHECK(comps[1] == std::vector<std::string>{"b"});
    CHECK(comps[2] == std::vector<std::string>{"c"});
}

TEST_CASE("chained edges merge into one cluster") {
    std::vector<CoordinationEdge> edges(2);
    edges[0].venue_a = "a"; edges[0].venue_b = "b"; edges[0].significant = true;
    edges[1].venue_a = "b"; edges[1].venue_b = "c"; edges[1].significant = true;
    const auto comps = connected_components(edges, {"a", "b", "c", "d"});
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::vector<std::string>({"a", "b", "c"}));
    CHECK(comps[1] == std::vector<std::string>{"d"});
}

TEST_CASE("components agree with a transitive-closure oracle") {
    RngStream rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 50;
        std::vector<std::string> venues;
        for (int i = 0; i < n; ++i) venues.push_back("v" + std::to_string(i));
        std::vector<CoordinationEdge> edges;
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        const int m = 10 + static_cast<int>(rng.next_below(50));
        for (int e = 0; e < m; ++e) {
            int a = static_cast<int>(rng.next_below(n));
            int b = static_cast<int>(rng.next_below(n));
            if (a == b) continue;
            CoordinationEdge edge;
            edge.venue_a = venues[std::min(a, b)];
            edge.venue_b = venues[std::max(a, b)];
            edge.significant = rng.next_below(4) != 0;
            if (edge.significant) adj[a][b] = adj[b][a] = true;
            edges.push_back(edge);
        }
        // Floyd-Warshall closure.
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                if (adj[i][k])
                    for (int j = 0; j < n; ++j)
                        if (adj[k][j]) adj[i][j] = true;

        const auto comps = connected_components(edges, venues);
        std::map<std::string, int> cluster_of;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            for (const auto& v : comps[c]) cluster_of[v] = static_cast<int>(c);
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const bool connected = adj[i][j];
                const bool same = cluster_of[venues[i]] == cluster_of[venues[j]];
                REQUIRE(same == connected);
            }
        }
    }
}

TEST_CASE("significant edge sets are stable across 25-41s thresholds") {
    RngStream rng(2021);
    std::vector<ShareEvent> events;
    std::int64_t t = 0;
    // Two strongly coordinated pairs (k/n well above 0.5 at any threshold).
    for (int i = 0; i < 50; ++i) {
        t += 10000;
        events.push_back({"P1", "p" + std::to_string(i), t});
        events.push_back({"P2", "p" + std::to_string(i), t + static_cast<std::int64_t>(rng.next_below(8))});
        t += 10000;
        events.push_back({"Q1", "q" + std::to_string(i), t});
        events.push_back({"Q2", "q" + std::to_string(i), t + static_cast<std::int64_t>(rng.next_below(8))});
    }
    // Null background from the non-simultaneous law.
    for (int i = 0; i < 300; ++i) {
        t += 10000;
        const auto url = "n" + std::to_string(i);
        std::int64_t s = t;
        for (int j = 0; j < 3; ++j) {
            events.push_back({"V" + std::to_string(rng.next_below(10)), url, s});
            s += static_cast<std::int64_t>(sample_exponential(227.45, rng)) + 1;
        }
    }
    std::set<std::pair<std::string, std::string>> first;
    bool first_set = false;
    for (const double thr : {25.0, 29.0, 33.0, 37.0, 41.0}) {
        const double p0 = baseline_probability(thr, 227.45);
        std::set<std::pair<std::string, std::string>> sig;
        for (const auto& e : detect_coordination(events, thr, p0, 0.05)) {
            if (e.significant) sig.insert({e.venue_a, e.venue_b});
        }
        if (!first_set) {
            first = sig;
            first_set = true;
            CHECK(first.count({"P1", "P2"}) == 1);
            CHECK(first.count({"Q1", "Q2"}) == 1);
        } else {
            CHECK(sig == first);
        }
    }
}
