#include "priority.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>

using namespace uavsim;
using namespace testutil;

TEST_CASE("rank_zones orders by demand then id") {
    auto net = empty_network();
    add_zone(net, 100, {0, 100}, 5);
    add_zone(net, 101, {0, 200}, 3);
    add_zone(net, 102, {0, 300}, 1);
    CHECK(prio::rank_zones(net) == std::vector<topo::NodeId>{100, 101, 102});

    auto tied = empty_network();
    add_zone(tied, 101, {0, 0}, 4);
    add_zone(tied, 100, {0, 0}, 4);
    CHECK(prio::rank_zones(tied) == std::vector<topo::NodeId>{100, 101});
}

TEST_CASE("rank_zones matches an independent stable-sort oracle") {
    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> lam(0.0, 50.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto net = empty_network();
        std::vector<std::pair<double, topo::NodeId>> oracle;
        for (int i = 0; i < 12; ++i) {
            const double demand = lam(rng);
            add_zone(net, 100 + i, {0, 0}, demand);
            oracle.emplace_back(demand, 100 + i);
        }
        // Oracle: stable sort by descending demand over ascending ids.
        std::sort(oracle.begin(), oracle.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        std::stable_sort(oracle.begin(), oracle.end(),
                         [](const auto& a, const auto& b) {
                             return a.first > b.first;
                         });
        std::vector<topo::NodeId> expected;
        for (const auto& [d, id] : oracle) expected.push_back(id);
        CHECK(prio::rank_zones(net) == expected);
    }
}

TEST_CASE("rank_ues keys: requests, MBS distance, zone coverage, id") {
    SUBCASE("requests dominate") {
        auto net = empty_network();
        add_zone(net, 100, {0, 100}, 0);
        add_ue(net, 1000, 100, {0, 50}).request_count = 2;
        add_ue(net, 1001, 100, {0, 60}).request_count = 9;
        CHECK(prio::rank_ues(net) == std::vector<topo::NodeId>{1001, 1000});
    }
    SUBCASE("farther UE first on equal requests") {
        auto net = empty_network();
        add_zone(net, 100, {0, 100}, 0);
        add_ue(net, 1000, 100, {0, 400});
        add_ue(net, 1001, 100, {0, 100});
        CHECK(prio::rank_ues(net) == std::vector<topo::NodeId>{1000, 1001});
    }
    SUBCASE("covered zone breaks remaining ties") {
        auto net = empty_network();
        add_zone(net, 100, {0, 200}, 0);
        add_zone(net, 101, {2000, 200}, 0); // far from any UAV
        add_ue(net, 1000, 101, {0, 200});
        add_ue(net, 1001, 100, {200, 0}); // same MBS distance, covered zone
        add_uav(net, 200, {0, 250});
        CHECK(prio::rank_ues(net) == std::vector<topo::NodeId>{1001, 1000});
    }
}

TEST_CASE("rank_uavs keys: headroom, load balance, MBS distance, id") {
    SUBCASE("headroom dominates") {
        auto net = empty_network();
        add_uav(net, 200, {0, 100}, 500, 3.0);
        add_uav(net, 201, {0, 100}, 500, 8.0);
        CHECK(prio::rank_uavs(net) == std::vector<topo::NodeId>{201, 200});
    }
    SUBCASE("load balance on equal headroom") {
        auto net = empty_network();
        auto& a = add_uav(net, 200, {0, 100});
        a.uav_links_cu = 5; // L_b = 15
        add_uav(net, 201, {0, 100}); // L_b = 20
        CHECK(prio::rank_uavs(net) == std::vector<topo::NodeId>{201, 200});
    }
    SUBCASE("nearer MBS wins the final tie") {
        auto net = empty_network();
        add_uav(net, 200, {0, 300});
        add_uav(net, 201, {0, 100});
        CHECK(prio::rank_uavs(net) == std::vector<topo::NodeId>{201, 200});
    }
    SUBCASE("dead UAVs excluded") {
        auto net = empty_network();
        add_uav(net, 200, {0, 100}).alive = false;
        add_uav(net, 201, {0, 100});
        CHECK(prio::rank_uavs(net) == std::vector<topo::NodeId>{201});
    }
}

TEST_CASE("rankings are deterministic permutations") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
    std::uniform_int_distribution<std::uint64_t> reqs(0, 20);
    auto net = empty_network();
    for (int i = 0; i < 6; ++i) add_zone(net, 100 + i, {coord(rng), coord(rng)}, i);
    for (int i = 0; i < 40; ++i) {
        auto& ue = add_ue(net, 1000 + i, 100 + i % 6, {coord(rng), coord(rng)});
        ue.request_count = reqs(rng);
    }
    for (int i = 0; i < 8; ++i) add_uav(net, 200 + i, {coord(rng), coord(rng)});

    auto p1 = prio::rank_ues(net);
    auto p2 = prio::rank_uavs(net);
    auto p3 = prio::rank_zones(net);
    CHECK(p1 == prio::rank_ues(net));
    CHECK(p2 == prio::rank_uavs(net));
    CHECK(p3 == prio::rank_zones(net));

    auto is_permutation_of_ids = [](std::vector<topo::NodeId> got,
                                    std::size_t n, topo::NodeId base) {
        if (got.size() != n) return false;
        std::sort(got.begin(), got.end());
        for (std::size_t i = 0; i < n; ++i)
            if (got[i] != base + static_cast<topo::NodeId>(i)) return false;
        return true;
    };
    CHECK(is_permutation_of_ids(p1, 40, 1000));
    CHECK(is_permutation_of_ids(p2, 8, 200));
    CHECK(is_permutation_of_ids(p3, 6, 100));
}

TEST_CASE("zone and UE rankings are scale invariant") {
    auto net = empty_network();
    for (int i = 0; i < 8; ++i)
        add_zone(net, 100 + i, {0, 100}, (i * 37) % 11);
    for (int i = 0; i < 20; ++i) {
        auto& ue = add_ue(net, 1000 + i, 100 + i % 8, {double(i * 13 % 700), 50});
        ue.request_count = (i * 7) % 5;
    }
    const auto zones_before = prio::rank_zones(net);
    const auto ues_before = prio::rank_ues(net);
    for (auto& z : net.zones) z.request_rate_lambda *= 21.5;
    for (auto& ue : net.ues) ue.request_count *= 3;
    CHECK(prio::rank_zones(net) == zones_before);
    CHECK(prio::rank_ues(net) == ues_before);
}

TEST_CASE("record_feedback rates") {
    prio::PriorityState state;
    state.learning_rate = 0.5;

    auto perfect = prio::record_feedback(state, 10, 0);
    CHECK(perfect.error_rate == 0.0);
    CHECK(perfect.feedback_rate == 1.0);
    CHECK(perfect.epoch == 1);

    auto total = prio::record_feedback(state, 0, 10);
    CHECK(total.error_rate == 1.0);
    CHECK(total.feedback_rate == 0.0);
    CHECK(total.error_rate > prio::PriorityConfig{}.reset_threshold);

    auto quarter = prio::record_feedback(state, 3, 1);
    CHECK(quarter.error_rate == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(prio::record_feedback(state, 0, 0), std::domain_error);
}

TEST_CASE("feedback and error rates always sum to one") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> counts(0, 1000);
    prio::PriorityState state;
    for (int i = 0; i < 200; ++i) {
        const auto mapped = counts(rng);
        const auto mismatched = counts(rng);
        if (mapped + mismatched == 0) continue;
        state = prio::record_feedback(state, mapped, mismatched);
        CHECK(state.error_rate + state.feedback_rate ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(state.learning_rate >= 0.0);
        CHECK(state.learning_rate <= 1.0);
    }
}
