#include "topology.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <stdexcept>

#include <numbers>
#include <random>

using namespace uavsim;
using namespace testutil;

TEST_CASE("distance") {
    CHECK(topo::distance({0, 0}, {0, 0}) == 0.0);
    CHECK(topo::distance({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(topo::distance({1, 1}, {4, 5}) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(topo::distance({3, 4}, {0, 0}) == topo::distance({0, 0}, {3, 4}));
}

TEST_CASE("sector centroid") {
    // Full disc collapses to the centre.
    auto c = topo::sector_centroid({10, 20}, 100.0, 0.0, 2 * std::numbers::pi);
    CHECK(c.x == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(c.y == doctest::Approx(20.0).epsilon(1e-9));
    // 30-degree sector sits at (4r/3theta)*sin(theta/2) along the bisector.
    const double theta = std::numbers::pi / 6.0;
    auto s = topo::sector_centroid({0, 0}, 1.0, 0.0, theta);
    const double d = (4.0 / (3.0 * theta)) * std::sin(theta / 2.0);
    CHECK(std::hypot(s.x, s.y) == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("sector distance") {
    const topo::Position center{0, 0};
    const double r = 100.0;
    const double theta = std::numbers::pi / 2.0; // first quadrant
    // Inside.
    CHECK(topo::sector_distance(center, r, 0.0, theta, {50, 50}) == 0.0);
    // Beyond the arc along the bisector.
    const double f = 150.0 / std::hypot(1.0, 1.0);
    CHECK(topo::sector_distance(center, r, 0.0, theta, {f, f}) ==
          doctest::Approx(50.0).epsilon(1e-9));
    // Beside the x-axis edge.
    CHECK(topo::sector_distance(center, r, 0.0, theta, {50, -30}) ==
          doctest::Approx(30.0).epsilon(1e-9));
    // Behind the apex.
    CHECK(topo::sector_distance(center, r, 0.0, theta, {-40, -30}) ==
          doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("capacity headroom") {
    SUBCASE("single UAV") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0}, 500, 10.0);
        auto& ue = add_ue(net, 1000, 0, {1, 0});
        ue.resources_re = 2.0;
        ue.served_by = uav.id;
        uav.served_ue_ids.push_back(ue.id);
        CHECK(topo::capacity_headroom(net) == 5);
    }
    SUBCASE("no UAVs") {
        auto net = empty_network();
        CHECK(topo::capacity_headroom(net) == 0);
    }
    SUBCASE("hand sum over three UAVs") {
        auto net = empty_network();
        const double rc[3] = {10, 9, 7};
        const double re[3] = {2, 3, 7};
        for (int i = 0; i < 3; ++i) {
            auto& uav = add_uav(net, 200 + i, {0, 0}, 500, rc[i]);
            auto& ue = add_ue(net, 1000 + i, 0, {1, 0});
            ue.resources_re = re[i];
            ue.served_by = uav.id;
            uav.served_ue_ids.push_back(ue.id);
        }
        CHECK(topo::capacity_headroom(net) == 9); // 5 + 3 + 1
    }
    SUBCASE("zero R_e rejected") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0});
        auto& ue = add_ue(net, 1000, 0, {1, 0});
        ue.resources_re = 0.0;
        ue.served_by = uav.id;
        uav.served_ue_ids.push_back(ue.id);
        CHECK_THROWS_AS(topo::capacity_headroom(net), std::domain_error);
    }
}

TEST_CASE("load balance") {
    topo::Uav uav;
    uav.total_user_slots_tu = 10;
    uav.mbs_links_cm = 5;
    uav.uav_links_cu = 5;
    CHECK(topo::load_balance(uav) == 0);
    uav.mbs_links_cm = 2;
    uav.uav_links_cu = 3;
    CHECK(topo::load_balance(uav) == 5);
    uav.total_user_slots_tu = 4;
    uav.mbs_links_cm = 5;
    uav.uav_links_cu = 0;
    CHECK(topo::load_balance(uav) == -1); // overloaded
}

TEST_CASE("validate catches violations") {
    SUBCASE("clean network passes") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0});
        auto& ue = add_ue(net, 1000, 0, {100, 0});
        ue.served_by = uav.id;
        uav.served_ue_ids.push_back(ue.id);
        net.links.push_back({uav.id, ue.id, topo::LinkKind::uav_ue});
        CHECK_NOTHROW(topo::validate(net, 5, 5));
    }
    SUBCASE("serve list disagreement") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0});
        add_ue(net, 1000, 0, {100, 0}); // served_by unset
        uav.served_ue_ids.push_back(1000);
        CHECK_THROWS_AS(topo::validate(net, 5, 5), std::logic_error);
    }
    SUBCASE("slot bound") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0}, 500, 100.0, 1);
        for (int i = 0; i < 2; ++i) {
            auto& ue = add_ue(net, 1000 + i, 0, {10, 0});
            ue.served_by = uav.id;
            uav.served_ue_ids.push_back(ue.id);
        }
        CHECK_THROWS_AS(topo::validate(net, 5, 5), std::logic_error);
    }
    SUBCASE("resource bound") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0}, 500, 1.5);
        for (int i = 0; i < 2; ++i) {
            auto& ue = add_ue(net, 1000 + i, 0, {10, 0});
            ue.served_by = uav.id;
            uav.served_ue_ids.push_back(ue.id);
        }
        CHECK_THROWS_AS(topo::validate(net, 5, 5), std::logic_error);
    }
    SUBCASE("link beyond range") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0}, 500);
        auto& ue = add_ue(net, 1000, 0, {600, 0});
        ue.served_by = uav.id;
        uav.served_ue_ids.push_back(ue.id);
        net.links.push_back({uav.id, ue.id, topo::LinkKind::uav_ue});
        CHECK_THROWS_AS(topo::validate(net, 5, 5), std::logic_error);
    }
    SUBCASE("connection caps") {
        auto net = empty_network();
        auto& uav = add_uav(net, 200, {0, 0});
        uav.uav_links_cu = 6;
        CHECK_THROWS_AS(topo::validate(net, 5, 5), std::logic_error);
    }
}

TEST_CASE("resource conservation under allocation churn") {
    std::mt19937_64 rng(99);
    auto net = empty_network();
    for (int i = 0; i < 4; ++i) add_uav(net, 200 + i, {0, 0}, 500, 12.0, 12);
    for (int i = 0; i < 30; ++i) add_ue(net, 1000 + i, 0, {50, 0});

    std::uniform_int_distribution<int> pick_ue(0, 29);
    std::uniform_int_distribution<int> pick_uav(0, 3);
    for (int step = 0; step < 500; ++step) {
        auto& ue = net.ues[pick_ue(rng)];
        auto& uav = net.uavs[pick_uav(rng)];
        if (ue.served_by) {
            auto* server = net.find_uav(*ue.served_by);
            std::erase(server->served_ue_ids, ue.id);
            ue.served_by.reset();
        } else if (uav.served_ue_ids.size() < uav.total_user_slots_tu) {
            ue.served_by = uav.id;
            uav.served_ue_ids.push_back(ue.id);
        }
        // Consumed resources must equal the exact sum of served UEs' R_e.
        for (const auto& u : net.uavs) {
            double consumed = 0.0;
            for (auto id : u.served_ue_ids)
                consumed += net.find_ue(id)->resources_re;
            CHECK(consumed == static_cast<double>(u.served_ue_ids.size()));
            CHECK(consumed <= u.resources_rc);
        }
        CHECK_NOTHROW(topo::validate(net, 5, 5));
    }
}
