#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace uavsim::topo {

using NodeId = std::int32_t;

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Position& a, const Position& b);

// Centroid of an angular sector [theta0, theta0+theta] of a disc of
// radius r centred at `center`. Used to place demand-zone centroids when a
// cell disc is cut into equal segments.
Position sector_centroid(const Position& center, double radius,
                         double theta0, double theta);

// Distance from a point to a disc sector (zero inside it).
double sector_distance(const Position& center, double radius, double theta0,
                       double theta, const Position& point);

enum class LinkKind : std::uint8_t { uav_ue, uav_uav, uav_mbs };

struct Link {
    NodeId a = -1;
    NodeId b = -1;
    LinkKind kind = LinkKind::uav_ue;
};

struct Mbs {
    NodeId id = 0;
    Position position;
    std::vector<NodeId> zones;
    std::uint32_t max_uav_links = 5;
};

struct DemandZone {
    NodeId id = 0;
    NodeId mbs_id = 0;
    Position centroid;
    std::vector<NodeId> ue_ids;
    double request_rate_lambda = 0.0; // aggregate requests/s over zone UEs
    // Sector geometry of the zone within its cell disc; sector_radius 0
    // means "none recorded" and zone distance falls back to the centroid.
    double sector_theta0 = 0.0;
    double sector_theta = 0.0;
    double sector_radius = 0.0;
};

struct Ue {
    NodeId id = 0;
    NodeId zone_id = 0;
    Position position;
    double service_demand_s = 2.0;   // requests/s
    double resources_re = 1.0;       // units consumed when served
    std::optional<NodeId> served_by; // at most one server at any instant
    std::uint64_t request_count = 0; // requests generated so far
};

struct Uav {
    NodeId id = 0;
    Position position;
    double radio_range_g = 500.0;
    double resources_rc = 20.0;
    std::uint32_t total_user_slots_tu = 20;
    std::uint32_t mbs_links_cm = 0;
    std::uint32_t uav_links_cu = 0;
    std::vector<NodeId> served_ue_ids;
    std::optional<NodeId> assigned_zone; // demand zone it is deployed over
    double last_hello_time = 0.0;        // heartbeat recency, simulated s
    bool alive = true;
    bool backhauled = true; // has a working MBS path (direct or relayed)
};

struct NetworkState {
    double area_a = 10000.0 * 10000.0; // m^2
    std::vector<Mbs> mbs_list;
    std::vector<DemandZone> zones;
    std::vector<Ue> ues;
    std::vector<Uav> uavs;
    std::vector<Link> links;

    const Mbs* find_mbs(NodeId id) const;
    const DemandZone* find_zone(NodeId id) const;
    const Ue* find_ue(NodeId id) const;
    const Uav* find_uav(NodeId id) const;
    Ue* find_ue(NodeId id);
    Uav* find_uav(NodeId id);
    DemandZone* find_zone(NodeId id);
};

// Total users the deployed UAV fleet can absorb: sum over UAVs of
// floor(R_c / R_e), with R_e taken from the UAV's served UEs (uniform per
// network) or `default_re` for an idle UAV. Callers compare the result
// against |E|.
std::uint64_t capacity_headroom(const NetworkState& network,
                                double default_re = 1.0);

// Spare connection slots of a UAV: T_u - (C_m + C_u). Negative means
// overcommitted.
std::int64_t load_balance(const Uav& uav);

// Full-state invariant sweep; throws std::logic_error naming the violated
// invariant. Covers single-server, link range soundness, per-UAV resource
// and slot accounting, and link-count caps.
void validate(const NetworkState& network, std::uint32_t max_cm,
              std::uint32_t max_cu);

} // namespace uavsim::topo
