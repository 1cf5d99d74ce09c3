#pragma once

#include "topology.hpp"

#include <vector>

namespace testutil {

using uavsim::topo::DemandZone;
using uavsim::topo::Mbs;
using uavsim::topo::NetworkState;
using uavsim::topo::NodeId;
using uavsim::topo::Position;
using uavsim::topo::Uav;
using uavsim::topo::Ue;

inline NetworkState empty_network(Position mbs_pos = {0.0, 0.0}) {
    NetworkState net;
    // Stable references from the add_* helpers across repeated additions.
    net.zones.reserve(64);
    net.ues.reserve(256);
    net.uavs.reserve(64);
    Mbs mbs;
    mbs.id = 1;
    mbs.position = mbs_pos;
    net.mbs_list.push_back(mbs);
    return net;
}

inline DemandZone& add_zone(NetworkState& net, NodeId id, Position centroid,
                            double lambda) {
    DemandZone zone;
    zone.id = id;
    zone.mbs_id = net.mbs_list.empty() ? 0 : net.mbs_list.front().id;
    zone.centroid = centroid;
    zone.request_rate_lambda = lambda;
    net.zones.push_back(zone);
    if (!net.mbs_list.empty()) net.mbs_list.front().zones.push_back(id);
    return net.zones.back();
}

inline Ue& add_ue(NetworkState& net, NodeId id, NodeId zone_id, Position pos,
                  double demand = 2.0) {
    Ue ue;
    ue.id = id;
    ue.zone_id = zone_id;
    ue.position = pos;
    ue.service_demand_s = demand;
    net.ues.push_back(ue);
    if (auto* zone = net.find_zone(zone_id)) zone->ue_ids.push_back(id);
    return net.ues.back();
}

inline Uav& add_uav(NetworkState& net, NodeId id, Position pos,
                    double range = 500.0, double rc = 20.0,
                    std::uint32_t tu = 20) {
    Uav uav;
    uav.id = id;
    uav.position = pos;
    uav.radio_range_g = range;
    uav.resources_rc = rc;
    uav.total_user_slots_tu = tu;
    net.uavs.push_back(uav);
    return net.uavs.back();
}

} // namespace testutil
