#include "control.hpp"

#include "priority.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace uavsim::ctrl {

namespace {

double mbs_distance(const NetworkState& net, const topo::Position& pos) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mbs : net.mbs_list)
        best = std::min(best, topo::distance(pos, mbs.position));
    return best;
}

NodeId elect_controller(const NetworkState& net) {
    NodeId best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& uav : net.uavs) {
        if (!uav.alive) continue;
        const double d = mbs_distance(net, uav.position);
        if (d < best_dist || (d == best_dist && uav.id < best)) {
            best = uav.id;
            best_dist = d;
        }
    }
    return best;
}

} // namespace

PeeringState peer_and_elect(const NetworkState& network) {
    PeeringState state;
    bool any_alive = false;
    for (const auto& uav : network.uavs) {
        if (!uav.alive) continue;
        any_alive = true;
        std::vector<NodeId> overlaps;
        for (const auto& zone : network.zones) {
            if (uav.assigned_zone && *uav.assigned_zone == zone.id) continue;
            if (topo::distance(uav.position, zone.centroid) <= uav.radio_range_g)
                overlaps.push_back(zone.id);
        }
        std::sort(overlaps.begin(), overlaps.end());
        if (!overlaps.empty()) state.accepted_overlaps[uav.id] = std::move(overlaps);
    }
    if (!any_alive)
        throw std::runtime_error("control: no alive UAV to peer or elect");
    state.controller_uav = elect_controller(network);
    return state;
}

RebalanceResult detect_and_rebalance(NetworkState& network,
                                     PeeringState& peering, double now,
                                     std::uint32_t standby_available,
                                     const ControlConfig& config) {
    if (!peering.controller_uav)
        throw std::runtime_error("control: rebalance requires an elected controller");

    RebalanceResult result;
    const double deadline =
        config.hello_interval * static_cast<double>(config.hello_miss_limit);

    // Step 1: mark unresponsive UAVs and collect their orphaned demand.
    std::vector<NodeId> orphan_ues;
    for (auto& uav : network.uavs) {
        if (!uav.alive) continue;
        if (now - uav.last_hello_time <= deadline) continue;
        FailureEvent ev;
        ev.uav_id = uav.id;
        ev.detected_at = now;
        if (uav.assigned_zone) ev.unhandled_zone_ids.push_back(*uav.assigned_zone);
        uav.alive = false;
        uav.assigned_zone.reset();
        uav.mbs_links_cm = 0;
        uav.uav_links_cu = 0;
        for (NodeId ue_id : uav.served_ue_ids) {
            if (auto* ue = network.find_ue(ue_id)) ue->served_by.reset();
            orphan_ues.push_back(ue_id);
        }
        uav.served_ue_ids.clear();
        result.failures.push_back(std::move(ev));
    }
    if (result.failures.empty()) return result;

    // Orphan zones whose only server died.
    std::vector<NodeId> orphan_zones;
    for (const auto& ev : result.failures)
        for (NodeId zid : ev.unhandled_zone_ids) orphan_zones.push_back(zid);
    std::sort(orphan_zones.begin(), orphan_zones.end());
    orphan_zones.erase(std::unique(orphan_zones.begin(), orphan_zones.end()),
                       orphan_zones.end());

    // Step 2: absorb orphaned demand with underloaded alive UAVs, or fall
    // back to a standby launch, or record the zone unserved.
    std::uint32_t standbys_left = standby_available;
    std::unordered_set<NodeId> absorbed_zones;
    for (NodeId zid : orphan_zones) {
        const auto* zone = network.find_zone(zid);
        if (!zone) continue;
        std::vector<topo::Uav*> candidates;
        for (auto& uav : network.uavs) {
            if (!uav.alive || !uav.backhauled) continue;
            if (topo::load_balance(uav) < 1) continue;
            if (uav.served_ue_ids.size() >= uav.total_user_slots_tu) continue;
            if (topo::distance(uav.position, zone->centroid) > uav.radio_range_g)
                continue;
            candidates.push_back(&uav);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const topo::Uav* a, const topo::Uav* b) {
                      const auto la = topo::load_balance(*a);
                      const auto lb = topo::load_balance(*b);
                      if (la != lb) return la > lb;
                      return a->id < b->id;
                  });
        if (candidates.empty()) {
            if (standbys_left > 0) {
                --standbys_left;
                result.launch_zone_requests.push_back(zid);
            } else {
                result.unserved_zone_ids.push_back(zid);
            }
            continue;
        }
        // Accepting the overlap makes the absorber answer for this zone too.
        auto& overlaps = peering.accepted_overlaps[candidates.front()->id];
        if (std::find(overlaps.begin(), overlaps.end(), zid) == overlaps.end()) {
            overlaps.push_back(zid);
            std::sort(overlaps.begin(), overlaps.end());
        }
        absorbed_zones.insert(zid);
    }

    // Step 3: reassign orphaned UEs of absorbed zones in priority order;
    // each UE moves at most once.
    const auto p1 = prio::rank_ues(network);
    for (NodeId ue_id : p1) {
        if (std::find(orphan_ues.begin(), orphan_ues.end(), ue_id) ==
            orphan_ues.end())
            continue;
        auto* ue = network.find_ue(ue_id);
        if (!ue || ue->served_by) continue;
        if (!absorbed_zones.count(ue->zone_id)) continue;
        topo::Uav* best = nullptr;
        for (auto& uav : network.uavs) {
            if (!uav.alive || !uav.backhauled) continue;
            if (topo::load_balance(uav) < 1) continue;
            if (uav.served_ue_ids.size() >= uav.total_user_slots_tu) continue;
            double consumed = 0.0;
            for (NodeId sid : uav.served_ue_ids) {
                const auto* served = network.find_ue(sid);
                consumed += served ? served->resources_re : 0.0;
            }
            if (consumed + ue->resources_re > uav.resources_rc) continue;
            if (topo::distance(uav.position, ue->position) > uav.radio_range_g)
                continue;
            if (!best || topo::load_balance(uav) > topo::load_balance(*best) ||
                (topo::load_balance(uav) == topo::load_balance(*best) &&
                 uav.id < best->id))
                best = &uav;
        }
        if (best) {
            ue->served_by = best->id;
            best->served_ue_ids.push_back(ue_id);
        }
    }

    // Step 4: re-elect if the controller died.
    const auto* controller = network.find_uav(*peering.controller_uav);
    if (!controller || !controller->alive) {
        const NodeId next = elect_controller(network);
        if (next >= 0)
            peering.controller_uav = next;
        else
            peering.controller_uav.reset();
    }
    return result;
}

} // namespace uavsim::ctrl
