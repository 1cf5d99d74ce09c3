#include "priority.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace uavsim::prio {

namespace {

double mbs_distance(const NetworkState& net, const topo::Position& pos) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mbs : net.mbs_list)
        best = std::min(best, topo::distance(pos, mbs.position));
    return best;
}

bool zone_covered_by_uav(const NetworkState& net, NodeId zone_id) {
    const auto* zone = net.find_zone(zone_id);
    if (!zone) return false;
    for (const auto& uav : net.uavs)
        if (uav.alive &&
            topo::distance(uav.position, zone->centroid) <= uav.radio_range_g)
            return true;
    return false;
}

} // namespace

std::vector<NodeId> rank_zones(const NetworkState& network) {
    std::vector<const topo::DemandZone*> zs;
    zs.reserve(network.zones.size());
    for (const auto& z : network.zones) zs.push_back(&z);
    std::sort(zs.begin(), zs.end(), [](const auto* a, const auto* b) {
        if (a->request_rate_lambda != b->request_rate_lambda)
            return a->request_rate_lambda > b->request_rate_lambda;
        return a->id < b->id;
    });
    std::vector<NodeId> out;
    out.reserve(zs.size());
    for (const auto* z : zs) out.push_back(z->id);
    return out;
}

std::vector<NodeId> rank_ues(const NetworkState& network) {
    struct Key {
        NodeId id;
        std::uint64_t requests;
        double mbs_dist;
        bool covered;
    };
    std::vector<Key> keys;
    keys.reserve(network.ues.size());
    for (const auto& ue : network.ues) {
        keys.push_back({ue.id, ue.request_count,
                        mbs_distance(network, ue.position),
                        zone_covered_by_uav(network, ue.zone_id)});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.requests != b.requests) return a.requests > b.requests;
        if (a.mbs_dist != b.mbs_dist) return a.mbs_dist > b.mbs_dist;
        if (a.covered != b.covered) return a.covered;
        return a.id < b.id;
    });
    std::vector<NodeId> out;
    out.reserve(keys.size());
    for (const auto& k : keys) out.push_back(k.id);
    return out;
}

std::vector<NodeId> rank_uavs(const NetworkState& network) {
    struct Key {
        NodeId id;
        double headroom;
        std::int64_t lb;
        double mbs_dist;
    };
    std::vector<Key> keys;
    for (const auto& uav : network.uavs) {
        if (!uav.alive) continue;
        double consumed = 0.0;
        for (NodeId ue_id : uav.served_ue_ids) {
            const auto* ue = network.find_ue(ue_id);
            consumed += ue ? ue->resources_re : 0.0;
        }
        keys.push_back({uav.id, uav.resources_rc - consumed,
                        topo::load_balance(uav),
                        mbs_distance(network, uav.position)});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.headroom != b.headroom) return a.headroom > b.headroom;
        if (a.lb != b.lb) return a.lb > b.lb;
        if (a.mbs_dist != b.mbs_dist) return a.mbs_dist < b.mbs_dist;
        return a.id < b.id;
    });
    std::vector<NodeId> out;
    out.reserve(keys.size());
    for (const auto& k : keys) out.push_back(k.id);
    return out;
}

PriorityState form_sets(const NetworkState& network, const PriorityState& prev) {
    PriorityState next = prev;
    next.p1 = rank_ues(network);
    next.p2 = rank_uavs(network);
    next.p3 = rank_zones(network);
    return next;
}

PriorityState record_feedback(const PriorityState& state, std::uint64_t mapped,
                              std::uint64_t mismatched,
                              const PriorityConfig& config) {
    const std::uint64_t total = mapped + mismatched;
    if (total == 0)
        throw std::domain_error("priority: feedback with no mapping outcomes");
    PriorityState next = state;
    const double prev_error = state.error_rate;
    next.error_rate = static_cast<double>(mismatched) / static_cast<double>(total);
    next.feedback_rate = static_cast<double>(mapped) / static_cast<double>(total);
    next.learning_rate = std::clamp(
        state.learning_rate + config.kappa * (next.error_rate - prev_error), 0.0,
        1.0);
    next.epoch = state.epoch + 1;
    return next;
}

} // namespace uavsim::prio
