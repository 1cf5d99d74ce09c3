#include "allocation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace uavsim::alloc {

namespace {

// Chain anchor stays just inside direct MBS reach; consecutive chain
// positions sit well inside one radio range of each other.
constexpr double kAnchorRangeFactor = 0.95;
constexpr double kChainSpacingFactor = 0.85;

} // namespace

topo::Position deploy_position(const topo::Position& centroid,
                               const topo::Position& mbs, std::size_t j,
                               double range) {
    const double rho = topo::distance(centroid, mbs);
    if (rho <= 0.0) return centroid;
    // Walk the zone's radial bisector: the anchor keeps a direct MBS link,
    // each further unit extends an outward relay chain over the zone.
    const double base = std::min(kAnchorRangeFactor * range, rho);
    const double r = base + static_cast<double>(j) * kChainSpacingFactor * range;
    const double ux = (centroid.x - mbs.x) / rho;
    const double uy = (centroid.y - mbs.y) / rho;
    return {mbs.x + r * ux, mbs.y + r * uy};
}

double zone_distance(const NetworkState& network, const topo::DemandZone& zone,
                     const topo::Position& point) {
    if (zone.sector_radius > 0.0) {
        const auto* mbs = network.find_mbs(zone.mbs_id);
        if (mbs)
            return topo::sector_distance(mbs->position, zone.sector_radius,
                                         zone.sector_theta0, zone.sector_theta,
                                         point);
    }
    return topo::distance(zone.centroid, point);
}

AllocationOutcome allocate(const NetworkState& network,
                           const prio::PriorityState& priority,
                           const AllocationConfig& config) {
    if (network.mbs_list.empty())
        throw std::domain_error("allocation: no MBS with announced demand zones");
    if (!(config.per_uav_request_capacity > 0.0))
        throw std::domain_error("allocation: per-UAV request capacity must be > 0");

    const std::uint64_t max_iterations =
        config.max_iterations > 0
            ? config.max_iterations
            : std::max<std::uint64_t>(1, network.zones.size() * network.uavs.size());

    // Zones that announced demand and have no alive serving UAV, in P3 order.
    std::unordered_set<NodeId> covered_zones;
    for (const auto& uav : network.uavs)
        if (uav.alive && uav.assigned_zone) covered_zones.insert(*uav.assigned_zone);
    std::vector<const topo::DemandZone*> pending;
    for (NodeId zid : priority.p3) {
        const auto* zone = network.find_zone(zid);
        if (!zone) continue;
        if (zone->request_rate_lambda <= 0.0) continue;
        if (covered_zones.count(zid)) continue;
        pending.push_back(zone);
    }

    // Working P2 order; failed UAVs sink to the tail and stay there in the
    // returned priority state.
    std::deque<NodeId> p2_order;
    std::unordered_set<NodeId> assignable;
    for (NodeId uid : priority.p2) {
        const auto* uav = network.find_uav(uid);
        if (uav && uav->alive && !uav->assigned_zone) {
            p2_order.push_back(uid);
            assignable.insert(uid);
        }
    }

    AllocationPlan plan;
    // Each (zone, UAV) pairing is attempted at most once per call, which is
    // exactly what bounds the reset loop by zones * UAVs.
    std::set<std::pair<NodeId, NodeId>> rejected;
    while (true) {
        plan.assignments.clear();
        plan.mapping.clear();
        plan.deploy_positions.clear();
        plan.unserved_zone_ids.clear();

        std::deque<NodeId> available = p2_order;
        bool reset = false;
        for (const auto* zone : pending) {
            const auto needed = static_cast<std::uint64_t>(std::ceil(
                zone->request_rate_lambda / config.per_uav_request_capacity));
            std::vector<NodeId> taken;
            std::deque<NodeId> skipped;
            while (taken.size() < needed && !available.empty()) {
                const NodeId uid = available.front();
                available.pop_front();
                if (rejected.count({zone->id, uid})) {
                    skipped.push_back(uid); // stays available to later zones
                    continue;
                }
                const auto* uav = network.find_uav(uid);
                if (zone_distance(network, *zone, uav->position) <=
                    uav->radio_range_g) {
                    taken.push_back(uid);
                    continue;
                }
                // Out of radio reach: demote and replan from the top.
                ++plan.mismatches;
                rejected.insert({zone->id, uid});
                p2_order.erase(std::find(p2_order.begin(), p2_order.end(), uid));
                p2_order.push_back(uid);
                if (plan.iterations_used >= max_iterations)
                    throw allocation_retry_error(plan.iterations_used);
                ++plan.iterations_used;
                reset = true;
                break;
            }
            for (NodeId uid : skipped) available.push_back(uid);
            if (reset) break;
            if (taken.empty()) {
                plan.unserved_zone_ids.push_back(zone->id);
                continue;
            }
            plan.assignments[zone->id] = taken;
            const auto* zone_mbs = network.find_mbs(zone->mbs_id);
            const topo::Position mbs_pos =
                zone_mbs ? zone_mbs->position : zone->centroid;
            for (std::size_t j = 0; j < taken.size(); ++j) {
                const auto* uav = network.find_uav(taken[j]);
                plan.deploy_positions[taken[j]] = deploy_position(
                    zone->centroid, mbs_pos, j, uav->radio_range_g);
            }
        }
        if (!reset) break;
    }
    for (const auto& [zone_id, uav_ids] : plan.assignments)
        plan.mapped_pairs += uav_ids.size();

    // Map unserved UEs of each newly covered zone onto its UAVs, P1 order,
    // round-robin, bounded by slots, resources, and deployed reach.
    struct Budget {
        std::uint32_t slots;
        double resources;
        topo::Position pos;
        double range;
    };
    std::unordered_map<NodeId, Budget> budgets;
    for (const auto& [zone_id, uav_ids] : plan.assignments) {
        for (NodeId uid : uav_ids) {
            const auto* uav = network.find_uav(uid);
            double consumed = 0.0;
            for (NodeId served : uav->served_ue_ids) {
                const auto* ue = network.find_ue(served);
                consumed += ue ? ue->resources_re : 0.0;
            }
            budgets[uid] = {uav->total_user_slots_tu -
                                static_cast<std::uint32_t>(uav->served_ue_ids.size()),
                            uav->resources_rc - consumed, plan.deploy_positions[uid],
                            uav->radio_range_g};
        }
    }
    for (NodeId ue_id : priority.p1) {
        const auto* ue = network.find_ue(ue_id);
        if (!ue || ue->served_by) continue;
        auto it = plan.assignments.find(ue->zone_id);
        if (it == plan.assignments.end()) continue;
        // Rotate the start index so stacked UAVs share the zone load.
        const auto& uav_ids = it->second;
        std::size_t start = plan.mapping.size() % uav_ids.size();
        for (std::size_t k = 0; k < uav_ids.size(); ++k) {
            const NodeId uid = uav_ids[(start + k) % uav_ids.size()];
            Budget& b = budgets[uid];
            if (b.slots == 0 || b.resources < ue->resources_re) continue;
            if (topo::distance(b.pos, ue->position) > b.range) continue;
            plan.mapping[ue_id] = uid;
            --b.slots;
            b.resources -= ue->resources_re;
            break;
        }
    }

    AllocationOutcome outcome;
    outcome.priority = priority;
    outcome.priority.p2.assign(p2_order.begin(), p2_order.end());
    // Demoted UAVs keep their position relative to the non-assignable tail.
    for (NodeId uid : priority.p2)
        if (!assignable.count(uid)) outcome.priority.p2.push_back(uid);
    if (plan.mapped_pairs + plan.mismatches > 0)
        outcome.priority = prio::record_feedback(
            outcome.priority, plan.mapped_pairs, plan.mismatches, config.feedback);
    outcome.plan = std::move(plan);
    return outcome;
}

double pr_handled(const HandlingModel& model) {
    if (model.total_ues == 0)
        throw std::domain_error("handling model: total_ues must be > 0");
    if (model.handled_by_uav_e1 + model.handled_by_mbs_e2 > model.total_ues)
        throw std::domain_error("handling model: e1 + e2 exceeds |E|");
    return static_cast<double>(model.handled_by_uav_e1 + model.handled_by_mbs_e2) /
           static_cast<double>(model.total_ues);
}

namespace {

double zone_term(double pr, std::uint32_t n0, std::uint32_t uav_count,
                 std::uint64_t ues) {
    // pow(0,0) == 1 keeps the degenerate Pr in {0,1} endpoints well defined.
    const double per_ue = std::pow(pr, static_cast<double>(n0)) *
                          std::pow(1.0 - pr, static_cast<double>(uav_count - n0));
    return std::pow(per_ue, static_cast<double>(ues));
}

} // namespace

double mapping_likelihood(std::span<const HandlingModel> per_zone_models,
                          std::uint32_t uav_count) {
    double product = 1.0;
    for (const auto& model : per_zone_models) {
        if (model.allocated_uavs_n0 > uav_count)
            throw std::domain_error("handling model: n0 exceeds UAV count");
        product *= zone_term(pr_handled(model), model.allocated_uavs_n0,
                             uav_count, model.total_ues);
    }
    return product;
}

LikelihoodChoice maximize_mapping_likelihood(
    std::span<const HandlingModel> per_zone_models, std::uint32_t uav_count) {
    LikelihoodChoice choice;
    // The product separates per zone, so each factor maximizes independently.
    for (const auto& model : per_zone_models) {
        const double pr = pr_handled(model);
        std::uint32_t best_n0 = 0;
        double best = zone_term(pr, 0, uav_count, model.total_ues);
        for (std::uint32_t n0 = 1; n0 <= uav_count; ++n0) {
            const double v = zone_term(pr, n0, uav_count, model.total_ues);
            if (v > best) {
                best = v;
                best_n0 = n0;
            }
        }
        choice.n0_per_zone.push_back(best_n0);
        choice.likelihood *= best;
    }
    return choice;
}

} // namespace uavsim::alloc
