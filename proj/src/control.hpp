#pragma once

#include "topology.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace uavsim::ctrl {

using topo::NetworkState;
using topo::NodeId;

struct PeeringState {
    std::optional<NodeId> controller_uav;
    // UAV -> zones it additionally accepts because of range overlap.
    std::map<NodeId, std::vector<NodeId>> accepted_overlaps;
};

struct FailureEvent {
    NodeId uav_id = -1;
    double detected_at = 0.0;
    std::vector<NodeId> unhandled_zone_ids;
};

struct ControlConfig {
    double hello_interval = 1.0;    // seconds, simulated
    std::uint32_t hello_miss_limit = 3;
};

// Mutual peering plus controller election: alive UAVs accept connections
// from every demand zone whose centroid falls inside their radio range, and
// the alive UAV nearest its MBS becomes the controller (ties by id).
// Throws std::runtime_error when no alive UAV exists.
PeeringState peer_and_elect(const NetworkState& network);

struct RebalanceResult {
    std::vector<FailureEvent> failures;
    // Zones whose demand could not be absorbed and want a standby launch.
    std::vector<NodeId> launch_zone_requests;
    // Zones left without UAV service (no absorber, no standby).
    std::vector<NodeId> unserved_zone_ids;
};

// Failure sweep: UAVs silent for more than miss_limit hello intervals are
// marked dead and their UEs orphaned. Orphaned demand is absorbed by alive
// UAVs with spare load-balance slots in range; otherwise a standby launch is
// requested; otherwise the zone is reported unserved. The controller is
// re-elected if it failed. Unabsorbed UEs end up unserved (served_by reset).
RebalanceResult detect_and_rebalance(NetworkState& network,
                                     PeeringState& peering, double now,
                                     std::uint32_t standby_available,
                                     const ControlConfig& config = {});

} // namespace uavsim::ctrl
