#pragma once

#include "topology.hpp"

#include <cstdint>
#include <vector>

namespace uavsim::prio {

using topo::NetworkState;
using topo::NodeId;

// The decision schema keeps three ordered priority sets. Set-level
// precedence is fixed: decisions consult P3 (zones) before P1 (UEs) before
// P2 (UAVs). The scalar rates drive the feedback loop that can force a
// network remap.
struct PriorityState {
    std::vector<NodeId> p1; // UEs
    std::vector<NodeId> p2; // UAVs
    std::vector<NodeId> p3; // zones
    double learning_rate = 0.5;
    double feedback_rate = 1.0;
    double error_rate = 0.0;
    std::uint64_t epoch = 0;
};

struct PriorityConfig {
    double kappa = 0.1;           // learning-rate update gain
    double reset_threshold = 0.5; // error_rate above this forces a remap
};

// Zones sorted by descending aggregate request rate; ties break by smaller
// zone id.
std::vector<NodeId> rank_zones(const NetworkState& network);

// UEs sorted by descending generated-request count, then descending distance
// from their MBS, then preferring UEs whose zone centroid lies within an
// alive UAV's radio range, then ascending id.
std::vector<NodeId> rank_ues(const NetworkState& network);

// UAVs sorted by descending resource headroom (R_c minus consumed), then
// descending load-balance slack, then ascending distance to the nearest MBS,
// then ascending id. Dead UAVs are excluded.
std::vector<NodeId> rank_uavs(const NetworkState& network);

// Convenience: build all three sets for the current network snapshot,
// carrying the rates over from `prev`.
PriorityState form_sets(const NetworkState& network, const PriorityState& prev);

// Fold one mapping round into the schema rates. error_rate becomes
// mismatched/(mapped+mismatched), feedback_rate its complement, and the
// learning rate moves by kappa times the error-rate delta, clamped to [0,1].
// Callers must reset the mapping when error_rate exceeds
// config.reset_threshold.
PriorityState record_feedback(const PriorityState& state, std::uint64_t mapped,
                              std::uint64_t mismatched,
                              const PriorityConfig& config = {});

} // namespace uavsim::prio
