#pragma once

#include "priority.hpp"
#include "topology.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace uavsim::alloc {

using topo::NetworkState;
using topo::NodeId;

struct AllocationConfig {
    // Requests/round one UAV absorbs; divisor for the per-zone UAV count.
    double per_uav_request_capacity = 20.0;
    // 0 selects the default bound of zones * UAVs retries per call.
    std::uint64_t max_iterations = 0;
    prio::PriorityConfig feedback;
};

struct AllocationPlan {
    std::map<NodeId, std::vector<NodeId>> assignments;  // zone -> new UAVs
    std::map<NodeId, NodeId> mapping;                   // UE -> serving UAV
    std::map<NodeId, topo::Position> deploy_positions;  // UAV -> position
    std::vector<NodeId> unserved_zone_ids;
    std::uint64_t iterations_used = 1;
    std::uint64_t mapped_pairs = 0;  // successful zone-UAV pairings
    std::uint64_t mismatches = 0;    // out-of-range rejections
};

struct AllocationOutcome {
    AllocationPlan plan;
    prio::PriorityState priority; // demotions + feedback rates applied
};

// Raised when the reset-and-retry loop exhausts its iteration bound without
// reaching a consistent mapping.
class allocation_retry_error : public std::runtime_error {
  public:
    explicit allocation_retry_error(std::uint64_t iterations)
        : std::runtime_error("allocation: retry bound exhausted"),
          iterations_used(iterations) {}
    std::uint64_t iterations_used;
};

// One allocation round: zones with announced demand and no serving UAV are
// processed in P3 order; each receives up to ceil(demand / capacity) UAVs
// drawn from the head of P2. A drawn UAV whose current position cannot reach
// the zone resets the plan and sinks to the tail of P2. Unserved UEs of each
// newly covered zone are mapped round-robin onto the zone's UAVs, bounded by
// slots, resources, and the deployed radio range.
AllocationOutcome allocate(const NetworkState& network,
                           const prio::PriorityState& priority,
                           const AllocationConfig& config = {});

// Deployment position of the j-th UAV allocated to one zone: along the
// zone's radial bisector, anchored just inside direct MBS reach, extending
// outward one relay hop at a time.
topo::Position deploy_position(const topo::Position& centroid,
                               const topo::Position& mbs, std::size_t j,
                               double range);

// Distance from a point to a demand zone: its sector region when geometry
// is recorded, otherwise its centroid.
double zone_distance(const NetworkState& network, const topo::DemandZone& zone,
                     const topo::Position& point);

// Per-zone handling census for the likelihood model.
struct HandlingModel {
    std::uint64_t handled_by_uav_e1 = 0;
    std::uint64_t handled_by_mbs_e2 = 0;
    std::uint64_t total_ues = 0;
    std::uint32_t allocated_uavs_n0 = 0;
};

// Probability of users being handled: (e1 + e2) / |E|.
double pr_handled(const HandlingModel& model);

// Product-form likelihood that all UEs are handled under the given per-zone
// allocation counts:
//   prod_zones prod_ues Pr^n0 * (1 - Pr)^(|U| - n0)
double mapping_likelihood(std::span<const HandlingModel> per_zone_models,
                          std::uint32_t uav_count);

struct LikelihoodChoice {
    std::vector<std::uint32_t> n0_per_zone;
    double likelihood = 1.0;
};

// Exhaustive search of n0 in [0, uav_count] per zone for the allocation
// counts that maximize mapping_likelihood; ties break toward the smaller n0.
LikelihoodChoice maximize_mapping_likelihood(
    std::span<const HandlingModel> per_zone_models, std::uint32_t uav_count);

} // namespace uavsim::alloc
