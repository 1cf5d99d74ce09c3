#pragma once

#include "topology.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uavsim::route {

using topo::NodeId;

// One hello-refreshed routing-table row for a candidate relay UAV.
struct RouteEntry {
    NodeId uav_id = -1;
    double radio_range_g = 500.0;
    double intensity_eta = 0.0;
    double load_balance_lb = 0.0;
    double reliability_nr = 0.0;
    topo::Position position;
    double refreshed_at = 0.0;
};

// Endpoint of a route query; not subject to admission filtering.
struct RouteNode {
    NodeId id = -1;
    topo::Position position;
    double range = 500.0;
};

struct Route {
    std::vector<NodeId> hops; // source first, target last, acyclic
    double total_distance = 0.0;
    double nr = 0.0; // network reliability snapshot at selection time
    double cf = 0.0; // pending-request cost snapshot
    double lh = 0.0; // mapping-likelihood snapshot
};

// Captured once from the values seen at the initial mapping.
struct QosThresholds {
    double nr_th = 0.0;
    double cf_th = 0.0;
    double lh_th = 0.0;
};

struct Gammas {
    double g1 = 1.0 / 3.0;
    double g2 = 1.0 / 3.0;
    double g3 = 1.0 / 3.0;
};

// Reliability cost: g1/Sd + g2*Oc + g3*Lu with
//   Sd = sum(service demands) / uav_count
//   Oc = users_handled / max_capacity
//   Lu = bands_used / bands_total
// Callers realize the outer max by picking the candidate with the largest
// returned value.
double reliability_cost(std::span<const double> service_demands,
                        std::uint32_t uav_count, std::uint64_t users_handled_eh,
                        double max_capacity, std::uint32_t bands_used_nprime,
                        std::uint32_t bands_total_n, const Gammas& gammas = {});

struct ZoneLoad {
    double lambda = 0.0; // requests/s
    double omega = 1.0;  // bit/s
};

// Pending-request load, a per-zone sum of lambda/(mu*N*omega). Callers
// realize the cost function's min by picking the candidate configuration
// with the smallest returned value.
double pending_cost(std::span<const ZoneLoad> zone_loads, double mean_mu,
                    std::uint32_t bands_n);

struct RouteQuery {
    RouteNode source;
    RouteNode target;
    std::vector<RouteEntry> table; // caller supplies in P2 priority order
    QosThresholds thresholds;
    double network_nr = 0.0; // stamped onto the returned route
    double network_cf = 0.0;
    double network_lh = 0.0;
    double now = 0.0;
    double entry_expiry = 3.0; // entries older than this are evicted
};

// Route selection over indirect links: table entries are stably re-ranked by
// load balance, entries with N_r above the admission threshold are skipped,
// and among admissible hop sequences (every hop pair within mutual radio
// range) the shortest total distance wins. Distance ties break by fewer
// hops, then lexicographically smaller hop ids. Returns nullopt when no
// admissible path exists; the caller falls back to direct MBS service or
// reports the demand unserved.
std::optional<Route> select_route(const RouteQuery& query);

// Route rehabilitation: re-runs selection with the given UAVs excluded and
// additionally requires the rebuilt route's reliability snapshot to sit at
// or above the threshold.
std::optional<Route> rehabilitate(const Route& broken, const RouteQuery& query,
                                  std::span<const NodeId> excluded_uavs);

enum class QosVerdict { keep, reselect };

// QoS maintenance predicate: keep while all three snapshots hold at or above
// their thresholds; otherwise the caller resets and re-initiates selection.
QosVerdict qos_maintain(const Route& route, const QosThresholds& thresholds);

} // namespace uavsim::route
