#pragma once

#include "config.hpp"
#include "control.hpp"
#include "metrics.hpp"
#include "topology.hpp"

#include <cstdint>
#include <vector>

namespace uavsim::sim {

// Heap event kinds; the enum order is the tie rank at equal timestamps, so
// failures land before the hello round, launches before the epoch that maps
// them, and deliveries always follow the bookkeeping of the tick they share
// a timestamp with.
enum class EventKind : std::uint8_t {
    uav_failure = 0,
    uav_launch = 1,
    hello = 2,
    epoch_tick = 3,
    request_arrival = 4,
    packet_delivered = 5,
};

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::epoch_tick;
    std::int64_t id = 0;       // entity or message id
    std::uint64_t seq = 0;     // insertion order, final tie break
};

struct DelayBreakdown {
    double transmission = 0.0;
    double propagation = 0.0;
    double processing = 0.0;
    double queuing = 0.0;
    double total() const {
        return transmission + propagation + processing + queuing;
    }
};

struct SimResult {
    metrics::MetricsReport report;
    std::vector<metrics::Record> records;
    std::vector<ctrl::FailureEvent> failures;
};

// Entity id layout used by the builder: MBS 1, zones 100+, UAVs 200+,
// UEs 1000+.
constexpr topo::NodeId kMbsId = 1;
constexpr topo::NodeId kZoneIdBase = 100;
constexpr topo::NodeId kUavIdBase = 200;
constexpr topo::NodeId kUeIdBase = 1000;

// Seeded placement: one MBS at the area centre, K equal angular demand
// zones of the cell disc, UEs uniform in their zone sector, UAVs uniform in
// the spawn disc.
topo::NetworkState build_topology(const cfg::ScenarioConfig& config,
                                  std::uint64_t seed);

// One deterministic run: identical (config, seed) pairs produce identical
// records and reports. Throws cfg::config_error on an invalid config and
// std::logic_error naming the violated invariant on a mid-run breach.
SimResult run(const cfg::ScenarioConfig& config, std::uint64_t seed);

} // namespace uavsim::sim
