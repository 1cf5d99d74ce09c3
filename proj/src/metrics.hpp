#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uavsim::metrics {

// Append-only trace records. Every metric is recomputable from the record
// stream alone; `config` carries the constants the aggregation needs.
enum class RecordKind : std::uint8_t {
    config,        // ue_count, uav_count, bands, horizon
    epoch,         // index, iterations, bands_used
    arrival,       // ue
    delivered,     // ue, tx_s, prop_s, proc_s, queue_s
    dropped,       // ue
    hello,         // uav
    failure,       // uav (the silent failure itself)
    detected,      // uav (heartbeat detector verdict)
    launch,        // uav
    route_request, // source uav
    route_ok,      // source uav, acquisition delay s
    route_fail,    // source uav
    zone_state,    // zone, assigned uavs, uav-served ues
    ue_final,      // ue, served, rate, rate_th, sinr, sinr_th, cap, cap_th
};

const char* record_kind_name(RecordKind kind);

struct Record {
    double time = 0.0;
    RecordKind kind = RecordKind::config;
    std::vector<double> values;
};

// One line per record: time,kind,values... with shortest round-trip number
// formatting, '\n' terminated, locale independent.
std::string serialize(std::span<const Record> records);

// The nine evaluation metrics of one run.
struct MetricsReport {
    double throughput_coverage_pct = 0.0;
    std::uint64_t allocation_iterations = 0;
    double guaranteed_sir_pct = 0.0;
    double per_ue_capacity_prob = 0.0;
    double messages_disseminated_pct = 0.0;
    double end_to_end_delay_s = 0.0;
    double link_utilization_pct = 0.0;
    double service_dissemination_rate = 0.0;
    double route_acquisition_delay_s = 0.0;
    bool empty_trace = false;

    // Stable metric ordering shared by CSV emission and the C API.
    static constexpr std::size_t kCount = 9;
    static const char* name(std::size_t index);
    double value(std::size_t index) const;
};

// Aggregate the nine metrics from a trace.
MetricsReport compute_metrics(std::span<const Record> records);

} // namespace uavsim::metrics
