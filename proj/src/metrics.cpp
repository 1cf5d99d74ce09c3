#include "metrics.hpp"

#include <charconv>
#include <stdexcept>

namespace uavsim::metrics {

const char* record_kind_name(RecordKind kind) {
    switch (kind) {
    case RecordKind::config: return "config";
    case RecordKind::epoch: return "epoch";
    case RecordKind::arrival: return "arrival";
    case RecordKind::delivered: return "delivered";
    case RecordKind::dropped: return "dropped";
    case RecordKind::hello: return "hello";
    case RecordKind::failure: return "failure";
    case RecordKind::detected: return "detected";
    case RecordKind::launch: return "launch";
    case RecordKind::route_request: return "route_request";
    case RecordKind::route_ok: return "route_ok";
    case RecordKind::route_fail: return "route_fail";
    case RecordKind::zone_state: return "zone_state";
    case RecordKind::ue_final: return "ue_final";
    }
    return "?";
}

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

} // namespace

std::string serialize(std::span<const Record> records) {
    std::string out;
    out.reserve(records.size() * 32);
    for (const auto& r : records) {
        append_double(out, r.time);
        out += ',';
        out += record_kind_name(r.kind);
        for (double v : r.values) {
            out += ',';
            append_double(out, v);
        }
        out += '\n';
    }
    return out;
}

const char* MetricsReport::name(std::size_t index) {
    static const char* names[kCount] = {
        "throughput_coverage",      "allocation_iterations",
        "guaranteed_sir",           "per_ue_capacity_prob",
        "messages_disseminated",    "end_to_end_delay",
        "link_utilization",         "service_dissemination_rate",
        "route_acquisition_delay",
    };
    if (index >= kCount) throw std::out_of_range("metric index");
    return names[index];
}

double MetricsReport::value(std::size_t index) const {
    switch (index) {
    case 0: return throughput_coverage_pct;
    case 1: return static_cast<double>(allocation_iterations);
    case 2: return guaranteed_sir_pct;
    case 3: return per_ue_capacity_prob;
    case 4: return messages_disseminated_pct;
    case 5: return end_to_end_delay_s;
    case 6: return link_utilization_pct;
    case 7: return service_dissemination_rate;
    case 8: return route_acquisition_delay_s;
    }
    throw std::out_of_range("metric index");
}

MetricsReport compute_metrics(std::span<const Record> records) {
    MetricsReport report;
    if (records.empty()) {
        report.empty_trace = true;
        return report;
    }

    double bands_total = 0.0;
    double horizon = 0.0;
    std::uint64_t arrivals = 0;
    std::uint64_t delivered = 0;
    double delay_sum = 0.0;
    double band_share_sum = 0.0;
    std::uint64_t epochs = 0;
    double acquisition_sum = 0.0;
    std::uint64_t acquisitions = 0;
    std::uint64_t ue_total = 0;
    std::uint64_t covered = 0;
    std::uint64_t sir_ok = 0;
    std::uint64_t cap_ok = 0;

    for (const auto& r : records) {
        switch (r.kind) {
        case RecordKind::config:
            bands_total = r.values.at(2);
            horizon = r.values.at(3);
            break;
        case RecordKind::epoch:
            report.allocation_iterations +=
                static_cast<std::uint64_t>(r.values.at(1));
            if (bands_total > 0) band_share_sum += r.values.at(2) / bands_total;
            ++epochs;
            break;
        case RecordKind::arrival:
            ++arrivals;
            break;
        case RecordKind::delivered:
            ++delivered;
            delay_sum += r.values.at(1) + r.values.at(2) + r.values.at(3) +
                         r.values.at(4);
            break;
        case RecordKind::route_ok:
            acquisition_sum += r.values.at(1);
            ++acquisitions;
            break;
        case RecordKind::ue_final: {
            ++ue_total;
            const bool served = r.values.at(1) != 0.0;
            if (served && r.values.at(2) >= r.values.at(3)) ++covered;
            if (served && r.values.at(4) >= r.values.at(5)) ++sir_ok;
            if (served && r.values.at(6) >= r.values.at(7)) ++cap_ok;
            break;
        }
        default:
            break;
        }
    }

    if (ue_total > 0) {
        report.throughput_coverage_pct =
            100.0 * static_cast<double>(covered) / static_cast<double>(ue_total);
        report.guaranteed_sir_pct =
            100.0 * static_cast<double>(sir_ok) / static_cast<double>(ue_total);
        report.per_ue_capacity_prob =
            static_cast<double>(cap_ok) / static_cast<double>(ue_total);
    }
    if (arrivals > 0)
        report.messages_disseminated_pct =
            100.0 * static_cast<double>(delivered) / static_cast<double>(arrivals);
    if (delivered > 0)
        report.end_to_end_delay_s = delay_sum / static_cast<double>(delivered);
    if (epochs > 0)
        report.link_utilization_pct =
            100.0 * band_share_sum / static_cast<double>(epochs);
    if (horizon > 0)
        report.service_dissemination_rate =
            static_cast<double>(delivered) / horizon;
    if (acquisitions > 0)
        report.route_acquisition_delay_s =
            acquisition_sum / static_cast<double>(acquisitions);
    return report;
}

} // namespace uavsim::metrics
