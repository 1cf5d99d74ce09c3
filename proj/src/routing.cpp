#include "routing.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace uavsim::route {

double reliability_cost(std::span<const double> service_demands,
                        std::uint32_t uav_count, std::uint64_t users_handled_eh,
                        double max_capacity, std::uint32_t bands_used_nprime,
                        std::uint32_t bands_total_n, const Gammas& gammas) {
    if (uav_count == 0)
        throw std::domain_error("routing: reliability cost needs uav_count > 0");
    if (bands_total_n == 0)
        throw std::domain_error("routing: reliability cost needs bands_total >= 1");
    if (!(max_capacity > 0.0))
        throw std::domain_error("routing: reliability cost needs max_capacity > 0");
    double demand_sum = 0.0;
    for (double s : service_demands) demand_sum += s;
    const double sd = demand_sum / static_cast<double>(uav_count);
    if (!(sd > 0.0))
        throw std::domain_error("routing: service cost Sd is zero, reliability undefined");
    const double oc = static_cast<double>(users_handled_eh) / max_capacity;
    const double lu = static_cast<double>(bands_used_nprime) /
                      static_cast<double>(bands_total_n);
    return gammas.g1 / sd + gammas.g2 * oc + gammas.g3 * lu;
}

double pending_cost(std::span<const ZoneLoad> zone_loads, double mean_mu,
                    std::uint32_t bands_n) {
    if (!(mean_mu > 0.0))
        throw std::domain_error("routing: pending cost needs mu > 0");
    if (bands_n == 0)
        throw std::domain_error("routing: pending cost needs N >= 1");
    double total = 0.0;
    for (const auto& load : zone_loads) {
        if (!(load.omega > 0.0))
            throw std::domain_error("routing: zero-rate zone has unbounded backlog");
        total += load.lambda / (mean_mu * static_cast<double>(bands_n) * load.omega);
    }
    return total;
}

namespace {

struct Label {
    double dist = std::numeric_limits<double>::infinity();
    std::vector<NodeId> path;
    bool reached = false;
};

// (distance, hop count, lexicographic hop ids); strict "better than".
bool better(double dist_a, const std::vector<NodeId>& path_a, double dist_b,
            const std::vector<NodeId>& path_b) {
    if (dist_a != dist_b) return dist_a < dist_b;
    if (path_a.size() != path_b.size()) return path_a.size() < path_b.size();
    return path_a < path_b;
}

} // namespace

std::optional<Route> select_route(const RouteQuery& query) {
    // Fresh candidates, stably re-ranked by load balance over the caller's
    // P2 order, then admission-filtered on N_r.
    std::vector<RouteEntry> candidates;
    for (const auto& entry : query.table) {
        if (entry.uav_id == query.source.id || entry.uav_id == query.target.id)
            continue;
        if (query.now - entry.refreshed_at > query.entry_expiry) continue;
        candidates.push_back(entry);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const RouteEntry& a, const RouteEntry& b) {
                         return a.load_balance_lb > b.load_balance_lb;
                     });
    std::erase_if(candidates, [&](const RouteEntry& e) {
        return e.reliability_nr > query.thresholds.nr_th;
    });

    struct Node {
        NodeId id;
        topo::Position pos;
        double range;
    };
    std::vector<Node> nodes;
    nodes.push_back({query.source.id, query.source.position, query.source.range});
    for (const auto& e : candidates)
        nodes.push_back({e.uav_id, e.position, e.radio_range_g});
    nodes.push_back({query.target.id, query.target.position, query.target.range});
    const std::size_t n = nodes.size();
    const std::size_t src = 0;
    const std::size_t dst = n - 1;

    auto connected = [&](std::size_t a, std::size_t b) {
        const double d = topo::distance(nodes[a].pos, nodes[b].pos);
        return d <= std::min(nodes[a].range, nodes[b].range);
    };

    // Label-correcting sweep; composite order is additive, graphs are tiny.
    std::vector<Label> labels(n);
    labels[src] = {0.0, {nodes[src].id}, true};
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < n; ++a) {
            if (!labels[a].reached || a == dst) continue;
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b || b == src) continue;
                if (!connected(a, b)) continue;
                if (std::find(labels[a].path.begin(), labels[a].path.end(),
                              nodes[b].id) != labels[a].path.end())
                    continue; // acyclic
                const double d =
                    labels[a].dist + topo::distance(nodes[a].pos, nodes[b].pos);
                std::vector<NodeId> path = labels[a].path;
                path.push_back(nodes[b].id);
                if (!labels[b].reached ||
                    better(d, path, labels[b].dist, labels[b].path)) {
                    labels[b] = {d, std::move(path), true};
                    changed = true;
                }
            }
        }
    }
    if (!labels[dst].reached) return std::nullopt;

    Route route;
    route.hops = labels[dst].path;
    route.total_distance = labels[dst].dist;
    route.nr = query.network_nr;
    route.cf = query.network_cf;
    route.lh = query.network_lh;
    return route;
}

std::optional<Route> rehabilitate(const Route& broken, const RouteQuery& query,
                                  std::span<const NodeId> excluded_uavs) {
    (void)broken;
    RouteQuery filtered = query;
    std::unordered_set<NodeId> excluded(excluded_uavs.begin(), excluded_uavs.end());
    std::erase_if(filtered.table, [&](const RouteEntry& e) {
        return excluded.count(e.uav_id) > 0;
    });
    auto rebuilt = select_route(filtered);
    if (!rebuilt) return std::nullopt;
    if (rebuilt->nr < query.thresholds.nr_th) return std::nullopt;
    return rebuilt;
}

QosVerdict qos_maintain(const Route& route, const QosThresholds& thresholds) {
    const bool ok = route.nr >= thresholds.nr_th && route.cf >= thresholds.cf_th &&
                    route.lh >= thresholds.lh_th;
    return ok ? QosVerdict::keep : QosVerdict::reselect;
}

} // namespace uavsim::route
