#include "simengine.hpp"

#include "allocation.hpp"
#include "priority.hpp"
#include "radio.hpp"
#include "routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace uavsim::sim {

namespace {

constexpr double kSpeedOfLight = 299792458.0; // m/s
constexpr double kMinLinkDistance = 1.0;      // m, radio-math clamp

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return a.kind > b.kind;
        if (a.id != b.id) return a.id > b.id;
        return a.seq > b.seq;
    }
};

// Deterministic draws independent of library distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double exponential(double mean) {
        return -mean * std::log1p(-uniform01());
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace

topo::NetworkState build_topology(const cfg::ScenarioConfig& config,
                                  std::uint64_t seed) {
    Rng rng(seed);
    topo::NetworkState net;
    net.area_a = config.a * config.a;

    topo::Mbs mbs;
    mbs.id = kMbsId;
    mbs.position = {config.a / 2.0, config.a / 2.0};
    mbs.max_uav_links = config.max_cm;

    const double sector = 2.0 * std::numbers::pi / static_cast<double>(config.k);
    for (std::uint32_t i = 0; i < config.k; ++i) {
        topo::DemandZone zone;
        zone.id = kZoneIdBase + static_cast<topo::NodeId>(i);
        zone.mbs_id = mbs.id;
        zone.centroid = topo::sector_centroid(mbs.position, config.cell_radius,
                                              sector * i, sector);
        zone.sector_theta0 = sector * i;
        zone.sector_theta = sector;
        zone.sector_radius = config.cell_radius;
        net.zones.push_back(zone);
        mbs.zones.push_back(zone.id);
    }
    net.mbs_list.push_back(mbs);

    for (std::uint32_t i = 0; i < config.e; ++i) {
        topo::Ue ue;
        ue.id = kUeIdBase + static_cast<topo::NodeId>(i);
        const auto zone_index =
            std::min<std::uint32_t>(static_cast<std::uint32_t>(rng.uniform01() *
                                                               config.k),
                                    config.k - 1);
        ue.zone_id = kZoneIdBase + static_cast<topo::NodeId>(zone_index);
        const double r = config.cell_radius * std::sqrt(rng.uniform01());
        const double phi = sector * zone_index + rng.uniform01() * sector;
        ue.position = {mbs.position.x + r * std::cos(phi),
                       mbs.position.y + r * std::sin(phi)};
        ue.service_demand_s = config.s;
        ue.resources_re = config.r_e;
        net.ues.push_back(ue);
        net.find_zone(ue.zone_id)->ue_ids.push_back(ue.id);
        net.find_zone(ue.zone_id)->request_rate_lambda += config.s;
    }

    for (std::uint32_t j = 0; j < config.u; ++j) {
        topo::Uav uav;
        uav.id = kUavIdBase + static_cast<topo::NodeId>(j);
        const double r = config.uav_spawn_radius * std::sqrt(rng.uniform01());
        const double phi = rng.uniform01() * 2.0 * std::numbers::pi;
        uav.position = {mbs.position.x + r * std::cos(phi),
                        mbs.position.y + r * std::sin(phi)};
        uav.radio_range_g = config.g;
        uav.resources_rc = config.r_c;
        uav.total_user_slots_tu = config.t_u;
        net.uavs.push_back(uav);
    }
    return net;
}

namespace {

struct Msg {
    topo::NodeId ue = -1;
    double arrival = 0.0;
    double deliver_at = 0.0;
    DelayBreakdown delay;
    std::vector<topo::NodeId> via_uavs; // serving UAV plus relay hops
};

struct UeLink {
    double sinr = 0.0;
    double rate = 0.0;      // unshared link rate, bit/s
    double path_dist = 0.0; // MBS -> (relays) -> server -> UE
};

class Simulator {
  public:
    Simulator(const cfg::ScenarioConfig& config, std::uint64_t seed)
        : cfg_(config), seed_(seed), rng_(seed ^ 0x517cc1b727220a95ULL),
          params_(cfg::radio_params(config)) {}

    SimResult run();

  private:
    // --- setup -----------------------------------------------------------
    void capture_initial_thresholds();
    void schedule(double time, EventKind kind, std::int64_t id);

    // --- event handlers ---------------------------------------------------
    void on_epoch(double t);
    void on_arrival(double t, topo::NodeId ue_id);
    void on_delivered(double t, std::int64_t msg_id);
    void on_hello(double t, topo::NodeId uav_id);
    void on_failure(double t, topo::NodeId uav_id);
    void on_launch(double t, topo::NodeId uav_id);

    // --- epoch stages ------------------------------------------------------
    void reset_network();
    void run_rebalance(double t);
    void run_allocation(double t);
    void resolve_backhaul(double t);
    void service_sweep();
    void recompute_links();
    void update_network_costs(double t);
    void rebuild_links_and_counts();
    void check_invariants() const;

    // --- helpers -----------------------------------------------------------
    double clamp_dist(double d) const { return std::max(d, kMinLinkDistance); }
    bool transmitting(const topo::Uav& uav) const;
    bool uav_operational(topo::NodeId id) const;
    std::vector<route::RouteEntry> route_table(topo::NodeId source) const;
    std::uint32_t bands_in_use() const;
    void record(double t, metrics::RecordKind kind, std::vector<double> values);
    void drop_msgs_via(double t, topo::NodeId uav_id);

    cfg::ScenarioConfig cfg_;
    std::uint64_t seed_;
    Rng rng_; // traffic stream; placement draws from its own seeded stream
    radio::RadioParams params_;

    topo::NetworkState net_;
    prio::PriorityState prio_;
    ctrl::PeeringState peering_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::uint64_t seq_ = 0;

    std::vector<metrics::Record> records_;
    std::vector<ctrl::FailureEvent> failures_;

    std::map<topo::NodeId, UeLink> links_;
    std::map<topo::NodeId, double> rate_th_, sir_th_, cap_th_;
    std::map<topo::NodeId, double> busy_until_;

    std::map<std::int64_t, Msg> pending_;
    std::int64_t next_msg_id_ = 0;

    std::set<topo::NodeId> silent_;          // failed, not yet detected
    std::map<topo::NodeId, route::Route> active_routes_;
    std::map<topo::NodeId, topo::NodeId> launch_target_; // uav -> zone

    route::QosThresholds thresholds_;
    bool thresholds_captured_ = false;
    // Dynamic channel plan: bands go to the transmitting fleet in id order,
    // rebuilt every epoch. The MBS stays on band 0.
    std::map<topo::NodeId, std::uint32_t> band_plan_;
    std::uint32_t bands_used_ = 0;
    double net_nr_ = 0.0, net_cf_ = 0.0, net_lh_ = 0.0;

    std::uint32_t standby_left_ = 0;
    std::uint32_t next_uav_index_ = 0;
    std::uint64_t epoch_index_ = 0;
    std::uint64_t epoch_iterations_ = 0;
    std::uint64_t last_epoch_iterations_ = 0;
    bool reset_pending_ = false;

    std::uint64_t generated_ = 0, delivered_ = 0, dropped_ = 0;
};

void Simulator::record(double t, metrics::RecordKind kind,
                       std::vector<double> values) {
    records_.push_back({t, kind, std::move(values)});
}

void Simulator::schedule(double time, EventKind kind, std::int64_t id) {
    queue_.push({time, kind, id, seq_++});
}

bool Simulator::uav_operational(topo::NodeId id) const {
    const auto* uav = net_.find_uav(id);
    return uav && uav->alive && !silent_.count(id);
}

bool Simulator::transmitting(const topo::Uav& uav) const {
    if (!uav.alive || silent_.count(uav.id)) return false;
    if (!uav.served_ue_ids.empty()) return true;
    for (const auto& [owner, route] : active_routes_) {
        const auto* owning = net_.find_uav(owner);
        if (!owning || !owning->backhauled) continue;
        if (std::find(route.hops.begin(), route.hops.end(), uav.id) !=
            route.hops.end())
            return true;
    }
    return false;
}

void Simulator::capture_initial_thresholds() {
    // All UEs start on the MBS with no co-channel UAV deployed; the link
    // quality seen here becomes the per-UE guarantee reference.
    const auto& mbs = net_.mbs_list.front();
    for (const auto& ue : net_.ues) {
        radio::LinkGeometry geom;
        geom.distance_g = clamp_dist(topo::distance(ue.position, mbs.position));
        const double sinr0 = radio::sinr(params_, geom);
        sir_th_[ue.id] = sinr0;
        rate_th_[ue.id] = radio::data_rate(params_, sinr0);
        cap_th_[ue.id] = radio::per_ue_capacity(params_, sinr0, 1);
    }
}

std::vector<route::RouteEntry> Simulator::route_table(topo::NodeId source) const {
    std::vector<route::RouteEntry> table;
    for (const auto& uav : net_.uavs) {
        if (!uav.alive || uav.id == source) continue;
        route::RouteEntry entry;
        entry.uav_id = uav.id;
        entry.radio_range_g = uav.radio_range_g;
        entry.position = uav.position;
        entry.refreshed_at = uav.last_hello_time;
        entry.load_balance_lb = static_cast<double>(topo::load_balance(uav));
        if (uav.served_ue_ids.empty()) {
            entry.reliability_nr = 0.0;
            entry.intensity_eta = radio::network_intensity(
                params_, uav.radio_range_g, 1.0);
        } else {
            std::vector<double> demands;
            double sinr_sum = 0.0;
            for (topo::NodeId ue_id : uav.served_ue_ids) {
                const auto* ue = net_.find_ue(ue_id);
                demands.push_back(ue ? ue->service_demand_s : 0.0);
                auto it = links_.find(ue_id);
                sinr_sum += it != links_.end() ? it->second.sinr : 0.0;
            }
            const double mean_sinr =
                std::max(sinr_sum / static_cast<double>(demands.size()), 1e-12);
            entry.reliability_nr = route::reliability_cost(
                demands, 1, uav.served_ue_ids.size(),
                static_cast<double>(cfg_.t_u), 1, cfg_.n,
                {cfg_.gamma1, cfg_.gamma2, cfg_.gamma3});
            entry.intensity_eta =
                radio::network_intensity(params_, uav.radio_range_g, mean_sinr);
        }
        table.push_back(entry);
    }
    return table;
}

std::uint32_t Simulator::bands_in_use() const { return bands_used_; }

void Simulator::reset_network() {
    for (auto& uav : net_.uavs) {
        uav.assigned_zone.reset();
        uav.served_ue_ids.clear();
        uav.mbs_links_cm = 0;
        uav.uav_links_cu = 0;
    }
    for (auto& ue : net_.ues) ue.served_by.reset();
    active_routes_.clear();
    net_.links.clear();
}

void Simulator::run_rebalance(double t) {
    if (!peering_.controller_uav) return;
    auto result = ctrl::detect_and_rebalance(
        net_, peering_, t, standby_left_,
        {cfg_.hello_interval, cfg_.hello_miss_limit});
    for (const auto& ev : result.failures) {
        record(t, metrics::RecordKind::detected, {static_cast<double>(ev.uav_id)});
        silent_.erase(ev.uav_id);
        active_routes_.erase(ev.uav_id);
        failures_.push_back(ev);
    }
    for (topo::NodeId zone_id : result.launch_zone_requests) {
        --standby_left_;
        const topo::NodeId uav_id =
            kUavIdBase + static_cast<topo::NodeId>(next_uav_index_++);
        launch_target_[uav_id] = zone_id;
        schedule(t + cfg_.launch_delay, EventKind::uav_launch, uav_id);
    }
}

void Simulator::run_allocation(double t) {
    (void)t;
    prio_ = prio::form_sets(net_, prio_);
    alloc::AllocationConfig acfg;
    acfg.per_uav_request_capacity = static_cast<double>(cfg_.t_u);
    acfg.max_iterations = cfg_.max_iterations;
    acfg.feedback = {cfg_.kappa, cfg_.reset_threshold};
    try {
        auto outcome = alloc::allocate(net_, prio_, acfg);
        epoch_iterations_ = outcome.plan.iterations_used;
        prio_ = outcome.priority;
        for (const auto& [uav_id, pos] : outcome.plan.deploy_positions)
            net_.find_uav(uav_id)->position = pos;
        for (const auto& [zone_id, uav_ids] : outcome.plan.assignments)
            for (topo::NodeId uav_id : uav_ids)
                net_.find_uav(uav_id)->assigned_zone = zone_id;
        for (const auto& [ue_id, uav_id] : outcome.plan.mapping) {
            auto* ue = net_.find_ue(ue_id);
            ue->served_by = uav_id;
            net_.find_uav(uav_id)->served_ue_ids.push_back(ue_id);
        }
        // A reset remaps existing assignments, so it only applies when this
        // round actually paired UAVs with zones; pure rejection rounds would
        // otherwise thrash the stable part of the mapping forever.
        if (outcome.plan.mapped_pairs > 0 &&
            prio_.error_rate > cfg_.reset_threshold)
            reset_pending_ = true;
    } catch (const alloc::allocation_retry_error& e) {
        epoch_iterations_ = e.iterations_used;
        reset_pending_ = true;
    }
}

void Simulator::resolve_backhaul(double t) {
    const auto& mbs = net_.mbs_list.front();
    // Neighbour budgets enforce the connection caps while routes activate.
    std::map<topo::NodeId, std::set<topo::NodeId>> uav_neighbors;
    std::map<topo::NodeId, bool> has_mbs_link;

    auto hops_ok = [&](const route::Route& r) {
        for (std::size_t i = 1; i + 1 < r.hops.size(); ++i)
            if (!uav_operational(r.hops[i])) return false;
        return true;
    };
    auto caps_ok = [&](const route::Route& r) {
        // The MBS side of a hop does not consume a UAV connection slot.
        for (std::size_t i = 0; i + 1 < r.hops.size(); ++i) {
            const topo::NodeId a = r.hops[i];
            const topo::NodeId b = r.hops[i + 1];
            if (a == mbs.id || b == mbs.id) continue;
            auto need = [&](topo::NodeId x, topo::NodeId y) {
                return !uav_neighbors[x].count(y) &&
                       uav_neighbors[x].size() >= cfg_.max_cu;
            };
            if (need(a, b) || need(b, a)) return false;
        }
        return true;
    };
    auto activate = [&](const route::Route& r) {
        for (std::size_t i = 0; i + 1 < r.hops.size(); ++i) {
            const topo::NodeId a = r.hops[i];
            const topo::NodeId b = r.hops[i + 1];
            if (b == mbs.id) {
                has_mbs_link[a] = true;
                continue;
            }
            uav_neighbors[a].insert(b);
            uav_neighbors[b].insert(a);
        }
    };

    for (auto& uav : net_.uavs) {
        if (!uav.alive) continue;
        const double d_mbs = topo::distance(uav.position, mbs.position);
        if (!uav.assigned_zone) {
            // Idle fleet members can serve on demand only within direct
            // reach of the MBS; the rebalancer keys absorption off this.
            uav.backhauled = d_mbs <= uav.radio_range_g;
            continue;
        }
        if (d_mbs <= uav.radio_range_g) {
            uav.backhauled = true;
            active_routes_.erase(uav.id);
            has_mbs_link[uav.id] = true;
            continue;
        }

        route::RouteQuery query;
        query.source = {uav.id, uav.position, uav.radio_range_g};
        query.target = {mbs.id, mbs.position, cfg_.g};
        query.table = route_table(uav.id);
        query.thresholds = thresholds_captured_
                               ? thresholds_
                               : route::QosThresholds{
                                     std::numeric_limits<double>::infinity(),
                                     0.0, 0.0};
        query.network_nr = net_nr_;
        query.network_cf = net_cf_;
        query.network_lh = net_lh_;
        query.now = t;
        query.entry_expiry = cfg_.hello_interval * cfg_.hello_miss_limit;

        auto it = active_routes_.find(uav.id);
        bool need_new = it == active_routes_.end();
        std::vector<topo::NodeId> excluded;
        bool use_rehabilitation = false;
        if (!need_new) {
            auto& current = it->second;
            if (!hops_ok(current)) {
                for (std::size_t i = 1; i + 1 < current.hops.size(); ++i)
                    if (!uav_operational(current.hops[i]))
                        excluded.push_back(current.hops[i]);
                need_new = true;
                use_rehabilitation = true;
            } else if (thresholds_captured_) {
                current.nr = net_nr_;
                current.cf = net_cf_;
                current.lh = net_lh_;
                if (route::qos_maintain(current, thresholds_) ==
                    route::QosVerdict::reselect)
                    need_new = true;
            }
            if (!need_new && !caps_ok(current)) need_new = true;
            if (!need_new) {
                activate(current);
                uav.backhauled = true;
                continue;
            }
        }

        record(t, metrics::RecordKind::route_request,
               {static_cast<double>(uav.id)});
        const double acquisition =
            static_cast<double>(query.table.size()) * cfg_.per_iteration_cost;
        std::optional<route::Route> found;
        // A few retries with saturated hops excluded keep connection caps
        // intact without a joint optimization pass.
        for (std::uint32_t attempt = 0; attempt <= cfg_.max_cu; ++attempt) {
            route::RouteQuery q = query;
            std::erase_if(q.table, [&](const route::RouteEntry& e) {
                return std::find(excluded.begin(), excluded.end(), e.uav_id) !=
                       excluded.end();
            });
            auto candidate = use_rehabilitation
                                 ? route::rehabilitate(it->second, q, excluded)
                                 : route::select_route(q);
            if (!candidate) break;
            if (caps_ok(*candidate)) {
                found = candidate;
                break;
            }
            // Exclude the first saturated hop and retry.
            bool excluded_any = false;
            for (std::size_t i = 1; i + 1 < candidate->hops.size(); ++i) {
                const topo::NodeId hop = candidate->hops[i];
                if (uav_neighbors[hop].size() >= cfg_.max_cu) {
                    excluded.push_back(hop);
                    excluded_any = true;
                    break;
                }
            }
            if (!excluded_any) break;
        }
        if (found) {
            activate(*found);
            active_routes_[uav.id] = *found;
            uav.backhauled = true;
            record(t, metrics::RecordKind::route_ok,
                   {static_cast<double>(uav.id), acquisition});
        } else {
            active_routes_.erase(uav.id);
            uav.backhauled = false;
            // Without an MBS path the deployment is useless where it stands;
            // releasing the zone lets the next allocation round redeploy this
            // UAV (usually re-anchored inside direct reach) or hand the zone
            // to a standby.
            uav.assigned_zone.reset();
            record(t, metrics::RecordKind::route_fail,
                   {static_cast<double>(uav.id)});
        }
    }

    // Connection counters follow the activated topology.
    for (auto& uav : net_.uavs) {
        uav.mbs_links_cm = has_mbs_link[uav.id] ? 1 : 0;
        uav.uav_links_cu = static_cast<std::uint32_t>(uav_neighbors[uav.id].size());
    }
}

void Simulator::service_sweep() {
    auto uav_workable = [&](const topo::Uav& uav) {
        return uav.alive && !silent_.count(uav.id) && uav.assigned_zone &&
               uav.backhauled;
    };

    // Drop service through dead or unbackhauled UAVs.
    for (auto& uav : net_.uavs) {
        if (uav_workable(uav)) continue;
        for (topo::NodeId ue_id : uav.served_ue_ids)
            if (auto* ue = net_.find_ue(ue_id)) ue->served_by.reset();
        uav.served_ue_ids.clear();
    }

    auto consumed = [&](const topo::Uav& uav) {
        double total = 0.0;
        for (topo::NodeId id : uav.served_ue_ids) {
            const auto* ue = net_.find_ue(id);
            total += ue ? ue->resources_re : 0.0;
        }
        return total;
    };
    auto try_uav_serve = [&](topo::Ue& ue) -> bool {
        topo::Uav* best = nullptr;
        bool best_assigned = false;
        for (auto& uav : net_.uavs) {
            if (!uav_workable(uav)) continue;
            const bool assigned_here = *uav.assigned_zone == ue.zone_id;
            bool accepts = assigned_here;
            if (!accepts) {
                auto it = peering_.accepted_overlaps.find(uav.id);
                accepts = it != peering_.accepted_overlaps.end() &&
                          std::find(it->second.begin(), it->second.end(),
                                    ue.zone_id) != it->second.end();
            }
            if (!accepts) continue;
            if (uav.served_ue_ids.size() >= uav.total_user_slots_tu) continue;
            if (consumed(uav) + ue.resources_re > uav.resources_rc) continue;
            if (topo::distance(uav.position, ue.position) > uav.radio_range_g)
                continue;
            // Assigned UAVs win over overlap acceptors; then lower load, id.
            if (!best) {
                best = &uav;
                best_assigned = assigned_here;
                continue;
            }
            if (assigned_here != best_assigned) {
                if (assigned_here) {
                    best = &uav;
                    best_assigned = true;
                }
                continue;
            }
            if (uav.served_ue_ids.size() < best->served_ue_ids.size() ||
                (uav.served_ue_ids.size() == best->served_ue_ids.size() &&
                 uav.id < best->id)) {
                best = &uav;
            }
        }
        if (!best) return false;
        ue.served_by = best->id;
        best->served_ue_ids.push_back(ue.id);
        return true;
    };

    for (auto& ue : net_.ues) {
        if (ue.served_by && *ue.served_by != kMbsId) continue; // keep UAV link
        if (ue.served_by && *ue.served_by == kMbsId) {
            // A workable zone UAV upgrades an MBS-served UE.
            if (try_uav_serve(ue)) continue;
            continue;
        }
        if (!try_uav_serve(ue)) ue.served_by = kMbsId; // MBS always accepts
    }
}

void Simulator::recompute_links() {
    const auto& mbs = net_.mbs_list.front();
    struct Tx {
        topo::NodeId id;
        topo::Position pos;
        std::uint32_t band;
    };
    std::vector<Tx> txs;
    // Channel plan: transmitting UAVs take bands round-robin in id order, so
    // the fleet utilizes min(active, N) bands. The MBS shares band 0 with
    // the first of them, and only radiates while it serves someone.
    band_plan_.clear();
    std::uint32_t rank = 0;
    for (const auto& uav : net_.uavs) {
        if (!transmitting(uav)) continue;
        const std::uint32_t band = rank % cfg_.n;
        band_plan_[uav.id] = band;
        txs.push_back({uav.id, uav.position, band});
        ++rank;
    }
    bands_used_ = std::min(rank, cfg_.n);
    bool mbs_active = false;
    for (const auto& ue : net_.ues)
        if (ue.served_by && *ue.served_by == kMbsId) mbs_active = true;
    if (mbs_active) txs.push_back({mbs.id, mbs.position, 0});

    links_.clear();
    for (const auto& ue : net_.ues) {
        UeLink link;
        if (ue.served_by) {
            const topo::NodeId server = *ue.served_by;
            topo::Position server_pos = mbs.position;
            std::uint32_t server_band = 0;
            double backhaul = 0.0;
            if (server != kMbsId) {
                const auto* uav = net_.find_uav(server);
                server_pos = uav->position;
                // A server outside the plan is not radiating (silent or cut
                // off); park it on a private band so no interference applies
                // to the stale link estimate.
                auto bit = band_plan_.find(server);
                server_band = bit != band_plan_.end()
                                  ? bit->second
                                  : std::numeric_limits<std::uint32_t>::max();
                auto rit = active_routes_.find(server);
                backhaul = rit != active_routes_.end()
                               ? rit->second.total_distance
                               : topo::distance(uav->position, mbs.position);
            }
            radio::LinkGeometry geom;
            geom.distance_g =
                clamp_dist(topo::distance(ue.position, server_pos));
            for (const auto& tx : txs) {
                if (tx.id == server || tx.band != server_band) continue;
                geom.interferer_distances.push_back(
                    clamp_dist(topo::distance(ue.position, tx.pos)));
            }
            link.sinr = radio::sinr(params_, geom);
            link.rate = radio::data_rate(params_, link.sinr);
            link.path_dist = geom.distance_g + backhaul;
        }
        links_[ue.id] = link;
    }
}

void Simulator::update_network_costs(double t) {
    std::uint32_t alive_uavs = 0;
    for (const auto& uav : net_.uavs)
        if (uav.alive) ++alive_uavs;

    std::uint64_t uav_served = 0;
    for (const auto& ue : net_.ues)
        if (ue.served_by && *ue.served_by != kMbsId) ++uav_served;

    if (alive_uavs > 0) {
        std::vector<double> demands;
        demands.reserve(net_.ues.size());
        for (const auto& ue : net_.ues) demands.push_back(ue.service_demand_s);
        net_nr_ = route::reliability_cost(
            demands, alive_uavs, uav_served,
            static_cast<double>(alive_uavs) * static_cast<double>(cfg_.t_u),
            bands_in_use(), cfg_.n, {cfg_.gamma1, cfg_.gamma2, cfg_.gamma3});
    } else {
        net_nr_ = 0.0;
    }

    // Pending-load sum over zones that currently move traffic.
    const double mu_packets =
        cfg_.mu * 1000.0 / cfg_.mean_packet_bits; // service rate, packets/s
    std::vector<route::ZoneLoad> loads;
    std::vector<alloc::HandlingModel> models;
    for (const auto& zone : net_.zones) {
        double rate_sum = 0.0;
        std::uint64_t served = 0;
        std::uint64_t by_uav = 0;
        std::uint32_t assigned = 0;
        for (topo::NodeId ue_id : zone.ue_ids) {
            const auto* ue = net_.find_ue(ue_id);
            if (!ue->served_by) continue;
            ++served;
            if (*ue->served_by != kMbsId) ++by_uav;
            rate_sum += links_.at(ue_id).rate;
        }
        for (const auto& uav : net_.uavs)
            if (uav.alive && uav.assigned_zone && *uav.assigned_zone == zone.id)
                ++assigned;
        if (served > 0 && rate_sum > 0.0)
            loads.push_back({zone.request_rate_lambda,
                             rate_sum / static_cast<double>(served)});
        if (!zone.ue_ids.empty()) {
            alloc::HandlingModel model;
            model.handled_by_uav_e1 = by_uav;
            model.handled_by_mbs_e2 = served - by_uav;
            model.total_ues = zone.ue_ids.size();
            model.allocated_uavs_n0 = assigned;
            models.push_back(model);
        }
        record(t, metrics::RecordKind::zone_state,
               {static_cast<double>(zone.id), static_cast<double>(assigned),
                static_cast<double>(by_uav)});
    }
    net_cf_ = loads.empty() ? 0.0 : route::pending_cost(loads, mu_packets, cfg_.n);
    net_lh_ = (models.empty() || alive_uavs == 0)
                  ? 0.0
                  : alloc::mapping_likelihood(models, alive_uavs);

    if (!thresholds_captured_) {
        thresholds_.nr_th = cfg_.nr_th.value_or(net_nr_);
        thresholds_.cf_th = cfg_.cf_th.value_or(net_cf_);
        thresholds_.lh_th = cfg_.lh_th.value_or(net_lh_);
        thresholds_captured_ = true;
    }
}

void Simulator::rebuild_links_and_counts() {
    net_.links.clear();
    const auto& mbs = net_.mbs_list.front();
    for (const auto& uav : net_.uavs) {
        for (topo::NodeId ue_id : uav.served_ue_ids)
            net_.links.push_back({uav.id, ue_id, topo::LinkKind::uav_ue});
        if (uav.mbs_links_cm > 0 &&
            topo::distance(uav.position, mbs.position) <= uav.radio_range_g)
            net_.links.push_back({uav.id, mbs.id, topo::LinkKind::uav_mbs});
    }
    std::set<std::pair<topo::NodeId, topo::NodeId>> seen;
    for (const auto& [owner, route] : active_routes_) {
        for (std::size_t i = 0; i + 1 < route.hops.size(); ++i) {
            const topo::NodeId a = std::min(route.hops[i], route.hops[i + 1]);
            const topo::NodeId b = std::max(route.hops[i], route.hops[i + 1]);
            if (b == mbs.id || a == mbs.id) continue;
            if (net_.find_uav(a) && net_.find_uav(b) && seen.insert({a, b}).second)
                net_.links.push_back({a, b, topo::LinkKind::uav_uav});
        }
    }
}

void Simulator::check_invariants() const {
    topo::validate(net_, cfg_.max_cm, cfg_.max_cu);
    if (generated_ < delivered_ + dropped_)
        throw std::logic_error(
            "invariant: delivered + dropped exceeds generated messages");
    // The fleet cannot serve more users than its aggregate resource capacity.
    std::uint64_t uav_served = 0;
    for (const auto& ue : net_.ues)
        if (ue.served_by && *ue.served_by != kMbsId) ++uav_served;
    if (uav_served > topo::capacity_headroom(net_, cfg_.r_e))
        throw std::logic_error(
            "invariant: UAV-served users exceed fleet resource capacity");
}

void Simulator::on_epoch(double t) {
    // Detection first: it must see the pre-reset assignments to know which
    // zones a dead UAV leaves behind.
    run_rebalance(t);
    if (reset_pending_) {
        reset_network();
        reset_pending_ = false;
    }
    run_allocation(t);
    try {
        peering_ = ctrl::peer_and_elect(net_);
    } catch (const std::runtime_error&) {
        peering_ = {};
    }
    resolve_backhaul(t);
    service_sweep();
    recompute_links();
    rebuild_links_and_counts();
    update_network_costs(t);
    record(t, metrics::RecordKind::epoch,
           {static_cast<double>(epoch_index_),
            static_cast<double>(epoch_iterations_),
            static_cast<double>(bands_in_use())});
    check_invariants();
    ++epoch_index_;
    last_epoch_iterations_ = epoch_iterations_;
    epoch_iterations_ = 0;
    if (t + cfg_.epoch_interval <= cfg_.horizon)
        schedule(t + cfg_.epoch_interval, EventKind::epoch_tick, 0);
}

void Simulator::on_arrival(double t, topo::NodeId ue_id) {
    record(t, metrics::RecordKind::arrival, {static_cast<double>(ue_id)});
    ++generated_;
    auto* ue = net_.find_ue(ue_id);
    ue->request_count += 1;

    const double size_bits = rng_.exponential(cfg_.mean_packet_bits);
    // Next arrival keeps the per-UE Poisson stream going.
    const double next = t + rng_.exponential(1.0 / cfg_.s);
    if (next <= cfg_.horizon)
        schedule(next, EventKind::request_arrival, ue_id);

    bool deliverable = ue->served_by.has_value();
    std::vector<topo::NodeId> via;
    if (deliverable && *ue->served_by != kMbsId) {
        const topo::NodeId server = *ue->served_by;
        if (!uav_operational(server)) deliverable = false;
        via.push_back(server);
        auto rit = active_routes_.find(server);
        if (rit != active_routes_.end())
            for (std::size_t i = 1; i + 1 < rit->second.hops.size(); ++i) {
                via.push_back(rit->second.hops[i]);
                if (!uav_operational(rit->second.hops[i])) deliverable = false;
            }
    }
    if (!deliverable) {
        record(t, metrics::RecordKind::dropped, {static_cast<double>(ue_id)});
        ++dropped_;
        return;
    }

    const UeLink& link = links_.at(ue_id);
    if (!(link.rate > 0.0)) {
        record(t, metrics::RecordKind::dropped, {static_cast<double>(ue_id)});
        ++dropped_;
        return;
    }
    Msg msg;
    msg.ue = ue_id;
    msg.arrival = t;
    msg.via_uavs = std::move(via);
    const double busy = std::max(t, busy_until_.count(ue_id)
                                        ? busy_until_.at(ue_id)
                                        : 0.0);
    msg.delay.queuing = busy - t;
    msg.delay.transmission = size_bits / link.rate;
    msg.delay.propagation =
        cfg_.propagation_delay ? link.path_dist / kSpeedOfLight : 0.0;
    msg.delay.processing =
        static_cast<double>(last_epoch_iterations_) * cfg_.per_iteration_cost;
    busy_until_[ue_id] = busy + msg.delay.transmission;
    msg.deliver_at = busy + msg.delay.transmission + msg.delay.propagation +
                     msg.delay.processing;
    const double deliver_at = msg.deliver_at;
    const std::int64_t id = next_msg_id_++;
    pending_[id] = std::move(msg);
    schedule(deliver_at, EventKind::packet_delivered, id);
}

void Simulator::on_delivered(double t, std::int64_t msg_id) {
    auto it = pending_.find(msg_id);
    if (it == pending_.end()) return; // cancelled by a failure
    const Msg& msg = it->second;
    if (t + 1e-12 < msg.arrival)
        throw std::logic_error("invariant: delivery precedes its arrival");
    record(t, metrics::RecordKind::delivered,
           {static_cast<double>(msg.ue), msg.delay.transmission,
            msg.delay.propagation, msg.delay.processing, msg.delay.queuing});
    ++delivered_;
    pending_.erase(it);
}

void Simulator::on_hello(double t, topo::NodeId uav_id) {
    auto* uav = net_.find_uav(uav_id);
    if (!uav || !uav->alive || silent_.count(uav_id)) return;
    uav->last_hello_time = t;
    record(t, metrics::RecordKind::hello, {static_cast<double>(uav_id)});
    if (t + cfg_.hello_interval <= cfg_.horizon)
        schedule(t + cfg_.hello_interval, EventKind::hello, uav_id);
}

void Simulator::drop_msgs_via(double t, topo::NodeId uav_id) {
    std::vector<std::int64_t> cancelled;
    for (const auto& [id, msg] : pending_) {
        if (msg.deliver_at <= t) continue;
        if (std::find(msg.via_uavs.begin(), msg.via_uavs.end(), uav_id) !=
            msg.via_uavs.end())
            cancelled.push_back(id);
    }
    for (std::int64_t id : cancelled) {
        record(t, metrics::RecordKind::dropped,
               {static_cast<double>(pending_.at(id).ue)});
        ++dropped_;
        pending_.erase(id);
    }
}

void Simulator::on_failure(double t, topo::NodeId uav_id) {
    if (!net_.find_uav(uav_id)) return;
    silent_.insert(uav_id);
    record(t, metrics::RecordKind::failure, {static_cast<double>(uav_id)});
    drop_msgs_via(t, uav_id);
}

void Simulator::on_launch(double t, topo::NodeId uav_id) {
    topo::Uav uav;
    uav.id = uav_id;
    const auto* zone = net_.find_zone(launch_target_.at(uav_id));
    // A standby launches straight to the zone's chain anchor point.
    uav.position = zone ? alloc::deploy_position(
                              zone->centroid, net_.mbs_list.front().position,
                              0, cfg_.g)
                        : net_.mbs_list.front().position;
    uav.radio_range_g = cfg_.g;
    uav.resources_rc = cfg_.r_c;
    uav.total_user_slots_tu = cfg_.t_u;
    uav.last_hello_time = t;
    net_.uavs.push_back(uav);
    record(t, metrics::RecordKind::launch, {static_cast<double>(uav_id)});
    schedule(t, EventKind::hello, uav_id);
}

SimResult Simulator::run() {
    cfg::validate(cfg_);
    net_ = build_topology(cfg_, seed_);
    standby_left_ = cfg_.standby;
    next_uav_index_ = cfg_.u;
    capture_initial_thresholds();

    record(0.0, metrics::RecordKind::config,
           {static_cast<double>(cfg_.e), static_cast<double>(cfg_.u),
            static_cast<double>(cfg_.n), cfg_.horizon});

    for (const auto& uav : net_.uavs) schedule(0.0, EventKind::hello, uav.id);
    schedule(0.0, EventKind::epoch_tick, 0);
    for (const auto& ue : net_.ues) {
        const double first = rng_.exponential(1.0 / cfg_.s);
        if (first <= cfg_.horizon)
            schedule(first, EventKind::request_arrival, ue.id);
    }
    for (const auto& [time, index] : cfg_.parsed_failures())
        schedule(time, EventKind::uav_failure,
                 kUavIdBase + static_cast<topo::NodeId>(index));

    while (!queue_.empty()) {
        const Event ev = queue_.top();
        if (ev.time > cfg_.horizon) break;
        queue_.pop();
        switch (ev.kind) {
        case EventKind::uav_failure:
            on_failure(ev.time, static_cast<topo::NodeId>(ev.id));
            break;
        case EventKind::uav_launch:
            on_launch(ev.time, static_cast<topo::NodeId>(ev.id));
            break;
        case EventKind::hello:
            on_hello(ev.time, static_cast<topo::NodeId>(ev.id));
            break;
        case EventKind::epoch_tick:
            on_epoch(ev.time);
            break;
        case EventKind::request_arrival:
            on_arrival(ev.time, static_cast<topo::NodeId>(ev.id));
            break;
        case EventKind::packet_delivered:
            on_delivered(ev.time, ev.id);
            break;
        }
    }

    // Horizon: in-flight messages drop; per-UE final state snapshots.
    for (const auto& [id, msg] : pending_) {
        record(cfg_.horizon, metrics::RecordKind::dropped,
               {static_cast<double>(msg.ue)});
        ++dropped_;
    }
    pending_.clear();
    if (generated_ != delivered_ + dropped_)
        throw std::logic_error(
            "invariant: generated != delivered + dropped at horizon");

    std::uint64_t below = 0;
    for (const auto& ue : net_.ues) {
        const UeLink& link = links_.at(ue.id);
        if (ue.served_by && link.sinr < sir_th_.at(ue.id)) ++below;
    }
    const auto y_now = static_cast<std::uint32_t>(std::max<std::uint64_t>(below, 1));
    for (const auto& ue : net_.ues) {
        const UeLink& link = links_.at(ue.id);
        const bool served = ue.served_by.has_value();
        const double cap =
            served && link.sinr > 0.0
                ? radio::per_ue_capacity(params_, link.sinr, y_now)
                : 0.0;
        record(cfg_.horizon, metrics::RecordKind::ue_final,
               {static_cast<double>(ue.id), served ? 1.0 : 0.0, link.rate,
                rate_th_.at(ue.id), link.sinr, sir_th_.at(ue.id), cap,
                cap_th_.at(ue.id)});
    }

    SimResult result;
    result.report = metrics::compute_metrics(records_);
    result.records = std::move(records_);
    result.failures = std::move(failures_);
    return result;
}

} // namespace

SimResult run(const cfg::ScenarioConfig& config, std::uint64_t seed) {
    Simulator sim(config, seed);
    return sim.run();
}

} // namespace uavsim::sim
