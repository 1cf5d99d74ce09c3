#include "topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace uavsim::topo {

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Position sector_centroid(const Position& center, double radius,
                         double theta0, double theta) {
    // Distance of a circular-sector centroid from the apex: (4r/3theta)*sin(theta/2).
    const double d = (4.0 * radius / (3.0 * theta)) * std::sin(theta / 2.0);
    const double mid = theta0 + theta / 2.0;
    return {center.x + d * std::cos(mid), center.y + d * std::sin(mid)};
}

namespace {

double point_segment_distance(const Position& p, const Position& a,
                              const Position& b) {
    const double abx = b.x - a.x;
    const double aby = b.y - a.y;
    const double len2 = abx * abx + aby * aby;
    if (len2 <= 0.0) return distance(p, a);
    double t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, {a.x + t * abx, a.y + t * aby});
}

} // namespace

double sector_distance(const Position& center, double radius, double theta0,
                       double theta, const Position& point) {
    const double dx = point.x - center.x;
    const double dy = point.y - center.y;
    const double r = std::hypot(dx, dy);
    if (r <= 0.0) return 0.0;
    // Angle relative to theta0, wrapped into [0, 2pi).
    double rel = std::atan2(dy, dx) - theta0;
    const double two_pi = 2.0 * std::numbers::pi;
    rel = std::fmod(rel, two_pi);
    if (rel < 0.0) rel += two_pi;
    if (rel <= theta) return r <= radius ? 0.0 : r - radius;
    const Position edge0{center.x + radius * std::cos(theta0),
                         center.y + radius * std::sin(theta0)};
    const Position edge1{center.x + radius * std::cos(theta0 + theta),
                         center.y + radius * std::sin(theta0 + theta)};
    return std::min(point_segment_distance(point, center, edge0),
                    point_segment_distance(point, center, edge1));
}

namespace {

template <typename T>
const T* find_in(const std::vector<T>& v, NodeId id) {
    for (const auto& e : v)
        if (e.id == id) return &e;
    return nullptr;
}

} // namespace

const Mbs* NetworkState::find_mbs(NodeId id) const { return find_in(mbs_list, id); }
const DemandZone* NetworkState::find_zone(NodeId id) const { return find_in(zones, id); }
const Ue* NetworkState::find_ue(NodeId id) const { return find_in(ues, id); }
const Uav* NetworkState::find_uav(NodeId id) const { return find_in(uavs, id); }

Ue* NetworkState::find_ue(NodeId id) {
    return const_cast<Ue*>(find_in(ues, id));
}
Uav* NetworkState::find_uav(NodeId id) {
    return const_cast<Uav*>(find_in(uavs, id));
}
DemandZone* NetworkState::find_zone(NodeId id) {
    return const_cast<DemandZone*>(find_in(zones, id));
}

std::uint64_t capacity_headroom(const NetworkState& network, double default_re) {
    std::uint64_t total = 0;
    for (const auto& uav : network.uavs) {
        double re = default_re;
        if (!uav.served_ue_ids.empty()) {
            const Ue* ue = network.find_ue(uav.served_ue_ids.front());
            if (ue) re = ue->resources_re;
        }
        if (!(re > 0.0))
            throw std::domain_error("topology: R_e must be > 0 for served UEs");
        total += static_cast<std::uint64_t>(std::floor(uav.resources_rc / re));
    }
    return total;
}

std::int64_t load_balance(const Uav& uav) {
    return static_cast<std::int64_t>(uav.total_user_slots_tu) -
           (static_cast<std::int64_t>(uav.mbs_links_cm) +
            static_cast<std::int64_t>(uav.uav_links_cu));
}

void validate(const NetworkState& network, std::uint32_t max_cm,
              std::uint32_t max_cu) {
    // Single-server: every UE serves at most one master, and the served sets
    // on UAVs agree with ue.served_by.
    std::unordered_map<NodeId, NodeId> server_of;
    std::size_t served_total = 0;
    for (const auto& ue : network.ues) {
        if (ue.served_by) {
            server_of[ue.id] = *ue.served_by;
            ++served_total;
            if (!(ue.resources_re > 0.0))
                throw std::logic_error("invariant: served UE with non-positive R_e");
        }
    }
    if (served_total > network.ues.size())
        throw std::logic_error("invariant: served-UE count exceeds |E|");

    for (const auto& uav : network.uavs) {
        std::unordered_set<NodeId> seen;
        double consumed = 0.0;
        for (NodeId ue_id : uav.served_ue_ids) {
            if (!seen.insert(ue_id).second)
                throw std::logic_error("invariant: UE served twice by one UAV");
            auto it = server_of.find(ue_id);
            if (it == server_of.end() || it->second != uav.id)
                throw std::logic_error("invariant: UAV serve list disagrees with ue.served_by");
            const Ue* ue = network.find_ue(ue_id);
            consumed += ue ? ue->resources_re : 0.0;
        }
        if (uav.served_ue_ids.size() > uav.total_user_slots_tu)
            throw std::logic_error("invariant: UAV exceeds T_u user slots");
        if (consumed > uav.resources_rc + 1e-9)
            throw std::logic_error("invariant: UAV resource consumption exceeds R_c");
        if (uav.mbs_links_cm > max_cm)
            throw std::logic_error("invariant: UAV exceeds max C_m");
        if (uav.uav_links_cu > max_cu)
            throw std::logic_error("invariant: UAV exceeds max C_u");
    }

    // Range soundness on recorded links.
    for (const auto& link : network.links) {
        const Position* pa = nullptr;
        const Position* pb = nullptr;
        double range = 0.0;
        switch (link.kind) {
        case LinkKind::uav_ue: {
            const Uav* u = network.find_uav(link.a);
            const Ue* e = network.find_ue(link.b);
            if (!u || !e) throw std::logic_error("invariant: dangling uav-ue link");
            pa = &u->position; pb = &e->position; range = u->radio_range_g;
            break;
        }
        case LinkKind::uav_uav: {
            const Uav* u = network.find_uav(link.a);
            const Uav* v = network.find_uav(link.b);
            if (!u || !v) throw std::logic_error("invariant: dangling uav-uav link");
            pa = &u->position; pb = &v->position;
            range = std::min(u->radio_range_g, v->radio_range_g);
            break;
        }
        case LinkKind::uav_mbs: {
            const Uav* u = network.find_uav(link.a);
            const Mbs* m = network.find_mbs(link.b);
            if (!u || !m) throw std::logic_error("invariant: dangling uav-mbs link");
            pa = &u->position; pb = &m->position; range = u->radio_range_g;
            break;
        }
        }
        if (distance(*pa, *pb) > range + 1e-9)
            throw std::logic_error("invariant: link endpoints beyond radio range");
    }
}

} // namespace uavsim::topo
