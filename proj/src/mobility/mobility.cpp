#include "manet/mobility/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "manet/sim/errors.hpp"
#include "manet/sim/rng.hpp"

namespace manet {

double distance(Position a, Position b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

SimTime Leg::free_at() const
{
    return depart_at + seconds(duration + pause_after);
}

Leg Leg::make(Position start, Position end, SimTime depart_at, double speed, double pause_after)
{
    Leg leg;
    leg.start = start;
    leg.end = end;
    leg.depart_at = depart_at;
    leg.speed = speed;
    leg.pause_after = pause_after;
    const double d = distance(start, end);
    if (speed > 0.0 && d > 0.0) {
        leg.duration = d / speed;
        leg.vx = (end.x - start.x) / leg.duration;
        leg.vy = (end.y - start.y) / leg.duration;
    }
    return leg;
}

Leg Leg::stationary(Position p, SimTime depart_at, double dwell)
{
    return make(p, p, depart_at, 0.0, dwell);
}

Position leg_position(const Leg& leg, SimTime t)
{
    // Same arithmetic as kernels::scalar::positions_at.
    double e = t.seconds() - leg.depart_at.seconds();
    e = e > 0.0 ? e : 0.0;
    if (e >= leg.duration) return leg.end;
    const double px = leg.vx * e;
    const double py = leg.vy * e;
    return {leg.start.x + px, leg.start.y + py};
}

MobilitySchedule::MobilitySchedule(std::vector<std::vector<Leg>> legs, SimTime sim_time)
    : m_legs(std::move(legs)), m_sim_time(sim_time)
{
    for (const auto& node_legs : m_legs) {
        if (node_legs.empty()) throw InvalidConfig("mobility: node without legs");
    }
}

Position MobilitySchedule::position_at(NodeId node, SimTime t) const
{
    if (t < SimTime::zero() || t > m_sim_time) {
        throw OutOfRange("position_at: t=" + t.to_string() + " outside [0, " + m_sim_time.to_string() + "]");
    }
    const auto& node_legs = m_legs.at(static_cast<std::size_t>(node));
    // Last leg departing at or before t.
    auto it = std::upper_bound(node_legs.begin(), node_legs.end(), t,
                               [](SimTime v, const Leg& l) { return v < l.depart_at; });
    if (it != node_legs.begin()) --it;
    return leg_position(*it, t);
}

bool MobilitySchedule::in_range(NodeId a, NodeId b, SimTime t, double tx_range) const
{
    const Position pa = position_at(a, t);
    const Position pb = position_at(b, t);
    const double dx = pa.x - pb.x;
    const double dy = pa.y - pb.y;
    return dx * dx + dy * dy <= tx_range * tx_range;
}

void MobilitySchedule::write(std::ostream& out) const
{
    char buf[160];
    for (std::size_t n = 0; n < m_legs.size(); ++n) {
        for (const Leg& leg : m_legs[n]) {
            std::snprintf(buf, sizeof buf, "node %zu t %s x %.6f y %.6f speed %.6f\n", n,
                          leg.depart_at.to_string().c_str(), leg.start.x, leg.start.y, leg.speed);
            out << buf;
        }
        const Leg& last = m_legs[n].back();
        std::snprintf(buf, sizeof buf, "node %zu t %s x %.6f y %.6f speed %.6f\n", n,
                      (last.depart_at + seconds(last.duration)).to_string().c_str(), last.end.x, last.end.y, 0.0);
        out << buf;
    }
}

MobilitySchedule MobilitySchedule::read(std::istream& in, SimTime sim_time)
{
    struct Waypoint {
        SimTime t;
        Position p;
        double speed;
    };
    std::map<long, std::vector<Waypoint>> by_node;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string k_node, k_t, k_x, k_y, k_speed;
        long id = 0;
        double t = 0, x = 0, y = 0, v = 0;
        if (!(ls >> k_node >> id >> k_t >> t >> k_x >> x >> k_y >> y >> k_speed >> v) || k_node != "node" ||
            k_t != "t" || k_x != "x" || k_y != "y" || k_speed != "speed" || id < 0) {
            throw ParseError(lineno, "expected `node <id> t <t> x <x> y <y> speed <v>`");
        }
        by_node[id].push_back({seconds(t), {x, y}, v});
    }
    if (by_node.empty()) throw ParseError(lineno, "no waypoints");
    std::vector<std::vector<Leg>> legs(static_cast<std::size_t>(by_node.rbegin()->first + 1));
    for (auto& [id, wps] : by_node) {
        auto& out = legs[static_cast<std::size_t>(id)];
        if (wps.size() == 1) {
            out.push_back(Leg::stationary(wps[0].p, wps[0].t, (sim_time - wps[0].t).seconds()));
            continue;
        }
        for (std::size_t k = 0; k + 1 < wps.size(); ++k) {
            Leg leg = Leg::make(wps[k].p, wps[k + 1].p, wps[k].t, wps[k].speed, 0.0);
            leg.pause_after = std::max(0.0, (wps[k + 1].t - wps[k].t).seconds() - leg.duration);
            out.push_back(leg);
        }
        const Waypoint& last = wps.back();
        if (last.t < sim_time) {
            out.push_back(Leg::stationary(last.p, last.t, (sim_time - last.t).seconds()));
        }
    }
    return MobilitySchedule(std::move(legs), sim_time);
}

MobilitySchedule generate_schedule(const MobilityParams& p, std::uint64_t root_seed)
{
    if (p.nodes < 1) throw InvalidConfig("mobility: nodes must be positive");
    if (!(p.area_x > 0.0) || !(p.area_y > 0.0)) throw InvalidConfig("mobility: area must be positive");
    if (p.sim_time <= SimTime::zero()) throw InvalidConfig("mobility: sim_time must be positive");
    if (!p.stationary && (p.speed_min <= 0.0 || p.speed_min > p.speed_max)) {
        throw InvalidConfig("mobility: need 0 < speed_min <= speed_max");
    }
    if (p.pause_time < 0.0) throw InvalidConfig("mobility: pause_time must be non-negative");

    std::vector<std::vector<Leg>> legs(static_cast<std::size_t>(p.nodes));
    for (int n = 0; n < p.nodes; ++n) {
        RngStream rng(root_seed, stream_key("mobility", n));
        Position here{rng.uniform_real(0.0, p.area_x), rng.uniform_real(0.0, p.area_y)};
        auto& out = legs[static_cast<std::size_t>(n)];
        if (p.stationary) {
            out.push_back(Leg::stationary(here, SimTime::zero(), p.sim_time.seconds()));
            continue;
        }
        SimTime t = SimTime::zero();
        while (t < p.sim_time) {
            const Position next{rng.uniform_real(0.0, p.area_x), rng.uniform_real(0.0, p.area_y)};
            const double speed = rng.uniform_real(p.speed_min, p.speed_max);
            Leg leg = Leg::make(here, next, t, speed, p.pause_time);
            out.push_back(leg);
            t = leg.free_at();
            here = next;
        }
    }
    return MobilitySchedule(std::move(legs), p.sim_time);
}

MobilitySchedule static_schedule(std::span<const Position> positions, SimTime sim_time)
{
    std::vector<std::vector<Leg>> legs;
    legs.reserve(positions.size());
    for (const Position& p : positions) legs.push_back({Leg::stationary(p, SimTime::zero(), sim_time.seconds())});
    return MobilitySchedule(std::move(legs), sim_time);
}

PositionTracker::PositionTracker(const MobilitySchedule& schedule, const kernels::GeometryKernels& kernels)
    : m_schedule(&schedule), m_kernels(&kernels)
{
    const std::size_t n = schedule.node_count();
    m_leg_index.assign(n, 0);
    m_leg_until.assign(n, 0);
    for (auto* v : {&m_sx, &m_sy, &m_vx, &m_vy, &m_ex, &m_ey, &m_t0, &m_dur, &m_x, &m_y}) v->assign(n, 0.0);
    m_mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) load_leg(i);
}

void PositionTracker::load_leg(std::size_t node)
{
    const auto legs = m_schedule->legs(static_cast<NodeId>(node));
    const Leg& leg = legs[m_leg_index[node]];
    m_sx[node] = leg.start.x;
    m_sy[node] = leg.start.y;
    m_vx[node] = leg.vx;
    m_vy[node] = leg.vy;
    m_ex[node] = leg.end.x;
    m_ey[node] = leg.end.y;
    m_t0[node] = leg.depart_at.seconds();
    m_dur[node] = leg.duration;
    m_leg_until[node] =
        m_leg_index[node] + 1 < legs.size() ? legs[m_leg_index[node] + 1].depart_at.micros() : INT64_MAX;
}

void PositionTracker::advance_to(SimTime t)
{
    if (t == m_at) return;
    if (t < m_at) throw SchedulingInPast("PositionTracker: time went backwards");
    m_at = t;
    const std::int64_t us = t.micros();
    for (std::size_t i = 0; i < m_leg_index.size(); ++i) {
        if (us < m_leg_until[i]) continue;
        const auto legs = m_schedule->legs(static_cast<NodeId>(i));
        while (m_leg_index[i] + 1 < legs.size() && legs[m_leg_index[i] + 1].depart_at.micros() <= us) ++m_leg_index[i];
        load_leg(i);
    }
    kernels::LegArrays arrays{m_sx, m_sy, m_vx, m_vy, m_ex, m_ey, m_t0, m_dur};
    m_kernels->positions_at(arrays, t.seconds(), m_x, m_y);
}

void PositionTracker::neighbors(NodeId center, double range, std::vector<NodeId>& out)
{
    out.clear();
    const auto c = static_cast<std::size_t>(center);
    m_kernels->within_radius(m_x, m_y, m_x[c], m_y[c], range * range, m_mask);
    for (std::size_t i = 0; i < m_mask.size(); ++i) {
        if (m_mask[i] && i != c) out.push_back(static_cast<NodeId>(i));
    }
}

bool PositionTracker::in_range(NodeId a, NodeId b, double range) const
{
    const auto ia = static_cast<std::size_t>(a);
    const auto ib = static_cast<std::size_t>(b);
    const double dx = m_x[ia] - m_x[ib];
    const double dy = m_y[ia] - m_y[ib];
    const double dx2 = dx * dx;
    const double dy2 = dy * dy;
    return dx2 + dy2 <= range * range;
}

}  // namespace manet
