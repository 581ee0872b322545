#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "manet/kernels/geometry.hpp"
#include "manet/sim/sim_time.hpp"

namespace manet {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(Position a, Position b);

/// Straight-line movement from start to end, then a dwell of pause_after seconds.
struct Leg {
    Position start;
    Position end;
    SimTime depart_at;
    double speed = 0.0;        // m/s; zero only for stationary nodes
    double pause_after = 0.0;  // seconds
    double duration = 0.0;     // travel time in seconds
    double vx = 0.0;
    double vy = 0.0;

    /// End of the dwell; equals the next leg's depart_at.
    SimTime free_at() const;

    static Leg make(Position start, Position end, SimTime depart_at, double speed, double pause_after);
    static Leg stationary(Position p, SimTime depart_at, double dwell);
};

Position leg_position(const Leg& leg, SimTime t);

struct MobilityParams {
    int nodes = 0;
    double area_x = 1000.0;
    double area_y = 1000.0;
    double speed_min = 1.0;
    double speed_max = 20.0;
    double pause_time = 0.0;
    SimTime sim_time = seconds(100);
    bool stationary = false;
};

class MobilitySchedule {
public:
    MobilitySchedule() = default;
    MobilitySchedule(std::vector<std::vector<Leg>> legs, SimTime sim_time);

    std::size_t node_count() const { return m_legs.size(); }
    SimTime sim_time() const { return m_sim_time; }
    std::span<const Leg> legs(NodeId node) const { return m_legs.at(static_cast<std::size_t>(node)); }

    /// Throws OutOfRange for t outside [0, sim_time].
    Position position_at(NodeId node, SimTime t) const;

    /// Closed disk: distance == tx_range counts as in range.
    bool in_range(NodeId a, NodeId b, SimTime t, double tx_range) const;

    /// One line per waypoint: `node <id> t <depart_at> x <x> y <y> speed <v>`.
    void write(std::ostream& out) const;
    static MobilitySchedule read(std::istream& in, SimTime sim_time);

private:
    std::vector<std::vector<Leg>> m_legs;
    SimTime m_sim_time;
};

/// Random waypoint; one RNG stream per node ("mobility/<id>").
/// Throws InvalidConfig on bad speed bounds or non-positive area/sim_time.
MobilitySchedule generate_schedule(const MobilityParams& params, std::uint64_t root_seed);

/// Static placement helpers used by the harness and the oracle tests.
MobilitySchedule static_schedule(std::span<const Position> positions, SimTime sim_time);

/// Sim-time position snapshot for all nodes, recomputed through the geometry
/// kernels whenever the queried instant changes. Time must not go backwards.
class PositionTracker {
public:
    PositionTracker(const MobilitySchedule& schedule, const kernels::GeometryKernels& kernels);

    void advance_to(SimTime t);
    Position at(NodeId node) const { return {m_x[static_cast<std::size_t>(node)], m_y[static_cast<std::size_t>(node)]}; }
    std::span<const double> xs() const { return m_x; }
    std::span<const double> ys() const { return m_y; }

    /// Node ids within range of `center` (excluding it), ascending.
    void neighbors(NodeId center, double range, std::vector<NodeId>& out);
    bool in_range(NodeId a, NodeId b, double range) const;

private:
    void load_leg(std::size_t node);

    const MobilitySchedule* m_schedule;
    const kernels::GeometryKernels* m_kernels;
    std::vector<std::size_t> m_leg_index;
    std::vector<std::int64_t> m_leg_until;  // micros at which the loaded leg ends
    std::vector<double> m_sx, m_sy, m_vx, m_vy, m_ex, m_ey, m_t0, m_dur;
    std::vector<double> m_x, m_y;
    std::vector<std::uint8_t> m_mask;
    SimTime m_at = SimTime::from_micros(-1);
};

}  // namespace manet
