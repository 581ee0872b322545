#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "manet/sim/sim_time.hpp"

namespace manet {

struct CbrFlow {
    int id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double rate = 4.0;  // packets/s
    int packet_size = 512;
    SimTime start_at;
    SimTime stop_at;

    /// floor(rate * (stop_at - start_at)); emission k happens at emit_time(k).
    std::int64_t packet_count() const;
    SimTime emit_time(std::int64_t k) const;

    bool operator==(const CbrFlow&) const = default;
};

struct TrafficParams {
    int nodes = 0;
    int connections = 0;
    double rate = 4.0;
    int packet_size = 512;
    SimTime start_lo = seconds(1);
    SimTime start_hi = seconds(5);
    SimTime sim_time = seconds(100);
};

/// Distinct (src, dst) pairs drawn uniformly, starts uniform in
/// [start_lo, start_hi], stop at sim_time. Throws InvalidConfig when
/// connections exceeds nodes*(nodes-1) or parameters are out of range.
std::vector<CbrFlow> generate_flows(const TrafficParams& params, std::uint64_t root_seed);

/// `flow <id> src <s> dst <d> rate <r> size <b> start <t0> stop <t1>`, one per line.
void write_flows(std::ostream& out, const std::vector<CbrFlow>& flows);
std::vector<CbrFlow> read_flows(std::istream& in);

}  // namespace manet
