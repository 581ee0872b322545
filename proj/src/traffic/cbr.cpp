#include "manet/traffic/cbr.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "manet/sim/errors.hpp"
#include "manet/sim/rng.hpp"

namespace manet {

std::int64_t CbrFlow::packet_count() const
{
    if (stop_at <= start_at) return 0;
    const double span = static_cast<double>((stop_at - start_at).micros());
    // Exact integer products are compared against the span to avoid rounding up.
    auto n = static_cast<std::int64_t>(std::floor(span * rate / 1e6));
    while (n > 0 && emit_time(n - 1) >= stop_at) --n;
    while (emit_time(n) < stop_at) ++n;
    return n;
}

SimTime CbrFlow::emit_time(std::int64_t k) const
{
    return start_at + micros(std::llround(static_cast<double>(k) * 1e6 / rate));
}

std::vector<CbrFlow> generate_flows(const TrafficParams& p, std::uint64_t root_seed)
{
    if (p.nodes < 2) throw InvalidConfig("traffic: need at least 2 nodes");
    if (p.connections < 0) throw InvalidConfig("traffic: negative connection count");
    const auto pairs = static_cast<std::int64_t>(p.nodes) * (p.nodes - 1);
    if (p.connections > pairs) {
        throw InvalidConfig("traffic: " + std::to_string(p.connections) + " connections but only " +
                            std::to_string(pairs) + " ordered pairs");
    }
    if (p.rate <= 0.0 || p.packet_size <= 0) throw InvalidConfig("traffic: rate and packet size must be positive");
    if (p.start_lo > p.start_hi || p.start_hi >= p.sim_time) throw InvalidConfig("traffic: bad start window");

    RngStream rng(root_seed, stream_key("traffic", 0));
    std::set<std::pair<NodeId, NodeId>> used;
    std::vector<CbrFlow> flows;
    for (int i = 0; i < p.connections; ++i) {
        NodeId s = 0;
        NodeId d = 0;
        do {
            s = static_cast<NodeId>(rng.uniform_int(0, p.nodes - 1));
            d = static_cast<NodeId>(rng.uniform_int(0, p.nodes - 2));
            if (d >= s) ++d;
        } while (used.contains({s, d}));
        used.insert({s, d});
        CbrFlow f;
        f.id = i;
        f.src = s;
        f.dst = d;
        f.rate = p.rate;
        f.packet_size = p.packet_size;
        f.start_at = micros(rng.uniform_int(p.start_lo.micros(), p.start_hi.micros()));
        f.stop_at = p.sim_time;
        flows.push_back(f);
    }
    return flows;
}

void write_flows(std::ostream& out, const std::vector<CbrFlow>& flows)
{
    for (const CbrFlow& f : flows) {
        out << "flow " << f.id << " src " << f.src << " dst " << f.dst << " rate " << f.rate << " size "
            << f.packet_size << " start " << f.start_at.to_string() << " stop " << f.stop_at.to_string() << '\n';
    }
}

std::vector<CbrFlow> read_flows(std::istream& in)
{
    std::vector<CbrFlow> flows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string k[8];
        CbrFlow f;
        double t0 = 0.0;
        double t1 = 0.0;
        if (!(ls >> k[0] >> f.id >> k[1] >> f.src >> k[2] >> f.dst >> k[3] >> f.rate >> k[4] >> f.packet_size >> k[5] >>
              t0 >> k[6] >> t1) ||
            k[0] != "flow" || k[1] != "src" || k[2] != "dst" || k[3] != "rate" || k[4] != "size" || k[5] != "start" ||
            k[6] != "stop") {
            throw ParseError(lineno, "expected `flow <id> src <s> dst <d> rate <r> size <b> start <t0> stop <t1>`");
        }
        f.start_at = seconds(t0);
        f.stop_at = seconds(t1);
        flows.push_back(f);
    }
    return flows;
}

}  // namespace manet
