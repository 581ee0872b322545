#include "manet/harness/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "manet/kernels/geometry.hpp"
#include "manet/sim/errors.hpp"

namespace manet {
namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_seconds(SimTime t)
{
    return fmt_double(t.seconds());
}

double parse_double(std::string_view v, int line, std::string_view key)
{
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ParseError(line, std::string(key) + ": not a number: '" + std::string(v) + "'");
    }
    return out;
}

std::int64_t parse_int(std::string_view v, int line, std::string_view key)
{
    std::int64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ParseError(line, std::string(key) + ": not an integer: '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_u64(std::string_view v, int line, std::string_view key)
{
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ParseError(line, std::string(key) + ": not an unsigned integer: '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view v, int line, std::string_view key)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError(line, std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::pair<NodeId, NodeId>> parse_flows(std::string_view v, int line)
{
    std::vector<std::pair<NodeId, NodeId>> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const std::string_view item = trim(v.substr(0, comma));
        v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) throw ParseError(line, ": expected <src>-<dst>");
        out.emplace_back(static_cast<NodeId>(parse_int(item.substr(0, dash), line, "flows")),
                         static_cast<NodeId>(parse_int(item.substr(dash + 1), line, "")));
    }
    return out;
}

struct Key {
    std::function<void(ScenarioConfig&, std::string_view, int)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <class T>
Key real_key(T ScenarioConfig::*field)
{
    return {[field](ScenarioConfig& c, std::string_view v, int line) { c.*field = parse_double(v, line, ""); },
            [field](const ScenarioConfig& c) { return fmt_double(c.*field); }};
}

Key int_key(int ScenarioConfig::*field)
{
    return {[field](ScenarioConfig& c, std::string_view v, int line) {
                c.*field = static_cast<int>(parse_int(v, line, ""));
            },
            [field](const ScenarioConfig& c) { return std::to_string(c.*field); }};
}

template <class Get>
Key time_key(Get get)
{
    return {[get](ScenarioConfig& c, std::string_view v, int line) { get(c) = seconds(parse_double(v, line, "")); },
            [get](const ScenarioConfig& c) { return fmt_seconds(get(const_cast<ScenarioConfig&>(c))); }};
}

template <class Get>
Key bool_key(Get get)
{
    return {[get](ScenarioConfig& c, std::string_view v, int line) { get(c) = parse_bool(v, line, ""); },
            [get](const ScenarioConfig& c) {
                return std::string(get(const_cast<ScenarioConfig&>(c)) ? "true" : "false");
            }};
}

template <class Get>
Key count_key(Get get)
{
    return {[get](ScenarioConfig& c, std::string_view v, int line) {
                using T = std::remove_reference_t<decltype(get(c))>;
                get(c) = static_cast<T>(parse_int(v, line, ""));
            },
            [get](const ScenarioConfig& c) { return std::to_string(get(const_cast<ScenarioConfig&>(c))); }};
}

template <class Get>
Key double_key(Get get)
{
    return {[get](ScenarioConfig& c, std::string_view v, int line) { get(c) = parse_double(v, line, ""); },
            [get](const ScenarioConfig& c) { return fmt_double(get(const_cast<ScenarioConfig&>(c))); }};
}

const std::vector<std::pair<std::string, Key>>& keys()
{
    static const std::vector<std::pair<std::string, Key>> table = [] {
        std::vector<std::pair<std::string, Key>> k;
        k.emplace_back("protocol", Key{[](ScenarioConfig& c, std::string_view v, int line) {
                                           auto p = protocol_from(v);
                                           if (!p) throw ParseError(line, ": expected aodv, dsdv or dsr");
                                           c.protocol = *p;
                                       },
                                       [](const ScenarioConfig& c) { return std::string(to_string(c.protocol)); }});
        k.emplace_back("nodes", int_key(&ScenarioConfig::nodes));
        k.emplace_back("area_x", real_key(&ScenarioConfig::area_x));
        k.emplace_back("area_y", real_key(&ScenarioConfig::area_y));
        k.emplace_back("connections", int_key(&ScenarioConfig::connections));
        k.emplace_back("packet_size", int_key(&ScenarioConfig::packet_size));
        k.emplace_back("cbr_rate", real_key(&ScenarioConfig::cbr_rate));
        k.emplace_back("sim_time", real_key(&ScenarioConfig::sim_time));
        k.emplace_back("pause_time", real_key(&ScenarioConfig::pause_time));
        k.emplace_back("speed_min", real_key(&ScenarioConfig::speed_min));
        k.emplace_back("speed_max", real_key(&ScenarioConfig::speed_max));
        k.emplace_back("start_lo", real_key(&ScenarioConfig::start_lo));
        k.emplace_back("start_hi", real_key(&ScenarioConfig::start_hi));
        k.emplace_back("seed", Key{[](ScenarioConfig& c, std::string_view v, int line) { c.seed = parse_u64(v, line, ""); },
                                   [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
        k.emplace_back("static", bool_key([](ScenarioConfig& c) -> bool& { return c.stationary; }));
        k.emplace_back("placement", Key{[](ScenarioConfig& c, std::string_view v, int line) {
                                            if (v == "random") {
                                                c.placement = Placement::Random;
                                            } else if (v == "line") {
                                                c.placement = Placement::Line;
                                            } else {
                                                throw ParseError(line, ": expected random or line");
                                            }
                                        },
                                        [](const ScenarioConfig& c) {
                                            return std::string(c.placement == Placement::Line ? "line" : "random");
                                        }});
        k.emplace_back("line_spacing", real_key(&ScenarioConfig::line_spacing));
        k.emplace_back("flows", Key{[](ScenarioConfig& c, std::string_view v, int line) {
                                        c.flows = parse_flows(v, line);
                                        c.connections = static_cast<int>(c.flows.size());
                                    },
                                    [](const ScenarioConfig& c) {
                                        std::string s;
                                        for (const auto& [a, b] : c.flows) {
                                            if (!s.empty()) s += ',';
                                            s += std::to_string(a) + "-" + std::to_string(b);
                                        }
                                        return s;
                                    }});
        k.emplace_back("nrl_mode", Key{[](ScenarioConfig& c, std::string_view v, int line) {
                                           auto m = nrl_mode_from(v);
                                           if (!m) throw ParseError(line, ": expected perhop or originated");
                                           c.nrl_mode = *m;
                                       },
                                       [](const ScenarioConfig& c) { return std::string(to_string(c.nrl_mode)); }});
        k.emplace_back("tx_range", double_key([](ScenarioConfig& c) -> double& { return c.link.tx_range; }));
        k.emplace_back("bitrate", double_key([](ScenarioConfig& c) -> double& { return c.link.bitrate; }));
        k.emplace_back("ifq_len", count_key([](ScenarioConfig& c) -> std::size_t& { return c.link.ifq_len; }));
        k.emplace_back("retry_limit", count_key([](ScenarioConfig& c) -> int& { return c.link.unicast_retry_limit; }));
        k.emplace_back("jitter_max", time_key([](ScenarioConfig& c) -> SimTime& { return c.link.jitter_max; }));
        k.emplace_back("link_overhead", count_key([](ScenarioConfig& c) -> int& { return c.link.overhead; }));
        k.emplace_back("backoff_min", time_key([](ScenarioConfig& c) -> SimTime& { return c.link.backoff_min; }));
        k.emplace_back("backoff_max", time_key([](ScenarioConfig& c) -> SimTime& { return c.link.backoff_max; }));
        k.emplace_back("send_buffer", Key{[](ScenarioConfig& c, std::string_view v, int line) {
                                              const auto n = static_cast<std::size_t>(parse_int(v, line, ""));
                                              c.aodv.send_buffer = n;
                                              c.dsr.send_buffer = n;
                                          },
                                          [](const ScenarioConfig& c) { return std::to_string(c.aodv.send_buffer); }});

        k.emplace_back("aodv.active_route_timeout",
                       time_key([](ScenarioConfig& c) -> SimTime& { return c.aodv.active_route_timeout; }));
        k.emplace_back("aodv.my_route_timeout",
                       time_key([](ScenarioConfig& c) -> SimTime& { return c.aodv.my_route_timeout; }));
        k.emplace_back("aodv.hello_interval", time_key([](ScenarioConfig& c) -> SimTime& { return c.aodv.hello_interval; }));
        k.emplace_back("aodv.allowed_hello_loss",
                       count_key([](ScenarioConfig& c) -> int& { return c.aodv.allowed_hello_loss; }));
        k.emplace_back("aodv.hello", bool_key([](ScenarioConfig& c) -> bool& { return c.aodv.hello_enabled; }));
        k.emplace_back("aodv.rreq_retries", count_key([](ScenarioConfig& c) -> int& { return c.aodv.rreq_retries; }));
        k.emplace_back("aodv.net_diameter", count_key([](ScenarioConfig& c) -> int& { return c.aodv.net_diameter; }));
        k.emplace_back("aodv.ttl_start", count_key([](ScenarioConfig& c) -> int& { return c.aodv.ttl_start; }));
        k.emplace_back("aodv.ttl_increment", count_key([](ScenarioConfig& c) -> int& { return c.aodv.ttl_increment; }));
        k.emplace_back("aodv.ttl_threshold", count_key([](ScenarioConfig& c) -> int& { return c.aodv.ttl_threshold; }));
        k.emplace_back("aodv.node_traversal_time",
                       time_key([](ScenarioConfig& c) -> SimTime& { return c.aodv.node_traversal_time; }));
        k.emplace_back("aodv.seen_lifetime", time_key([](ScenarioConfig& c) -> SimTime& { return c.aodv.seen_lifetime; }));
        k.emplace_back("aodv.intermediate_reply",
                       bool_key([](ScenarioConfig& c) -> bool& { return c.aodv.intermediate_reply; }));

        k.emplace_back("dsdv.update_interval", time_key([](ScenarioConfig& c) -> SimTime& { return c.dsdv.update_interval; }));
        k.emplace_back("dsdv.update_jitter", double_key([](ScenarioConfig& c) -> double& { return c.dsdv.update_jitter; }));
        k.emplace_back("dsdv.full_dump_every", count_key([](ScenarioConfig& c) -> int& { return c.dsdv.full_dump_every; }));
        k.emplace_back("dsdv.settling_time", time_key([](ScenarioConfig& c) -> SimTime& { return c.dsdv.settling_time; }));
        k.emplace_back("dsdv.trigger_on_change",
                       bool_key([](ScenarioConfig& c) -> bool& { return c.dsdv.trigger_on_change; }));
        k.emplace_back("dsdv.trigger_min_gap", time_key([](ScenarioConfig& c) -> SimTime& { return c.dsdv.trigger_min_gap; }));
        k.emplace_back("dsdv.trigger_jitter", time_key([](ScenarioConfig& c) -> SimTime& { return c.dsdv.trigger_jitter; }));

        k.emplace_back("dsr.cache_per_dest", count_key([](ScenarioConfig& c) -> std::size_t& { return c.dsr.cache_per_dest; }));
        k.emplace_back("dsr.retries", count_key([](ScenarioConfig& c) -> int& { return c.dsr.retries; }));
        k.emplace_back("dsr.retry_backoff", time_key([](ScenarioConfig& c) -> SimTime& { return c.dsr.retry_backoff; }));
        k.emplace_back("dsr.reply_from_cache", bool_key([](ScenarioConfig& c) -> bool& { return c.dsr.reply_from_cache; }));
        return k;
    }();
    return table;
}

const Key* find_key(std::string_view name)
{
    for (const auto& [k, v] : keys()) {
        if (k == name) return &v;
    }
    return nullptr;
}

}  // namespace

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("MANETSIM_SEED")) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
        throw InvalidConfig("MANETSIM_SEED is not an unsigned integer: '" + std::string(s) + "'");
    }
    return 1;
}

ScenarioConfig parse_config(std::string_view text)
{
    ScenarioConfig c;
    c.seed = default_seed();
    int lineno = 0;
    while (!text.empty()) {
        ++lineno;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key=value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const Key* k = find_key(key);
        if (!k) throw ParseError(lineno, "unknown key '" + std::string(key) + "'");
        try {
            k->set(c, value, lineno);
        } catch (const ParseError& e) {
            const std::string msg = e.what();
            throw ParseError(lineno, std::string(key) + msg.substr(msg.find(": ") + 2));
        }
    }
    validate(c);
    return c;
}

void validate(const ScenarioConfig& c)
{
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ValidationError(field, what);
    };
    require(c.nodes >= 2, "nodes", "need at least 2 nodes");
    require(c.area_x > 0.0, "area_x", "must be positive");
    require(c.area_y > 0.0, "area_y", "must be positive");
    require(c.connections >= 1, "connections", "must be at least 1");
    require(static_cast<std::int64_t>(c.connections) <= static_cast<std::int64_t>(c.nodes) * (c.nodes - 1),
            "connections", "more connections than ordered node pairs");
    require(c.packet_size > 0, "packet_size", "must be positive");
    require(c.cbr_rate > 0.0, "cbr_rate", "must be positive");
    require(c.sim_time > 0.0, "sim_time", "must be positive");
    require(c.pause_time >= 0.0, "pause_time", "must be non-negative");
    if (!c.stationary && c.placement == Placement::Random) {
        require(c.speed_min > 0.0, "speed_min", "must be positive");
        require(c.speed_max >= c.speed_min, "speed_max", "must be at least speed_min");
    }
    require(c.start_lo >= 0.0 && c.start_lo <= c.start_hi, "start_lo", "need 0 <= start_lo <= start_hi");
    require(c.start_hi < c.sim_time, "start_hi", "must be before sim_time");
    require(c.line_spacing > 0.0, "line_spacing", "must be positive");
    require(c.link.tx_range > 0.0, "tx_range", "must be positive");
    require(c.link.bitrate > 0.0, "bitrate", "must be positive");
    require(c.link.ifq_len >= 1, "ifq_len", "must be at least 1");
    require(c.link.unicast_retry_limit >= 0, "retry_limit", "must be non-negative");
    require(c.link.jitter_max >= SimTime::zero(), "jitter_max", "must be non-negative");
    require(c.link.overhead >= 0, "link_overhead", "must be non-negative");
    require(c.link.backoff_min > SimTime::zero() && c.link.backoff_min <= c.link.backoff_max, "backoff_min",
            "need 0 < backoff_min <= backoff_max");
    require(c.aodv.send_buffer >= 1, "send_buffer", "must be at least 1");
    require(c.aodv.hello_interval > SimTime::zero(), "aodv.hello_interval", "must be positive");
    require(c.aodv.allowed_hello_loss >= 1, "aodv.allowed_hello_loss", "must be at least 1");
    require(c.aodv.rreq_retries >= 0, "aodv.rreq_retries", "must be non-negative");
    require(c.aodv.ttl_start >= 1 && c.aodv.ttl_increment >= 1, "aodv.ttl_start", "ring parameters must be positive");
    require(c.aodv.net_diameter >= 1, "aodv.net_diameter", "must be positive");
    require(c.dsdv.update_interval > SimTime::zero(), "dsdv.update_interval", "must be positive");
    require(c.dsdv.update_jitter >= 0.0 && c.dsdv.update_jitter < 1.0, "dsdv.update_jitter", "must be in [0, 1)");
    require(c.dsdv.full_dump_every >= 1, "dsdv.full_dump_every", "must be at least 1");
    require(c.dsr.cache_per_dest >= 1, "dsr.cache_per_dest", "must be at least 1");
    require(c.dsr.retries >= 0, "dsr.retries", "must be non-negative");
    require(c.dsr.retry_backoff > SimTime::zero(), "dsr.retry_backoff", "must be positive");
    for (const auto& [s, d] : c.flows) {
        require(s >= 0 && s < c.nodes && d >= 0 && d < c.nodes, "flows", "node id out of range");
        require(s != d, "flows", "source equals destination");
    }
}

std::string format_config(const ScenarioConfig& c)
{
    std::string out;
    for (const auto& [name, key] : keys()) {
        if (name == "flows" && c.flows.empty()) continue;
        out += name + "=" + key.get(c) + "\n";
    }
    return out;
}

std::string report_header(const ScenarioConfig& c)
{
    std::string out = "# manetsim scenario parameters\n";
    std::istringstream lines(format_config(c));
    for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
    out += "# decided values (defaults chosen for this simulator):\n";
    out += "#   node speed uniform in [speed_min, speed_max] per leg\n";
    out += "#   cbr_rate and flow start window [start_lo, start_hi]\n";
    out += "#   link: fixed-range unit disk, carrier sense and collision model, bitrate, ifq_len, retry_limit,\n";
    out += "#         jitter_max, link_overhead\n";
    out += "#   dsdv: update_interval, full_dump_every, settling_time, triggered update gap and jitter\n";
    out += "#   aodv: route timeouts, hello parameters, expanding ring schedule, intermediate_reply\n";
    out += "#   dsr: cache_per_dest (FIFO), retries with doubling retry_backoff, reply_from_cache\n";
    out += "#   routing load counts every per-hop control transmission (nrl_mode)\n";
    return out;
}

MobilitySchedule build_schedule(const ScenarioConfig& c)
{
    const SimTime end = seconds(c.sim_time);
    if (c.placement == Placement::Line) {
        std::vector<Position> pos;
        for (int i = 0; i < c.nodes; ++i) pos.push_back({i * c.line_spacing, c.area_y / 2.0});
        return static_schedule(pos, end);
    }
    MobilityParams p;
    p.nodes = c.nodes;
    p.area_x = c.area_x;
    p.area_y = c.area_y;
    p.speed_min = c.speed_min;
    p.speed_max = c.speed_max;
    p.pause_time = c.pause_time;
    p.sim_time = end;
    p.stationary = c.stationary;
    return generate_schedule(p, c.seed);
}

std::vector<CbrFlow> build_flows(const ScenarioConfig& c)
{
    TrafficParams t;
    t.nodes = c.nodes;
    t.connections = c.flows.empty() ? c.connections : static_cast<int>(c.flows.size());
    t.rate = c.cbr_rate;
    t.packet_size = c.packet_size;
    t.start_lo = seconds(c.start_lo);
    t.start_hi = seconds(c.start_hi);
    t.sim_time = seconds(c.sim_time);
    std::vector<CbrFlow> flows = generate_flows(t, c.seed);
    for (std::size_t i = 0; i < c.flows.size(); ++i) {
        flows[i].src = c.flows[i].first;
        flows[i].dst = c.flows[i].second;
    }
    return flows;
}

Simulation::Simulation(const ScenarioConfig& config, std::ostream* trace_out, std::optional<MobilitySchedule> schedule)
    : m_config(config),
      m_end(seconds(config.sim_time)),
      m_schedule(schedule ? std::move(*schedule) : build_schedule(config)),
      m_flows(build_flows(config)),
      m_sink(trace_out)
{
    validate(m_config);
    const auto n = static_cast<std::size_t>(m_config.nodes);
    if (m_schedule.node_count() != n) throw InvalidConfig("mobility schedule node count does not match nodes");
    m_positions = std::make_unique<PositionTracker>(m_schedule, kernels::active_kernels());
    m_link = std::make_unique<LinkLayer>(m_config.link, *this, n);
    m_routing_rng.reserve(n);
    m_mac_rng.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<NodeId>(i);
        m_routing_rng.emplace_back(m_config.seed, stream_key("routing", id));
        m_mac_rng.emplace_back(m_config.seed, stream_key("mac", id));
        switch (m_config.protocol) {
        case Protocol::Aodv: m_agents.push_back(std::make_unique<AodvAgent>(id, *this, n, m_config.aodv)); break;
        case Protocol::Dsdv: m_agents.push_back(std::make_unique<DsdvAgent>(id, *this, n, m_config.dsdv)); break;
        case Protocol::Dsr: m_agents.push_back(std::make_unique<DsrAgent>(id, *this, m_config.dsr)); break;
        }
    }
    m_queue.schedule(SimTime::zero(), kBroadcast, StartAgents{});
    for (const CbrFlow& f : m_flows) {
        m_delivered.emplace_back(static_cast<std::size_t>(f.packet_count()), false);
        if (f.packet_count() > 0) m_queue.schedule(f.emit_time(0), f.src, Emit{f.id, 0});
    }
}

Simulation::~Simulation() = default;

void Simulation::run_until(SimTime t)
{
    const SimTime end = std::min(t, m_end);
    if (end < m_queue.now()) return;
    m_queue.run_until(end, [&](const EventQueue<Action>::Event& ev) {
        dispatch(ev);
        ++m_events;
        if (m_event_hook) m_event_hook();
    });
}

RunResult Simulation::finish()
{
    run_until(m_end);
    RunResult r;
    r.metrics = m_collector.report(m_config.sim_time, m_config.nrl_mode);
    r.diagnostics.events = m_events;
    r.diagnostics.link_conservation = m_link->conservation_holds();
    for (const auto& a : m_agents) r.diagnostics.app_buffered_at_end += a->buffered_app_packets();
    r.diagnostics.app_queued_at_end = m_link->app_packets_held();
    return r;
}

void Simulation::dispatch(const EventQueue<Action>::Event& ev)
{
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, MacEvent>) {
                if (a.tx_end) {
                    m_link->on_tx_end(ev.target);
                } else {
                    m_link->on_attempt(ev.target);
                }
            } else if constexpr (std::is_same_v<T, RoutingTimer>) {
                agent(ev.target).on_timer(a.kind, a.cookie);
            } else if constexpr (std::is_same_v<T, Emit>) {
                emit(a.flow, a.k);
            } else {
                for (auto& ag : m_agents) ag->start();
            }
        },
        ev.action);
}

void Simulation::emit(int flow_id, std::int64_t k)
{
    const CbrFlow& f = m_flows[static_cast<std::size_t>(flow_id)];
    Packet p;
    p.uid = next_uid();
    p.type = PacketType::Cbr;
    p.src = f.src;
    p.dst = f.dst;
    p.app = AppData{f.id, k, now(), f.packet_size};
    p.size = f.packet_size;

    TraceRecord rec;
    rec.op = TraceOp::Send;
    rec.time = now();
    rec.node = f.src;
    rec.layer = Layer::Agt;
    rec.uid = p.uid;
    rec.type = PacketType::Cbr;
    rec.size = f.packet_size;
    rec.flow = f.id;
    rec.seq = k;
    m_collector.on_app_send();
    trace(rec);

    if (k + 1 < f.packet_count()) m_queue.schedule(f.emit_time(k + 1), f.src, Emit{flow_id, k + 1});
    agent(f.src).send_data(std::move(p));
}

void Simulation::enqueue_frame(NodeId self, NodeId dest, Packet pkt)
{
    Frame f;
    f.src = self;
    f.dest = dest;
    f.size = pkt.size + m_config.link.overhead;
    f.packet = std::make_shared<const Packet>(std::move(pkt));
    m_link->enqueue(self, std::move(f));
}

void Simulation::send_broadcast(NodeId self, Packet pkt)
{
    enqueue_frame(self, kBroadcast, std::move(pkt));
}

void Simulation::send_unicast(NodeId self, NodeId next_hop, Packet pkt)
{
    enqueue_frame(self, next_hop, std::move(pkt));
}

void Simulation::deliver_local(NodeId self, const Packet& pkt)
{
    if (pkt.type != PacketType::Cbr || !pkt.app) return;
    auto& seen = m_delivered[static_cast<std::size_t>(pkt.app->flow)];
    const auto seq = static_cast<std::size_t>(pkt.app->seq);
    if (seq >= seen.size() || seen[seq]) return;
    seen[seq] = true;

    TraceRecord rec;
    rec.op = TraceOp::Receive;
    rec.time = now();
    rec.node = self;
    rec.layer = Layer::Agt;
    rec.uid = pkt.uid;
    rec.type = PacketType::Cbr;
    rec.size = pkt.app->payload;
    rec.flow = pkt.app->flow;
    rec.seq = pkt.app->seq;
    m_collector.on_app_receive(pkt.app->sent_at, now(), pkt.app->payload);
    trace(rec);
}

void Simulation::set_timer(NodeId self, SimTime delay, int kind, std::uint64_t cookie)
{
    m_queue.schedule(now() + delay, self, RoutingTimer{kind, cookie});
}

void Simulation::trace(TraceOp op, NodeId node, Layer layer, const Packet& pkt, DropReason reason)
{
    TraceRecord rec;
    rec.op = op;
    rec.time = now();
    rec.node = node;
    rec.layer = layer;
    rec.uid = pkt.uid;
    rec.type = pkt.type;
    rec.size = pkt.size;
    if (pkt.app) {
        rec.flow = pkt.app->flow;
        rec.seq = pkt.app->seq;
    }
    rec.reason = reason;
    if (layer == Layer::Rtr) m_collector.on_routing_tx(op, pkt.type);
    trace(rec);
}

void Simulation::trace(const TraceRecord& rec)
{
    if (rec.op == TraceOp::Drop) m_collector.on_drop(rec.reason, rec.type);
    m_sink.write(rec);
    if (m_listener) m_listener(rec);
}

void Simulation::schedule_mac(SimTime at, NodeId node, bool tx_end)
{
    m_queue.schedule(at, node, MacEvent{tx_end});
}

void Simulation::deliver(NodeId receiver, NodeId from, const std::shared_ptr<const Packet>& pkt)
{
    agent(receiver).receive(*pkt, from);
}

void Simulation::link_broken(NodeId node, const Packet& pkt, NodeId next_hop)
{
    agent(node).on_link_break(pkt, next_hop);
}

RunResult run_scenario(const ScenarioConfig& config, std::ostream* trace_out)
{
    Simulation sim(config, trace_out);
    return sim.finish();
}

std::string csv_header()
{
    return "protocol,nodes,connections,seed,sent,received,pdf,avg_delay,routing_tx,nrl,throughput_kbps,"
           "throughput_pps,drop_ifq,drop_nrte,drop_collision";
}

std::string csv_row(const ScenarioConfig& c, const MetricsReport& m)
{
    auto opt = [](const std::optional<double>& v, const char* f) {
        if (!v) return std::string();
        char buf[64];
        std::snprintf(buf, sizeof buf, f, *v);
        return std::string(buf);
    };
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    std::string row;
    row += std::string(to_string(c.protocol)) + "," + std::to_string(c.nodes) + "," + std::to_string(c.connections) +
           "," + std::to_string(c.seed) + "," + std::to_string(m.sent) + "," + std::to_string(m.received) + ",";
    row += opt(m.pdf, "%.6f") + "," + opt(m.avg_delay, "%.9f") + "," + std::to_string(m.routing_tx) + "," +
           opt(m.nrl, "%.6f") + ",";
    row += num(m.throughput_kbps) + "," + num(m.throughput_pps) + ",";
    row += std::to_string(m.drop_count(DropReason::Ifq)) + "," + std::to_string(m.drop_count(DropReason::Nrte)) + "," +
           std::to_string(m.drop_count(DropReason::Collision));
    return row;
}

}  // namespace manet
