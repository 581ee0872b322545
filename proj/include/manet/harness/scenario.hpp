#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "manet/link/link_layer.hpp"
#include "manet/metrics/metrics.hpp"
#include "manet/mobility/mobility.hpp"
#include "manet/routing/aodv.hpp"
#include "manet/routing/dsdv.hpp"
#include "manet/routing/dsr.hpp"
#include "manet/routing/routing_agent.hpp"
#include "manet/sim/event_queue.hpp"
#include "manet/traffic/cbr.hpp"

namespace manet {

enum class Placement { Random, Line };

struct ScenarioConfig {
    Protocol protocol = Protocol::Aodv;
    int nodes = 50;
    double area_x = 1000.0;
    double area_y = 1000.0;
    int connections = 10;
    int packet_size = 512;
    double cbr_rate = 4.0;
    double sim_time = 100.0;
    double pause_time = 0.0;
    double speed_min = 1.0;
    double speed_max = 20.0;
    double start_lo = 1.0;
    double start_hi = 5.0;
    std::uint64_t seed = 1;
    bool stationary = false;
    Placement placement = Placement::Random;
    double line_spacing = 200.0;
    /// Explicit (src, dst) pairs; replaces the random pair draw when non-empty.
    std::vector<std::pair<NodeId, NodeId>> flows;
    NrlMode nrl_mode = NrlMode::PerHop;
    LinkConfig link;
    AodvConfig aodv;
    DsdvConfig dsdv;
    DsrConfig dsr;
};

/// Default seed: MANETSIM_SEED when set, else 1.
std::uint64_t default_seed();

/// Flat `key=value` lines, `#` comments. Unknown keys and unparseable values
/// throw ParseError(line); out-of-range values throw ValidationError(field).
ScenarioConfig parse_config(std::string_view text);
void validate(const ScenarioConfig& config);

/// Every key with its effective value, in parse_config syntax.
std::string format_config(const ScenarioConfig& config);

/// Report header: the full parameter set plus the notes on decided values.
std::string report_header(const ScenarioConfig& config);

/// Run-level self checks collected while the simulation ran.
struct RunDiagnostics {
    std::uint64_t events = 0;
    bool link_conservation = true;
    std::uint64_t app_buffered_at_end = 0;
    std::uint64_t app_queued_at_end = 0;
};

struct RunResult {
    MetricsReport metrics;
    RunDiagnostics diagnostics;
};

/// One simulated network: mobility, link layer, per-node routing agents and
/// CBR sources, all driven by a single event queue.
class Simulation final : public NodeServices, public LinkHost {
public:
    using TraceListener = std::function<void(const TraceRecord&)>;

    /// trace_out may be null. A prebuilt schedule (e.g. a fixed topology) may be
    /// supplied; otherwise one is generated from the config.
    Simulation(const ScenarioConfig& config, std::ostream* trace_out,
               std::optional<MobilitySchedule> schedule = std::nullopt);
    ~Simulation() override;

    /// Advances to min(t, sim_time). Monotone.
    void run_until(SimTime t);
    RunResult finish();

    /// Called after every dispatched event.
    void set_event_hook(std::function<void()> hook) { m_event_hook = std::move(hook); }
    void set_trace_listener(TraceListener l) { m_listener = std::move(l); }

    const ScenarioConfig& config() const { return m_config; }
    const MobilitySchedule& schedule() const { return m_schedule; }
    const std::vector<CbrFlow>& flows() const { return m_flows; }
    std::size_t node_count() const { return m_agents.size(); }
    RoutingAgent& agent(NodeId n) { return *m_agents[static_cast<std::size_t>(n)]; }
    const LinkLayer& link() const { return *m_link; }
    const MetricsCollector& collector() const { return m_collector; }
    SimTime sim_end() const { return m_end; }

    // NodeServices
    SimTime now() const override { return m_queue.now(); }
    void send_broadcast(NodeId self, Packet pkt) override;
    void send_unicast(NodeId self, NodeId next_hop, Packet pkt) override;
    void deliver_local(NodeId self, const Packet& pkt) override;
    void set_timer(NodeId self, SimTime delay, int kind, std::uint64_t cookie) override;
    RngStream& routing_rng(NodeId self) override { return m_routing_rng[static_cast<std::size_t>(self)]; }
    std::uint64_t next_uid() override { return m_next_uid++; }
    void trace(TraceOp op, NodeId node, Layer layer, const Packet& pkt, DropReason reason) override;

    // LinkHost
    void schedule_mac(SimTime at, NodeId node, bool tx_end) override;
    PositionTracker& positions() override { return *m_positions; }
    RngStream& mac_rng(NodeId node) override { return m_mac_rng[static_cast<std::size_t>(node)]; }
    void trace(const TraceRecord& rec) override;
    void deliver(NodeId receiver, NodeId from, const std::shared_ptr<const Packet>& pkt) override;
    void link_broken(NodeId node, const Packet& pkt, NodeId next_hop) override;

private:
    struct MacEvent {
        bool tx_end;
    };
    struct RoutingTimer {
        int kind;
        std::uint64_t cookie;
    };
    struct Emit {
        int flow;
        std::int64_t k;
    };
    struct StartAgents {};
    using Action = std::variant<MacEvent, RoutingTimer, Emit, StartAgents>;

    void dispatch(const EventQueue<Action>::Event& ev);
    void emit(int flow, std::int64_t k);
    void enqueue_frame(NodeId self, NodeId dest, Packet pkt);

    ScenarioConfig m_config;
    SimTime m_end;
    MobilitySchedule m_schedule;
    std::vector<CbrFlow> m_flows;
    std::unique_ptr<PositionTracker> m_positions;
    std::unique_ptr<LinkLayer> m_link;
    std::vector<std::unique_ptr<RoutingAgent>> m_agents;
    std::vector<RngStream> m_routing_rng;
    std::vector<RngStream> m_mac_rng;
    EventQueue<Action> m_queue;
    TraceSink m_sink;
    MetricsCollector m_collector;
    std::vector<std::vector<bool>> m_delivered;  // per flow, per seq
    std::uint64_t m_next_uid = 0;
    std::uint64_t m_events = 0;
    std::function<void()> m_event_hook;
    TraceListener m_listener;
};

/// Runs one scenario start to finish.
RunResult run_scenario(const ScenarioConfig& config, std::ostream* trace_out);

/// Schedule used for a config: random waypoint, stationary random placement,
/// or a static line.
MobilitySchedule build_schedule(const ScenarioConfig& config);
std::vector<CbrFlow> build_flows(const ScenarioConfig& config);

// CSV row formatting shared by the CLI and sweep.
std::string csv_header();
std::string csv_row(const ScenarioConfig& config, const MetricsReport& m);

}  // namespace manet
