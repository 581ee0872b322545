#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "manet/routing/routing_agent.hpp"

namespace manet {

struct DsdvConfig {
    SimTime update_interval = seconds(15);
    double update_jitter = 0.15;  // +/- fraction of update_interval
    int full_dump_every = 3;      // every n-th periodic update is a full dump
    SimTime settling_time = seconds(6);
    /// Send an incremental soon after a received update changes a metric or
    /// adds a destination (not just on local link breaks).
    bool trigger_on_change = true;
    /// Minimum spacing between triggered updates from one node.
    SimTime trigger_min_gap = micros(400000);
    /// Uniform extra delay in [0, trigger_jitter] before each triggered update.
    SimTime trigger_jitter = micros(100000);
};

inline constexpr std::uint32_t kInfiniteMetric = 0xFFFF;

struct DsdvEntry {
    NodeId dest = 0;
    NodeId next_hop = 0;
    std::uint32_t metric = kInfiniteMetric;
    std::uint32_t seqno = 0;
    SimTime install_time;
    SimTime advertise_after;
    bool changed_since_full_dump = false;
    bool pending = false;  // changed and not yet advertised
    bool present = false;

    bool usable() const { return present && metric != kInfiniteMetric; }
};

/// Destination-Sequenced Distance Vector.
///
/// Table invariants: even seqno for usable entries, odd seqno with infinite
/// metric for entries invalidated by a link break, self entry metric 0.
class DsdvAgent final : public RoutingAgent {
public:
    enum Timer : int { kPeriodic = 1, kTriggered = 2, kBoot = 3 };

    DsdvAgent(NodeId self, NodeServices& svc, std::size_t nodes, const DsdvConfig& config);

    void start() override;
    void send_data(Packet pkt) override;
    void receive(const Packet& pkt, NodeId from) override;
    void on_link_break(const Packet& pkt, NodeId next_hop) override;
    void on_timer(int kind, std::uint64_t cookie) override;

    /// Builds and broadcasts the periodic advertisement. Returns the messages
    /// sent (empty when an incremental had nothing to carry).
    std::vector<DsdvUpdate> periodic_advertise();

    /// Applies a neighbor's update. Returns the destinations whose entry changed.
    std::vector<NodeId> handle_update(const DsdvUpdate& msg, NodeId from);

    /// Invalidates routes through lost_neighbor and sends an incremental.
    /// Returns the messages sent.
    std::vector<DsdvUpdate> handle_link_break(NodeId lost_neighbor);

    std::optional<NodeId> lookup_next_hop(NodeId dest) const;

    const DsdvEntry& entry(NodeId dest) const { return m_table[static_cast<std::size_t>(dest)]; }
    std::span<const DsdvEntry> table() const { return m_table; }
    std::uint32_t own_seqno() const { return m_table[static_cast<std::size_t>(m_self)].seqno; }

    /// Test hook: overwrite a table entry.
    void set_entry(const DsdvEntry& e);

    /// Entries per frame before a dump is split (and before an incremental is promoted).
    static std::size_t frame_capacity();

private:
    std::vector<DsdvUpdate> advertise(bool full);
    void request_triggered();
    void forward_data(Packet pkt, bool originated);
    DsdvEntry& slot(NodeId d) { return m_table[static_cast<std::size_t>(d)]; }

    DsdvConfig m_config;
    std::vector<DsdvEntry> m_table;
    std::uint64_t m_ticks = 0;
    SimTime m_last_triggered = SimTime::from_micros(-1000000000);
    bool m_triggered_pending = false;
};

/// Loop freedom at equal sequence number: among nodes whose entry for dest
/// carries the highest seqno any node holds, following next_hop never
/// revisits a node. Returns false on a cycle.
bool dsdv_loop_free(std::span<const DsdvAgent* const> agents, NodeId dest);

}  // namespace manet
