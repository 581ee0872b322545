#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "manet/routing/routing_agent.hpp"

namespace manet {

struct AodvConfig {
    SimTime active_route_timeout = seconds(3);
    SimTime my_route_timeout = seconds(6);
    SimTime hello_interval = seconds(1);
    int allowed_hello_loss = 2;
    bool hello_enabled = true;
    int rreq_retries = 2;  // network-wide retries after the first network-wide attempt
    int net_diameter = 35;
    int ttl_start = 1;
    int ttl_increment = 2;
    int ttl_threshold = 7;
    SimTime node_traversal_time = micros(40000);
    SimTime seen_lifetime = micros(2800000);
    bool intermediate_reply = true;
    std::size_t send_buffer = 64;
};

struct AodvEntry {
    NodeId dest = 0;
    NodeId next_hop = 0;
    int hop_count = 0;
    std::uint32_t seqno = 0;
    bool seqno_valid = false;
    bool valid = false;
    bool present = false;
    SimTime valid_until;
    SimTime data_until;  // last data use + active_route_timeout
    std::set<NodeId> precursors;
};

/// Ad hoc On-demand Distance Vector.
class AodvAgent final : public RoutingAgent {
public:
    enum Timer : int { kDiscovery = 1, kHello = 2 };

    AodvAgent(NodeId self, NodeServices& svc, std::size_t nodes, const AodvConfig& config);

    void start() override;
    void send_data(Packet pkt) override;
    void receive(const Packet& pkt, NodeId from) override;
    void on_link_break(const Packet& pkt, NodeId next_hop) override;
    void on_timer(int kind, std::uint64_t cookie) override;
    std::size_t buffered_app_packets() const override { return m_buffer.size(); }

    void originate_discovery(NodeId dest);
    RreqOutcome handle_rreq(const Packet& pkt, NodeId from);
    void handle_rrep(const Packet& pkt, NodeId from);
    void handle_rerr(const AodvRerr& rerr, NodeId from);
    /// Invalidates routes through lost_neighbor and sends the RERR. Returns the
    /// unreachable list (empty when nothing was affected).
    std::vector<AodvRerr::Unreachable> handle_link_break(NodeId lost_neighbor);
    void hello_tick();
    void expire_routes();

    const AodvEntry& entry(NodeId dest) const { return m_table[static_cast<std::size_t>(dest)]; }
    std::span<const AodvEntry> table() const { return m_table; }
    std::uint32_t own_seqno() const { return m_seqno; }
    bool discovery_pending(NodeId dest) const { return m_discoveries.contains(dest); }
    /// TTL the next RREQ for dest will carry (for the ring schedule tests).
    int ttl_for_attempt(int attempt) const;
    int total_attempts() const;
    bool has_active_route() const;
    std::size_t buffered_for(NodeId dest) const { return m_buffer.size_for(dest); }

    /// Test hook.
    void set_entry(const AodvEntry& e);

private:
    struct Discovery {
        int attempt = 0;
        std::uint64_t generation = 0;
    };

    AodvEntry& slot(NodeId d) { return m_table[static_cast<std::size_t>(d)]; }
    bool usable(NodeId dest);
    void refresh_neighbor(NodeId from, SimTime lifetime);
    void send_rreq(NodeId dest, int ttl);
    void arm_discovery_timer(NodeId dest, Discovery& d, int ttl);
    void discovery_timeout(NodeId dest, std::uint64_t generation);
    void complete_discovery(NodeId dest);
    void send_rerr(std::vector<AodvRerr::Unreachable> list, const std::set<NodeId>& precursors);
    void buffer_packet(Packet pkt);
    void forward_data(Packet pkt, NodeId from);
    void use_route(AodvEntry& e);
    void set_seqno(AodvEntry& e, std::uint32_t s);

    AodvConfig m_config;
    std::vector<AodvEntry> m_table;
    std::uint32_t m_seqno = 0;
    std::uint32_t m_rreq_id = 0;
    std::map<std::pair<NodeId, std::uint32_t>, SimTime> m_seen;
    std::map<NodeId, Discovery> m_discoveries;
    std::uint64_t m_generation = 0;
    SendBuffer m_buffer;
    std::map<NodeId, SimTime> m_hello_neighbors;  // last hello heard
    std::map<NodeId, SimTime> m_last_originated;  // dest -> last data sent from here
};

}  // namespace manet
