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

struct DsrConfig {
    std::size_t cache_per_dest = 4;
    int retries = 2;                        // discoveries after the first one
    SimTime retry_backoff = micros(500000); // doubled per attempt
    bool reply_from_cache = true;
    std::size_t send_buffer = 64;
};

using Route = std::vector<NodeId>;

bool is_simple_path(std::span<const NodeId> hops);
bool route_has_link(std::span<const NodeId> hops, NodeId u, NodeId v);

/// Per-destination FIFO of source routes starting at the owning node.
class RouteCache {
public:
    RouteCache(NodeId owner, std::size_t per_dest) : m_owner(owner), m_capacity(per_dest) {}

    /// Adds route (owner first, destination last) unless already present or
    /// not a simple path. Evicts the oldest entry for that destination when full.
    bool add(const Route& route);

    /// Adds every prefix of path (owner first) as a route to its last node.
    void learn_path(const Route& path);

    /// Shortest route to dest; ties go to the earliest inserted.
    std::optional<Route> best(NodeId dest) const;

    /// Removes every route using the link u-v in either direction.
    std::size_t purge_link(NodeId u, NodeId v);

    std::span<const Route> routes(NodeId dest) const;
    const std::map<NodeId, std::vector<Route>>& all() const { return m_routes; }
    std::size_t size() const;
    /// Incremented on every mutation.
    std::uint64_t revision() const { return m_revision; }

private:
    NodeId m_owner;
    std::size_t m_capacity;
    std::uint64_t m_revision = 0;
    std::map<NodeId, std::vector<Route>> m_routes;
};

/// Dynamic Source Routing.
class DsrAgent final : public RoutingAgent {
public:
    enum Timer : int { kDiscovery = 1 };

    DsrAgent(NodeId self, NodeServices& svc, const DsrConfig& config);

    void send_data(Packet pkt) override;
    void receive(const Packet& pkt, NodeId from) override;
    void on_link_break(const Packet& pkt, NodeId next_hop) override;
    void on_timer(int kind, std::uint64_t cookie) override;
    std::size_t buffered_app_packets() const override { return m_buffer.size(); }

    void originate_discovery(NodeId dest);
    RreqOutcome handle_rreq(const Packet& pkt);
    void handle_rrep(const Packet& pkt);
    void handle_rerr(const Packet& pkt);
    /// Sends a source-routed packet held here on to its next hop, or delivers
    /// it locally at the end of the route. Drops with MALFORMED on a bad header.
    void forward_source_routed(Packet pkt);

    const RouteCache& cache() const { return m_cache; }
    RouteCache& cache_for_test() { return m_cache; }
    bool discovery_pending(NodeId dest) const { return m_discoveries.contains(dest); }
    std::size_t buffered_for(NodeId dest) const { return m_buffer.size_for(dest); }
    /// Links removed by RERRs this node processed, for the purge invariant.
    const std::vector<std::pair<NodeId, NodeId>>& purged_links() const { return m_purged; }

private:
    struct Discovery {
        int attempt = 0;
        std::uint64_t generation = 0;
    };

    void send_rreq(NodeId dest);
    void arm_discovery_timer(NodeId dest, Discovery& d);
    void discovery_timeout(NodeId dest, std::uint64_t generation);
    void flush_buffer(NodeId dest);
    void buffer_packet(Packet pkt);
    void send_along(Packet pkt, const Route& route);
    void send_reply(const Route& full_route, std::uint32_t request_id);
    void purge(NodeId u, NodeId v);

    DsrConfig m_config;
    RouteCache m_cache;
    std::uint32_t m_request_id = 0;
    std::set<std::pair<NodeId, std::uint32_t>> m_seen;
    std::map<NodeId, Discovery> m_discoveries;
    std::uint64_t m_generation = 0;
    SendBuffer m_buffer;
    std::vector<std::pair<NodeId, NodeId>> m_purged;
};

/// Moves the cursor to the next hop. Throws MalformedHeader when the cursor is
/// already at or past the end.
NodeId advance_cursor(SourceRoute& route);

}  // namespace manet
