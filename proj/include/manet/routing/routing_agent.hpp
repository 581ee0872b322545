#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string_view>

#include "manet/metrics/trace.hpp"
#include "manet/net/packet.hpp"
#include "manet/sim/rng.hpp"
#include "manet/sim/sim_time.hpp"

namespace manet {

enum class Protocol { Aodv, Dsdv, Dsr };

std::string_view to_string(Protocol p);
std::optional<Protocol> protocol_from(std::string_view s);

enum class RreqOutcome { Forward, Reply, Drop };

/// Services a node's routing agent uses from the simulation around it.
class NodeServices {
public:
    virtual ~NodeServices() = default;

    virtual SimTime now() const = 0;
    virtual void send_broadcast(NodeId self, Packet pkt) = 0;
    virtual void send_unicast(NodeId self, NodeId next_hop, Packet pkt) = 0;
    virtual void deliver_local(NodeId self, const Packet& pkt) = 0;
    virtual void set_timer(NodeId self, SimTime delay, int kind, std::uint64_t cookie) = 0;
    virtual RngStream& routing_rng(NodeId self) = 0;
    virtual std::uint64_t next_uid() = 0;
    virtual void trace(TraceOp op, NodeId node, Layer layer, const Packet& pkt, DropReason reason) = 0;
};

/// Per-node routing protocol instance.
class RoutingAgent {
public:
    RoutingAgent(NodeId self, NodeServices& svc) : m_self(self), m_svc(svc) {}
    virtual ~RoutingAgent() = default;
    RoutingAgent(const RoutingAgent&) = delete;
    RoutingAgent& operator=(const RoutingAgent&) = delete;

    NodeId self() const { return m_self; }

    /// Called once at t=0 to arm periodic timers.
    virtual void start() {}

    /// Application data originated at this node (pkt.src == self).
    virtual void send_data(Packet pkt) = 0;

    /// Frame received from the medium.
    virtual void receive(const Packet& pkt, NodeId from) = 0;

    /// The link layer gave up on pkt toward next_hop.
    virtual void on_link_break(const Packet& pkt, NodeId next_hop) = 0;

    virtual void on_timer(int kind, std::uint64_t cookie) = 0;

    /// Application packets held waiting for a route.
    virtual std::size_t buffered_app_packets() const { return 0; }

protected:
    SimTime now() const { return m_svc.now(); }

    void originate_broadcast(Packet pkt);
    void forward_broadcast(Packet pkt);
    void originate_unicast(NodeId next_hop, Packet pkt);
    void forward_unicast(NodeId next_hop, Packet pkt);
    /// Data packets: origin transmissions are not traced at RTR, forwards are.
    void transmit_data(NodeId next_hop, Packet pkt, bool forwarded);
    void drop(const Packet& pkt, DropReason reason);
    Packet make_control(PacketType type, NodeId dst, PacketBody body);

    NodeId m_self;
    NodeServices& m_svc;
};

/// Per-destination FIFO of application packets awaiting a route; drop-oldest
/// when a destination's queue is full.
class SendBuffer {
public:
    explicit SendBuffer(std::size_t per_dest_capacity) : m_capacity(per_dest_capacity) {}

    /// Returns the evicted packet, if the queue for pkt.dst was full.
    std::optional<Packet> push(Packet pkt);
    std::deque<Packet> take(NodeId dest);
    bool has(NodeId dest) const;
    std::size_t size() const;
    std::size_t size_for(NodeId dest) const;

private:
    std::size_t m_capacity;
    std::map<NodeId, std::deque<Packet>> m_queues;
};

}  // namespace manet
