#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "manet/metrics/trace.hpp"
#include "manet/mobility/mobility.hpp"
#include "manet/net/packet.hpp"
#include "manet/sim/rng.hpp"
#include "manet/sim/sim_time.hpp"

namespace manet {

struct LinkConfig {
    double tx_range = 250.0;           // m, closed disk
    double bitrate = 2e6;              // bit/s
    int unicast_retry_limit = 3;       // retries after the first attempt
    SimTime jitter_max = micros(1000); // uniform [0, jitter_max] before each transmission
    int overhead = 58;                 // bytes added to every frame
    std::size_t ifq_len = 50;
    SimTime backoff_min = micros(500);
    SimTime backoff_max = micros(2000);
};

struct Frame {
    NodeId src = 0;
    NodeId dest = kBroadcast;  // kBroadcast or the unicast next hop
    int size = 0;              // payload network size + link overhead
    std::shared_ptr<const Packet> packet;

    bool broadcast() const { return dest == kBroadcast; }
};

/// Drop-tail FIFO between the routing layer and the medium.
class InterfaceQueue {
public:
    explicit InterfaceQueue(std::size_t capacity) : m_capacity(capacity) {}

    /// False (and the frame is discarded) when full.
    bool push(Frame f);
    Frame pop();
    const Frame& front() const { return m_frames.front(); }
    bool empty() const { return m_frames.empty(); }
    std::size_t size() const { return m_frames.size(); }
    std::size_t capacity() const { return m_capacity; }
    std::uint64_t drops() const { return m_drops; }

    /// Removes and returns every unicast frame addressed to next_hop, FIFO order kept.
    std::vector<Frame> take_for(NodeId next_hop);
    const std::deque<Frame>& frames() const { return m_frames; }

private:
    std::size_t m_capacity;
    std::deque<Frame> m_frames;
    std::uint64_t m_drops = 0;
};

/// Events the link layer asks the host to schedule.
struct MacAttempt {};
struct MacTxEnd {};

/// What the link layer needs from the simulation around it.
class LinkHost {
public:
    virtual ~LinkHost() = default;
    virtual SimTime now() const = 0;
    virtual void schedule_mac(SimTime at, NodeId node, bool tx_end) = 0;
    virtual PositionTracker& positions() = 0;
    virtual RngStream& mac_rng(NodeId node) = 0;
    virtual void trace(const TraceRecord& rec) = 0;
    virtual void deliver(NodeId receiver, NodeId from, const std::shared_ptr<const Packet>& pkt) = 0;
    virtual void link_broken(NodeId node, const Packet& pkt, NodeId next_hop) = 0;
};

struct LinkStats {
    std::uint64_t accepted = 0;
    std::uint64_t ifq_drops = 0;
    std::uint64_t broadcasts_sent = 0;
    std::uint64_t unicast_delivered = 0;
    std::uint64_t unicast_failed = 0;
    std::uint64_t attempts = 0;
    std::uint64_t receptions = 0;
    std::uint64_t collisions = 0;
};

/// Simplified shared medium standing in for 802.11 DCF.
///
/// Carrier sense: a node defers while any node within tx_range is
/// transmitting, re-polling after a uniform backoff. A reception fails when
/// another transmission overlapping in time came from a sender within range
/// of the receiver, or when the receiver itself was transmitting. Unicast is
/// acknowledged implicitly; after unicast_retry_limit retries the routing layer
/// of the sender is told the link is broken. Broadcasts are never retried.
class LinkLayer {
public:
    LinkLayer(const LinkConfig& config, LinkHost& host, std::size_t nodes);

    /// Drop-tail admission; IFQ drops are traced.
    bool enqueue(NodeId node, Frame frame);

    void on_attempt(NodeId node);
    void on_tx_end(NodeId node);

    SimTime serialization(int frame_bytes) const;
    const LinkConfig& config() const { return m_config; }
    const LinkStats& stats(NodeId node) const { return m_nodes[static_cast<std::size_t>(node)].stats; }
    std::size_t queue_length(NodeId node) const { return m_nodes[static_cast<std::size_t>(node)].queue.size(); }
    bool transmitting(NodeId node) const { return m_nodes[static_cast<std::size_t>(node)].state == State::Transmitting; }

    /// Application packets sitting in queues or on the air.
    std::size_t app_packets_held() const;

    /// Frames accepted == delivered + failed + broadcast + still queued, for every node.
    bool conservation_holds() const;

private:
    enum class State { Idle, Pending, Transmitting };

    struct Transmission {
        NodeId sender;
        SimTime start;
        SimTime end;
    };

    struct NodeMac {
        explicit NodeMac(std::size_t cap) : queue(cap) {}
        InterfaceQueue queue;
        State state = State::Idle;
        int attempts = 0;  // failed attempts on the head frame
        SimTime tx_start;
        LinkStats stats;
    };

    void schedule_attempt(NodeId node, SimTime delay);
    bool medium_busy(NodeId node) const;
    bool reception_lost(NodeId receiver, NodeId sender, SimTime start, SimTime end) const;
    void trace_frame(TraceOp op, NodeId node, const Frame& f, DropReason reason = DropReason::None);
    void prune_history();

    LinkConfig m_config;
    LinkHost& m_host;
    std::vector<NodeMac> m_nodes;
    std::deque<Transmission> m_history;  // ordered by start
    SimTime m_longest_tx;
    std::vector<NodeId> m_scratch;
};

}  // namespace manet
