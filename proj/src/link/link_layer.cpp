#include "manet/link/link_layer.hpp"

#include <algorithm>

namespace manet {

bool InterfaceQueue::push(Frame f)
{
    if (m_frames.size() >= m_capacity) {
        ++m_drops;
        return false;
    }
    m_frames.push_back(std::move(f));
    return true;
}

Frame InterfaceQueue::pop()
{
    Frame f = std::move(m_frames.front());
    m_frames.pop_front();
    return f;
}

std::vector<Frame> InterfaceQueue::take_for(NodeId next_hop)
{
    std::vector<Frame> taken;
    std::deque<Frame> kept;
    for (auto& f : m_frames) {
        if (!f.broadcast() && f.dest == next_hop) {
            taken.push_back(std::move(f));
        } else {
            kept.push_back(std::move(f));
        }
    }
    m_frames.swap(kept);
    return taken;
}

LinkLayer::LinkLayer(const LinkConfig& config, LinkHost& host, std::size_t nodes)
    : m_config(config), m_host(host)
{
    m_nodes.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) m_nodes.emplace_back(config.ifq_len);
}

SimTime LinkLayer::serialization(int frame_bytes) const
{
    return seconds(static_cast<double>(frame_bytes) * 8.0 / m_config.bitrate);
}

void LinkLayer::trace_frame(TraceOp op, NodeId node, const Frame& f, DropReason reason)
{
    TraceRecord rec;
    rec.op = op;
    rec.time = m_host.now();
    rec.node = node;
    rec.layer = Layer::Mac;
    rec.uid = f.packet->uid;
    rec.type = f.packet->type;
    rec.size = f.size;
    if (f.packet->app) {
        rec.flow = f.packet->app->flow;
        rec.seq = f.packet->app->seq;
    }
    rec.reason = reason;
    m_host.trace(rec);
}

bool LinkLayer::enqueue(NodeId node, Frame frame)
{
    auto& mac = m_nodes[static_cast<std::size_t>(node)];
    if (mac.queue.size() >= mac.queue.capacity()) {
        ++mac.stats.ifq_drops;
        trace_frame(TraceOp::Drop, node, frame, DropReason::Ifq);
        mac.queue.push(std::move(frame));  // counts the drop
        return false;
    }
    mac.queue.push(std::move(frame));
    ++mac.stats.accepted;
    if (mac.state == State::Idle) schedule_attempt(node, SimTime::zero());
    return true;
}

void LinkLayer::schedule_attempt(NodeId node, SimTime extra)
{
    auto& mac = m_nodes[static_cast<std::size_t>(node)];
    mac.state = State::Pending;
    SimTime delay = extra;
    if (extra == SimTime::zero() && m_config.jitter_max > SimTime::zero()) {
        delay = micros(m_host.mac_rng(node).uniform_int(0, m_config.jitter_max.micros()));
    }
    m_host.schedule_mac(m_host.now() + delay, node, false);
}

void LinkLayer::prune_history()
{
    const SimTime horizon = m_host.now() - m_longest_tx - m_longest_tx;
    while (!m_history.empty() && m_history.front().end < horizon) m_history.pop_front();
}

bool LinkLayer::medium_busy(NodeId node) const
{
    const SimTime now = m_host.now();
    auto& pos = m_host.positions();
    for (const auto& tx : m_history) {
        if (tx.start <= now && now < tx.end && tx.sender != node && pos.in_range(tx.sender, node, m_config.tx_range)) {
            return true;
        }
    }
    return false;
}

bool LinkLayer::reception_lost(NodeId receiver, NodeId sender, SimTime start, SimTime end) const
{
    auto& pos = m_host.positions();
    for (const auto& tx : m_history) {
        if (tx.sender == sender && tx.start == start) continue;
        if (!(tx.start < end && start < tx.end)) continue;
        if (tx.sender == receiver) return true;  // half duplex
        if (pos.in_range(tx.sender, receiver, m_config.tx_range)) return true;
    }
    return false;
}

void LinkLayer::on_attempt(NodeId node)
{
    auto& mac = m_nodes[static_cast<std::size_t>(node)];
    if (mac.queue.empty()) {
        mac.state = State::Idle;
        return;
    }
    m_host.positions().advance_to(m_host.now());
    if (medium_busy(node)) {
        const auto lo = m_config.backoff_min.micros();
        const auto hi = m_config.backoff_max.micros();
        schedule_attempt(node, micros(m_host.mac_rng(node).uniform_int(lo, hi)));
        return;
    }
    const Frame& f = mac.queue.front();
    const SimTime dur = serialization(f.size);
    m_longest_tx = std::max(m_longest_tx, dur);
    prune_history();
    mac.state = State::Transmitting;
    mac.tx_start = m_host.now();
    ++mac.stats.attempts;
    m_history.push_back({node, mac.tx_start, mac.tx_start + dur});
    trace_frame(TraceOp::Send, node, f);
    m_host.schedule_mac(mac.tx_start + dur, node, true);
}

void LinkLayer::on_tx_end(NodeId node)
{
    auto& mac = m_nodes[static_cast<std::size_t>(node)];
    const SimTime now = m_host.now();
    auto& pos = m_host.positions();
    pos.advance_to(now);
    const Frame frame = mac.queue.front();
    const SimTime start = mac.tx_start;

    std::vector<NodeId> receivers;
    if (frame.broadcast()) {
        pos.neighbors(node, m_config.tx_range, receivers);
    } else if (pos.in_range(node, frame.dest, m_config.tx_range)) {
        receivers.push_back(frame.dest);
    }

    std::vector<NodeId> delivered;
    delivered.reserve(receivers.size());
    for (NodeId r : receivers) {
        if (reception_lost(r, node, start, now)) {
            ++m_nodes[static_cast<std::size_t>(r)].stats.collisions;
            trace_frame(TraceOp::Drop, r, frame, DropReason::Collision);
        } else {
            delivered.push_back(r);
        }
    }

    mac.state = State::Idle;
    std::vector<Frame> failed;
    if (frame.broadcast()) {
        mac.queue.pop();
        ++mac.stats.broadcasts_sent;
        mac.attempts = 0;
    } else if (!delivered.empty()) {
        mac.queue.pop();
        ++mac.stats.unicast_delivered;
        mac.attempts = 0;
    } else if (++mac.attempts > m_config.unicast_retry_limit) {
        failed.push_back(mac.queue.pop());
        for (auto& f : mac.queue.take_for(frame.dest)) failed.push_back(std::move(f));
        mac.stats.unicast_failed += failed.size();
        mac.attempts = 0;
    } else {
        const auto lo = m_config.backoff_min.micros();
        const auto hi = m_config.backoff_max.micros();
        schedule_attempt(node, micros(m_host.mac_rng(node).uniform_int(lo, hi)));
    }

    for (NodeId r : delivered) {
        ++m_nodes[static_cast<std::size_t>(r)].stats.receptions;
        trace_frame(TraceOp::Receive, r, frame);
        m_host.deliver(r, node, frame.packet);
    }
    for (const Frame& f : failed) m_host.link_broken(node, *f.packet, f.dest);

    if (mac.state == State::Idle && !mac.queue.empty()) schedule_attempt(node, SimTime::zero());
}

std::size_t LinkLayer::app_packets_held() const
{
    std::size_t n = 0;
    for (const auto& mac : m_nodes) {
        for (const auto& f : mac.queue.frames()) n += f.packet->type == PacketType::Cbr ? 1 : 0;
    }
    return n;
}

bool LinkLayer::conservation_holds() const
{
    for (const auto& mac : m_nodes) {
        const auto& s = mac.stats;
        if (s.accepted != s.unicast_delivered + s.unicast_failed + s.broadcasts_sent + mac.queue.size()) return false;
    }
    return true;
}

}  // namespace manet
