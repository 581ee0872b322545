#include "manet/routing/routing_agent.hpp"

namespace manet {

std::string_view to_string(Protocol p)
{
    switch (p) {
    case Protocol::Aodv: return "aodv";
    case Protocol::Dsdv: return "dsdv";
    case Protocol::Dsr: return "dsr";
    }
    return "?";
}

std::optional<Protocol> protocol_from(std::string_view s)
{
    if (s == "aodv") return Protocol::Aodv;
    if (s == "dsdv") return Protocol::Dsdv;
    if (s == "dsr") return Protocol::Dsr;
    return std::nullopt;
}

void RoutingAgent::originate_broadcast(Packet pkt)
{
    pkt.size = network_size(pkt);
    m_svc.trace(TraceOp::Send, m_self, Layer::Rtr, pkt, DropReason::None);
    m_svc.send_broadcast(m_self, std::move(pkt));
}

void RoutingAgent::forward_broadcast(Packet pkt)
{
    pkt.size = network_size(pkt);
    m_svc.trace(TraceOp::Forward, m_self, Layer::Rtr, pkt, DropReason::None);
    m_svc.send_broadcast(m_self, std::move(pkt));
}

void RoutingAgent::originate_unicast(NodeId next_hop, Packet pkt)
{
    pkt.size = network_size(pkt);
    m_svc.trace(TraceOp::Send, m_self, Layer::Rtr, pkt, DropReason::None);
    m_svc.send_unicast(m_self, next_hop, std::move(pkt));
}

void RoutingAgent::forward_unicast(NodeId next_hop, Packet pkt)
{
    pkt.size = network_size(pkt);
    m_svc.trace(TraceOp::Forward, m_self, Layer::Rtr, pkt, DropReason::None);
    m_svc.send_unicast(m_self, next_hop, std::move(pkt));
}

void RoutingAgent::transmit_data(NodeId next_hop, Packet pkt, bool forwarded)
{
    pkt.size = network_size(pkt);
    if (forwarded) m_svc.trace(TraceOp::Forward, m_self, Layer::Rtr, pkt, DropReason::None);
    m_svc.send_unicast(m_self, next_hop, std::move(pkt));
}

void RoutingAgent::drop(const Packet& pkt, DropReason reason)
{
    m_svc.trace(TraceOp::Drop, m_self, Layer::Rtr, pkt, reason);
}

Packet RoutingAgent::make_control(PacketType type, NodeId dst, PacketBody body)
{
    Packet p;
    p.uid = m_svc.next_uid();
    p.type = type;
    p.src = m_self;
    p.dst = dst;
    p.body = std::move(body);
    p.size = network_size(p);
    return p;
}

std::optional<Packet> SendBuffer::push(Packet pkt)
{
    auto& q = m_queues[pkt.dst];
    std::optional<Packet> evicted;
    if (q.size() >= m_capacity) {
        evicted = std::move(q.front());
        q.pop_front();
    }
    q.push_back(std::move(pkt));
    return evicted;
}

std::deque<Packet> SendBuffer::take(NodeId dest)
{
    auto it = m_queues.find(dest);
    if (it == m_queues.end()) return {};
    std::deque<Packet> out = std::move(it->second);
    m_queues.erase(it);
    return out;
}

bool SendBuffer::has(NodeId dest) const
{
    auto it = m_queues.find(dest);
    return it != m_queues.end() && !it->second.empty();
}

std::size_t SendBuffer::size() const
{
    std::size_t n = 0;
    for (const auto& [dest, q] : m_queues) n += q.size();
    return n;
}

std::size_t SendBuffer::size_for(NodeId dest) const
{
    auto it = m_queues.find(dest);
    return it == m_queues.end() ? 0 : it->second.size();
}

}  // namespace manet
