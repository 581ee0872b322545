#include "manet/routing/aodv.hpp"

#include <algorithm>

namespace manet {
namespace {

std::uint64_t pack_cookie(NodeId dest, std::uint64_t generation)
{
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(dest)) << 32) | (generation & 0xFFFFFFFFULL);
}

}  // namespace

AodvAgent::AodvAgent(NodeId self, NodeServices& svc, std::size_t nodes, const AodvConfig& config)
    : RoutingAgent(self, svc), m_config(config), m_table(nodes), m_buffer(config.send_buffer)
{
    for (std::size_t i = 0; i < nodes; ++i) m_table[i].dest = static_cast<NodeId>(i);
}

void AodvAgent::set_entry(const AodvEntry& e)
{
    slot(e.dest) = e;
    slot(e.dest).present = true;
}

void AodvAgent::start()
{
    if (!m_config.hello_enabled) return;
    const auto phase = m_svc.routing_rng(m_self).uniform_int(0, m_config.hello_interval.micros());
    m_svc.set_timer(m_self, micros(phase), kHello, 0);
}

int AodvAgent::ttl_for_attempt(int attempt) const
{
    const int ring = m_config.ttl_start + attempt * m_config.ttl_increment;
    if (ring <= m_config.ttl_threshold) return std::min(ring, m_config.net_diameter);
    return m_config.net_diameter;
}

int AodvAgent::total_attempts() const
{
    int ring = 0;
    while (m_config.ttl_start + ring * m_config.ttl_increment <= m_config.ttl_threshold) ++ring;
    return ring + 1 + m_config.rreq_retries;
}

void AodvAgent::set_seqno(AodvEntry& e, std::uint32_t s)
{
    if (!e.seqno_valid || s > e.seqno) e.seqno = s;
    e.seqno_valid = true;
}

bool AodvAgent::usable(NodeId dest)
{
    AodvEntry& e = slot(dest);
    if (e.valid && e.valid_until < now()) e.valid = false;
    return e.valid;
}

void AodvAgent::expire_routes()
{
    const SimTime t = now();
    for (AodvEntry& e : m_table) {
        if (e.valid && e.valid_until < t) e.valid = false;
    }
}

bool AodvAgent::has_active_route() const
{
    const SimTime t = now();
    return std::any_of(m_table.begin(), m_table.end(), [&](const AodvEntry& e) {
        return e.valid && e.valid_until >= t && e.data_until >= t && e.dest != m_self;
    });
}

void AodvAgent::use_route(AodvEntry& e)
{
    const SimTime until = now() + m_config.active_route_timeout;
    e.valid_until = std::max(e.valid_until, until);
    e.data_until = until;
}

void AodvAgent::refresh_neighbor(NodeId from, SimTime lifetime)
{
    AodvEntry& n = slot(from);
    const SimTime until = now() + lifetime;
    if (!n.valid || n.next_hop != from || n.hop_count != 1) {
        n.present = true;
        n.valid = true;
        n.next_hop = from;
        n.hop_count = 1;
        n.valid_until = until;
    } else {
        n.valid_until = std::max(n.valid_until, until);
    }
}

void AodvAgent::buffer_packet(Packet pkt)
{
    if (auto evicted = m_buffer.push(std::move(pkt))) drop(*evicted, DropReason::Ifq);
}

void AodvAgent::send_data(Packet pkt)
{
    if (pkt.dst == m_self) {
        m_svc.deliver_local(m_self, pkt);
        return;
    }
    m_last_originated[pkt.dst] = now();
    if (usable(pkt.dst)) {
        AodvEntry& e = slot(pkt.dst);
        use_route(e);
        if (usable(e.next_hop)) use_route(slot(e.next_hop));
        transmit_data(e.next_hop, std::move(pkt), false);
        return;
    }
    const NodeId dest = pkt.dst;
    buffer_packet(std::move(pkt));
    if (!discovery_pending(dest)) originate_discovery(dest);
}

void AodvAgent::originate_discovery(NodeId dest)
{
    Discovery& d = m_discoveries[dest];
    d.attempt = 0;
    const int ttl = ttl_for_attempt(0);
    send_rreq(dest, ttl);
    arm_discovery_timer(dest, d, ttl);
}

void AodvAgent::send_rreq(NodeId dest, int ttl)
{
    ++m_seqno;
    ++m_rreq_id;
    AodvRreq rreq;
    rreq.origin = m_self;
    rreq.origin_seqno = m_seqno;
    rreq.rreq_id = m_rreq_id;
    rreq.dest = dest;
    const AodvEntry& e = entry(dest);
    rreq.dest_seqno_unknown = !(e.present && e.seqno_valid);
    rreq.dest_seqno = rreq.dest_seqno_unknown ? 0 : e.seqno;
    rreq.hop_count = 0;
    rreq.ttl = ttl;
    m_seen[{m_self, m_rreq_id}] = now() + m_config.seen_lifetime;
    Packet p = make_control(PacketType::Rreq, kBroadcast, rreq);
    p.ttl = ttl;
    originate_broadcast(std::move(p));
}

void AodvAgent::arm_discovery_timer(NodeId dest, Discovery& d, int ttl)
{
    d.generation = ++m_generation;
    // Ring traversal for TTL-limited floods; network-wide retries back off exponentially.
    SimTime wait = m_config.node_traversal_time * (2 * (ttl + 2));
    if (ttl >= m_config.net_diameter) {
        int ring = 0;
        while (m_config.ttl_start + ring * m_config.ttl_increment <= m_config.ttl_threshold) ++ring;
        const int retry = std::max(0, d.attempt - ring);
        wait = m_config.node_traversal_time * (2 * m_config.net_diameter) * (std::int64_t{1} << std::min(retry, 16));
    }
    m_svc.set_timer(m_self, wait, kDiscovery, pack_cookie(dest, d.generation));
}

void AodvAgent::discovery_timeout(NodeId dest, std::uint64_t generation)
{
    auto it = m_discoveries.find(dest);
    if (it == m_discoveries.end() || (it->second.generation & 0xFFFFFFFFULL) != generation) return;
    if (usable(dest)) {
        complete_discovery(dest);
        return;
    }
    Discovery& d = it->second;
    if (++d.attempt >= total_attempts()) {
        m_discoveries.erase(it);
        for (const Packet& p : m_buffer.take(dest)) drop(p, DropReason::Nrte);
        return;
    }
    const int ttl = ttl_for_attempt(d.attempt);
    send_rreq(dest, ttl);
    arm_discovery_timer(dest, d, ttl);
}

void AodvAgent::complete_discovery(NodeId dest)
{
    m_discoveries.erase(dest);
    auto pending = m_buffer.take(dest);
    for (Packet& p : pending) {
        if (!usable(dest)) {
            buffer_packet(std::move(p));
            continue;
        }
        AodvEntry& e = slot(dest);
        use_route(e);
        transmit_data(e.next_hop, std::move(p), false);
    }
    if (m_buffer.has(dest) && !discovery_pending(dest)) originate_discovery(dest);
}

RreqOutcome AodvAgent::handle_rreq(const Packet& pkt, NodeId from)
{
    const auto& rreq = std::get<AodvRreq>(pkt.body);
    refresh_neighbor(from, m_config.active_route_timeout);
    if (rreq.origin == m_self) return RreqOutcome::Drop;

    const auto key = std::make_pair(rreq.origin, rreq.rreq_id);
    const SimTime t = now();
    if (auto it = m_seen.find(key); it != m_seen.end() && it->second >= t) return RreqOutcome::Drop;
    if (m_seen.size() > 4096) std::erase_if(m_seen, [&](const auto& kv) { return kv.second < t; });
    m_seen[key] = t + m_config.seen_lifetime;

    // Reverse route toward the originator.
    AodvEntry& rev = slot(rreq.origin);
    const int hops = rreq.hop_count + 1;
    const bool fresher = !rev.seqno_valid || rreq.origin_seqno > rev.seqno;
    if (!rev.valid || fresher || (rreq.origin_seqno == rev.seqno && hops < rev.hop_count)) {
        rev.present = true;
        rev.valid = true;
        rev.next_hop = from;
        rev.hop_count = hops;
    }
    set_seqno(rev, rreq.origin_seqno);
    rev.valid_until = std::max(rev.valid_until, t + m_config.active_route_timeout);

    if (rreq.dest == m_self) {
        if (!rreq.dest_seqno_unknown && rreq.dest_seqno > m_seqno) m_seqno = rreq.dest_seqno;
        AodvRrep rrep{m_self, m_seqno, 0, rreq.origin, m_config.my_route_timeout};
        originate_unicast(rev.next_hop, make_control(PacketType::Rrep, rreq.origin, rrep));
        return RreqOutcome::Reply;
    }

    if (m_config.intermediate_reply && usable(rreq.dest)) {
        AodvEntry& fwd = slot(rreq.dest);
        if (fwd.seqno_valid && (rreq.dest_seqno_unknown || fwd.seqno >= rreq.dest_seqno)) {
            fwd.precursors.insert(from);
            rev.precursors.insert(fwd.next_hop);
            AodvRrep rrep{rreq.dest, fwd.seqno, fwd.hop_count, rreq.origin, fwd.valid_until - t};
            originate_unicast(rev.next_hop, make_control(PacketType::Rrep, rreq.origin, rrep));
            return RreqOutcome::Reply;
        }
    }

    if (pkt.ttl - 1 <= 0) return RreqOutcome::Drop;
    Packet fwd = pkt;
    fwd.ttl = pkt.ttl - 1;
    auto& body = std::get<AodvRreq>(fwd.body);
    body.hop_count = hops;
    body.ttl = fwd.ttl;
    const AodvEntry& known = entry(rreq.dest);
    if (known.present && known.seqno_valid && (body.dest_seqno_unknown || known.seqno > body.dest_seqno)) {
        body.dest_seqno = known.seqno;
        body.dest_seqno_unknown = false;
    }
    forward_broadcast(std::move(fwd));
    return RreqOutcome::Forward;
}

void AodvAgent::handle_rrep(const Packet& pkt, NodeId from)
{
    const auto& rrep = std::get<AodvRrep>(pkt.body);
    const SimTime t = now();
    refresh_neighbor(from, m_config.active_route_timeout);

    const int hops = rrep.hop_count + 1;
    AodvEntry& fwd = slot(rrep.dest);
    bool adopt = false;
    if (!fwd.present || !fwd.seqno_valid) {
        adopt = true;
    } else if (!fwd.valid || fwd.valid_until < t) {
        adopt = rrep.dest_seqno >= fwd.seqno;
    } else {
        adopt = rrep.dest_seqno > fwd.seqno || (rrep.dest_seqno == fwd.seqno && hops < fwd.hop_count);
    }
    if (adopt) {
        fwd.present = true;
        fwd.valid = true;
        fwd.next_hop = from;
        fwd.hop_count = hops;
        set_seqno(fwd, rrep.dest_seqno);
        fwd.valid_until = t + rrep.lifetime;
    }

    if (rrep.origin == m_self) {
        if (usable(rrep.dest)) complete_discovery(rrep.dest);
        return;
    }

    if (!usable(rrep.origin)) {
        drop(pkt, DropReason::Nrte);  // no reverse route
        return;
    }
    AodvEntry& rev = slot(rrep.origin);
    if (fwd.valid) fwd.precursors.insert(rev.next_hop);
    rev.precursors.insert(from);
    rev.valid_until = std::max(rev.valid_until, t + m_config.active_route_timeout);

    Packet out = pkt;
    std::get<AodvRrep>(out.body).hop_count = hops;
    forward_unicast(rev.next_hop, std::move(out));
}

void AodvAgent::send_rerr(std::vector<AodvRerr::Unreachable> list, const std::set<NodeId>& precursors)
{
    if (list.empty() || precursors.empty()) return;
    AodvRerr rerr{std::move(list)};
    if (precursors.size() == 1) {
        const NodeId p = *precursors.begin();
        originate_unicast(p, make_control(PacketType::Rerr, p, std::move(rerr)));
    } else {
        Packet pkt = make_control(PacketType::Rerr, kBroadcast, std::move(rerr));
        pkt.ttl = 1;
        originate_broadcast(std::move(pkt));
    }
}

std::vector<AodvRerr::Unreachable> AodvAgent::handle_link_break(NodeId lost_neighbor)
{
    m_hello_neighbors.erase(lost_neighbor);
    std::vector<AodvRerr::Unreachable> list;
    std::set<NodeId> precursors;
    for (AodvEntry& e : m_table) {
        if (!e.valid || e.next_hop != lost_neighbor || e.dest == m_self) continue;
        e.valid = false;
        if (e.seqno_valid) e.seqno += 1;
        list.push_back({e.dest, e.seqno});
        precursors.insert(e.precursors.begin(), e.precursors.end());
    }
    precursors.erase(lost_neighbor);
    send_rerr(list, precursors);
    return list;
}

void AodvAgent::handle_rerr(const AodvRerr& rerr, NodeId from)
{
    std::vector<AodvRerr::Unreachable> list;
    std::set<NodeId> precursors;
    std::vector<NodeId> restart;
    const SimTime t = now();
    for (const auto& u : rerr.unreachable) {
        AodvEntry& e = slot(u.dest);
        if (!e.valid || e.next_hop != from) continue;
        e.valid = false;
        set_seqno(e, u.seqno);
        list.push_back({e.dest, e.seqno});
        precursors.insert(e.precursors.begin(), e.precursors.end());
        auto it = m_last_originated.find(u.dest);
        if (it != m_last_originated.end() && it->second + m_config.active_route_timeout >= t) restart.push_back(u.dest);
    }
    precursors.erase(from);
    send_rerr(list, precursors);
    for (NodeId d : restart) {
        if (!discovery_pending(d)) originate_discovery(d);
    }
}

void AodvAgent::forward_data(Packet pkt, NodeId from)
{
    if (pkt.dst == m_self) {
        m_svc.deliver_local(m_self, pkt);
        return;
    }
    if (--pkt.ttl <= 0) {
        drop(pkt, DropReason::Ttl);
        return;
    }
    if (!usable(pkt.dst)) {
        drop(pkt, DropReason::Nrte);
        const AodvEntry& e = entry(pkt.dst);
        send_rerr({{pkt.dst, e.seqno_valid ? e.seqno : 0}}, {from});
        return;
    }
    AodvEntry& e = slot(pkt.dst);
    use_route(e);
    if (usable(e.next_hop)) use_route(slot(e.next_hop));
    if (usable(pkt.src)) use_route(slot(pkt.src));
    transmit_data(e.next_hop, std::move(pkt), true);
}

void AodvAgent::receive(const Packet& pkt, NodeId from)
{
    switch (pkt.type) {
    case PacketType::Rreq:
        handle_rreq(pkt, from);
        break;
    case PacketType::Rrep:
        handle_rrep(pkt, from);
        break;
    case PacketType::Rerr:
        refresh_neighbor(from, m_config.active_route_timeout);
        handle_rerr(std::get<AodvRerr>(pkt.body), from);
        break;
    case PacketType::Hello: {
        const auto& hello = std::get<AodvRrep>(pkt.body);
        refresh_neighbor(from, hello.lifetime);
        set_seqno(slot(from), hello.dest_seqno);
        m_hello_neighbors[from] = now();
        break;
    }
    case PacketType::Cbr:
        refresh_neighbor(from, m_config.active_route_timeout);
        forward_data(pkt, from);
        break;
    default:
        break;
    }
}

void AodvAgent::on_link_break(const Packet& pkt, NodeId next_hop)
{
    handle_link_break(next_hop);
    if (pkt.type != PacketType::Cbr) {
        drop(pkt, DropReason::Nrte);
        return;
    }
    if (pkt.src == m_self) {
        const NodeId dest = pkt.dst;
        if (usable(dest) && entry(dest).next_hop != next_hop) {
            transmit_data(entry(dest).next_hop, pkt, false);
            return;
        }
        buffer_packet(pkt);
        if (!discovery_pending(dest)) originate_discovery(dest);
        return;
    }
    drop(pkt, DropReason::Nrte);
}

void AodvAgent::hello_tick()
{
    expire_routes();
    const SimTime t = now();
    const SimTime limit = m_config.hello_interval * m_config.allowed_hello_loss;
    std::vector<NodeId> lost;
    for (const auto& [n, heard] : m_hello_neighbors) {
        if (t - heard > limit) lost.push_back(n);
    }
    for (NodeId n : lost) handle_link_break(n);

    if (has_active_route()) {
        AodvRrep hello{m_self, m_seqno, 0, m_self, limit};
        Packet p = make_control(PacketType::Hello, kBroadcast, hello);
        p.ttl = 1;
        originate_broadcast(std::move(p));
    }
}

void AodvAgent::on_timer(int kind, std::uint64_t cookie)
{
    if (kind == kDiscovery) {
        discovery_timeout(static_cast<NodeId>(cookie >> 32), cookie & 0xFFFFFFFFULL);
    } else if (kind == kHello) {
        hello_tick();
        // Small jitter keeps neighbors' beacons from synchronizing.
        const auto base = m_config.hello_interval.micros();
        const auto j = m_svc.routing_rng(m_self).uniform_int(-base / 10, base / 10);
        m_svc.set_timer(m_self, micros(base + j), kHello, 0);
    }
}

}  // namespace manet
