#include "manet/routing/dsr.hpp"

#include <algorithm>

#include "manet/sim/errors.hpp"

namespace manet {
namespace {

std::uint64_t pack_cookie(NodeId dest, std::uint64_t generation)
{
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(dest)) << 32) | (generation & 0xFFFFFFFFULL);
}

std::optional<std::size_t> index_of(std::span<const NodeId> hops, NodeId n)
{
    auto it = std::find(hops.begin(), hops.end(), n);
    if (it == hops.end()) return std::nullopt;
    return static_cast<std::size_t>(it - hops.begin());
}

/// hops[i..end] and the reversed prefix hops[i..0], both starting at hops[i].
std::pair<Route, Route> split_at(std::span<const NodeId> hops, std::size_t i)
{
    Route forward(hops.begin() + static_cast<std::ptrdiff_t>(i), hops.end());
    Route backward(hops.begin(), hops.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    std::reverse(backward.begin(), backward.end());
    return {forward, backward};
}

}  // namespace

bool is_simple_path(std::span<const NodeId> hops)
{
    std::vector<NodeId> sorted(hops.begin(), hops.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

bool route_has_link(std::span<const NodeId> hops, NodeId u, NodeId v)
{
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
        if ((hops[i] == u && hops[i + 1] == v) || (hops[i] == v && hops[i + 1] == u)) return true;
    }
    return false;
}

NodeId advance_cursor(SourceRoute& route)
{
    if (route.cursor + 1 >= route.hops.size()) {
        throw MalformedHeader("source route cursor " + std::to_string(route.cursor) + " at or past end of " +
                              std::to_string(route.hops.size()) + " hops");
    }
    return route.hops[++route.cursor];
}

bool RouteCache::add(const Route& route)
{
    if (route.size() < 2 || route.front() != m_owner || !is_simple_path(route)) return false;
    auto& list = m_routes[route.back()];
    if (std::find(list.begin(), list.end(), route) != list.end()) return false;
    if (list.size() >= m_capacity) list.erase(list.begin());
    list.push_back(route);
    ++m_revision;
    return true;
}

void RouteCache::learn_path(const Route& path)
{
    for (std::size_t k = 2; k <= path.size(); ++k) add(Route(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(k)));
}

std::optional<Route> RouteCache::best(NodeId dest) const
{
    auto it = m_routes.find(dest);
    if (it == m_routes.end() || it->second.empty()) return std::nullopt;
    const Route* pick = &it->second.front();
    for (const Route& r : it->second) {
        if (r.size() < pick->size()) pick = &r;
    }
    return *pick;
}

std::size_t RouteCache::purge_link(NodeId u, NodeId v)
{
    std::size_t removed = 0;
    for (auto it = m_routes.begin(); it != m_routes.end();) {
        removed += std::erase_if(it->second, [&](const Route& r) { return route_has_link(r, u, v); });
        it = it->second.empty() ? m_routes.erase(it) : std::next(it);
    }
    if (removed > 0) ++m_revision;
    return removed;
}

std::span<const Route> RouteCache::routes(NodeId dest) const
{
    auto it = m_routes.find(dest);
    if (it == m_routes.end()) return {};
    return it->second;
}

std::size_t RouteCache::size() const
{
    std::size_t n = 0;
    for (const auto& [dest, list] : m_routes) n += list.size();
    return n;
}

DsrAgent::DsrAgent(NodeId self, NodeServices& svc, const DsrConfig& config)
    : RoutingAgent(self, svc), m_config(config), m_cache(self, config.cache_per_dest), m_buffer(config.send_buffer)
{
}

void DsrAgent::buffer_packet(Packet pkt)
{
    if (auto evicted = m_buffer.push(std::move(pkt))) drop(*evicted, DropReason::Ifq);
}

void DsrAgent::send_along(Packet pkt, const Route& route)
{
    pkt.route = SourceRoute{route, 0};
    const NodeId next = advance_cursor(*pkt.route);
    if (pkt.type == PacketType::Cbr) {
        transmit_data(next, std::move(pkt), false);
    } else {
        originate_unicast(next, std::move(pkt));
    }
}

void DsrAgent::send_data(Packet pkt)
{
    if (pkt.dst == m_self) {
        m_svc.deliver_local(m_self, pkt);
        return;
    }
    if (auto route = m_cache.best(pkt.dst)) {
        send_along(std::move(pkt), *route);
        return;
    }
    const NodeId dest = pkt.dst;
    buffer_packet(std::move(pkt));
    if (!discovery_pending(dest)) originate_discovery(dest);
}

void DsrAgent::originate_discovery(NodeId dest)
{
    Discovery& d = m_discoveries[dest];
    d.attempt = 0;
    send_rreq(dest);
    arm_discovery_timer(dest, d);
}

void DsrAgent::send_rreq(NodeId dest)
{
    ++m_request_id;
    m_seen.insert({m_self, m_request_id});
    DsrRreq rreq{m_self, m_request_id, dest, {m_self}};
    Packet p = make_control(PacketType::DsrRreq, kBroadcast, std::move(rreq));
    p.ttl = 255;
    originate_broadcast(std::move(p));
}

void DsrAgent::arm_discovery_timer(NodeId dest, Discovery& d)
{
    d.generation = ++m_generation;
    const SimTime wait = m_config.retry_backoff * (std::int64_t{1} << d.attempt);
    m_svc.set_timer(m_self, wait, kDiscovery, pack_cookie(dest, d.generation));
}

void DsrAgent::discovery_timeout(NodeId dest, std::uint64_t generation)
{
    auto it = m_discoveries.find(dest);
    if (it == m_discoveries.end() || (it->second.generation & 0xFFFFFFFFULL) != generation) return;
    if (m_cache.best(dest)) {
        flush_buffer(dest);
        return;
    }
    Discovery& d = it->second;
    if (++d.attempt > m_config.retries) {
        m_discoveries.erase(it);
        for (const Packet& p : m_buffer.take(dest)) drop(p, DropReason::Nrte);
        return;
    }
    send_rreq(dest);
    arm_discovery_timer(dest, d);
}

void DsrAgent::flush_buffer(NodeId dest)
{
    m_discoveries.erase(dest);
    for (Packet& p : m_buffer.take(dest)) {
        if (auto route = m_cache.best(dest)) {
            send_along(std::move(p), *route);
        } else {
            buffer_packet(std::move(p));
        }
    }
    if (m_buffer.has(dest) && !discovery_pending(dest)) originate_discovery(dest);
}

void DsrAgent::send_reply(const Route& full_route, std::uint32_t request_id)
{
    const auto i = index_of(full_route, m_self);
    Route back = split_at(full_route, *i).second;
    Packet p = make_control(PacketType::DsrRrep, full_route.front(), DsrRrep{full_route, request_id});
    send_along(std::move(p), back);
}

RreqOutcome DsrAgent::handle_rreq(const Packet& pkt)
{
    const auto& rreq = std::get<DsrRreq>(pkt.body);
    if (rreq.origin == m_self) return RreqOutcome::Drop;
    if (!m_seen.insert({rreq.origin, rreq.request_id}).second) return RreqOutcome::Drop;
    if (index_of(rreq.accumulated, m_self)) return RreqOutcome::Drop;

    Route back{m_self};
    back.insert(back.end(), rreq.accumulated.rbegin(), rreq.accumulated.rend());
    m_cache.learn_path(back);

    Route full = rreq.accumulated;
    full.push_back(m_self);
    if (rreq.dest == m_self) {
        send_reply(full, rreq.request_id);
        return RreqOutcome::Reply;
    }
    if (m_config.reply_from_cache) {
        if (auto cached = m_cache.best(rreq.dest)) {
            Route joined = rreq.accumulated;
            joined.insert(joined.end(), cached->begin(), cached->end());
            if (is_simple_path(joined)) {
                send_reply(joined, rreq.request_id);
                return RreqOutcome::Reply;
            }
        }
    }
    Packet fwd = pkt;
    std::get<DsrRreq>(fwd.body).accumulated.push_back(m_self);
    forward_broadcast(std::move(fwd));
    return RreqOutcome::Forward;
}

void DsrAgent::handle_rrep(const Packet& pkt)
{
    const auto& rrep = std::get<DsrRrep>(pkt.body);
    if (auto i = index_of(rrep.route, m_self)) {
        auto [forward, backward] = split_at(rrep.route, *i);
        m_cache.learn_path(forward);
        m_cache.learn_path(backward);
    }
    if (rrep.route.front() == m_self) {
        const NodeId dest = rrep.route.back();
        if (discovery_pending(dest) || m_buffer.has(dest)) flush_buffer(dest);
    }
}

void DsrAgent::purge(NodeId u, NodeId v)
{
    m_cache.purge_link(u, v);
    m_purged.emplace_back(u, v);
}

void DsrAgent::handle_rerr(const Packet& pkt)
{
    const auto& rerr = std::get<DsrRerr>(pkt.body);
    purge(rerr.from_node, rerr.to_node);
}

void DsrAgent::forward_source_routed(Packet pkt)
{
    if (!pkt.route || pkt.route->cursor >= pkt.route->hops.size() || pkt.route->hops[pkt.route->cursor] != m_self) {
        drop(pkt, DropReason::Malformed);
        return;
    }
    const SourceRoute& sr = *pkt.route;
    if (pkt.type == PacketType::Cbr) {
        auto [forward, backward] = split_at(sr.hops, sr.cursor);
        m_cache.learn_path(forward);
        m_cache.learn_path(backward);
    }
    if (sr.cursor + 1 == sr.hops.size()) {
        if (pkt.type == PacketType::Cbr) m_svc.deliver_local(m_self, pkt);
        return;
    }
    const NodeId next = advance_cursor(*pkt.route);
    if (pkt.type == PacketType::Cbr) {
        transmit_data(next, std::move(pkt), true);
    } else {
        forward_unicast(next, std::move(pkt));
    }
}

void DsrAgent::receive(const Packet& pkt, NodeId)
{
    switch (pkt.type) {
    case PacketType::DsrRreq:
        handle_rreq(pkt);
        break;
    case PacketType::DsrRrep:
        handle_rrep(pkt);
        forward_source_routed(pkt);
        break;
    case PacketType::DsrRerr:
        handle_rerr(pkt);
        forward_source_routed(pkt);
        break;
    case PacketType::Cbr:
        forward_source_routed(pkt);
        break;
    default:
        break;
    }
}

void DsrAgent::on_link_break(const Packet& pkt, NodeId next_hop)
{
    purge(m_self, next_hop);
    if (pkt.type != PacketType::Cbr || !pkt.route) {
        drop(pkt, DropReason::Nrte);
        return;
    }
    if (pkt.src == m_self) {
        Packet again = pkt;
        again.route.reset();
        if (auto route = m_cache.best(pkt.dst)) {
            send_along(std::move(again), *route);
            return;
        }
        const NodeId dest = pkt.dst;
        buffer_packet(std::move(again));
        if (!discovery_pending(dest)) originate_discovery(dest);
        return;
    }
    drop(pkt, DropReason::Nrte);
    const auto& hops = pkt.route->hops;
    const auto i = index_of(hops, m_self);
    if (!i || *i == 0) return;
    Route back = split_at(hops, *i).second;
    Packet rerr = make_control(PacketType::DsrRerr, hops.front(), DsrRerr{m_self, next_hop, hops.front()});
    send_along(std::move(rerr), back);
}

void DsrAgent::on_timer(int kind, std::uint64_t cookie)
{
    if (kind == kDiscovery) discovery_timeout(static_cast<NodeId>(cookie >> 32), cookie & 0xFFFFFFFFULL);
}

}  // namespace manet
