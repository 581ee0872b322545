#include "manet/routing/dsdv.hpp"

#include <algorithm>

namespace manet {
namespace {

std::uint32_t plus_one(std::uint32_t metric)
{
    return metric >= kInfiniteMetric - 1 ? kInfiniteMetric : metric + 1;
}

}  // namespace

DsdvAgent::DsdvAgent(NodeId self, NodeServices& svc, std::size_t nodes, const DsdvConfig& config)
    : RoutingAgent(self, svc), m_config(config), m_table(nodes)
{
    for (std::size_t i = 0; i < nodes; ++i) m_table[i].dest = static_cast<NodeId>(i);
    DsdvEntry& me = slot(self);
    me.next_hop = self;
    me.metric = 0;
    me.seqno = 0;
    me.present = true;
}

std::size_t DsdvAgent::frame_capacity()
{
    return static_cast<std::size_t>((wire::kMtu - wire::kDsdvBase) / wire::kDsdvPerEntry);
}

void DsdvAgent::set_entry(const DsdvEntry& e)
{
    DsdvEntry& s = slot(e.dest);
    s = e;
    s.present = true;
}

void DsdvAgent::start()
{
    // Random phase so neighbors do not advertise in lockstep.
    const auto phase = m_svc.routing_rng(m_self).uniform_int(0, m_config.update_interval.micros());
    m_svc.set_timer(m_self, micros(phase), kPeriodic, 0);
    // Announce ourselves once at start-up.
    const auto boot = m_svc.routing_rng(m_self).uniform_int(0, m_config.trigger_jitter.micros());
    m_svc.set_timer(m_self, micros(boot), kBoot, 0);
}

void DsdvAgent::on_timer(int kind, std::uint64_t)
{
    if (kind == kPeriodic) {
        periodic_advertise();
        const double j = m_config.update_jitter;
        const double factor = m_svc.routing_rng(m_self).uniform_real(1.0 - j, 1.0 + j);
        m_svc.set_timer(m_self, seconds(m_config.update_interval.seconds() * factor), kPeriodic, 0);
    } else if (kind == kTriggered) {
        m_triggered_pending = false;
        m_last_triggered = now();
        advertise(false);
    } else if (kind == kBoot) {
        m_last_triggered = now();
        advertise(true);
    }
}

std::vector<DsdvUpdate> DsdvAgent::periodic_advertise()
{
    const bool full = m_ticks % static_cast<std::uint64_t>(std::max(1, m_config.full_dump_every)) == 0;
    ++m_ticks;
    if (!full) {
        const bool any = std::any_of(m_table.begin(), m_table.end(), [&](const DsdvEntry& e) {
            return e.present && e.dest != m_self && e.pending && e.advertise_after <= now();
        });
        if (!any) return {};
    }
    slot(m_self).seqno += 2;
    return advertise(full);
}

std::vector<DsdvUpdate> DsdvAgent::advertise(bool full)
{
    const SimTime t = now();
    std::vector<DsdvAdvert> entries;
    // Self first so a split dump always refreshes the sender in its first frame.
    const DsdvEntry& me = slot(m_self);
    entries.push_back({m_self, 0, me.seqno});
    for (const DsdvEntry& e : m_table) {
        if (!e.present || e.dest == m_self) continue;
        if (full || (e.pending && e.advertise_after <= t)) {
            entries.push_back({e.dest, e.metric, e.seqno});
        }
    }
    if (!full && entries.size() == 1) return {};

    const std::size_t cap = frame_capacity();
    if (!full && entries.size() > cap) {
        // Promote to a full dump.
        full = true;
        entries.clear();
        entries.push_back({m_self, 0, me.seqno});
        for (const DsdvEntry& e : m_table) {
            if (e.present && e.dest != m_self) entries.push_back({e.dest, e.metric, e.seqno});
        }
    }
    for (DsdvEntry& e : m_table) {
        if (full) {
            e.changed_since_full_dump = false;
            e.pending = false;
        } else if (e.advertise_after <= t) {
            e.pending = false;
        }
    }

    std::vector<DsdvUpdate> sent;
    for (std::size_t off = 0; off < entries.size(); off += cap) {
        DsdvUpdate msg;
        msg.origin = m_self;
        msg.full = full;
        const std::size_t end = std::min(entries.size(), off + cap);
        msg.entries.assign(entries.begin() + static_cast<std::ptrdiff_t>(off),
                           entries.begin() + static_cast<std::ptrdiff_t>(end));
        sent.push_back(msg);
        originate_broadcast(make_control(PacketType::Dsdv, kBroadcast, std::move(msg)));
    }
    return sent;
}

void DsdvAgent::request_triggered()
{
    if (m_triggered_pending) return;
    m_triggered_pending = true;
    const SimTime earliest = m_last_triggered + m_config.trigger_min_gap;
    SimTime delay = earliest > now() ? earliest - now() : SimTime::zero();
    delay += micros(m_svc.routing_rng(m_self).uniform_int(0, m_config.trigger_jitter.micros()));
    m_svc.set_timer(m_self, delay, kTriggered, 0);
}

std::vector<NodeId> DsdvAgent::handle_update(const DsdvUpdate& msg, NodeId from)
{
    const SimTime t = now();
    std::vector<NodeId> changed;
    bool significant = false;
    for (const DsdvAdvert& adv : msg.entries) {
        if (adv.dest == m_self) {
            DsdvEntry& me = slot(m_self);
            if (adv.seqno > me.seqno) {
                // Someone advertised us as broken; reissue a higher even number.
                me.seqno = (adv.seqno | 1u) + 1u;
                me.changed_since_full_dump = true;
                me.pending = true;
                changed.push_back(m_self);
                significant = true;
            }
            continue;
        }
        const std::uint32_t metric = plus_one(adv.metric);
        DsdvEntry& e = slot(adv.dest);
        bool adopt = false;
        bool settle = false;
        if (!e.present) {
            adopt = true;
        } else if (adv.seqno > e.seqno) {
            adopt = true;
        } else if (adv.seqno == e.seqno && metric < e.metric) {
            adopt = true;
            settle = e.next_hop != from;
        } else if (adv.seqno == e.seqno && e.next_hop == from && metric == e.metric) {
            e.install_time = t;  // refresh
        }
        if (!adopt) continue;

        if (!e.present || e.metric != metric) significant = true;
        e.present = true;
        e.next_hop = from;
        e.metric = metric;
        e.seqno = adv.seqno;
        e.install_time = t;
        e.advertise_after = settle ? t + m_config.settling_time : t;
        e.changed_since_full_dump = true;
        e.pending = true;
        changed.push_back(adv.dest);
    }
    if (significant && m_config.trigger_on_change) request_triggered();
    return changed;
}

std::vector<DsdvUpdate> DsdvAgent::handle_link_break(NodeId lost_neighbor)
{
    bool any = false;
    for (DsdvEntry& e : m_table) {
        if (!e.usable() || e.dest == m_self || e.next_hop != lost_neighbor) continue;
        e.metric = kInfiniteMetric;
        e.seqno += 1;
        e.advertise_after = now();
        e.changed_since_full_dump = true;
        e.pending = true;
        any = true;
    }
    if (!any) return {};
    m_last_triggered = now();
    return advertise(false);
}

std::optional<NodeId> DsdvAgent::lookup_next_hop(NodeId dest) const
{
    const DsdvEntry& e = entry(dest);
    if (!e.usable()) return std::nullopt;
    return e.next_hop;
}

void DsdvAgent::forward_data(Packet pkt, bool originated)
{
    if (pkt.dst == m_self) {
        m_svc.deliver_local(m_self, pkt);
        return;
    }
    if (!originated && --pkt.ttl <= 0) {
        drop(pkt, DropReason::Ttl);
        return;
    }
    const auto next = lookup_next_hop(pkt.dst);
    if (!next) {
        drop(pkt, DropReason::Nrte);
        return;
    }
    transmit_data(*next, std::move(pkt), !originated);
}

void DsdvAgent::send_data(Packet pkt)
{
    forward_data(std::move(pkt), true);
}

void DsdvAgent::receive(const Packet& pkt, NodeId from)
{
    if (pkt.type == PacketType::Dsdv) {
        handle_update(std::get<DsdvUpdate>(pkt.body), from);
    } else if (pkt.type == PacketType::Cbr) {
        forward_data(pkt, false);
    }
}

void DsdvAgent::on_link_break(const Packet& pkt, NodeId next_hop)
{
    handle_link_break(next_hop);
    if (pkt.type != PacketType::Cbr) return;
    // The route through next_hop is gone; only an alternative already in the
    // table could carry it, and invalidation leaves none.
    const auto next = lookup_next_hop(pkt.dst);
    if (next && *next != next_hop) {
        transmit_data(*next, pkt, pkt.src != m_self);
    } else {
        drop(pkt, DropReason::Nrte);
    }
}

bool dsdv_loop_free(std::span<const DsdvAgent* const> agents, NodeId dest)
{
    std::uint32_t best = 0;
    for (const DsdvAgent* a : agents) {
        const DsdvEntry& e = a->entry(dest);
        if (e.present) best = std::max(best, e.seqno);
    }
    auto at_best = [&](NodeId n) {
        const DsdvEntry& e = agents[static_cast<std::size_t>(n)]->entry(dest);
        return e.present && e.seqno == best && e.metric != kInfiniteMetric;
    };
    // 0 unvisited, 1 on the current walk, 2 known to reach dest or leave the best seqno.
    std::vector<std::uint8_t> state(agents.size(), 0);
    std::vector<NodeId> walk;
    for (const DsdvAgent* a : agents) {
        NodeId cur = a->self();
        walk.clear();
        while (cur != dest && at_best(cur) && state[static_cast<std::size_t>(cur)] == 0) {
            state[static_cast<std::size_t>(cur)] = 1;
            walk.push_back(cur);
            cur = agents[static_cast<std::size_t>(cur)]->entry(dest).next_hop;
        }
        if (cur != dest && at_best(cur) && state[static_cast<std::size_t>(cur)] == 1) return false;
        for (NodeId n : walk) state[static_cast<std::size_t>(n)] = 2;
    }
    return true;
}

}  // namespace manet
