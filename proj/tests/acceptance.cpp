// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// if any criterion fails. Default grid for the trend check is the reduced one;
// --full runs the complete 480-run sweep and all trend checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manet/harness/scenario.hpp"
#include "manet/harness/sweep.hpp"
#include "manet/sim/errors.hpp"

using namespace manet;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& why)
{
    if (o.pass) o.detail = why;
    o.pass = false;
}

// 1. Metric formulas.
Outcome formulas()
{
    Outcome o;
    const double pdf = compute_pdf(1000, 950);
    const double nrl = compute_nrl(500, 250);
    const double kbps = compute_throughput(2000, 512, 100.0).kbps;
    char buf[160];
    std::snprintf(buf, sizeof buf, "pdf=%.12g nrl=%.12g throughput=%.12g kbps", pdf, nrl, kbps);
    o.detail = buf;
    if (std::fabs(pdf - 95.0) > 1e-9 || std::fabs(nrl - 2.0) > 1e-9 || std::fabs(kbps - 81.92) > 1e-9) {
        o.pass = false;
    }
    return o;
}

// 2. Determinism.
Outcome determinism()
{
    Outcome o;
    int checked = 0;
    for (Protocol p : {Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr}) {
        for (std::uint64_t seed : {1u, 2u}) {
            ScenarioConfig c;
            c.protocol = p;
            c.nodes = 30;
            c.connections = 5;
            c.sim_time = 40.0;
            c.seed = seed;
            std::ostringstream a, b;
            const RunResult ra = run_scenario(c, &a);
            const RunResult rb = run_scenario(c, &b);
            ++checked;
            if (a.str() != b.str()) fail(o, std::string(to_string(p)) + " trace differs");
            if (csv_row(c, ra.metrics) != csv_row(c, rb.metrics)) fail(o, std::string(to_string(p)) + " CSV row differs");
        }
    }
    if (o.pass) o.detail = std::to_string(checked) + " configs byte-identical";
    return o;
}

int bfs_distance(const std::vector<Position>& pos, double range, NodeId src, NodeId dst)
{
    std::vector<int> dist(pos.size(), -1);
    std::queue<NodeId> q;
    dist[static_cast<std::size_t>(src)] = 0;
    q.push(src);
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (std::size_t v = 0; v < pos.size(); ++v) {
            if (dist[v] >= 0 || distance(pos[static_cast<std::size_t>(u)], pos[v]) > range) continue;
            dist[v] = dist[static_cast<std::size_t>(u)] + 1;
            q.push(static_cast<NodeId>(v));
        }
    }
    return dist[static_cast<std::size_t>(dst)];
}

// 3. Shortest-path oracle.
Outcome shortest_paths()
{
    Outcome o;
    int connected = 0, aodv_ok = 0, dsr_ok = 0;
    std::string first_miss;
    for (int topo = 0; topo < 200; ++topo) {
        RngStream rng(2024, stream_key("oracle", topo));
        const int n = static_cast<int>(rng.uniform_int(10, 50));
        std::vector<Position> pos;
        for (int i = 0; i < n; ++i) pos.push_back({rng.uniform_real(0.0, 1000.0), rng.uniform_real(0.0, 1000.0)});
        const NodeId src = static_cast<NodeId>(rng.uniform_int(0, n - 1));
        NodeId dst = static_cast<NodeId>(rng.uniform_int(0, n - 2));
        if (dst >= src) ++dst;

        ScenarioConfig c;
        c.nodes = n;
        c.stationary = true;
        c.flows = {{src, dst}};
        c.connections = 1;
        c.sim_time = 10.0;
        c.seed = static_cast<std::uint64_t>(topo + 1);
        c.link.jitter_max = SimTime::zero();
        const int want = bfs_distance(pos, c.link.tx_range, src, dst);
        if (want < 0) continue;
        ++connected;

        for (Protocol p : {Protocol::Aodv, Protocol::Dsr}) {
            c.protocol = p;
            Simulation sim(c, nullptr, static_schedule(pos, seconds(c.sim_time)));
            std::optional<int> got;
            sim.set_event_hook([&] {
                if (got) return;
                if (p == Protocol::Aodv) {
                    const AodvEntry& e = static_cast<const AodvAgent&>(sim.agent(src)).entry(dst);
                    if (e.present && e.valid) got = e.hop_count;
                } else {
                    const auto r = static_cast<const DsrAgent&>(sim.agent(src)).cache().best(dst);
                    if (r) got = static_cast<int>(r->size()) - 1;
                }
            });
            sim.finish();
            const bool ok = got && *got == want;
            (p == Protocol::Aodv ? aodv_ok : dsr_ok) += ok;
            if (!ok && first_miss.empty()) {
                first_miss = " first miss: topology " + std::to_string(topo) + " " + std::string(to_string(p)) +
                             " got " + (got ? std::to_string(*got) : std::string("none")) + " want " +
                             std::to_string(want);
            }
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "connected %d/200, aodv %d/%d, dsr %d/%d", connected, aodv_ok, connected, dsr_ok,
                  connected);
    o.detail = buf + first_miss;
    o.pass = connected > 0 && aodv_ok == connected && dsr_ok == connected;
    return o;
}

// 4. Static line sanity.
Outcome static_line()
{
    Outcome o;
    std::string detail;
    for (Protocol p : {Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr}) {
        ScenarioConfig c;
        c.protocol = p;
        c.nodes = 5;
        c.stationary = true;
        c.placement = Placement::Line;
        c.line_spacing = 200.0;
        c.flows = {{0, 4}};
        c.connections = 1;
        Simulation sim(c, nullptr);
        std::map<std::int64_t, SimTime> sent, recv;
        sim.set_trace_listener([&](const TraceRecord& r) {
            if (r.layer != Layer::Agt || !r.seq) return;
            if (r.op == TraceOp::Send) sent[*r.seq] = r.time;
            if (r.op == TraceOp::Receive) recv[*r.seq] = r.time;
        });
        const RunResult res = sim.finish();
        const int hops = 4;
        const double per_hop = sim.link().serialization(c.packet_size + c.link.overhead).seconds() +
                               c.link.jitter_max.seconds() / 2.0;
        const double expected = hops * per_hop;
        double total = 0.0;
        int n = 0;
        for (auto it = recv.begin(); it != recv.end(); ++it) {
            if (it == recv.begin()) continue;  // first delivery carries the discovery
            total += (it->second - sent.at(it->first)).seconds();
            ++n;
        }
        const double avg = n > 0 ? total / n : 0.0;
        const double pdf = res.metrics.pdf.value_or(0.0);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s pdf=%.2f%% delay=%.2fms (expect %.2fms) ", std::string(to_string(p)).c_str(),
                      pdf, avg * 1e3, expected * 1e3);
        detail += buf;
        if (pdf < 99.0) fail(o, std::string(to_string(p)) + " pdf below 99%");
        if (n == 0 || std::fabs(avg - expected) > 0.5 * expected) fail(o, std::string(to_string(p)) + " delay off");
    }
    o.detail = o.pass ? detail : o.detail + "; " + detail;
    return o;
}

// 5. Protocol invariants on mobile runs.
class InvariantChecker {
public:
    InvariantChecker(Simulation& sim, Protocol p) : m_sim(sim), m_protocol(p)
    {
        const std::size_t n = sim.node_count();
        m_aodv_seqno.assign(n * n, 0);
        m_aodv_own.assign(n, 0);
        m_dsr_purged.assign(n, 0);
        m_dsr_revision.assign(n, 0);
        sim.set_event_hook([this] { check(); });
        sim.set_trace_listener([this](const TraceRecord& r) { on_trace(r); });
    }

    std::size_t violations() const { return m_violations; }
    const std::string& first() const { return m_first; }

private:
    void violation(const std::string& what)
    {
        if (m_violations++ == 0) m_first = what + " at " + m_sim.now().to_string();
    }

    void on_trace(const TraceRecord& r)
    {
        if (m_protocol != Protocol::Aodv || r.layer != Layer::Rtr || r.type != PacketType::Rreq) return;
        if (r.op == TraceOp::Send) m_originated[r.uid] = r.node;
        if (r.op != TraceOp::Forward) return;
        if (auto it = m_originated.find(r.uid); it != m_originated.end() && it->second == r.node) {
            violation("node " + std::to_string(r.node) + " forwarded its own RREQ");
        }
        const SimTime lifetime = m_sim.config().aodv.seen_lifetime;
        auto [it, fresh] = m_forwarded.try_emplace({r.node, r.uid}, r.time);
        if (!fresh) {
            if (r.time - it->second < lifetime) violation("node " + std::to_string(r.node) + " forwarded a duplicate RREQ");
            it->second = r.time;
        }
    }

    void check()
    {
        const auto n = static_cast<NodeId>(m_sim.node_count());
        switch (m_protocol) {
        case Protocol::Dsdv: {
            std::vector<const DsdvAgent*> agents;
            for (NodeId i = 0; i < n; ++i) agents.push_back(&static_cast<const DsdvAgent&>(m_sim.agent(i)));
            for (const DsdvAgent* a : agents) {
                if (a->own_seqno() % 2 != 0) violation("odd own seqno");
                for (const DsdvEntry& e : a->table()) {
                    if (!e.present) continue;
                    if (e.usable() && e.seqno % 2 != 0) violation("usable entry with odd seqno");
                    if (e.seqno % 2 != 0 && e.metric != kInfiniteMetric) violation("odd seqno with finite metric");
                }
            }
            for (NodeId d = 0; d < n; ++d) {
                if (!dsdv_loop_free(agents, d)) violation("equal-seqno loop towards " + std::to_string(d));
            }
            break;
        }
        case Protocol::Aodv:
            for (NodeId i = 0; i < n; ++i) {
                const auto& a = static_cast<const AodvAgent&>(m_sim.agent(i));
                auto& own = m_aodv_own[static_cast<std::size_t>(i)];
                if (a.own_seqno() < own) violation("own seqno decreased");
                own = a.own_seqno();
                for (const AodvEntry& e : a.table()) {
                    if (!e.present || !e.seqno_valid) continue;
                    auto& last = m_aodv_seqno[static_cast<std::size_t>(i * n + e.dest)];
                    if (e.seqno < last) violation("destination seqno decreased");
                    last = e.seqno;
                }
            }
            break;
        case Protocol::Dsr:
            for (NodeId i = 0; i < n; ++i) {
                const auto& a = static_cast<const DsrAgent&>(m_sim.agent(i));
                auto& rev = m_dsr_revision[static_cast<std::size_t>(i)];
                if (a.cache().revision() == rev && a.purged_links().size() == m_dsr_purged[static_cast<std::size_t>(i)]) {
                    continue;
                }
                rev = a.cache().revision();
                for (const auto& [dest, routes] : a.cache().all()) {
                    for (const Route& r : routes) {
                        if (r.empty() || r.front() != i || r.back() != dest || !is_simple_path(r)) {
                            violation("cached route is not a simple path from the owner");
                        }
                    }
                }
                auto& seen = m_dsr_purged[static_cast<std::size_t>(i)];
                const auto& purged = a.purged_links();
                for (; seen < purged.size(); ++seen) {
                    const auto [u, v] = purged[seen];
                    for (const auto& [dest, routes] : a.cache().all()) {
                        for (const Route& r : routes) {
                            if (route_has_link(r, u, v)) violation("route through a purged link survived");
                        }
                    }
                }
            }
            break;
        }
    }

    Simulation& m_sim;
    Protocol m_protocol;
    std::vector<std::uint32_t> m_aodv_seqno;
    std::vector<std::uint32_t> m_aodv_own;
    std::vector<std::size_t> m_dsr_purged;
    std::vector<std::uint64_t> m_dsr_revision;
    std::map<std::uint64_t, NodeId> m_originated;
    std::map<std::pair<NodeId, std::uint64_t>, SimTime> m_forwarded;
    std::size_t m_violations = 0;
    std::string m_first;
};

Outcome invariants()
{
    Outcome o;
    std::string detail;
    for (Protocol p : {Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr}) {
        std::size_t total = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int run = 0; run < 100; ++run) {
            ScenarioConfig c;
            c.protocol = p;
            c.nodes = 25;
            c.connections = 10;
            c.seed = static_cast<std::uint64_t>(1000 + run);
            c.pause_time = static_cast<double>((run % 5) * 10);
            Simulation sim(c, nullptr);
            InvariantChecker chk(sim, p);
            sim.finish();
            total += chk.violations();
            if (chk.violations() > 0) fail(o, std::string(to_string(p)) + " seed " + std::to_string(c.seed) + ": " + chk.first());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %zu violations/100 runs (%.0fs) ", std::string(to_string(p)).c_str(), total, secs);
        detail += buf;
    }
    o.detail = o.pass ? detail : o.detail + "; " + detail;
    return o;
}

// 6. Trend reproduction.
Outcome trends(bool full)
{
    Outcome o;
    SweepSpec spec;
    if (!full) {
        spec.node_counts = {25, 100, 200};
        spec.seeds = 5;
    }
    const SweepResult res = run_sweep(spec);
    if (!res.all_ok()) fail(o, "some runs failed");

    std::map<std::tuple<Protocol, int, int>, const CellSummary*> cell;
    for (const CellSummary& c : res.cells) cell[{c.protocol, c.nodes, c.connections}] = &c;
    auto mean = [&](Protocol p, int n, int conn, auto field) {
        const auto it = cell.find({p, n, conn});
        if (it == cell.end()) return std::nan("");
        const std::optional<double>& m = (it->second->stats.*field).mean;
        return m ? *m : std::nan("");
    };
    const auto pdf = &AggregateReport::pdf;
    const auto tput = &AggregateReport::throughput_kbps;
    const auto delay = &AggregateReport::avg_delay;
    const auto nrl = &AggregateReport::nrl;
    const int lo = spec.node_counts.front();
    const int hi = spec.node_counts.back();
    std::string detail;
    char buf[256];

    // a
    const double dsr_lo = mean(Protocol::Dsr, lo, 10, pdf), dsr_hi = mean(Protocol::Dsr, hi, 10, pdf);
    const bool a = dsr_lo - dsr_hi >= 10.0;
    std::snprintf(buf, sizeof buf, "a:%s(dsr pdf %.1f->%.1f) ", a ? "ok" : "FAIL", dsr_lo, dsr_hi);
    detail += buf;

    // b
    bool b = true;
    for (int n : spec.node_counts) {
        if (n < 150) continue;
        const double ao = mean(Protocol::Aodv, n, 10, pdf);
        b = b && ao >= mean(Protocol::Dsr, n, 10, pdf) && ao >= mean(Protocol::Dsdv, n, 10, pdf);
    }
    detail += std::string("b:") + (b ? "ok " : "FAIL ");

    // c
    bool c = true;
    for (int n : spec.node_counts) {
        const double ao = mean(Protocol::Aodv, n, 10, tput);
        c = c && ao >= mean(Protocol::Dsdv, n, 10, tput);
        if (n >= 150) c = c && ao >= mean(Protocol::Dsr, n, 10, tput);
    }
    detail += std::string("c:") + (c ? "ok " : "FAIL ");
    bool pass = a && b && c;

    if (full) {
        // d
        int lowest = 0;
        std::vector<double> dd;
        for (int n : spec.node_counts) {
            const double d = mean(Protocol::Dsdv, n, 10, delay);
            dd.push_back(d);
            lowest += d < mean(Protocol::Aodv, n, 10, delay) && d < mean(Protocol::Dsr, n, 10, delay);
        }
        double m = 0.0, ss = 0.0;
        for (double v : dd) m += v;
        m /= static_cast<double>(dd.size());
        for (double v : dd) ss += (v - m) * (v - m);
        const double cv = std::sqrt(ss / static_cast<double>(dd.size() - 1)) / m;
        const bool d = lowest >= 6 && cv < 0.30;
        std::snprintf(buf, sizeof buf, "d:%s(lowest %d/8, cv %.3f) ", d ? "ok" : "FAIL", lowest, cv);
        detail += buf;

        // e
        bool e = true;
        std::string emiss;
        for (int n : {25, 50, 75}) {
            const double ds = mean(Protocol::Dsdv, n, 5, nrl);
            const double ao = mean(Protocol::Aodv, n, 5, nrl);
            const double dr = mean(Protocol::Dsr, n, 5, nrl);
            if (!(ds > ao && ds > dr)) {
                e = false;
                std::snprintf(buf, sizeof buf, " n=%d dsdv %.3f aodv %.3f dsr %.3f;", n, ds, ao, dr);
                emiss += buf;
            }
        }
        for (int n : {150, 175, 200}) {
            const double ao = mean(Protocol::Aodv, n, 10, nrl);
            const double ds = mean(Protocol::Dsdv, n, 10, nrl);
            if (!(ao > ds)) {
                e = false;
                std::snprintf(buf, sizeof buf, " n=%d aodv %.3f dsdv %.3f;", n, ao, ds);
                emiss += buf;
            }
        }
        detail += std::string("e:") + (e ? "ok" : "FAIL(" + emiss + ")");
        pass = pass && d && e;
    } else {
        detail += "(reduced grid, a-c only)";
    }
    o.pass = o.pass && pass;
    o.detail = std::to_string(res.runs.size()) + " runs " + detail;
    return o;
}

// 7. Trace/metrics round trip.
Outcome round_trip()
{
    Outcome o;
    RngStream rng(77, "roundtrip");
    int equal = 0;
    for (int i = 0; i < 20; ++i) {
        ScenarioConfig c;
        c.protocol = static_cast<Protocol>(rng.uniform_int(0, 2));
        c.nodes = static_cast<int>(rng.uniform_int(10, 60));
        c.connections = static_cast<int>(rng.uniform_int(1, 10));
        c.sim_time = static_cast<double>(rng.uniform_int(20, 100));
        c.pause_time = static_cast<double>(rng.uniform_int(0, 20));
        c.nrl_mode = rng.uniform_int(0, 1) ? NrlMode::PerHop : NrlMode::Originated;
        c.seed = rng.next_u64() % 100000;
        std::ostringstream out;
        const RunResult r = run_scenario(c, &out);
        std::istringstream in(out.str());
        if (metrics_from_trace(in, c.sim_time, c.nrl_mode) == r.metrics) {
            ++equal;
        } else {
            fail(o, "mismatch for " + std::string(to_string(c.protocol)) + " seed " + std::to_string(c.seed));
        }
    }
    o.detail = (o.pass ? "" : o.detail + "; ") + std::to_string(equal) + "/20 runs equal";
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    bool full = false;
    std::vector<int> only;
    app.add_flag("--full", full, "Run the full 480-run sweep for the trend criterion");
    app.add_option("--only", only, "Criteria to run (default all)");
    CLI11_PARSE(app, argc, argv);

    using Check = Outcome (*)(bool);
    const std::vector<std::pair<int, Check>> checks = {
        {1, [](bool) { return formulas(); }},       {2, [](bool) { return determinism(); }},
        {3, [](bool) { return shortest_paths(); }}, {4, [](bool) { return static_line(); }},
        {5, [](bool) { return invariants(); }},     {6, [](bool f) { return trends(f); }},
        {7, [](bool) { return round_trip(); }},
    };
    bool all = true;
    for (const auto& [id, fn] : checks) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn(full);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
