#include "manet/metrics/metrics.hpp"

#include <cmath>
#include <string>

#include "manet/sim/errors.hpp"

namespace manet {

std::string_view to_string(NrlMode m)
{
    return m == NrlMode::PerHop ? "perhop" : "originated";
}

std::optional<NrlMode> nrl_mode_from(std::string_view s)
{
    if (s == "perhop") return NrlMode::PerHop;
    if (s == "originated") return NrlMode::Originated;
    return std::nullopt;
}

double compute_pdf(std::uint64_t sent, std::uint64_t received)
{
    if (sent == 0) throw NoPacketsSent("packet delivery fraction undefined: no packets sent");
    return static_cast<double>(received) / static_cast<double>(sent) * 100.0;
}

double mean_delay_seconds(std::int64_t total_delay_us, std::uint64_t delivered)
{
    if (delivered == 0) throw NoDeliveries("average delay undefined: no deliveries");
    return static_cast<double>(total_delay_us) / static_cast<double>(delivered) * 1e-6;
}

double compute_avg_delay(std::span<const std::pair<SimTime, SimTime>> delivered)
{
    std::int64_t total = 0;
    for (const auto& [sent_at, received_at] : delivered) total += (received_at - sent_at).micros();
    return mean_delay_seconds(total, delivered.size());
}

double compute_nrl(std::uint64_t routing_tx, std::uint64_t delivered)
{
    if (delivered == 0) throw NoDeliveries("normalized routing load undefined: no deliveries");
    return static_cast<double>(routing_tx) / static_cast<double>(delivered);
}

Throughput compute_throughput(std::uint64_t delivered, int packet_size, double window_seconds)
{
    if (!(window_seconds > 0.0)) throw InvalidRange("throughput window must be positive");
    Throughput t;
    t.pps = static_cast<double>(delivered) / window_seconds;
    t.kbps = static_cast<double>(delivered) * packet_size * 8.0 / window_seconds / 1000.0;
    return t;
}

namespace {

// Shared tail of the online and offline paths: identical counters must give
// identical doubles.
MetricsReport finish_report(std::uint64_t sent, std::uint64_t received, std::uint64_t received_bytes,
                            std::int64_t delay_us, std::uint64_t routing_tx, std::uint64_t app_drops,
                            const std::array<std::uint64_t, kDropReasonCount>& drops, double window)
{
    MetricsReport r;
    r.sent = sent;
    r.received = received;
    if (sent > 0) r.pdf = compute_pdf(sent, received);
    if (received > 0) {
        r.avg_delay = mean_delay_seconds(delay_us, received);
        r.nrl = compute_nrl(routing_tx, received);
    }
    r.routing_tx = routing_tx;
    // Bytes over packets: the payload size is uniform per run, so this is
    // delivered * packet_size without needing the config here.
    const int packet_size = received > 0 ? static_cast<int>(received_bytes / received) : 0;
    const Throughput t = compute_throughput(received, packet_size, window);
    r.throughput_kbps = t.kbps;
    r.throughput_pps = t.pps;
    r.drops = drops;
    r.in_flight = sent - received - app_drops;
    return r;
}

bool terminal_for_app(DropReason reason)
{
    // Collisions are per-receiver losses; a unicast data frame is retried and
    // its fate is decided (and traced) later.
    return reason != DropReason::Collision && reason != DropReason::None;
}

}  // namespace

void MetricsCollector::on_app_receive(SimTime sent_at, SimTime received_at, int size)
{
    ++m_received;
    m_received_bytes += static_cast<std::uint64_t>(size);
    m_delay_us += (received_at - sent_at).micros();
}

void MetricsCollector::on_routing_tx(TraceOp op, PacketType type)
{
    if (!is_control(type)) return;
    if (op == TraceOp::Send) ++m_routing_originated;
    if (op == TraceOp::Forward) ++m_routing_forwarded;
}

void MetricsCollector::on_drop(DropReason reason, PacketType type)
{
    ++m_drops[static_cast<std::size_t>(reason)];
    if (type == PacketType::Cbr && terminal_for_app(reason)) ++m_app_drops;
}

MetricsReport MetricsCollector::report(double window_seconds, NrlMode mode) const
{
    const std::uint64_t routing =
        mode == NrlMode::PerHop ? m_routing_originated + m_routing_forwarded : m_routing_originated;
    return finish_report(m_sent, m_received, m_received_bytes, m_delay_us, routing, m_app_drops, m_drops,
                         window_seconds);
}

MetricsReport metrics_from_trace(std::istream& trace, double window_seconds, NrlMode mode)
{
    std::unordered_map<std::uint64_t, SimTime> send_time;
    std::uint64_t sent = 0, received = 0, received_bytes = 0, routing = 0, app_drops = 0;
    std::int64_t delay_us = 0;
    std::array<std::uint64_t, kDropReasonCount> drops{};

    std::string line;
    int lineno = 0;
    while (std::getline(trace, line)) {
        ++lineno;
        if (line.empty()) continue;
        const TraceRecord rec = parse_trace_line(line, lineno);
        const bool cbr = rec.type == PacketType::Cbr;
        if (rec.layer == Layer::Agt && cbr && rec.op == TraceOp::Send) {
            ++sent;
            send_time[rec.uid] = rec.time;
        } else if (rec.layer == Layer::Agt && cbr && rec.op == TraceOp::Receive) {
            const auto it = send_time.find(rec.uid);
            if (it == send_time.end()) throw ParseError(lineno, "receive without matching send");
            ++received;
            received_bytes += static_cast<std::uint64_t>(rec.size);
            delay_us += (rec.time - it->second).micros();
        } else if (rec.layer == Layer::Rtr && !cbr &&
                   (rec.op == TraceOp::Send || (mode == NrlMode::PerHop && rec.op == TraceOp::Forward))) {
            ++routing;
        }
        if (rec.op == TraceOp::Drop) {
            ++drops[static_cast<std::size_t>(rec.reason)];
            if (cbr && terminal_for_app(rec.reason)) ++app_drops;
        }
    }
    return finish_report(sent, received, received_bytes, delay_us, routing, app_drops, drops, window_seconds);
}

AggregateReport aggregate(std::span<const MetricsReport> reports)
{
    if (reports.empty()) throw EmptyInput("aggregate: no reports");
    AggregateReport agg;
    agg.runs = reports.size();

    auto summarize = [&](auto&& get) {
        MetricSummary s;
        double sum = 0.0;
        for (const auto& r : reports) {
            const std::optional<double> v = get(r);
            if (!v) {
                ++s.excluded;
                continue;
            }
            sum += *v;
            ++s.n;
        }
        if (s.n == 0) return s;
        const double mean = sum / static_cast<double>(s.n);
        s.mean = mean;
        if (s.n >= 2) {
            double ss = 0.0;
            for (const auto& r : reports) {
                if (const auto v = get(r)) ss += (*v - mean) * (*v - mean);
            }
            s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
        }
        return s;
    };

    agg.pdf = summarize([](const MetricsReport& r) { return r.pdf; });
    agg.avg_delay = summarize([](const MetricsReport& r) { return r.avg_delay; });
    agg.nrl = summarize([](const MetricsReport& r) { return r.nrl; });
    agg.throughput_kbps = summarize([](const MetricsReport& r) { return std::optional<double>(r.throughput_kbps); });
    agg.throughput_pps = summarize([](const MetricsReport& r) { return std::optional<double>(r.throughput_pps); });
    return agg;
}

}  // namespace manet
