#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "manet/metrics/trace.hpp"

namespace manet {

/// Whether the routing-load numerator counts every per-hop transmission of a
/// control packet (RTR `s` and `f`) or only originations (RTR `s`).
enum class NrlMode { PerHop, Originated };

std::string_view to_string(NrlMode m);
std::optional<NrlMode> nrl_mode_from(std::string_view s);

/// received / sent * 100. Throws NoPacketsSent when sent == 0.
double compute_pdf(std::uint64_t sent, std::uint64_t received);

/// Mean of (received_at - sent_at) in seconds. Throws NoDeliveries on empty input.
double compute_avg_delay(std::span<const std::pair<SimTime, SimTime>> delivered);

/// Same mean from an already accumulated microsecond sum.
double mean_delay_seconds(std::int64_t total_delay_us, std::uint64_t delivered);

/// routing_tx / delivered. Throws NoDeliveries when delivered == 0.
double compute_nrl(std::uint64_t routing_tx, std::uint64_t delivered);

struct Throughput {
    double kbps = 0.0;
    double pps = 0.0;
};

/// Throws InvalidRange if window <= 0.
Throughput compute_throughput(std::uint64_t delivered, int packet_size, double window_seconds);

struct MetricsReport {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::optional<double> pdf;
    std::optional<double> avg_delay;
    std::uint64_t routing_tx = 0;
    std::optional<double> nrl;
    double throughput_kbps = 0.0;
    double throughput_pps = 0.0;
    std::array<std::uint64_t, kDropReasonCount> drops{};
    /// Application packets neither delivered nor terminally dropped at the end of the run.
    std::uint64_t in_flight = 0;

    std::uint64_t drop_count(DropReason r) const { return drops[static_cast<std::size_t>(r)]; }
    bool operator==(const MetricsReport&) const = default;
};

/// Online accumulation, fed directly by the simulation as events happen.
class MetricsCollector {
public:
    void on_app_send() { ++m_sent; }
    void on_app_receive(SimTime sent_at, SimTime received_at, int size);
    void on_routing_tx(TraceOp op, PacketType type);
    void on_drop(DropReason reason, PacketType type);

    MetricsReport report(double window_seconds, NrlMode mode) const;

    std::uint64_t sent() const { return m_sent; }
    std::uint64_t received() const { return m_received; }
    std::uint64_t terminal_app_drops() const { return m_app_drops; }

private:
    std::uint64_t m_sent = 0;
    std::uint64_t m_received = 0;
    std::uint64_t m_received_bytes = 0;
    std::int64_t m_delay_us = 0;
    std::uint64_t m_routing_originated = 0;
    std::uint64_t m_routing_forwarded = 0;
    std::uint64_t m_app_drops = 0;
    std::array<std::uint64_t, kDropReasonCount> m_drops{};
};

/// Offline path: recomputes the report purely from trace lines.
/// Throws ParseError with the offending line number.
MetricsReport metrics_from_trace(std::istream& trace, double window_seconds, NrlMode mode);

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> stddev;  // sample stddev; absent when n < 2
    std::size_t n = 0;             // reports contributing
    std::size_t excluded = 0;      // reports where the metric was absent
};

struct AggregateReport {
    std::size_t runs = 0;
    MetricSummary pdf, avg_delay, nrl, throughput_kbps, throughput_pps;
};

/// Per-metric mean and sample standard deviation. Throws EmptyInput.
AggregateReport aggregate(std::span<const MetricsReport> reports);

}  // namespace manet
