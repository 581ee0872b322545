#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "manet/net/packet.hpp"
#include "manet/sim/sim_time.hpp"

namespace manet {

enum class TraceOp : char { Send = 's', Receive = 'r', Drop = 'd', Forward = 'f' };
enum class Layer : std::uint8_t { Agt, Rtr, Mac };
enum class DropReason : std::uint8_t { None, Ifq, Nrte, Collision, Ttl, Malformed };
inline constexpr std::size_t kDropReasonCount = 6;

std::string_view to_string(Layer l);
std::string_view to_string(DropReason r);

/// One line of the trace file:
///   <op> <time.6f> <node> <layer> <uid> <pkt_type> <size> [f<flow_id> q<seq>] [R<reason>]
struct TraceRecord {
    TraceOp op = TraceOp::Send;
    SimTime time;
    NodeId node = 0;
    Layer layer = Layer::Agt;
    std::uint64_t uid = 0;
    PacketType type = PacketType::Cbr;
    int size = 0;
    std::optional<int> flow;
    std::optional<std::int64_t> seq;
    DropReason reason = DropReason::None;

    bool operator==(const TraceRecord&) const = default;
};

std::string format_trace_line(const TraceRecord& rec);

/// Throws ParseError(lineno, ...) on any deviation from the format.
TraceRecord parse_trace_line(std::string_view line, int lineno);

/// Destination for trace lines; a null sink discards them.
class TraceSink {
public:
    TraceSink() = default;
    explicit TraceSink(std::ostream* out) : m_out(out) {}

    bool enabled() const { return m_out != nullptr; }
    void write(const TraceRecord& rec);

private:
    std::ostream* m_out = nullptr;
    std::string m_line;
};

}  // namespace manet
