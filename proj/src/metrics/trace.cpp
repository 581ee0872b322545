#include "manet/metrics/trace.hpp"

#include <array>
#include <charconv>
#include <vector>

#include "manet/sim/errors.hpp"

namespace manet {
namespace {

constexpr std::array<std::string_view, 3> kLayers = {"AGT", "RTR", "MAC"};
constexpr std::array<std::string_view, kDropReasonCount> kReasons = {"", "IFQ", "NRTE", "COLLISION", "TTL",
                                                                     "MALFORMED"};

template <class Int>
bool parse_int(std::string_view s, Int& out)
{
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_time(std::string_view s, SimTime& out)
{
    const auto dot = s.find('.');
    if (dot == std::string_view::npos || s.size() - dot - 1 != 6) return false;
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    if (!parse_int(s.substr(0, dot), whole) || !parse_int(s.substr(dot + 1), frac) || whole < 0 || frac < 0) {
        return false;
    }
    out = SimTime::from_micros(whole * 1000000 + frac);
    return true;
}

}  // namespace

std::string_view to_string(Layer l)
{
    return kLayers[static_cast<std::size_t>(l)];
}

std::string_view to_string(DropReason r)
{
    return kReasons[static_cast<std::size_t>(r)];
}

std::string format_trace_line(const TraceRecord& rec)
{
    std::string s;
    s.reserve(64);
    s += static_cast<char>(rec.op);
    s += ' ';
    s += rec.time.to_string();
    s += ' ';
    s += std::to_string(rec.node);
    s += ' ';
    s += to_string(rec.layer);
    s += ' ';
    s += std::to_string(rec.uid);
    s += ' ';
    s += to_string(rec.type);
    s += ' ';
    s += std::to_string(rec.size);
    if (rec.flow && rec.seq) {
        s += " f";
        s += std::to_string(*rec.flow);
        s += " q";
        s += std::to_string(*rec.seq);
    }
    if (rec.reason != DropReason::None) {
        s += " R";
        s += to_string(rec.reason);
    }
    return s;
}

TraceRecord parse_trace_line(std::string_view line, int lineno)
{
    std::vector<std::string_view> tok;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const auto sp = line.find(' ', pos);
        const auto end = sp == std::string_view::npos ? line.size() : sp;
        tok.push_back(line.substr(pos, end - pos));
        if (sp == std::string_view::npos) break;
        pos = sp + 1;
    }
    if (tok.size() < 7) throw ParseError(lineno, "truncated trace line");

    TraceRecord rec;
    if (tok[0].size() != 1 || std::string_view("srdf").find(tok[0][0]) == std::string_view::npos) {
        throw ParseError(lineno, "bad op '" + std::string(tok[0]) + "'");
    }
    rec.op = static_cast<TraceOp>(tok[0][0]);
    if (!parse_time(tok[1], rec.time)) throw ParseError(lineno, "bad time '" + std::string(tok[1]) + "'");
    if (!parse_int(tok[2], rec.node)) throw ParseError(lineno, "bad node");
    bool layer_ok = false;
    for (std::size_t i = 0; i < kLayers.size(); ++i) {
        if (tok[3] == kLayers[i]) {
            rec.layer = static_cast<Layer>(i);
            layer_ok = true;
        }
    }
    if (!layer_ok) throw ParseError(lineno, "bad layer");
    if (!parse_int(tok[4], rec.uid)) throw ParseError(lineno, "bad uid");
    const auto type = packet_type_from(tok[5]);
    if (!type) throw ParseError(lineno, "bad packet type");
    rec.type = *type;
    if (!parse_int(tok[6], rec.size) || rec.size < 0) throw ParseError(lineno, "bad size");

    std::size_t i = 7;
    if (i < tok.size() && !tok[i].empty() && tok[i][0] == 'f') {
        int flow = 0;
        std::int64_t seq = 0;
        if (i + 1 >= tok.size() || !parse_int(tok[i].substr(1), flow) || tok[i + 1].empty() || tok[i + 1][0] != 'q' ||
            !parse_int(tok[i + 1].substr(1), seq)) {
            throw ParseError(lineno, "bad flow/seq fields");
        }
        rec.flow = flow;
        rec.seq = seq;
        i += 2;
    }
    if (i < tok.size() && !tok[i].empty() && tok[i][0] == 'R') {
        const auto r = tok[i].substr(1);
        bool ok = false;
        for (std::size_t k = 1; k < kReasons.size(); ++k) {
            if (r == kReasons[k]) {
                rec.reason = static_cast<DropReason>(k);
                ok = true;
            }
        }
        if (!ok) throw ParseError(lineno, "bad drop reason");
        ++i;
    }
    if (i != tok.size()) throw ParseError(lineno, "trailing fields");
    if (rec.op == TraceOp::Drop && rec.reason == DropReason::None) throw ParseError(lineno, "drop without reason");
    return rec;
}

void TraceSink::write(const TraceRecord& rec)
{
    if (m_out == nullptr) return;
    m_line = format_trace_line(rec);
    m_line += '\n';
    m_out->write(m_line.data(), static_cast<std::streamsize>(m_line.size()));
}

}  // namespace manet
