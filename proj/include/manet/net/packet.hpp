#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "manet/sim/sim_time.hpp"

namespace manet {

enum class PacketType : std::uint8_t { Cbr, Rreq, Rrep, Rerr, Hello, Dsdv, DsrRreq, DsrRrep, DsrRerr };

std::string_view to_string(PacketType t);
std::optional<PacketType> packet_type_from(std::string_view s);
inline bool is_control(PacketType t) { return t != PacketType::Cbr; }

// Header sizes in bytes at the network layer. Link overhead is added by the
// link layer on top of these.
namespace wire {
inline constexpr int kAodvRreq = 24;
inline constexpr int kAodvRrep = 20;
inline constexpr int kAodvRerrBase = 4;
inline constexpr int kAodvRerrPerDest = 8;
inline constexpr int kDsdvBase = 8;
inline constexpr int kDsdvPerEntry = 12;
inline constexpr int kDsrFixed = 8;
inline constexpr int kDsrPerHop = 4;
inline constexpr int kDsrRerr = 12;
inline constexpr int kMtu = 1500;
}  // namespace wire

struct AppData {
    int flow = 0;
    std::int64_t seq = 0;
    SimTime sent_at;
    int payload = 0;  // bytes
};

struct DsdvAdvert {
    NodeId dest = 0;
    std::uint32_t metric = 0;
    std::uint32_t seqno = 0;
};

struct DsdvUpdate {
    NodeId origin = 0;
    bool full = false;
    std::vector<DsdvAdvert> entries;
};

struct AodvRreq {
    NodeId origin = 0;
    std::uint32_t origin_seqno = 0;
    std::uint32_t rreq_id = 0;
    NodeId dest = 0;
    std::uint32_t dest_seqno = 0;
    bool dest_seqno_unknown = true;
    int hop_count = 0;
    int ttl = 0;
};

/// Also used for hello beacons (dest = sender, hop_count 0).
struct AodvRrep {
    NodeId dest = 0;
    std::uint32_t dest_seqno = 0;
    int hop_count = 0;
    NodeId origin = 0;
    SimTime lifetime;
};

struct AodvRerr {
    struct Unreachable {
        NodeId dest;
        std::uint32_t seqno;
    };
    std::vector<Unreachable> unreachable;
};

struct DsrRreq {
    NodeId origin = 0;
    std::uint32_t request_id = 0;
    NodeId dest = 0;
    std::vector<NodeId> accumulated;
};

/// The discovered route, origin first. Travels back along the reversed prefix.
struct DsrRrep {
    std::vector<NodeId> route;
    std::uint32_t request_id = 0;
};

struct DsrRerr {
    NodeId from_node = 0;
    NodeId to_node = 0;
    NodeId origin = 0;
};

/// DSR source route: hops[cursor] is the node currently holding the packet.
struct SourceRoute {
    std::vector<NodeId> hops;
    std::size_t cursor = 0;
};

using PacketBody = std::variant<std::monostate, DsdvUpdate, AodvRreq, AodvRrep, AodvRerr, DsrRreq, DsrRrep, DsrRerr>;

struct Packet {
    std::uint64_t uid = 0;
    PacketType type = PacketType::Cbr;
    NodeId src = 0;
    NodeId dst = kBroadcast;
    int ttl = 32;
    int size = 0;  // network-layer bytes
    std::optional<AppData> app;
    std::optional<SourceRoute> route;
    PacketBody body;
};

/// Network-layer size of a packet as it goes on the air, given its contents.
int network_size(const Packet& p);

}  // namespace manet
