#include "manet/net/packet.hpp"

#include <array>

namespace manet {
namespace {

constexpr std::array<std::string_view, 9> kNames = {"cbr",  "RREQ",     "RREP",     "RERR",    "HELLO",
                                                    "DSDV", "DSR-RREQ", "DSR-RREP", "DSR-RERR"};

int source_route_bytes(const Packet& p)
{
    return p.route ? wire::kDsrFixed + wire::kDsrPerHop * static_cast<int>(p.route->hops.size()) : 0;
}

}  // namespace

std::string_view to_string(PacketType t)
{
    return kNames[static_cast<std::size_t>(t)];
}

std::optional<PacketType> packet_type_from(std::string_view s)
{
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == s) return static_cast<PacketType>(i);
    }
    return std::nullopt;
}

int network_size(const Packet& p)
{
    switch (p.type) {
    case PacketType::Cbr:
        return (p.app ? p.app->payload : 0) + source_route_bytes(p);
    case PacketType::Rreq:
        return wire::kAodvRreq;
    case PacketType::Rrep:
    case PacketType::Hello:
        return wire::kAodvRrep;
    case PacketType::Rerr:
        return wire::kAodvRerrBase +
               wire::kAodvRerrPerDest * static_cast<int>(std::get<AodvRerr>(p.body).unreachable.size());
    case PacketType::Dsdv:
        return wire::kDsdvBase + wire::kDsdvPerEntry * static_cast<int>(std::get<DsdvUpdate>(p.body).entries.size());
    case PacketType::DsrRreq:
        return wire::kDsrFixed + wire::kDsrPerHop * static_cast<int>(std::get<DsrRreq>(p.body).accumulated.size());
    case PacketType::DsrRrep:
        return wire::kDsrFixed + wire::kDsrPerHop * static_cast<int>(std::get<DsrRrep>(p.body).route.size()) +
               source_route_bytes(p);
    case PacketType::DsrRerr:
        return wire::kDsrRerr + source_route_bytes(p);
    }
    return 0;
}

}  // namespace manet
