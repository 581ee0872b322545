#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace manet {

/// Named, seeded pseudo-random stream.
///
/// Algorithm (portable, so scenarios can be regenerated by other tools):
///   key_hash = FNV-1a 64 over the UTF-8 bytes of the stream key
///   s        = root_seed XOR (key_hash * 0x9E3779B97F4A7C15)
///   state    = four successive SplitMix64 outputs starting from s
///   next     = xoshiro256** over that state
/// uniform_real(a,b) = a + (b-a) * ((next >> 11) * 2^-53)
/// uniform_int(a,b)  = a + Lemire's nearly-divisionless bounded draw on (b-a+1)
///
/// Stream keys follow "<purpose>/<node id>", e.g. "mobility/7".
class RngStream {
public:
    RngStream(std::uint64_t root_seed, std::string_view key);

    std::uint64_t next_u64();
    double uniform_real(double a, double b);
    std::int64_t uniform_int(std::int64_t a, std::int64_t b);

    static std::uint64_t hash_key(std::string_view key);

private:
    std::array<std::uint64_t, 4> m_s{};
};

inline std::string stream_key(std::string_view purpose, std::int64_t id)
{
    return std::string(purpose) + "/" + std::to_string(id);
}

}  // namespace manet
