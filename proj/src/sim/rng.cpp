#include "manet/sim/rng.hpp"

#include "manet/sim/errors.hpp"

namespace manet {
namespace {

std::uint64_t splitmix64(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t RngStream::hash_key(std::string_view key)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

RngStream::RngStream(std::uint64_t root_seed, std::string_view key)
{
    std::uint64_t x = root_seed ^ (hash_key(key) * 0x9E3779B97F4A7C15ULL);
    for (auto& w : m_s) w = splitmix64(x);
}

std::uint64_t RngStream::next_u64()
{
    const std::uint64_t result = rotl(m_s[1] * 5, 7) * 9;
    const std::uint64_t t = m_s[1] << 17;
    m_s[2] ^= m_s[0];
    m_s[3] ^= m_s[1];
    m_s[1] ^= m_s[2];
    m_s[0] ^= m_s[3];
    m_s[2] ^= t;
    m_s[3] = rotl(m_s[3], 45);
    return result;
}

double RngStream::uniform_real(double a, double b)
{
    if (a > b) throw InvalidRange("uniform_real: a > b");
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
}

std::int64_t RngStream::uniform_int(std::int64_t a, std::int64_t b)
{
    if (a > b) throw InvalidRange("uniform_int: a > b");
    const std::uint64_t span = static_cast<std::uint64_t>(b - a) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * span;
    auto low = static_cast<std::uint64_t>(m);
    if (low < span) {
        const std::uint64_t threshold = -span % span;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next_u64()) * span;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return a + static_cast<std::int64_t>(m >> 64);
}

}  // namespace manet
