#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace manet {

using NodeId = std::int32_t;
inline constexpr NodeId kBroadcast = -1;

/// Simulated time with microsecond resolution.
///
/// Stored as an integer count of microseconds so that replayed runs compare
/// bit-for-bit; conversion to and from seconds rounds to the nearest tick.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
    static SimTime from_seconds(double s) { return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6))); }
    static constexpr SimTime zero() { return SimTime(0); }
    static constexpr SimTime max() { return SimTime(INT64_MAX / 4); }

    constexpr std::int64_t micros() const { return m_us; }
    constexpr double seconds() const { return static_cast<double>(m_us) * 1e-6; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime(m_us + o.m_us); }
    constexpr SimTime operator-(SimTime o) const { return SimTime(m_us - o.m_us); }
    constexpr SimTime& operator+=(SimTime o) { m_us += o.m_us; return *this; }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime(m_us * k); }

    /// "12.004321" -- fixed six decimals, no floating point involved.
    std::string to_string() const;

private:
    constexpr explicit SimTime(std::int64_t us) : m_us(us) {}
    std::int64_t m_us = 0;
};

inline SimTime seconds(double s) { return SimTime::from_seconds(s); }
inline constexpr SimTime micros(std::int64_t us) { return SimTime::from_micros(us); }

}  // namespace manet
