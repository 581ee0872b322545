#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace manet::kernels {

/// One active leg per node, structure-of-arrays.
///
/// A node on leg i at time t sits at (sx + vx*e, sy + vy*e) with
/// e = max(t - t0, 0), or exactly at (ex, ey) once e >= dur.
struct LegArrays {
    std::span<const double> sx, sy, vx, vy, ex, ey, t0, dur;
    std::size_t size() const { return sx.size(); }
};

using PositionsFn = void (*)(const LegArrays& legs, double t, std::span<double> x, std::span<double> y);

/// mask[i] = 1 iff (x[i]-px)^2 + (y[i]-py)^2 <= r2. Returns the number of set entries.
using WithinRadiusFn = std::size_t (*)(std::span<const double> x, std::span<const double> y, double px, double py,
                                       double r2, std::span<std::uint8_t> mask);

struct GeometryKernels {
    std::string_view name;
    PositionsFn positions_at;
    WithinRadiusFn within_radius;
};

namespace scalar {
void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y);
std::size_t within_radius(std::span<const double> x, std::span<const double> y, double px, double py, double r2,
                          std::span<std::uint8_t> mask);
}  // namespace scalar

#if defined(MANET_HAVE_AVX2)
namespace avx2 {
void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y);
std::size_t within_radius(std::span<const double> x, std::span<const double> y, double px, double py, double r2,
                          std::span<std::uint8_t> mask);
}  // namespace avx2
#endif

const GeometryKernels& scalar_kernels();

/// nullptr when the build lacks the AVX2 variant or the CPU lacks AVX2.
const GeometryKernels* avx2_kernels();

/// Picked once per process: AVX2 when available, scalar otherwise.
/// MANETSIM_KERNELS=scalar forces the reference path.
const GeometryKernels& active_kernels();

}  // namespace manet::kernels
