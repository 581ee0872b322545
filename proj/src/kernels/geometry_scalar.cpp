#include "manet/kernels/geometry.hpp"

namespace manet::kernels::scalar {

void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y)
{
    const std::size_t n = legs.size();
    for (std::size_t i = 0; i < n; ++i) {
        double e = t - legs.t0[i];
        e = e > 0.0 ? e : 0.0;
        if (e >= legs.dur[i]) {
            x[i] = legs.ex[i];
            y[i] = legs.ey[i];
        } else {
            const double px = legs.vx[i] * e;
            const double py = legs.vy[i] * e;
            x[i] = legs.sx[i] + px;
            y[i] = legs.sy[i] + py;
        }
    }
}

std::size_t within_radius(std::span<const double> x, std::span<const double> y, double px, double py, double r2,
                          std::span<std::uint8_t> mask)
{
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - px;
        const double dy = y[i] - py;
        const double dx2 = dx * dx;
        const double dy2 = dy * dy;
        const bool in = dx2 + dy2 <= r2;
        mask[i] = in ? 1 : 0;
        count += in;
    }
    return count;
}

}  // namespace manet::kernels::scalar
