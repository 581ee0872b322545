#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string_view>
#include <vector>

#include "doctest.h"
#include "manet/kernels/geometry.hpp"
#include "manet/sim/rng.hpp"

using namespace manet;
using namespace manet::kernels;

namespace {

struct LegSet {
    std::vector<double> sx, sy, vx, vy, ex, ey, t0, dur;

    LegArrays view() const { return {sx, sy, vx, vy, ex, ey, t0, dur}; }
};

LegSet random_legs(std::size_t n, std::uint64_t seed)
{
    RngStream r(seed, "kernels/legs");
    LegSet s;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = r.uniform_real(0, 1000), y0 = r.uniform_real(0, 1000);
        const double x1 = r.uniform_real(0, 1000), y1 = r.uniform_real(0, 1000);
        const double speed = r.uniform_real(1, 20);
        const double dx = x1 - x0, dy = y1 - y0;
        const double len = std::sqrt(dx * dx + dy * dy);
        const double d = len / speed;
        s.sx.push_back(x0);
        s.sy.push_back(y0);
        s.vx.push_back(len > 0 ? dx / d : 0.0);
        s.vy.push_back(len > 0 ? dy / d : 0.0);
        s.ex.push_back(x1);
        s.ey.push_back(y1);
        s.t0.push_back(r.uniform_real(0, 50));
        s.dur.push_back(d);
    }
    return s;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar positions follow the leg definition")
{
    LegSet s;
    s.sx = {0, 10};
    s.sy = {0, 10};
    s.vx = {10, 0};
    s.vy = {0, 0};
    s.ex = {100, 10};
    s.ey = {0, 10};
    s.t0 = {0, 2};
    s.dur = {10, 0};
    std::vector<double> x(2), y(2);
    scalar::positions_at(s.view(), 5.0, x, y);
    CHECK(x[0] == 50.0);
    CHECK(y[0] == 0.0);
    scalar::positions_at(s.view(), 10.0, x, y);
    CHECK(x[0] == 100.0);
    scalar::positions_at(s.view(), 1.0, x, y);
    CHECK(x[1] == 10.0);
}

TEST_CASE("within_radius uses a closed disk")
{
    const std::vector<double> x{0, 0, 0, 3};
    const std::vector<double> y{200, 250, 600, 4};
    std::vector<std::uint8_t> mask(4);
    CHECK(scalar::within_radius(x, y, 0, 0, 250.0 * 250.0, mask) == 3);
    CHECK(mask == std::vector<std::uint8_t>{1, 1, 0, 1});
    CHECK(scalar::within_radius(x, y, 0, 0, 25.0, mask) == 1);
}

TEST_CASE("active kernels honor the scalar override")
{
    const char* forced = std::getenv("MANETSIM_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
        CHECK(active_kernels().name == "scalar");
    } else if (avx2_kernels() != nullptr) {
        CHECK(active_kernels().name == "avx2");
    } else {
        CHECK(active_kernels().name == "scalar");
    }
}

TEST_CASE("avx2 kernels match the scalar reference bit for bit")
{
    const GeometryKernels* fast = avx2_kernels();
    if (fast == nullptr) {
        MESSAGE("AVX2 variant unavailable on this build or CPU; equivalence not exercised");
        return;
    }
    const GeometryKernels& ref = scalar_kernels();
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 33u, 200u}) {
        const LegSet legs = random_legs(n, 100 + n);
        for (double t : {0.0, 0.5, 3.25, 17.0, 49.999, 60.0, 100.0}) {
            std::vector<double> x1(n), y1(n), x2(n), y2(n);
            ref.positions_at(legs.view(), t, x1, y1);
            fast->positions_at(legs.view(), t, x2, y2);
            CHECK(bit_equal(x1, x2));
            CHECK(bit_equal(y1, y2));

            for (std::size_t c = 0; c < std::min<std::size_t>(n, 5); ++c) {
                for (double r : {0.0, 100.0, 250.0, 1500.0}) {
                    std::vector<std::uint8_t> m1(n), m2(n);
                    const auto k1 = ref.within_radius(x1, y1, x1[c], y1[c], r * r, m1);
                    const auto k2 = fast->within_radius(x1, y1, x1[c], y1[c], r * r, m2);
                    CHECK(k1 == k2);
                    CHECK(m1 == m2);
                }
            }
        }
    }
}

TEST_CASE("avx2 within_radius agrees on exact boundary distances")
{
    const GeometryKernels* fast = avx2_kernels();
    if (fast == nullptr) return;
    const std::vector<double> x{0, 150, 250, 250.0000001, 0, -250, 0, 176.7766952966369};
    const std::vector<double> y{250, 200, 0, 0, -250.0000001, 0, 0, 176.7766952966369};
    std::vector<std::uint8_t> m1(x.size()), m2(x.size());
    const auto k1 = scalar_kernels().within_radius(x, y, 0, 0, 62500.0, m1);
    const auto k2 = fast->within_radius(x, y, 0, 0, 62500.0, m2);
    CHECK(k1 == k2);
    CHECK(m1 == m2);
    CHECK(m1[0] == 1);
    CHECK(m1[3] == 0);
}
