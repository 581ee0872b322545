// Compiled with -mavx2 and no FMA so every lane rounds exactly like the
// scalar reference (separate multiply and add).
#include "manet/kernels/geometry.hpp"

#include <immintrin.h>

namespace manet::kernels::avx2 {

void positions_at(const LegArrays& legs, double t, std::span<double> x, std::span<double> y)
{
    const std::size_t n = legs.size();
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d e = _mm256_sub_pd(vt, _mm256_loadu_pd(&legs.t0[i]));
        e = _mm256_max_pd(e, zero);
        const __m256d arrived = _mm256_cmp_pd(e, _mm256_loadu_pd(&legs.dur[i]), _CMP_GE_OQ);
        const __m256d mx = _mm256_add_pd(_mm256_loadu_pd(&legs.sx[i]), _mm256_mul_pd(_mm256_loadu_pd(&legs.vx[i]), e));
        const __m256d my = _mm256_add_pd(_mm256_loadu_pd(&legs.sy[i]), _mm256_mul_pd(_mm256_loadu_pd(&legs.vy[i]), e));
        _mm256_storeu_pd(&x[i], _mm256_blendv_pd(mx, _mm256_loadu_pd(&legs.ex[i]), arrived));
        _mm256_storeu_pd(&y[i], _mm256_blendv_pd(my, _mm256_loadu_pd(&legs.ey[i]), arrived));
    }
    if (i < n) {
        LegArrays tail{legs.sx.subspan(i), legs.sy.subspan(i), legs.vx.subspan(i), legs.vy.subspan(i),
                       legs.ex.subspan(i), legs.ey.subspan(i), legs.t0.subspan(i), legs.dur.subspan(i)};
        scalar::positions_at(tail, t, x.subspan(i), y.subspan(i));
    }
}

std::size_t within_radius(std::span<const double> x, std::span<const double> y, double px, double py, double r2,
                          std::span<std::uint8_t> mask)
{
    const std::size_t n = x.size();
    const __m256d vpx = _mm256_set1_pd(px);
    const __m256d vpy = _mm256_set1_pd(py);
    const __m256d vr2 = _mm256_set1_pd(r2);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&x[i]), vpx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&y[i]), vpy);
        const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        const int bits = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
        mask[i + 0] = static_cast<std::uint8_t>(bits & 1);
        mask[i + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
        mask[i + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
        mask[i + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(bits)));
    }
    if (i < n) {
        count += scalar::within_radius(x.subspan(i), y.subspan(i), px, py, r2, mask.subspan(i));
    }
    return count;
}

}  // namespace manet::kernels::avx2
