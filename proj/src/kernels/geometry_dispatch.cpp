#include <cstdlib>
#include <string_view>

#include "manet/kernels/geometry.hpp"

namespace manet::kernels {

const GeometryKernels& scalar_kernels()
{
    static const GeometryKernels k{"scalar", &scalar::positions_at, &scalar::within_radius};
    return k;
}

const GeometryKernels* avx2_kernels()
{
#if defined(MANET_HAVE_AVX2)
    static const GeometryKernels k{"avx2", &avx2::positions_at, &avx2::within_radius};
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &k : nullptr;
#else
    return nullptr;
#endif
}

const GeometryKernels& active_kernels()
{
    static const GeometryKernels& chosen = []() -> const GeometryKernels& {
        const char* forced = std::getenv("MANETSIM_KERNELS");
        if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
        if (const auto* k = avx2_kernels()) return *k;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace manet::kernels
