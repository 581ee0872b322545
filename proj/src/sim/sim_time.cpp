#include "manet/sim/sim_time.hpp"

#include <cstdio>
#include <cstdlib>

namespace manet {

std::string SimTime::to_string() const
{
    char buf[32];
    const std::int64_t whole = m_us / 1000000;
    const std::int64_t frac = std::llabs(m_us % 1000000);
    if (m_us < 0 && whole == 0) {
        std::snprintf(buf, sizeof buf, "-0.%06lld", static_cast<long long>(frac));
    } else {
        std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(whole), static_cast<long long>(frac));
    }
    return buf;
}

}  // namespace manet
