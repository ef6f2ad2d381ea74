#pragma once

#include <cstddef>
#include <vector>

namespace vwapguard {

/// Inventory trajectory on the uniform grid t_j = j tau, j = 0..J, with
/// q[0] = q0 and q[J] = 0. `p` holds the adjoint when the producer knows it
/// and is empty otherwise.
struct TradingCurve {
    std::vector<double> t;
    std::vector<double> q;
    std::vector<double> p;

    std::size_t steps() const noexcept { return t.empty() ? 0 : t.size() - 1; }
    bool has_adjoint() const noexcept { return !p.empty(); }
};

}  // namespace vwapguard
