#pragma once

#include "vwapguard/models.hpp"
#include "vwapguard/trading_curve.hpp"

#include <cmath>
#include <random>

namespace fixtures {

// Tracking curve plus a few random sine modes; q(0) = q0 and q(T) = 0 exactly.
inline vwapguard::TradingCurve random_curve(const vwapguard::MarketParams& m, std::size_t steps,
                                            std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-0.3, 0.3);
    const double a[4] = {amp(rng), amp(rng), amp(rng), amp(rng)};
    const vwapguard::VolumeGrid g = m.volume.discretize(steps);
    vwapguard::TradingCurve c;
    c.t = g.t;
    c.q.resize(steps + 1);
    const double pi = std::acos(-1.0);
    for (std::size_t j = 0; j <= steps; ++j) {
        const double x = g.t[j] / m.horizon;
        double q = 1.0 - g.cumulative[j] / g.total();
        for (int k = 0; k < 4; ++k) q += a[k] * std::sin((k + 1) * pi * x);
        c.q[j] = m.q0 * q;
    }
    c.q.front() = m.q0;
    c.q.back() = 0.0;
    return c;
}

}  // namespace fixtures
