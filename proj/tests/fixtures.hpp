#pragma once

#include "vwapguard/models.hpp"

namespace fixtures {

// Reference desk: 400k shares of a 50-currency stock against 4M shares of daily volume.
inline vwapguard::MarketParams desk(double gamma = 3e-6) {
    vwapguard::MarketParams m;
    m.q0 = 4e5;
    m.horizon = 1.0;
    m.s0 = 50.0;
    m.sigma = 0.45;
    m.gamma = gamma;
    m.cost = vwapguard::CostSpec::quadratic(0.15);
    m.impact = vwapguard::ImpactSpec::linear(5e-7);
    m.volume = vwapguard::VolumeProfile::flat(4e6, 1.0);
    return m;
}

inline vwapguard::MarketParams without_impact(vwapguard::MarketParams m) {
    m.impact = vwapguard::ImpactSpec::zero();
    return m;
}

inline vwapguard::MarketParams two_buckets(vwapguard::MarketParams m) {
    m.volume = vwapguard::VolumeProfile::table({0.0, 0.5}, {2e6, 6e6}, 1.0);
    return m;
}

inline vwapguard::MarketParams power_cost(double gamma = 3e-6) {
    vwapguard::MarketParams m = desk(gamma);
    m.cost = vwapguard::CostSpec::power_law(0.12, 0.63);
    return m;
}

inline vwapguard::MarketParams power_impact(double gamma = 3e-6) {
    vwapguard::MarketParams m = power_cost(gamma);
    m.impact = vwapguard::ImpactSpec::power(2.2e-4, 0.6);
    return m;
}

}  // namespace fixtures
