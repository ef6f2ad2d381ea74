/**
 * @file closed_forms.hpp
 * @brief Analytic optimal curves and premia used as oracles for the solver.
 *
 * Three regimes admit closed forms:
 *   - no permanent impact (any cost, any volume): the curve tracks relative
 *     market volume and the premium is Q_T L(q0 / Q_T);
 *   - flat volume, linear impact k, quadratic cost eta, gamma > 0:
 *       q*(t) = q0 (1 - t/T) - q0 w(t),
 *       w(t)  = k/(gamma sigma^2 T) sinh(kappa t) [tanh(kappa T/2) - tanh(kappa t/2)],
 *       kappa = sqrt(gamma sigma^2 V / (2 eta));
 *   - the same model at gamma = 0 (risk neutral):
 *       q*(t) = q0 (1 - t/T)(1 - k V t / (4 eta)),
 *       pi    = eta q0^2/(V T) - k^2 V T q0^2 / (48 eta).
 */

#pragma once

#include "vwapguard/models.hpp"
#include "vwapguard/trading_curve.hpp"

#include <cstddef>
#include <utility>

namespace vwapguard {

/// Linear-impact / quadratic-cost / flat-volume model reduced to its scalars.
/// Construction checks the model kinds and throws ModelMismatch otherwise.
class FlatLinearQuadratic {
public:
    explicit FlatLinearQuadratic(const MarketParams& params);

    double kappa() const noexcept { return kappa_; }
    /// Deviation from the straight line, in units of q0. Requires gamma > 0.
    double w(double t) const;
    double w_prime(double t) const;

private:
    double horizon_;
    double volume_;
    double k_;
    double eta_;
    double gamma_sigma2_;
    double kappa_;
};

/// q_j = q0 (1 - Q_j / Q_J). Throws ModelMismatch unless the impact is zero.
TradingCurve no_impact_curve(const MarketParams& params, std::size_t steps);
double no_impact_premium(const MarketParams& params);

/// Tracking curve q0 (1 - Q_j / Q_J) without any model-kind requirement.
TradingCurve tracking_curve(const MarketParams& params, std::size_t steps);

/// Nodewise closed-form optimum with adjoint p = 2 eta q'(t) / V. gamma must be > 0.
TradingCurve ac_curve(const MarketParams& params, std::size_t steps);
/// Closed-form premium; the correction integral uses composite Simpson on a
/// 10x refinement of `steps`.
double ac_premium(const MarketParams& params, std::size_t steps = 2000);

/// gamma = 0 curve (with adjoint) and premium.
std::pair<TradingCurve, double> risk_neutral_curve_and_premium(const MarketParams& params,
                                                               std::size_t steps);

}  // namespace vwapguard
