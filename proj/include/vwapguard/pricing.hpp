#pragma once

#include "vwapguard/models.hpp"
#include "vwapguard/solver.hpp"
#include "vwapguard/trading_curve.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace vwapguard {

// All functionals below use the solver's discretisation: on cell j the rate is
// the forward difference (q_{j+1} - q_j)/tau and V, Q, q are taken at node j+1.
// With that choice the converged solver curve is an exact stationary point of
// the discrete objective.

/// Discrete objective
///   sum_j tau [ V L(rate/V) - q0 (1-lambda) (V/Q_T) F(q0 - q)
///               + gamma sigma^2 q0^2 / 2 (q/q0 - (1-lambda)(1 - Q/Q_T))^2 ].
double objective(const MarketParams& params, double lambda, const TradingCurve& curve);

struct SlippageMoments {
    double mean = 0.0;      ///< currency
    double variance = 0.0;  ///< currency^2
};

/// Mean and variance of the (Gaussian) slippage X_T - q0 VWAP_T of a deterministic curve.
SlippageMoments slippage_moments(const MarketParams& params, const TradingCurve& curve);

/// Q_T / (Q_T + q0).
double vwap_prime_factor(const MarketParams& params);
/// Parameters whose ordinary-VWAP problem is the problem benchmarked against
/// the VWAP that includes our own volume: impact and sigma scaled by the factor.
MarketParams vwap_prime_adjust(const MarketParams& params);

struct RelativePremium {
    double lambda_star = 0.0;
    std::vector<std::pair<double, double>> samples;  ///< (lambda, h(lambda)) from the scan
    int bisections = 0;
};

/// h(lambda) = lambda q0 S0 - G(q0) - objective at the lambda-optimal curve.
double break_even(const MarketParams& params, const SolverConfig& config, double lambda);

/// Largest root of h in [lo, hi] (hi <= 1). The bracket is scanned on 20
/// equispaced points, then the last sign change is bisected to 1e-7.
/// Throws NoSignChange with the scanned samples.
RelativePremium relative_premium_lambda(const MarketParams& params, const SolverConfig& config,
                                        double lo = -0.01, double hi = 0.01);

struct PricingConfig {
    SolverConfig solver;
    bool vwap_prime = false;
    bool relative = false;
    double lambda_lo = -0.01;
    double lambda_hi = 0.01;
};

struct PricingReport {
    double premium = 0.0;        ///< currency
    double premium_bps = 0.0;    ///< 1e4 premium / (q0 S0)
    double naive_premium = 0.0;  ///< currency, tracking curve
    double naive_premium_bps = 0.0;
    std::optional<double> lambda_star_bps;
    std::vector<std::pair<double, double>> lambda_samples;
    std::optional<double> vwap_prime_factor;
    double impact_integral = 0.0;  ///< G(q0), currency
    double objective_value = 0.0;  ///< currency
    double slippage_mean = 0.0;
    double slippage_std = 0.0;
    SolverDiagnostics diagnostics;
    TradingCurve curve;
};

/// Indifference premium pi = G(q0) + objective(q*). With `vwap_prime` the
/// computation runs on vwap_prime_adjust(params).
PricingReport premium(const MarketParams& params, const PricingConfig& config = {});

}  // namespace vwapguard
