/**
 * @file montecarlo.hpp
 * @brief Path simulation of the slippage X_T - q0 VWAP_T.
 *
 * Paths are keyed by (seed, path index): path i always sees the same Brownian
 * increments, whatever the thread count, and both simulation modes consume
 * them identically so their samples can be compared path by path.
 */

#pragma once

#include "vwapguard/models.hpp"
#include "vwapguard/pricing.hpp"
#include "vwapguard/trading_curve.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vwapguard {

enum class SimulationMode {
    FormulaSlippage,  ///< deterministic terms plus the Gaussian tracking-error integral
    FullSimulation,   ///< price path, cash account and VWAP simulated explicitly
};

struct SimulationSpec {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    std::size_t steps = 0;  ///< fine grid size; 0 means the curve's own grid
    SimulationMode mode = SimulationMode::FormulaSlippage;
    unsigned threads = 0;   ///< 0 means std::thread::hardware_concurrency()

    /// Fine-grid size for a curve with `curve_steps` cells. Throws
    /// InvalidParameter unless it is a positive multiple of curve_steps.
    std::size_t resolve_steps(std::size_t curve_steps) const;
    void validate() const;
};

struct SlippageSample {
    std::vector<double> values;  ///< currency, one per path
    double sample_mean = 0.0;
    double sample_var = 0.0;  ///< unbiased
    double standard_error = 0.0;

    static SlippageSample from_values(std::vector<double> values);
    double skewness() const;
    double excess_kurtosis() const;
};

/// Piecewise-linear interpolation of `curve` onto `steps` uniform cells
/// (`steps` must be a multiple of curve.steps()).
TradingCurve refine_curve(const TradingCurve& curve, std::size_t steps);

/// Slippage samples of a deterministic curve. The curve is linearly
/// interpolated onto the fine grid.
SlippageSample simulate_slippage(const MarketParams& params, const TradingCurve& curve,
                                 const SimulationSpec& spec);

/// Deterministic base curve plus the adapted feedback
///   q_t = base_t + gain q0 (T - t)/T M_t,   M_t = (1/T) int_0^t clip(W_s) ds,
/// with W clipped to +-clip sqrt(T). The perturbation vanishes at both ends, so
/// every path still sells exactly q0. gain = 0 is the base curve itself.
struct Policy {
    std::string name;
    TradingCurve base;
    double gain = 0.0;  ///< 1/sqrt(day)
    double clip = 4.0;
};

struct UtilityEstimate {
    std::string name;
    double utility = 0.0;  ///< estimate of E[-exp(-gamma slippage)]
    double standard_error = 0.0;
    double slippage_mean = 0.0;
    /// Paired difference against policy 0 under common random numbers.
    double diff_vs_first = 0.0;
    double diff_standard_error = 0.0;
};

/// Expected CARA utility of each policy under common random numbers. Slippage
/// is evaluated pathwise by the integrated-by-parts expression, which holds for
/// adapted strategies. Requires gamma > 0 and policies on the same grid.
std::vector<UtilityEstimate> utility_comparison(const MarketParams& params,
                                                const std::vector<Policy>& policies,
                                                const SimulationSpec& spec);

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v) noexcept;

struct MomentCheck {
    double analytic_mean = 0.0;
    double analytic_var = 0.0;
    double mean_error = 0.0;         ///< |sample mean - analytic mean|
    double mean_bound = 0.0;         ///< 3 SE
    double var_lo = 0.0, var_hi = 0.0;  ///< 99% chi-square interval for the sample variance
    double skewness = 0.0, skew_bound = 0.0;
    double kurtosis = 0.0, kurt_bound = 0.0;
    Verdict mean = Verdict::Inconclusive;
    Verdict variance = Verdict::Inconclusive;
    Verdict normality = Verdict::Inconclusive;
};

/// Compares a sample with the analytic Gaussian moments: mean within 3 SE,
/// variance inside the 99% chi-square interval, skewness and excess kurtosis
/// within 4 standard errors of 0. Samples smaller than 30 are inconclusive.
MomentCheck check_moments(const SlippageSample& sample, const SlippageMoments& analytic);

}  // namespace vwapguard
