#include "vwapguard/pricing.hpp"

#include "vwapguard/closed_forms.hpp"
#include "vwapguard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace vwapguard {

namespace {

constexpr int kScanPoints = 20;
constexpr double kLambdaWidth = 1e-7;

VolumeGrid grid_for(const MarketParams& params, const TradingCurve& curve) {
    params.validate();
    const std::size_t steps = curve.steps();
    if (steps < 2 || curve.q.size() != curve.t.size()) {
        throw GridMismatch("curve must carry matching t and q arrays with at least 3 nodes");
    }
    VolumeGrid grid = params.volume.discretize(steps);
    const double T = params.horizon;
    for (std::size_t j = 0; j <= steps; ++j) {
        if (std::abs(curve.t[j] - grid.t[j]) > 1e-12 * T) {
            throw GridMismatch("curve node " + std::to_string(j) + " is off the uniform grid");
        }
    }
    if (curve.q.front() != params.q0 || curve.q.back() != 0.0) {
        throw GridMismatch("curve must satisfy q[0] = q0 and q[J] = 0");
    }
    return grid;
}

// Per-cell pieces shared by objective() and slippage_moments().
struct CellSums {
    double cost = 0.0;      // sum tau V L(rate / V)
    double rebate = 0.0;    // sum tau (V / Q_T) F(q0 - q)
    double tracking = 0.0;  // sum tau (q/q0 - (1-lambda)(1 - Q/Q_T))^2
};

CellSums cell_sums(const MarketParams& params, double lambda, const TradingCurve& curve) {
    const VolumeGrid grid = grid_for(params, curve);
    const double q0 = params.q0;
    const double tau = grid.tau;
    const double total = grid.total();
    CellSums s;
    for (std::size_t j = 0; j + 1 < grid.t.size(); ++j) {
        const double v = grid.volume[j + 1];
        const double q = curve.q[j + 1];
        const double rate = (q - curve.q[j]) / tau;
        s.cost += tau * v * params.cost.value(rate / v);
        s.rebate += tau * v / total * params.impact.cumulative(q0 - q);
        const double gap = q / q0 - (1.0 - lambda) * (1.0 - grid.cumulative[j + 1] / total);
        s.tracking += tau * gap * gap;
    }
    return s;
}

}  // namespace

double objective(const MarketParams& params, double lambda, const TradingCurve& curve) {
    const CellSums s = cell_sums(params, lambda, curve);
    const double q0 = params.q0;
    const double gs2 = params.gamma * params.sigma * params.sigma;
    return s.cost - q0 * (1.0 - lambda) * s.rebate + 0.5 * gs2 * q0 * q0 * s.tracking;
}

SlippageMoments slippage_moments(const MarketParams& params, const TradingCurve& curve) {
    const CellSums s = cell_sums(params, 0.0, curve);
    const double q0 = params.q0;
    SlippageMoments m;
    m.mean = -impact_integral(params.impact, q0) - s.cost + q0 * s.rebate;
    m.variance = params.sigma * params.sigma * q0 * q0 * s.tracking;
    return m;
}

double vwap_prime_factor(const MarketParams& params) {
    const double total = params.volume.total();
    return total / (total + params.q0);
}

MarketParams vwap_prime_adjust(const MarketParams& params) {
    params.validate();
    const double c = vwap_prime_factor(params);
    MarketParams adjusted = params;
    adjusted.impact = params.impact.scaled(c);
    adjusted.sigma = params.sigma * c;
    return adjusted;
}

double break_even(const MarketParams& params, const SolverConfig& config, double lambda) {
    SolverConfig at = config;
    at.lambda = lambda;
    const SolveResult solved = solve(params, at);
    return lambda * params.q0 * params.s0 - impact_integral(params.impact, params.q0) -
           objective(params, lambda, solved.curve);
}

RelativePremium relative_premium_lambda(const MarketParams& params, const SolverConfig& config,
                                        double lo, double hi) {
    params.validate();
    config.validate();
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidParameter("pricing.lambda_lo", "bracket must satisfy lambda_lo < lambda_hi");
    }
    if (hi > 1.0) throw InvalidParameter("pricing.lambda_hi", "must be <= 1");

    RelativePremium out;
    std::vector<double> lambdas(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
        lambdas[i] = i + 1 == kScanPoints ? hi : lo + (hi - lo) * i / (kScanPoints - 1);
    }
    std::vector<std::future<double>> pending;
    pending.reserve(lambdas.size());
    for (double lambda : lambdas) {
        pending.push_back(std::async(std::launch::async,
                                     [&params, &config, lambda] { return break_even(params, config, lambda); }));
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) out.samples.emplace_back(lambdas[i], pending[i].get());

    // lambda* = sup{h <= 0}: take the last scanned cell where h goes from <= 0 to > 0.
    int cell = -1;
    for (int i = kScanPoints - 2; i >= 0; --i) {
        if (out.samples[i].second <= 0.0 && out.samples[i + 1].second > 0.0) {
            cell = i;
            break;
        }
    }
    if (cell < 0) {
        throw NoSignChange("break-even function has no sign change on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]",
                           out.samples);
    }

    double a = out.samples[cell].first;
    double ha = out.samples[cell].second;
    double b = out.samples[cell + 1].first;
    double hb = out.samples[cell + 1].second;
    while (b - a > kLambdaWidth) {
        const double mid = 0.5 * (a + b);
        const double hm = break_even(params, config, mid);
        ++out.bisections;
        if (hm <= 0.0) {
            a = mid;
            ha = hm;
        } else {
            b = mid;
            hb = hm;
        }
    }
    // Secant point of the final bracket.
    out.lambda_star = ha == hb ? a : std::clamp(a - ha * (b - a) / (hb - ha), a, b);
    return out;
}

PricingReport premium(const MarketParams& input, const PricingConfig& config) {
    input.validate();
    config.solver.validate();
    const MarketParams params = config.vwap_prime ? vwap_prime_adjust(input) : input;

    PricingReport report;
    if (config.vwap_prime) report.vwap_prime_factor = vwap_prime_factor(input);

    SolverConfig at_zero = config.solver;
    at_zero.lambda = 0.0;
    SolveResult solved = solve(params, at_zero);
    report.diagnostics = solved.diagnostics;

    const double notional = params.q0 * params.s0;
    report.impact_integral = impact_integral(params.impact, params.q0);
    report.objective_value = objective(params, 0.0, solved.curve);
    report.premium = report.impact_integral + report.objective_value;
    report.premium_bps = 1e4 * report.premium / notional;

    const TradingCurve naive = tracking_curve(params, at_zero.steps);
    report.naive_premium = report.impact_integral + objective(params, 0.0, naive);
    report.naive_premium_bps = 1e4 * report.naive_premium / notional;

    const SlippageMoments moments = slippage_moments(params, solved.curve);
    report.slippage_mean = moments.mean;
    report.slippage_std = std::sqrt(moments.variance);

    if (config.relative) {
        RelativePremium rel = relative_premium_lambda(params, config.solver, config.lambda_lo, config.lambda_hi);
        report.lambda_star_bps = 1e4 * rel.lambda_star;
        report.lambda_samples = std::move(rel.samples);
    }
    report.curve = std::move(solved.curve);
    return report;
}

}  // namespace vwapguard
