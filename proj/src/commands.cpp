#include "vwapguard/commands.hpp"

#include "vwapguard/closed_forms.hpp"
#include "vwapguard/montecarlo.hpp"
#include "vwapguard/pricing.hpp"
#include "vwapguard/solver.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace vwapguard {

namespace {

class Report {
public:
    void line(const std::string& key, double value, const std::string& unit) {
        out_ << key << " = " << format_number(value) << ' ' << unit << '\n';
    }
    void line(const std::string& key, const std::string& text) { out_ << key << " = " << text << '\n'; }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

MarketParams effective_market(const RunConfig& config) {
    return config.pricing.vwap_prime ? vwap_prime_adjust(config.market) : config.market;
}

void diagnostics_lines(Report& r, const SolverDiagnostics& d) {
    r.line("solver_iterations", d.iterations, "iterations");
    r.line("solver_final_residual", d.final_residual, "shares");
    r.line("solver_converged", d.converged ? "true" : "false");
    r.line("solver_oversell_detected", d.oversell_detected ? "true" : "false");
    r.line("solver_touched_q0", d.touched_q0 ? "true" : "false");
}

}  // namespace

std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::string curve_csv(const TradingCurve& optimal, const TradingCurve& naive) {
    std::string out = "t,q_star,q_naive,p\n";
    for (std::size_t j = 0; j < optimal.q.size(); ++j) {
        out += format_number(optimal.t[j]);
        out += ',';
        out += format_number(optimal.q[j]);
        out += ',';
        out += format_number(naive.q[j]);
        out += ',';
        out += optimal.has_adjoint() ? format_number(optimal.p[j]) : std::string();
        out += '\n';
    }
    return out;
}

std::string run_curve(const RunConfig& config) {
    const MarketParams params = effective_market(config);
    const SolveResult solved = solve(params, config.solver());
    return curve_csv(solved.curve, tracking_curve(params, config.solver().steps));
}

std::string run_price(const RunConfig& config) {
    const PricingReport p = premium(config.market, config.pricing);
    Report r;
    r.line("premium", p.premium, "currency");
    r.line("premium_bps", p.premium_bps, "bps");
    r.line("naive_premium", p.naive_premium, "currency");
    r.line("naive_premium_bps", p.naive_premium_bps, "bps");
    if (p.lambda_star_bps) r.line("lambda_star_bps", *p.lambda_star_bps, "bps");
    if (p.vwap_prime_factor) {
        r.line("vwap_prime_factor", *p.vwap_prime_factor, "ratio");
        r.line("vwap_prime_premium", p.premium, "currency");
    }
    r.line("impact_integral", p.impact_integral, "currency");
    r.line("objective_value", p.objective_value, "currency");
    r.line("slippage_mean", p.slippage_mean, "currency");
    r.line("slippage_std", p.slippage_std, "currency");
    diagnostics_lines(r, p.diagnostics);
    return r.str();
}

VerifyResult run_verify(const RunConfig& config) {
    const MarketParams params = effective_market(config);
    PricingConfig pricing = config.pricing;
    pricing.vwap_prime = false;
    pricing.relative = false;
    const PricingReport priced = premium(params, pricing);

    const std::size_t steps = config.mc.resolve_steps(config.solver().steps);
    const SlippageMoments analytic = slippage_moments(params, refine_curve(priced.curve, steps));
    const SlippageSample sample = simulate_slippage(params, priced.curve, config.mc);
    const MomentCheck check = check_moments(sample, analytic);
    const bool full = config.mc.mode == SimulationMode::FullSimulation;

    Report r;
    r.line("mode", full ? "full" : "formula");
    r.line("n_paths", static_cast<double>(config.mc.n_paths), "paths");
    r.line("steps", static_cast<double>(steps), "cells");
    r.line("seed", std::to_string(config.mc.seed));
    r.line("analytic_mean", analytic.mean, "currency");
    r.line("sample_mean", sample.sample_mean, "currency");
    r.line("standard_error", sample.standard_error, "currency");
    r.line("mean_check", std::string(to_string(check.mean)) + " (|error| " + format_number(check.mean_error) +
                             " currency, bound 3 SE = " + format_number(check.mean_bound) + " currency)");
    r.line("analytic_variance", analytic.variance, "currency^2");
    r.line("sample_variance", sample.sample_var, "currency^2");
    r.line("variance_check", std::string(to_string(check.variance)) + " (99% chi-square interval [" +
                                 format_number(check.var_lo) + ", " + format_number(check.var_hi) + "] currency^2)");
    r.line("normality_check", std::string(to_string(check.normality)) + " (skewness " +
                                  format_number(check.skewness) + " vs " + format_number(check.skew_bound) +
                                  ", excess kurtosis " + format_number(check.kurtosis) + " vs " +
                                  format_number(check.kurt_bound) + ")");

    bool failed = check.mean == Verdict::Fail || check.variance == Verdict::Fail || check.normality == Verdict::Fail;
    if (full) {
        SimulationSpec formula = config.mc;
        formula.mode = SimulationMode::FormulaSlippage;
        const SlippageSample reference = simulate_slippage(params, priced.curve, formula);
        double gap = 0.0;
        for (std::size_t i = 0; i < sample.values.size(); ++i) gap += std::abs(sample.values[i] - reference.values[i]);
        gap /= static_cast<double>(sample.values.size());
        const double bound = 1e-3 * std::abs(priced.naive_premium);
        const bool ok = gap <= bound;
        failed = failed || !ok;
        r.line("pathwise_identity_check", std::string(ok ? "PASS" : "FAIL") + " (mean |full - formula| " +
                                              format_number(gap) + " currency, bound " + format_number(bound) +
                                              " currency)");
    }
    return {r.str(), failed};
}

}  // namespace vwapguard
