#pragma once

#include "vwapguard/models.hpp"
#include "vwapguard/montecarlo.hpp"
#include "vwapguard/pricing.hpp"
#include "vwapguard/solver.hpp"

#include <iosfwd>
#include <string>

namespace vwapguard {

/// Everything one CLI invocation needs. Loaded from an INI-style file:
///
///   [market]  q0, T, S0, sigma, gamma
///   [cost]    kind = quadratic | power_law | power_law_plus_linear; eta, phi, psi
///   [impact]  kind = zero | linear | power; k, alpha
///   [volume]  kind = flat | table; value (flat); times, values (comma lists, table)
///   [solver]  steps, tol, max_iter, damping
///   [pricing] vwap_prime, relative, lambda_lo, lambda_hi
///   [mc]      n_paths, seed, mode = formula | full, steps
///   [output]  curve, report
struct RunConfig {
    MarketParams market;
    PricingConfig pricing;  ///< pricing.solver holds the solver controls
    SimulationSpec mc;
    std::string curve_path;
    std::string report_path;

    const SolverConfig& solver() const noexcept { return pricing.solver; }
};

/// Throws InvalidParameter naming "section.key" for every malformed, missing,
/// unknown or out-of-range entry.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

}  // namespace vwapguard
