/**
 * @file solver.hpp
 * @brief Newton solver for the discrete Hamiltonian boundary value problem.
 *
 * On the grid t_j = j tau (tau = T/J) the optimal inventory q and adjoint p solve
 *
 *   p_{j+1} = p_j + tau g_{j+1}(q_{j+1})
 *   q_{j+1} = q_j + tau V_{j+1} H'(p_j),            q_0 = q0,  q_J = 0,
 *
 *   g_i(q) = gamma sigma^2 (q - q0 (1-lambda)(1 - Q_i/Q_J))
 *            + q0 (1-lambda) (V_i/Q_J) f(|q0 - q|).
 *
 * The adjoint is never an independent unknown beyond its seed p_0: every
 * iterate regenerates p_1..p_J from (p_0, q) by the forward recursion, so the
 * p-equation holds exactly and Newton acts on the q-equation defect
 *
 *   r_j = q_{j+1} - q_j - tau V_{j+1} H'(p_j),   j = 0..J-1.
 *
 * The linearised system is solved by linear shooting on delta p_0 (two forward
 * sweeps and one scalar division), falling back to an equivalent tridiagonal
 * elimination in delta q when shooting is ill-conditioned.
 */

#pragma once

#include "vwapguard/models.hpp"
#include "vwapguard/trading_curve.hpp"

#include <cstddef>
#include <optional>

namespace vwapguard {

struct SolverConfig {
    std::size_t steps = 2000;    ///< J, number of grid cells
    std::optional<double> tol;   ///< sup-norm of the q-defect in shares; default 1e-6 q0
    int max_iter = 50;
    int damping = 20;            ///< maximum number of step halvings per iteration
    double lambda = 0.0;         ///< relative-pricing factor, <= 1
    bool shooting_fallback = true;  ///< allow the tridiagonal solve when shooting is singular

    double tolerance_for(double q0) const { return tol.value_or(1e-6 * q0); }
    /// Throws InvalidParameter naming the violated field.
    void validate() const;
};

struct SolverDiagnostics {
    int iterations = 0;
    double final_residual = 0.0;  ///< shares
    bool converged = false;
    bool oversell_detected = false;  ///< min_j q_j < 0
    bool touched_q0 = false;         ///< some interior q_j >= q0 - tol
    int fallback_solves = 0;         ///< linear solves that needed the tridiagonal path
};

struct SolveResult {
    TradingCurve curve;
    SolverDiagnostics diagnostics;
};

/// Solves from the tracking initial guess q_j = q0 (1 - Q_j/Q_J).
/// Throws NonConvergence, SingularLinearSystem or ImpactDerivativeUnavailable.
SolveResult solve(const MarketParams& params, const SolverConfig& config);

/// Solves from a caller-provided initial guess (its p[0], when present, seeds the adjoint).
SolveResult solve(const MarketParams& params, const SolverConfig& config, TradingCurve initial);

/// sup_j |q_{j+1} - q_j - tau V_{j+1} H'(p_j)| with p regenerated from the
/// curve's p[0] (or from L' of the first increment when the curve has no adjoint).
/// Throws GridMismatch when the curve is not on the config grid.
double residual(const MarketParams& params, const SolverConfig& config, const TradingCurve& curve);

/// One undamped Newton update of (q, p). The returned curve carries the
/// regenerated adjoint.
TradingCurve newton_step(const MarketParams& params, const SolverConfig& config,
                         const TradingCurve& current);

}  // namespace vwapguard
