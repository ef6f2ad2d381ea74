#include "vwapguard/solver.hpp"

#include "vwapguard/closed_forms.hpp"
#include "vwapguard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace vwapguard {

namespace {

// Distance to q0, in units of q0, below which the impact density and its
// slope are evaluated at this floor instead (the Power kind is singular there).
constexpr double kImpactFloor = 1e-8;
// |d delta q_J / d delta p_0| (delta q in units of q0) below which shooting is singular.
constexpr double kShootingFloor = 1e-14;
// Shooting is abandoned when the homogeneous sweep dwarfs the combined solution
// by more than this factor (catastrophic cancellation for stiff problems).
constexpr double kShootingCancellation = 1e10;

double sign(double x) { return (x > 0.0) - (x < 0.0); }

struct LinearStep {
    std::vector<double> dq;  // size J+1, dq[0] = dq[J] = 0
    double dp0 = 0.0;
    bool used_fallback = false;
};

// Discrete Hamiltonian system on a fixed grid.
class DiscreteSystem {
public:
    DiscreteSystem(const MarketParams& params, const SolverConfig& config)
        : params_(params),
          grid_(params.volume.discretize(config.steps)),
          lambda_(config.lambda),
          fallback_allowed_(config.shooting_fallback) {}

    std::size_t steps() const { return grid_.steps(); }
    const VolumeGrid& grid() const { return grid_; }

    // Seed of the adjoint recursion implied by the first increment: p_0 = L'((q_1 - q_0)/(tau V_1)).
    double implied_seed(const std::vector<double>& q) const {
        return params_.cost.slope((q[1] - q[0]) / (grid_.tau * grid_.volume[1]));
    }

    std::vector<double> propagate_adjoint(const std::vector<double>& q, double p0) const {
        const std::size_t J = steps();
        std::vector<double> p(J + 1);
        p[0] = p0;
        for (std::size_t j = 0; j < J; ++j) {
            p[j + 1] = p[j] + grid_.tau * drift(j + 1, q[j + 1]);
        }
        return p;
    }

    std::vector<double> defects(const std::vector<double>& q, const std::vector<double>& p) const {
        const std::size_t J = steps();
        std::vector<double> r(J);
        for (std::size_t j = 0; j < J; ++j) {
            r[j] = q[j + 1] - q[j] - grid_.tau * grid_.volume[j + 1] * params_.cost.conjugate_slope(p[j]);
        }
        return r;
    }

    static double sup_norm(const std::vector<double>& r) {
        double m = 0.0;
        for (double x : r) m = std::max(m, std::abs(x));
        return std::isfinite(m) ? m : std::numeric_limits<double>::infinity();
    }

    // Newton correction for the current iterate (q, p) with defects r.
    LinearStep linear_step(const std::vector<double>& q, const std::vector<double>& p,
                           const std::vector<double>& r) const {
        const std::size_t J = steps();
        const double tau = grid_.tau;
        std::vector<double> d(J);      // tau V_{j+1} H''(p_j)
        std::vector<double> c(J + 1);  // d g_i / d q_i
        for (std::size_t j = 0; j < J; ++j) {
            d[j] = tau * grid_.volume[j + 1] * params_.cost.conjugate_curvature_regularized(p[j]);
        }
        for (std::size_t i = 1; i <= J; ++i) c[i] = drift_slope(i, q[i]);

        // Particular (delta p_0 = 0) and homogeneous (delta p_0 = 1, r = 0) sweeps.
        std::vector<double> a(J + 1, 0.0), b(J + 1, 0.0);
        double ap = 0.0, bp = 1.0;
        double bmax = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            a[j + 1] = a[j] + d[j] * ap - r[j];
            b[j + 1] = b[j] + d[j] * bp;
            ap += tau * c[j + 1] * a[j + 1];
            bp += tau * c[j + 1] * b[j + 1];
            bmax = std::max(bmax, std::abs(b[j + 1]));
        }

        const double q0 = params_.q0;
        const bool shootable = std::isfinite(b[J]) && std::isfinite(a[J]) &&
                               std::abs(b[J]) / q0 >= kShootingFloor;
        if (shootable) {
            const double s = -a[J] / b[J];
            LinearStep step;
            step.dp0 = s;
            step.dq.resize(J + 1);
            double dq_max = 0.0;
            for (std::size_t j = 0; j <= J; ++j) {
                step.dq[j] = a[j] + s * b[j];
                dq_max = std::max(dq_max, std::abs(step.dq[j]));
            }
            step.dq[0] = 0.0;
            step.dq[J] = 0.0;
            const bool well_conditioned =
                std::abs(s) * bmax <= kShootingCancellation * std::max(dq_max, 1e-300 * q0);
            if (well_conditioned || !fallback_allowed_) return step;
        } else if (!fallback_allowed_) {
            throw SingularLinearSystem("shooting denominator |d dq_J / d dp_0| below 1e-14");
        }
        return tridiagonal_step(d, c, r);
    }

private:
    double impact_distance(double q) const {
        return std::max(std::abs(params_.q0 - q), kImpactFloor * params_.q0);
    }

    double drift(std::size_t i, double q) const {
        const double q0 = params_.q0;
        const double tracking = q0 * (1.0 - lambda_) * (1.0 - grid_.cumulative[i] / grid_.total());
        double g = params_.gamma * params_.sigma * params_.sigma * (q - tracking);
        if (!params_.impact.is_zero()) {
            g += q0 * (1.0 - lambda_) * grid_.volume[i] / grid_.total() *
                 params_.impact.density(impact_distance(q));
        }
        return g;
    }

    double drift_slope(std::size_t i, double q) const {
        double c = params_.gamma * params_.sigma * params_.sigma;
        if (!params_.impact.is_zero()) {
            const double q0 = params_.q0;
            const double fprime = params_.impact.density_slope(impact_distance(q));
            if (!std::isfinite(fprime)) {
                throw ImpactDerivativeUnavailable("impact density slope is not finite at distance " +
                                                  std::to_string(impact_distance(q)) + " from q0");
            }
            c -= sign(q0 - q) * q0 * (1.0 - lambda_) * grid_.volume[i] / grid_.total() * fprime;
        }
        return c;
    }

    // Eliminating delta p from the linear system leaves a tridiagonal system in
    // delta q_1..delta q_{J-1}:
    //   -dq_{i-1}/d_{i-1} + (1/d_{i-1} + 1/d_i + tau c_i) dq_i - dq_{i+1}/d_i
    //       = r_i/d_i - r_{i-1}/d_{i-1}.
    LinearStep tridiagonal_step(const std::vector<double>& d, const std::vector<double>& c,
                                const std::vector<double>& r) const {
        const std::size_t J = steps();
        const double tau = grid_.tau;
        const std::size_t n = J - 1;
        std::vector<double> lower(n), diag(n), upper(n), rhs(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = k + 1;
            const double inv_prev = 1.0 / d[i - 1];
            const double inv_next = 1.0 / d[i];
            lower[k] = -inv_prev;
            upper[k] = -inv_next;
            diag[k] = inv_prev + inv_next + tau * c[i];
            rhs[k] = r[i] * inv_next - r[i - 1] * inv_prev;
        }
        // Thomas algorithm.
        for (std::size_t k = 1; k < n; ++k) {
            if (diag[k - 1] == 0.0 || !std::isfinite(diag[k - 1])) {
                throw SingularLinearSystem("zero pivot in tridiagonal Newton system");
            }
            const double m = lower[k] / diag[k - 1];
            diag[k] -= m * upper[k - 1];
            rhs[k] -= m * rhs[k - 1];
        }
        if (diag[n - 1] == 0.0 || !std::isfinite(diag[n - 1])) {
            throw SingularLinearSystem("zero pivot in tridiagonal Newton system");
        }
        LinearStep step;
        step.used_fallback = true;
        step.dq.assign(J + 1, 0.0);
        step.dq[n] = rhs[n - 1] / diag[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) {
            step.dq[k + 1] = (rhs[k] - upper[k] * step.dq[k + 2]) / diag[k];
        }
        step.dp0 = (step.dq[1] + r[0]) / d[0];
        for (double x : step.dq) {
            if (!std::isfinite(x)) throw SingularLinearSystem("non-finite tridiagonal Newton solution");
        }
        return step;
    }

    const MarketParams& params_;
    VolumeGrid grid_;
    double lambda_;
    bool fallback_allowed_;
};

void check_grid(const DiscreteSystem& system, const TradingCurve& curve, double q0) {
    const std::size_t J = system.steps();
    if (curve.q.size() != J + 1 || curve.t.size() != J + 1) {
        throw GridMismatch("curve has " + std::to_string(curve.q.size()) + " nodes, grid has " +
                           std::to_string(J + 1));
    }
    if (curve.has_adjoint() && curve.p.size() != J + 1) {
        throw GridMismatch("adjoint length does not match the grid");
    }
    const double T = system.grid().t.back();
    if (std::abs(curve.t.back() - T) > 1e-12 * T) throw GridMismatch("curve horizon differs from T");
    if (curve.q.front() != q0 || curve.q.back() != 0.0) {
        throw GridMismatch("curve must satisfy q[0] = q0 and q[J] = 0");
    }
}

double seed_of(const DiscreteSystem& system, const TradingCurve& curve) {
    return curve.has_adjoint() ? curve.p.front() : system.implied_seed(curve.q);
}

}  // namespace

void SolverConfig::validate() const {
    if (steps < 2) throw InvalidParameter("solver.steps", "must be >= 2");
    if (tol && !(*tol > 0.0)) throw InvalidParameter("solver.tol", "must be > 0");
    if (max_iter < 1) throw InvalidParameter("solver.max_iter", "must be >= 1");
    if (damping < 0) throw InvalidParameter("solver.damping", "must be >= 0");
    if (!(lambda <= 1.0)) throw InvalidParameter("solver.lambda", "must be <= 1");
}

double residual(const MarketParams& params, const SolverConfig& config, const TradingCurve& curve) {
    params.validate();
    config.validate();
    const DiscreteSystem system(params, config);
    check_grid(system, curve, params.q0);
    const auto p = system.propagate_adjoint(curve.q, seed_of(system, curve));
    return DiscreteSystem::sup_norm(system.defects(curve.q, p));
}

TradingCurve newton_step(const MarketParams& params, const SolverConfig& config,
                         const TradingCurve& current) {
    params.validate();
    config.validate();
    const DiscreteSystem system(params, config);
    check_grid(system, current, params.q0);
    const double p0 = seed_of(system, current);
    const auto p = system.propagate_adjoint(current.q, p0);
    const auto r = system.defects(current.q, p);
    const LinearStep step = system.linear_step(current.q, p, r);

    TradingCurve next = current;
    for (std::size_t j = 1; j < system.steps(); ++j) next.q[j] += step.dq[j];
    next.p = system.propagate_adjoint(next.q, p0 + step.dp0);
    return next;
}

SolveResult solve(const MarketParams& params, const SolverConfig& config) {
    params.validate();
    config.validate();
    return solve(params, config, tracking_curve(params, config.steps));
}

SolveResult solve(const MarketParams& params, const SolverConfig& config, TradingCurve initial) {
    params.validate();
    config.validate();
    const DiscreteSystem system(params, config);
    check_grid(system, initial, params.q0);
    const std::size_t J = system.steps();
    const double tol = config.tolerance_for(params.q0);

    std::vector<double> q = std::move(initial.q);
    double p0 = initial.has_adjoint() ? initial.p.front() : system.implied_seed(q);
    std::vector<double> p = system.propagate_adjoint(q, p0);
    double res = DiscreteSystem::sup_norm(system.defects(q, p));

    SolverDiagnostics diag;
    while (res > tol && diag.iterations < config.max_iter) {
        const LinearStep step = system.linear_step(q, p, system.defects(q, p));
        diag.fallback_solves += step.used_fallback ? 1 : 0;
        ++diag.iterations;

        // Backtracking on the defect sup-norm. The iteration stalls when no
        // damped step improves.
        double scale = 1.0;
        std::vector<double> trial_q(q.size());
        std::vector<double> trial_p;
        double trial_res = res;
        for (int halving = 0; halving <= config.damping; ++halving, scale *= 0.5) {
            for (std::size_t j = 0; j <= J; ++j) trial_q[j] = q[j] + scale * step.dq[j];
            trial_q[0] = params.q0;
            trial_q[J] = 0.0;
            trial_p = system.propagate_adjoint(trial_q, p0 + scale * step.dp0);
            trial_res = DiscreteSystem::sup_norm(system.defects(trial_q, trial_p));
            if (trial_res < res) break;
        }
        if (!(trial_res < res)) break;
        q.swap(trial_q);
        p.swap(trial_p);
        p0 = p.front();
        res = trial_res;
    }

    diag.final_residual = res;
    diag.converged = res <= tol;
    if (!diag.converged) throw NonConvergence(res, diag.iterations);

    for (std::size_t j = 0; j <= J; ++j) {
        if (q[j] < 0.0) diag.oversell_detected = true;
        if (j > 0 && j < J && q[j] >= params.q0 - tol) diag.touched_q0 = true;
    }

    SolveResult result;
    result.curve.t = system.grid().t;
    result.curve.q = std::move(q);
    result.curve.p = std::move(p);
    result.diagnostics = diag;
    return result;
}

}  // namespace vwapguard
