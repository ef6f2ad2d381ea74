#include "vwapguard/closed_forms.hpp"

#include "vwapguard/errors.hpp"

#include <cmath>

namespace vwapguard {

namespace {

// Below this value of kappa T the second-order expansion of w is used.
constexpr double kSmallKappaT = 1e-6;

std::vector<double> uniform_nodes(double horizon, std::size_t steps) {
    // Same node placement as VolumeProfile::discretize.
    const double tau = horizon / static_cast<double>(steps);
    std::vector<double> t(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        t[j] = j == steps ? horizon : static_cast<double>(j) * tau;
    }
    return t;
}

void require_steps(std::size_t steps) {
    if (steps < 2) throw InvalidParameter("solver.steps", "must be >= 2");
}

void require_flat_linear_quadratic(const MarketParams& params) {
    params.validate();
    if (!params.volume.is_flat()) throw ModelMismatch("closed form requires a flat volume profile");
    if (params.cost.kind() != CostSpec::Kind::Quadratic) {
        throw ModelMismatch("closed form requires a quadratic cost");
    }
    if (params.impact.kind() == ImpactSpec::Kind::Power) {
        throw ModelMismatch("closed form requires linear (or zero) permanent impact");
    }
}

}  // namespace

FlatLinearQuadratic::FlatLinearQuadratic(const MarketParams& params) {
    require_flat_linear_quadratic(params);
    horizon_ = params.horizon;
    volume_ = params.volume.rates().front();
    k_ = params.impact.k();
    eta_ = params.cost.eta();
    gamma_sigma2_ = params.gamma * params.sigma * params.sigma;
    kappa_ = std::sqrt(gamma_sigma2_ * volume_ / (2.0 * eta_));
}

// With a = kappa t / 2 and b = kappa (T - t) / 2,
//   sinh(kappa t)[tanh(kappa T/2) - tanh(kappa t/2)] = 2 sinh(a) sinh(b) / cosh(a + b)
//     = expm1(-2a) expm1(-2b) / (1 + exp(-kappa T)),
// which neither overflows for large kappa T nor cancels for small kappa T.
double FlatLinearQuadratic::w(double t) const {
    const double T = horizon_;
    if (k_ == 0.0) return 0.0;
    if (kappa_ * T < kSmallKappaT) {
        const double k2 = kappa_ * kappa_;
        return k_ * volume_ * t * (T - t) / (4.0 * eta_ * T) * (1.0 - k2 * (T * T + T * t - t * t) / 12.0);
    }
    const double amp = k_ / (gamma_sigma2_ * T);
    const double a = 0.5 * kappa_ * t;
    const double b = 0.5 * kappa_ * (T - t);
    return amp * std::expm1(-2.0 * a) * std::expm1(-2.0 * b) / (1.0 + std::exp(-kappa_ * T));
}

double FlatLinearQuadratic::w_prime(double t) const {
    const double T = horizon_;
    if (k_ == 0.0) return 0.0;
    if (kappa_ * T < kSmallKappaT) {
        const double k2 = kappa_ * kappa_;
        return k_ * volume_ * (T - 2.0 * t) / (4.0 * eta_ * T) *
               (1.0 - k2 * (T * T + 2.0 * T * t - 2.0 * t * t) / 12.0);
    }
    const double amp = k_ / (gamma_sigma2_ * T);
    const double a = 0.5 * kappa_ * t;
    const double b = 0.5 * kappa_ * (T - t);
    const double ea = -std::expm1(-2.0 * a);
    const double eb = -std::expm1(-2.0 * b);
    return amp * kappa_ * (std::exp(-2.0 * a) * eb - ea * std::exp(-2.0 * b)) /
           (1.0 + std::exp(-kappa_ * T));
}

TradingCurve tracking_curve(const MarketParams& params, std::size_t steps) {
    params.validate();
    require_steps(steps);
    const VolumeGrid grid = params.volume.discretize(steps);
    TradingCurve curve;
    curve.t = grid.t;
    curve.q.resize(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        curve.q[j] = params.q0 * (1.0 - grid.cumulative[j] / grid.total());
    }
    curve.q[0] = params.q0;
    curve.q[steps] = 0.0;
    return curve;
}

TradingCurve no_impact_curve(const MarketParams& params, std::size_t steps) {
    if (!params.impact.is_zero()) throw ModelMismatch("no_impact_curve requires zero permanent impact");
    TradingCurve curve = tracking_curve(params, steps);
    // Constant adjoint: L'(-q0 / Q_T).
    curve.p.assign(steps + 1, params.cost.slope(-params.q0 / params.volume.total()));
    return curve;
}

double no_impact_premium(const MarketParams& params) {
    params.validate();
    if (!params.impact.is_zero()) throw ModelMismatch("no_impact_premium requires zero permanent impact");
    const double total = params.volume.total();
    return total * params.cost.value(params.q0 / total);
}

TradingCurve ac_curve(const MarketParams& params, std::size_t steps) {
    require_steps(steps);
    const FlatLinearQuadratic model(params);
    if (params.gamma == 0.0) {
        throw ModelMismatch("ac_curve requires gamma > 0; use risk_neutral_curve_and_premium");
    }
    const double T = params.horizon;
    const double q0 = params.q0;
    const double eta = params.cost.eta();
    const double V = params.volume.rates().front();

    TradingCurve curve;
    curve.t = uniform_nodes(T, steps);
    curve.q.resize(steps + 1);
    curve.p.resize(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        const double t = curve.t[j];
        curve.q[j] = q0 * (1.0 - t / T) - q0 * model.w(t);
        const double qdot = -q0 / T - q0 * model.w_prime(t);
        curve.p[j] = 2.0 * eta * qdot / V;
    }
    curve.q[0] = q0;
    curve.q[steps] = 0.0;
    return curve;
}

double ac_premium(const MarketParams& params, std::size_t steps) {
    require_steps(steps);
    const FlatLinearQuadratic model(params);
    if (params.gamma == 0.0) {
        throw ModelMismatch("ac_premium requires gamma > 0; use risk_neutral_curve_and_premium");
    }
    const double T = params.horizon;
    const double q0 = params.q0;
    const double eta = params.cost.eta();
    const double V = params.volume.rates().front();
    const double k = params.impact.k();
    const double gs2 = params.gamma * params.sigma * params.sigma;

    auto integrand = [&](double t) {
        const double w = model.w(t);
        const double wp = model.w_prime(t);
        return eta / V * wp * wp - k / T * w + 0.5 * gs2 * w * w;
    };

    // Composite Simpson on 10x the solver grid (an even number of panels).
    const std::size_t n = 10 * steps;
    const double h = T / static_cast<double>(n);
    double sum = integrand(0.0) + integrand(T);
    for (std::size_t i = 1; i < n; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(h * static_cast<double>(i));
    }
    const double correction = sum * h / 3.0;
    return eta / (V * T) * q0 * q0 + q0 * q0 * correction;
}

std::pair<TradingCurve, double> risk_neutral_curve_and_premium(const MarketParams& params,
                                                               std::size_t steps) {
    require_steps(steps);
    require_flat_linear_quadratic(params);
    const double T = params.horizon;
    const double q0 = params.q0;
    const double eta = params.cost.eta();
    const double V = params.volume.rates().front();
    const double k = params.impact.k();
    const double slope = k * V / (4.0 * eta);

    TradingCurve curve;
    curve.t = uniform_nodes(T, steps);
    curve.q.resize(steps + 1);
    curve.p.resize(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        const double t = curve.t[j];
        curve.q[j] = q0 * (1.0 - t / T) * (1.0 - slope * t);
        const double qdot = q0 * (-(1.0 - slope * t) / T - (1.0 - t / T) * slope);
        curve.p[j] = 2.0 * eta * qdot / V;
    }
    curve.q[0] = q0;
    curve.q[steps] = 0.0;

    const double premium = eta * q0 * q0 / (V * T) - k * k * V * T * q0 * q0 / (48.0 * eta);
    return {std::move(curve), premium};
}

}  // namespace vwapguard
