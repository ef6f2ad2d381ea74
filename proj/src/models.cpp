#include "vwapguard/models.hpp"

#include "vwapguard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vwapguard {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw InvalidParameter(field, what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

// ---------------------------------------------------------------------------
// CostSpec

CostSpec::CostSpec(Kind kind, double eta, double phi, double psi)
    : kind_(kind), eta_(eta), phi_(phi), psi_(psi) {}

CostSpec CostSpec::quadratic(double eta) {
    require(finite_positive(eta), "cost.eta", "must be finite and > 0");
    return CostSpec(Kind::Quadratic, eta, 1.0, 0.0);
}

CostSpec CostSpec::power_law(double eta, double phi) {
    require(finite_positive(eta), "cost.eta", "must be finite and > 0");
    require(finite_positive(phi), "cost.phi", "must be finite and > 0");
    return CostSpec(Kind::PowerLaw, eta, phi, 0.0);
}

CostSpec CostSpec::power_law_plus_linear(double eta, double phi, double psi) {
    require(finite_positive(eta), "cost.eta", "must be finite and > 0");
    require(finite_positive(phi), "cost.phi", "must be finite and > 0");
    require(std::isfinite(psi) && psi >= 0.0, "cost.psi", "must be finite and >= 0");
    return CostSpec(Kind::PowerLawPlusLinear, eta, phi, psi);
}

double CostSpec::value(double rho) const {
    const double a = std::abs(rho);
    switch (kind_) {
        case Kind::Quadratic: return eta_ * rho * rho;
        case Kind::PowerLaw: return eta_ * std::pow(a, 1.0 + phi_);
        case Kind::PowerLawPlusLinear: return eta_ * std::pow(a, 1.0 + phi_) + psi_ * a;
    }
    return 0.0;
}

double CostSpec::slope(double rho) const {
    switch (kind_) {
        case Kind::Quadratic: return 2.0 * eta_ * rho;
        case Kind::PowerLaw:
            return sign(rho) * (1.0 + phi_) * eta_ * std::pow(std::abs(rho), phi_);
        case Kind::PowerLawPlusLinear:
            return sign(rho) * ((1.0 + phi_) * eta_ * std::pow(std::abs(rho), phi_) + psi_);
    }
    return 0.0;
}

double CostSpec::shrink(double p) const {
    if (psi_ == 0.0) return p;
    return sign(p) * std::max(std::abs(p) - psi_, 0.0);
}

// With c = (1+phi) eta the first-order condition p = c sign(rho)|rho|^phi gives
//   H'(p)  = sign(p) (|p|/c)^(1/phi)
//   H(p)   = phi/(1+phi) |p| (|p|/c)^(1/phi)
//   H''(p) = (|p|/c)^(1/phi - 1) / (phi c)
double CostSpec::pl_conjugate(double p) const {
    const double c = (1.0 + phi_) * eta_;
    const double a = std::abs(p);
    return phi_ / (1.0 + phi_) * a * std::pow(a / c, 1.0 / phi_);
}

double CostSpec::pl_conjugate_slope(double p) const {
    const double c = (1.0 + phi_) * eta_;
    return sign(p) * std::pow(std::abs(p) / c, 1.0 / phi_);
}

double CostSpec::pl_conjugate_curvature(double p) const {
    const double c = (1.0 + phi_) * eta_;
    return std::pow(std::abs(p) / c, 1.0 / phi_ - 1.0) / (phi_ * c);
}

double CostSpec::conjugate(double p) const {
    if (kind_ == Kind::Quadratic) return p * p / (4.0 * eta_);
    return pl_conjugate(shrink(p));
}

double CostSpec::conjugate_slope(double p) const {
    if (kind_ == Kind::Quadratic) return p / (2.0 * eta_);
    return pl_conjugate_slope(shrink(p));
}

double CostSpec::conjugate_curvature(double p) const {
    if (kind_ == Kind::Quadratic) return 1.0 / (2.0 * eta_);
    if (kind_ == Kind::PowerLawPlusLinear && std::abs(p) <= psi_) return 0.0;
    return pl_conjugate_curvature(shrink(p));
}

double CostSpec::conjugate_curvature_regularized(double p) const {
    if (kind_ == Kind::Quadratic) return 1.0 / (2.0 * eta_);
    return pl_conjugate_curvature(std::max(std::abs(shrink(p)), kCurvatureFloor));
}

std::string CostSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Quadratic: os << "quadratic(eta=" << eta_ << ")"; break;
        case Kind::PowerLaw: os << "power_law(eta=" << eta_ << ", phi=" << phi_ << ")"; break;
        case Kind::PowerLawPlusLinear:
            os << "power_law_plus_linear(eta=" << eta_ << ", phi=" << phi_ << ", psi=" << psi_ << ")";
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// ImpactSpec

ImpactSpec::ImpactSpec(Kind kind, double k, double alpha) : kind_(kind), k_(k), alpha_(alpha) {}

ImpactSpec ImpactSpec::zero() { return ImpactSpec(Kind::Zero, 0.0, 0.0); }

ImpactSpec ImpactSpec::linear(double k) {
    require(std::isfinite(k) && k >= 0.0, "impact.k", "must be finite and >= 0");
    return ImpactSpec(Kind::Linear, k, 0.0);
}

ImpactSpec ImpactSpec::power(double k, double alpha) {
    require(std::isfinite(k) && k >= 0.0, "impact.k", "must be finite and >= 0");
    require(alpha > 0.0 && alpha < 1.0, "impact.alpha", "must lie in (0, 1)");
    return ImpactSpec(Kind::Power, k, alpha);
}

double ImpactSpec::density(double x) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return k_;
        case Kind::Power:
            if (k_ == 0.0) return 0.0;
            if (x == 0.0) return std::numeric_limits<double>::infinity();
            return k_ * alpha_ * std::pow(std::abs(x), alpha_ - 1.0);
    }
    return 0.0;
}

double ImpactSpec::density_slope(double x) const {
    if (kind_ != Kind::Power || k_ == 0.0) return 0.0;
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    return k_ * alpha_ * (alpha_ - 1.0) * std::pow(std::abs(x), alpha_ - 2.0);
}

double ImpactSpec::cumulative(double q) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return k_ * q;
        case Kind::Power: return sign(q) * k_ * std::pow(std::abs(q), alpha_);
    }
    return 0.0;
}

double ImpactSpec::cumulative_integral(double q) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return 0.5 * k_ * q * q;
        case Kind::Power: return k_ * std::pow(std::abs(q), 1.0 + alpha_) / (1.0 + alpha_);
    }
    return 0.0;
}

ImpactSpec ImpactSpec::scaled(double factor) const {
    return ImpactSpec(kind_, k_ * factor, alpha_);
}

std::string ImpactSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Zero: os << "zero"; break;
        case Kind::Linear: os << "linear(k=" << k_ << ")"; break;
        case Kind::Power: os << "power(k=" << k_ << ", alpha=" << alpha_ << ")"; break;
    }
    return os.str();
}

double impact_integral(const ImpactSpec& impact, double q0) {
    return impact.cumulative_integral(q0);
}

// ---------------------------------------------------------------------------
// VolumeProfile

VolumeProfile::VolumeProfile(std::vector<double> knots, std::vector<double> rates)
    : knots_(std::move(knots)), rates_(std::move(rates)) {}

VolumeProfile VolumeProfile::flat(double volume, double horizon) {
    require(finite_positive(volume), "volume.value", "must be finite and > 0");
    require(finite_positive(horizon), "market.T", "must be finite and > 0");
    return VolumeProfile({0.0, horizon}, {volume});
}

VolumeProfile VolumeProfile::table(std::vector<double> starts, std::vector<double> rates,
                                   double horizon) {
    require(finite_positive(horizon), "market.T", "must be finite and > 0");
    require(!starts.empty(), "volume.times", "must not be empty");
    require(starts.size() == rates.size(), "volume.values",
            "must have as many entries as volume.times");
    require(starts.front() == 0.0, "volume.times", "first bucket must start at 0");
    for (std::size_t i = 1; i < starts.size(); ++i) {
        require(starts[i] > starts[i - 1], "volume.times", "must be strictly increasing");
    }
    require(starts.back() < horizon, "volume.times", "every bucket must start before T");
    for (double r : rates) {
        require(finite_positive(r), "volume.values", "every rate must be finite and > 0");
    }
    starts.push_back(horizon);
    return VolumeProfile(std::move(starts), std::move(rates));
}

double VolumeProfile::min_rate() const { return *std::min_element(rates_.begin(), rates_.end()); }
double VolumeProfile::max_rate() const { return *std::max_element(rates_.begin(), rates_.end()); }

double VolumeProfile::rate_at(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end() - 1, t);
    const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
    return rates_[std::min(idx, rates_.size() - 1)];
}

double VolumeProfile::cumulative(double t) const {
    const double T = horizon();
    if (!(t >= 0.0 && t <= T)) {
        throw InvalidParameter("t", "must lie in [0, " + std::to_string(T) + "]");
    }
    double q = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) {
        const double a = knots_[i];
        const double b = std::min(knots_[i + 1], t);
        if (b <= a) break;
        q += rates_[i] * (b - a);
    }
    return q;
}

VolumeGrid VolumeProfile::discretize(std::size_t steps) const {
    if (steps < 1) throw InvalidParameter("solver.steps", "must be >= 1");
    const double T = horizon();
    VolumeGrid grid;
    grid.tau = T / static_cast<double>(steps);
    grid.t.resize(steps + 1);
    grid.volume.resize(steps + 1);
    grid.cumulative.resize(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        grid.t[j] = j == steps ? T : static_cast<double>(j) * grid.tau;
    }
    grid.cumulative[0] = 0.0;
    if (is_flat()) {
        std::fill(grid.volume.begin(), grid.volume.end(), rates_[0]);
    } else {
        for (std::size_t j = 1; j <= steps; ++j) {
            grid.volume[j] = (cumulative(grid.t[j]) - cumulative(grid.t[j - 1])) / grid.tau;
        }
        grid.volume[0] = grid.volume[1];
    }
    for (std::size_t j = 1; j <= steps; ++j) {
        grid.cumulative[j] = grid.cumulative[j - 1] + grid.tau * grid.volume[j];
    }
    return grid;
}

// ---------------------------------------------------------------------------
// MarketParams

void MarketParams::validate() const {
    require(finite_positive(q0), "market.q0", "must be finite and > 0");
    require(finite_positive(horizon), "market.T", "must be finite and > 0");
    require(std::isfinite(s0) && s0 > 0.0, "market.S0", "must be finite and > 0");
    require(finite_positive(sigma), "market.sigma", "must be finite and > 0");
    require(std::isfinite(gamma) && gamma >= 0.0, "market.gamma", "must be finite and >= 0");
    require(std::abs(volume.horizon() - horizon) <= 1e-12 * horizon, "volume",
            "profile horizon must equal market.T");
}

}  // namespace vwapguard
