/**
 * @file models.hpp
 * @brief Market-model primitives: execution costs, permanent impact, volume.
 *
 * Units used throughout the library:
 *   - time in days, quantities in shares, prices in currency/share
 *   - participation rate rho = v / V is dimensionless
 *   - sigma in currency/share/sqrt(day), gamma in 1/currency
 */

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vwapguard {

/// Convex, even, superlinear execution cost L(rho) per unit of market volume.
///
///   Quadratic           L(rho) = eta rho^2
///   PowerLaw            L(rho) = eta |rho|^(1+phi)
///   PowerLawPlusLinear  L(rho) = eta |rho|^(1+phi) + psi |rho|
///
/// The Legendre transform H(p) = sup_rho (rho p - L(rho)) and its first two
/// derivatives are available in closed form for every kind.
class CostSpec {
public:
    enum class Kind { Quadratic, PowerLaw, PowerLawPlusLinear };

    static CostSpec quadratic(double eta);
    static CostSpec power_law(double eta, double phi);
    static CostSpec power_law_plus_linear(double eta, double phi, double psi);

    Kind kind() const noexcept { return kind_; }
    double eta() const noexcept { return eta_; }
    /// Exponent excess; 1 for Quadratic.
    double phi() const noexcept { return phi_; }
    double psi() const noexcept { return psi_; }

    /// L(rho).
    double value(double rho) const;
    /// L'(rho); at rho = 0 the kink of the linear term resolves to 0.
    double slope(double rho) const;

    /// H(p).
    double conjugate(double p) const;
    /// H'(p), the participation rate that attains the supremum.
    double conjugate_slope(double p) const;
    /// H''(p) as given by the analytic formula. May be 0 (phi < 1 at p = 0,
    /// or inside the dead zone |p| <= psi) or +inf (phi > 1 at p = 0).
    double conjugate_curvature(double p) const;
    /// H''(p) with the argument of the power-law part kept at least
    /// `kCurvatureFloor` away from the origin. Always finite and positive.
    double conjugate_curvature_regularized(double p) const;

    std::string describe() const;

    static constexpr double kCurvatureFloor = 1e-12;

private:
    CostSpec(Kind kind, double eta, double phi, double psi);

    // Power-law pieces without the linear term.
    double pl_conjugate(double p) const;
    double pl_conjugate_slope(double p) const;
    double pl_conjugate_curvature(double p) const;
    // Soft threshold of p by psi; identity when psi = 0.
    double shrink(double p) const;

    Kind kind_;
    double eta_;
    double phi_;
    double psi_;
};

/// Permanent impact density f on (0, inf) together with
///   F(q) = int_0^q f(|z|) dz   (odd, nondecreasing)
///   G(q) = int_0^q F(z) dz     (even)
///
///   Zero         f = 0
///   Linear(k)    f = k,                 F(q) = k q
///   Power(k, a)  f(x) = k a x^(a-1),    F(q) = k sign(q) |q|^a,  0 < a < 1
class ImpactSpec {
public:
    enum class Kind { Zero, Linear, Power };

    static ImpactSpec zero();
    static ImpactSpec linear(double k);
    static ImpactSpec power(double k, double alpha);

    Kind kind() const noexcept { return kind_; }
    double k() const noexcept { return k_; }
    double alpha() const noexcept { return alpha_; }
    bool is_zero() const noexcept { return kind_ == Kind::Zero || k_ == 0.0; }

    /// f(x) for x >= 0. Power kind returns +inf at x = 0.
    double density(double x) const;
    /// f'(x) for x > 0. Power kind returns -inf at x = 0.
    double density_slope(double x) const;
    /// F(q).
    double cumulative(double q) const;
    /// G(q) = int_0^q F(z) dz.
    double cumulative_integral(double q) const;

    /// Same kind with f multiplied by `factor`.
    ImpactSpec scaled(double factor) const;

    std::string describe() const;

private:
    ImpactSpec(Kind kind, double k, double alpha);

    Kind kind_;
    double k_;
    double alpha_;
};

struct VolumeGrid;

/// Deterministic instantaneous market volume V_t on [0, T], piecewise constant
/// over buckets. Flat profiles are a single bucket.
class VolumeProfile {
public:
    static VolumeProfile flat(double volume, double horizon);
    /// Bucket i carries rate `rates[i]` on [starts[i], starts[i+1]) with the last
    /// bucket running to `horizon`. `starts` must begin at 0 and be increasing.
    static VolumeProfile table(std::vector<double> starts, std::vector<double> rates, double horizon);

    double horizon() const noexcept { return knots_.back(); }
    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& rates() const noexcept { return rates_; }
    bool is_flat() const noexcept { return rates_.size() == 1; }

    double min_rate() const;
    double max_rate() const;

    /// V_t (right-continuous; V_T is the last bucket's rate).
    double rate_at(double t) const;
    /// Q_t = int_0^t V_s ds; throws InvalidParameter outside [0, T].
    double cumulative(double t) const;
    double total() const { return cumulative(horizon()); }

    /// Uniform grid with `steps` cells. Node value V_j (j >= 1) is the average
    /// rate on (t_{j-1}, t_j] and Q_j = Q_{j-1} + tau V_j, so the discrete
    /// cumulative volume is exactly the integral of the profile.
    VolumeGrid discretize(std::size_t steps) const;

private:
    VolumeProfile(std::vector<double> knots, std::vector<double> rates);

    std::vector<double> knots_;  // size m+1, knots_[0] = 0, knots_.back() = T
    std::vector<double> rates_;  // size m
};

/// Volume on the uniform solver grid {0, tau, ..., T = J tau}.
struct VolumeGrid {
    double tau = 0.0;
    std::vector<double> t;       // J+1 nodes
    std::vector<double> volume;  // V_j, with V_0 = V_1
    std::vector<double> cumulative;  // Q_j, Q_0 = 0

    std::size_t steps() const noexcept { return t.empty() ? 0 : t.size() - 1; }
    double total() const noexcept { return cumulative.back(); }
};

/// Full market description of one guaranteed-VWAP problem.
struct MarketParams {
    double q0 = 0.0;     ///< shares to sell
    double horizon = 0.0;  ///< T in days
    double s0 = 0.0;     ///< initial price
    double sigma = 0.0;  ///< arithmetic volatility
    double gamma = 0.0;  ///< absolute risk aversion, 0 means risk neutral
    CostSpec cost = CostSpec::quadratic(1.0);
    ImpactSpec impact = ImpactSpec::zero();
    VolumeProfile volume = VolumeProfile::flat(1.0, 1.0);

    /// Throws InvalidParameter naming the first violated constraint.
    void validate() const;
};

/// F integrated from 0 to q0: the part of the slippage no strategy can avoid.
double impact_integral(const ImpactSpec& impact, double q0);

}  // namespace vwapguard
