#include "vwapguard/montecarlo.hpp"

#include "vwapguard/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace vwapguard {

namespace {

// Neumaier summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

double mean_of(const std::vector<double>& x) {
    CompensatedSum s;
    for (double v : x) s.add(v);
    return s.value() / static_cast<double>(x.size());
}

// Central moment of order k about `mean`, normalised by n.
double central_moment(const std::vector<double>& x, double mean, int k) {
    CompensatedSum s;
    for (double v : x) s.add(std::pow(v - mean, k));
    return s.value() / static_cast<double>(x.size());
}

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return std::mt19937_64(seq);
}

void brownian_increments(std::uint64_t seed, std::uint64_t path, double dt, std::vector<double>& dw) {
    auto engine = path_engine(seed, path);
    boost::random::normal_distribution<double> normal;
    const double scale = std::sqrt(dt);
    for (double& x : dw) x = scale * normal(engine);
}

// Runs body(path, scratch) for every path, spreading contiguous blocks over threads.
template <class Body>
void for_each_path(std::size_t n_paths, unsigned threads, std::size_t scratch_size, Body body) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_paths));
    auto run = [&](std::size_t begin, std::size_t end) {
        std::vector<double> scratch(scratch_size);
        for (std::size_t i = begin; i < end; ++i) body(i, scratch);
    };
    if (workers <= 1) {
        run(0, n_paths);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(n_paths, begin + block);
        if (begin >= end) break;
        pool.emplace_back(run, begin, end);
    }
    for (auto& t : pool) t.join();
}

// Market data and curve on the fine simulation grid.
struct FineGrid {
    VolumeGrid volume;
    double dt = 0.0;
    std::vector<double> tracking;  // 1 - Q_i / Q_T
};

FineGrid make_fine_grid(const MarketParams& params, std::size_t steps) {
    FineGrid g;
    g.volume = params.volume.discretize(steps);
    g.dt = g.volume.tau;
    g.tracking.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) g.tracking[i] = 1.0 - g.volume.cumulative[i] / g.volume.total();
    return g;
}

// -G(q0) - sum dt V L(rate/V) + q0 sum dt (V/Q_T) F(q0 - q), right-node V and q.
double deterministic_slippage(const MarketParams& params, const FineGrid& g, const std::vector<double>& q) {
    const double q0 = params.q0;
    const double total = g.volume.total();
    CompensatedSum s;
    s.add(-impact_integral(params.impact, q0));
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        const double v = g.volume.volume[i + 1];
        const double rate = (q[i + 1] - q[i]) / g.dt;
        s.add(-g.dt * v * params.cost.value(rate / v));
        s.add(q0 * g.dt * v / total * params.impact.cumulative(q0 - q[i + 1]));
    }
    return s.value();
}

void check_curve(const MarketParams& params, const TradingCurve& curve) {
    if (curve.steps() < 1 || curve.q.size() != curve.t.size()) throw GridMismatch("curve has no cells");
    if (std::abs(curve.t.back() - params.horizon) > 1e-12 * params.horizon) {
        throw GridMismatch("curve horizon differs from T");
    }
    if (curve.q.front() != params.q0 || curve.q.back() != 0.0) {
        throw GridMismatch("curve must satisfy q[0] = q0 and q[J] = 0");
    }
}

}  // namespace

TradingCurve refine_curve(const TradingCurve& curve, std::size_t steps) {
    const std::size_t coarse = curve.steps();
    if (coarse == 0 || steps < coarse || steps % coarse != 0) {
        throw GridMismatch("refined grid must be a multiple of the curve grid");
    }
    const std::size_t ratio = steps / coarse;
    const double horizon = curve.t.back();
    TradingCurve fine;
    fine.t.resize(steps + 1);
    fine.q.resize(steps + 1);
    for (std::size_t i = 0; i < steps; ++i) {
        const std::size_t j = i / ratio;
        const double w = static_cast<double>(i - j * ratio) / static_cast<double>(ratio);
        fine.t[i] = static_cast<double>(i) * (horizon / static_cast<double>(steps));
        fine.q[i] = curve.q[j] + (curve.q[j + 1] - curve.q[j]) * w;
    }
    fine.t[steps] = horizon;
    fine.q[steps] = curve.q[coarse];
    return fine;
}

std::size_t SimulationSpec::resolve_steps(std::size_t curve_steps) const {
    if (steps == 0) return curve_steps;
    if (steps < curve_steps || steps % curve_steps != 0) {
        throw InvalidParameter("mc.steps", "must be a positive multiple of the solver grid size");
    }
    return steps;
}

void SimulationSpec::validate() const {
    if (n_paths < 1) throw InvalidParameter("mc.n_paths", "must be >= 1");
}

SlippageSample SlippageSample::from_values(std::vector<double> values) {
    SlippageSample s;
    s.values = std::move(values);
    const std::size_t n = s.values.size();
    if (n == 0) return s;
    s.sample_mean = mean_of(s.values);
    if (n > 1) {
        s.sample_var = central_moment(s.values, s.sample_mean, 2) * static_cast<double>(n) / static_cast<double>(n - 1);
        s.standard_error = std::sqrt(s.sample_var / static_cast<double>(n));
    }
    return s;
}

double SlippageSample::skewness() const {
    const double m2 = central_moment(values, sample_mean, 2);
    if (m2 <= 0.0) return 0.0;
    return central_moment(values, sample_mean, 3) / std::pow(m2, 1.5);
}

double SlippageSample::excess_kurtosis() const {
    const double m2 = central_moment(values, sample_mean, 2);
    if (m2 <= 0.0) return 0.0;
    return central_moment(values, sample_mean, 4) / (m2 * m2) - 3.0;
}

SlippageSample simulate_slippage(const MarketParams& params, const TradingCurve& curve,
                                 const SimulationSpec& spec) {
    params.validate();
    spec.validate();
    check_curve(params, curve);
    const std::size_t n = spec.resolve_steps(curve.steps());
    const FineGrid g = make_fine_grid(params, n);
    const std::vector<double> q = refine_curve(curve, n).q;
    const double q0 = params.q0;
    const double sigma = params.sigma;

    std::vector<double> values(spec.n_paths);
    if (spec.mode == SimulationMode::FormulaSlippage) {
        const double base = deterministic_slippage(params, g, q);
        std::vector<double> loading(n);
        for (std::size_t i = 0; i < n; ++i) loading[i] = sigma * q0 * (q[i] / q0 - g.tracking[i]);
        for_each_path(spec.n_paths, spec.threads, n, [&](std::size_t path, std::vector<double>& dw) {
            brownian_increments(spec.seed, path, g.dt, dw);
            CompensatedSum s;
            s.add(base);
            for (std::size_t i = 0; i < n; ++i) s.add(loading[i] * dw[i]);
            values[path] = s.value();
        });
    } else {
        // Price moves by sigma dW plus the exact permanent-impact increment; trades
        // and the VWAP are marked at the end-of-step price.
        const double total = g.volume.total();
        std::vector<double> impact_step(n);
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            impact_step[i] = params.impact.cumulative(q0 - q[i + 1]) - params.impact.cumulative(q0 - q[i]);
            const double v = g.volume.volume[i + 1];
            cost += g.dt * v * params.cost.value((q[i + 1] - q[i]) / g.dt / v);
        }
        for_each_path(spec.n_paths, spec.threads, n, [&](std::size_t path, std::vector<double>& dw) {
            brownian_increments(spec.seed, path, g.dt, dw);
            double ds = 0.0;  // S - S0
            CompensatedSum cash;
            CompensatedSum vwap;
            for (std::size_t i = 0; i < n; ++i) {
                ds += sigma * dw[i] - impact_step[i];
                cash.add((q[i] - q[i + 1]) * ds);
                vwap.add(g.dt * g.volume.volume[i + 1] * ds);
            }
            values[path] = cash.value() - cost - q0 * vwap.value() / total;
        });
    }
    return SlippageSample::from_values(std::move(values));
}

std::vector<UtilityEstimate> utility_comparison(const MarketParams& params, const std::vector<Policy>& policies,
                                                const SimulationSpec& spec) {
    params.validate();
    spec.validate();
    if (!(params.gamma > 0.0)) throw InvalidParameter("market.gamma", "utility comparison needs gamma > 0");
    if (policies.empty()) return {};
    const std::size_t coarse = policies.front().base.steps();
    for (const Policy& p : policies) {
        check_curve(params, p.base);
        if (p.base.steps() != coarse) throw GridMismatch("policies must share one grid");
        if (!std::isfinite(p.gain) || !(p.clip > 0.0)) throw InvalidParameter("policy." + p.name, "bad gain or clip");
    }
    const std::size_t n = spec.resolve_steps(coarse);
    const std::size_t m = policies.size();
    const FineGrid g = make_fine_grid(params, n);
    const double q0 = params.q0;
    const double T = params.horizon;
    const double total = g.volume.total();
    const double G = impact_integral(params.impact, q0);

    std::vector<std::vector<double>> bases;
    for (const Policy& p : policies) bases.push_back(refine_curve(p.base, n).q);

    std::vector<double> utility(spec.n_paths * m);
    std::vector<double> slippage(spec.n_paths * m);
    for_each_path(spec.n_paths, spec.threads, n + 1, [&](std::size_t path, std::vector<double>& scratch) {
        std::vector<double> dw(n);
        brownian_increments(spec.seed, path, g.dt, dw);
        std::vector<double>& q = scratch;
        for (std::size_t k = 0; k < m; ++k) {
            const Policy& pol = policies[k];
            const double bound = pol.clip * std::sqrt(T);
            double w = 0.0;
            double avg = 0.0;  // M_t
            for (std::size_t i = 0; i <= n; ++i) {
                q[i] = bases[k][i] + pol.gain * q0 * (T - g.volume.t[i]) / T * avg;
                if (i < n) {
                    avg += std::clamp(w, -bound, bound) * g.dt / T;
                    w += dw[i];
                }
            }
            q[0] = q0;
            q[n] = 0.0;
            CompensatedSum s;
            s.add(-G);
            for (std::size_t i = 0; i < n; ++i) {
                const double v = g.volume.volume[i + 1];
                s.add(-g.dt * v * params.cost.value((q[i + 1] - q[i]) / g.dt / v));
                s.add(q0 * g.dt * v / total * params.impact.cumulative(q0 - q[i + 1]));
                s.add(params.sigma * q0 * (q[i] / q0 - g.tracking[i]) * dw[i]);
            }
            slippage[path * m + k] = s.value();
            utility[path * m + k] = -std::exp(-params.gamma * s.value());
        }
    });

    std::vector<UtilityEstimate> out(m);
    const double count = static_cast<double>(spec.n_paths);
    std::vector<double> column(spec.n_paths);
    std::vector<double> diff(spec.n_paths);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < spec.n_paths; ++i) {
            column[i] = utility[i * m + k];
            diff[i] = utility[i * m + k] - utility[i * m];
        }
        const SlippageSample u = SlippageSample::from_values(column);
        const SlippageSample d = SlippageSample::from_values(diff);
        CompensatedSum sm;
        for (std::size_t i = 0; i < spec.n_paths; ++i) sm.add(slippage[i * m + k]);
        out[k] = {policies[k].name, u.sample_mean, u.standard_error, sm.value() / count, d.sample_mean,
                  d.standard_error};
    }
    return out;
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

MomentCheck check_moments(const SlippageSample& sample, const SlippageMoments& analytic) {
    MomentCheck c;
    const std::size_t n = sample.values.size();
    c.analytic_mean = analytic.mean;
    c.analytic_var = analytic.variance;
    c.mean_error = std::abs(sample.sample_mean - analytic.mean);
    c.mean_bound = 3.0 * sample.standard_error;
    if (n >= 2) {
        c.skewness = sample.skewness();
        c.kurtosis = sample.excess_kurtosis();
    }
    const double dn = static_cast<double>(n);
    c.skew_bound = n > 0 ? 4.0 * std::sqrt(6.0 / dn) : 0.0;
    c.kurt_bound = n > 0 ? 4.0 * std::sqrt(24.0 / dn) : 0.0;
    // Variances at roundoff level of the mean count as a degenerate distribution.
    const double scale = std::max(1.0, std::abs(analytic.mean));
    const bool degenerate = analytic.variance <= 1e-18 * scale * scale;
    if (n >= 2 && !degenerate) {
        const boost::math::chi_squared chi2(dn - 1.0);
        c.var_lo = analytic.variance * boost::math::quantile(chi2, 0.005) / (dn - 1.0);
        c.var_hi = analytic.variance * boost::math::quantile(chi2, 0.995) / (dn - 1.0);
    }
    if (n < 30) return c;

    auto verdict = [](bool ok) { return ok ? Verdict::Pass : Verdict::Fail; };
    if (!degenerate) {
        c.mean = verdict(c.mean_error <= c.mean_bound);
        c.variance = verdict(sample.sample_var >= c.var_lo && sample.sample_var <= c.var_hi);
        c.normality = verdict(std::abs(c.skewness) <= c.skew_bound && std::abs(c.kurtosis) <= c.kurt_bound);
    } else {
        // Every path must land on the analytic value.
        c.mean = verdict(c.mean_error <= 1e-9 * scale);
        c.variance = verdict(sample.sample_var <= 1e-18 * scale * scale);
    }
    return c;
}

}  // namespace vwapguard
