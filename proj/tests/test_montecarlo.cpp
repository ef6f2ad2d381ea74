#include "fixtures.hpp"

#include "vwapguard/closed_forms.hpp"
#include "vwapguard/errors.hpp"
#include "vwapguard/montecarlo.hpp"
#include "vwapguard/pricing.hpp"
#include "vwapguard/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace vwapguard;

namespace {

TradingCurve optimal(const MarketParams& m, std::size_t J = 400) {
    SolverConfig c;
    c.steps = J;
    return solve(m, c).curve;
}

double mean_abs_gap(const SlippageSample& a, const SlippageSample& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) g += std::abs(a.values[i] - b.values[i]);
    return g / static_cast<double>(a.values.size());
}

}  // namespace

TEST_SUITE("simulation") {
    TEST_CASE("tracking without impact is deterministic in both modes") {
        const MarketParams m = fixtures::without_impact(fixtures::desk());
        const TradingCurve c = tracking_curve(m, 200);
        SimulationSpec spec;
        spec.n_paths = 200;
        spec.steps = 800;
        for (SimulationMode mode : {SimulationMode::FormulaSlippage, SimulationMode::FullSimulation}) {
            spec.mode = mode;
            const SlippageSample s = simulate_slippage(m, c, spec);
            for (double v : s.values) CHECK(v == doctest::Approx(-6000.0).epsilon(1e-9));
            CHECK(s.sample_var < 1e-12);
        }
    }

    TEST_CASE("bitwise reproducible and independent of the thread count") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m);
        SimulationSpec spec;
        spec.n_paths = 1000;
        spec.threads = 1;
        const SlippageSample a = simulate_slippage(m, c, spec);
        spec.threads = 3;
        const SlippageSample b = simulate_slippage(m, c, spec);
        const SlippageSample b2 = simulate_slippage(m, c, spec);
        REQUIRE(a.values.size() == b.values.size());
        CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(b.values.data(), b2.values.data(), b.values.size() * sizeof(double)) == 0);
        spec.seed = 43;
        const SlippageSample c2 = simulate_slippage(m, c, spec);
        CHECK(c2.values[0] != a.values[0]);
    }

    TEST_CASE("sample statistics are recomputable from the values") {
        const SlippageSample s = SlippageSample::from_values({1.0, 2.0, 3.0, 4.0});
        CHECK(s.sample_mean == doctest::Approx(2.5));
        CHECK(s.sample_var == doctest::Approx(5.0 / 3.0));
        CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 12.0)));
        CHECK(s.skewness() == doctest::Approx(0.0));
        CHECK(s.excess_kurtosis() == doctest::Approx(1.64 - 3.0));
    }

    TEST_CASE("Gaussian moments of the optimal strategy") {
        for (MarketParams m : {fixtures::desk(), fixtures::power_impact()}) {
            const TradingCurve c = optimal(m);
            SimulationSpec spec;
            spec.n_paths = 20000;
            spec.seed = 2024;
            const SlippageSample s = simulate_slippage(m, c, spec);
            const MomentCheck check = check_moments(s, slippage_moments(m, c));
            CHECK(check.mean == Verdict::Pass);
            CHECK(check.variance == Verdict::Pass);
            CHECK(check.normality == Verdict::Pass);
        }
    }

    TEST_CASE("standard error halves when the path count quadruples") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 200);
        SimulationSpec spec;
        spec.n_paths = 4000;
        const double se1 = simulate_slippage(m, c, spec).standard_error;
        spec.n_paths = 16000;
        const double se2 = simulate_slippage(m, c, spec).standard_error;
        CHECK(se1 / se2 == doctest::Approx(2.0).epsilon(0.05));
    }

    TEST_CASE("full simulation converges to the formula at first order") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 200);
        double gaps[3];
        int i = 0;
        for (std::size_t steps : {400u, 800u, 1600u}) {
            SimulationSpec spec;
            spec.n_paths = 200;
            spec.steps = steps;
            const SlippageSample f = simulate_slippage(m, c, spec);
            spec.mode = SimulationMode::FullSimulation;
            gaps[i++] = mean_abs_gap(simulate_slippage(m, c, spec), f);
        }
        CHECK(gaps[0] / gaps[1] == doctest::Approx(2.0).epsilon(0.05));
        CHECK(gaps[1] / gaps[2] == doctest::Approx(2.0).epsilon(0.05));
    }

    TEST_CASE("full simulation with power impact narrows the gap under refinement") {
        const MarketParams m = fixtures::power_impact();
        const TradingCurve c = optimal(m, 200);
        double gaps[2];
        int i = 0;
        for (std::size_t steps : {800u, 3200u}) {
            SimulationSpec spec;
            spec.n_paths = 100;
            spec.steps = steps;
            const SlippageSample f = simulate_slippage(m, c, spec);
            spec.mode = SimulationMode::FullSimulation;
            gaps[i++] = mean_abs_gap(simulate_slippage(m, c, spec), f);
        }
        CHECK(gaps[0] / gaps[1] > 2.0);
    }

    TEST_CASE("refinement is piecewise linear and keeps the end points") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 50);
        const TradingCurve fine = refine_curve(c, 200);
        CHECK(fine.q.front() == m.q0);
        CHECK(fine.q.back() == 0.0);
        for (std::size_t j = 0; j <= 50; ++j) CHECK(fine.q[4 * j] == doctest::Approx(c.q[j]));
        CHECK(fine.q[2] == doctest::Approx(0.5 * (c.q[0] + c.q[1])));
        CHECK_THROWS_AS(refine_curve(c, 75), GridMismatch);
    }

    TEST_CASE("spec validation") {
        SimulationSpec spec;
        spec.n_paths = 0;
        CHECK_THROWS_AS(spec.validate(), InvalidParameter);
        spec.n_paths = 1;
        spec.steps = 300;
        CHECK_THROWS_AS(spec.resolve_steps(200), InvalidParameter);
        CHECK_THROWS_AS(spec.resolve_steps(400), InvalidParameter);
        CHECK(spec.resolve_steps(100) == 300);
        spec.steps = 0;
        CHECK(spec.resolve_steps(100) == 100);
    }
}

TEST_SUITE("moment checks") {
    TEST_CASE("small samples are inconclusive") {
        const MomentCheck c = check_moments(SlippageSample::from_values({1.0}), {0.0, 1.0});
        CHECK(c.mean == Verdict::Inconclusive);
        CHECK(c.variance == Verdict::Inconclusive);
        CHECK(c.normality == Verdict::Inconclusive);
        CHECK(std::string(to_string(Verdict::Inconclusive)) == "INCONCLUSIVE");
    }

    TEST_CASE("a wrong variance is rejected") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 200);
        SimulationSpec spec;
        spec.n_paths = 5000;
        const SlippageSample s = simulate_slippage(m, c, spec);
        SlippageMoments wrong = slippage_moments(m, c);
        wrong.variance *= 1.2;
        wrong.mean += 10.0 * s.standard_error;
        const MomentCheck check = check_moments(s, wrong);
        CHECK(check.variance == Verdict::Fail);
        CHECK(check.mean == Verdict::Fail);
    }

    TEST_CASE("degenerate distributions") {
        const SlippageSample s = SlippageSample::from_values(std::vector<double>(50, -6000.0));
        const MomentCheck ok = check_moments(s, {-6000.0, 0.0});
        CHECK(ok.mean == Verdict::Pass);
        CHECK(ok.variance == Verdict::Pass);
        const MomentCheck bad = check_moments(s, {-5990.0, 0.0});
        CHECK(bad.mean == Verdict::Fail);
    }
}

TEST_SUITE("utility") {
    TEST_CASE("a policy compared with itself") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 200);
        SimulationSpec spec;
        spec.n_paths = 500;
        const auto est = utility_comparison(m, {{"a", c, 0.0}, {"b", c, 0.0}}, spec);
        REQUIRE(est.size() == 2);
        CHECK(est[0].utility == est[1].utility);
        CHECK(est[1].diff_vs_first == 0.0);
        CHECK(est[0].slippage_mean == est[1].slippage_mean);
    }

    TEST_CASE("optimal beats naive") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 200);
        SimulationSpec spec;
        spec.n_paths = 5000;
        const auto est = utility_comparison(m, {{"optimal", c, 0.0}, {"naive", tracking_curve(m, 200), 0.0}}, spec);
        const double combined = std::hypot(est[0].standard_error, est[1].standard_error);
        CHECK(est[0].utility - est[1].utility > 2.0 * combined);
    }

    TEST_CASE("adapted perturbations do not beat the optimum") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 200);
        SimulationSpec spec;
        spec.n_paths = 3000;
        std::vector<Policy> policies{{"optimal", c, 0.0}};
        for (double gain : {-0.05, -0.02, 0.02, 0.05}) policies.push_back({"gain", c, gain});
        const auto est = utility_comparison(m, policies, spec);
        for (std::size_t k = 1; k < est.size(); ++k) {
            CHECK(est[k].diff_vs_first <= 2.0 * est[k].diff_standard_error);
        }
    }

    TEST_CASE("needs risk aversion and a common grid") {
        const MarketParams m = fixtures::desk();
        const TradingCurve c = optimal(m, 200);
        SimulationSpec spec;
        spec.n_paths = 10;
        CHECK_THROWS_AS(utility_comparison(fixtures::desk(0.0), {{"a", c, 0.0}}, spec), InvalidParameter);
        CHECK_THROWS_AS(utility_comparison(m, {{"a", c, 0.0}, {"b", optimal(m, 100), 0.0}}, spec), GridMismatch);
    }
}
