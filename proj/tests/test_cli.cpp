#include "vwapguard/commands.hpp"
#include "vwapguard/errors.hpp"
#include "vwapguard/run_config.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#ifndef VWAPGUARD_CONFIG_DIR
#error "VWAPGUARD_CONFIG_DIR must point at the shipped configs"
#endif

using namespace vwapguard;

namespace {

std::string config_path(const std::string& name) { return std::string(VWAPGUARD_CONFIG_DIR) + "/" + name; }

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_run_config(in);
}

const char* kMinimal =
    "[market]\nq0 = 400000\nT = 1\nS0 = 50\nsigma = 0.45\ngamma = 3e-6\n"
    "[cost]\nkind = quadratic\neta = 0.15\n"
    "[volume]\nkind = flat\nvalue = 4000000\n"
    "[solver]\nsteps = 200\n";

std::string field_of(const std::string& text) {
    try {
        parse(text);
    } catch (const InvalidParameter& e) {
        return e.field();
    }
    return "";
}

std::string line_value(const std::string& report, const std::string& key) {
    std::istringstream in(report);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("every shipped config loads") {
        for (const char* name : {"flat_gamma3e-6.ini", "flat_gamma6e-6.ini", "flat_own_volume.ini", "power_cost.ini",
                                 "power_cost_power_impact.ini", "no_impact.ini", "two_bucket.ini"}) {
            CAPTURE(name);
            CHECK_NOTHROW(load_run_config(config_path(name)));
        }
    }

    TEST_CASE("values and defaults") {
        const RunConfig c = parse(kMinimal);
        CHECK(c.market.q0 == 4e5);
        CHECK(c.market.gamma == 3e-6);
        CHECK(c.market.impact.is_zero());
        CHECK(c.solver().steps == 200);
        CHECK_FALSE(c.pricing.relative);
        CHECK(c.mc.mode == SimulationMode::FormulaSlippage);
        CHECK(c.curve_path.empty());
    }

    TEST_CASE("table volume") {
        const RunConfig c = load_run_config(config_path("two_bucket.ini"));
        CHECK(c.market.volume.total() == doctest::Approx(4e6));
        CHECK(c.mc.mode == SimulationMode::FullSimulation);
        CHECK(c.mc.steps == 16000);
    }

    TEST_CASE("errors name the offending field") {
        std::string bad = kMinimal;
        bad.replace(bad.find("gamma = 3e-6"), 12, "gamma = -1");
        CHECK(field_of(bad) == "market.gamma");

        CHECK(field_of(std::string(kMinimal) + "bogus = 1\n") == "solver.bogus");
        CHECK(field_of(std::string(kMinimal) + "[nowhere]\nx = 1\n") == "nowhere");
        CHECK(field_of("q0 = 1\n" + std::string(kMinimal)) == "q0");

        std::string junk = kMinimal;
        junk.replace(junk.find("q0 = 400000"), 11, "q0 = 4e5x");
        CHECK_FALSE(field_of(junk).empty());

        std::string missing = kMinimal;
        missing.erase(missing.find("sigma = 0.45\n"), 13);
        CHECK_FALSE(field_of(missing).empty());

        CHECK_FALSE(field_of(std::string(kMinimal) + "[mc]\nmode = exact\n").empty());
        CHECK_FALSE(field_of(std::string(kMinimal) + "[mc]\nsteps = 300\n").empty());
        CHECK_THROWS_AS(load_run_config(config_path("does_not_exist.ini")), InvalidParameter);
    }
}

TEST_SUITE("output") {
    TEST_CASE("number formatting") {
        CHECK(format_number(0.0) == "0");
        CHECK(format_number(-0.0) == "0");
        CHECK(format_number(400000.0) == "400000");
        CHECK(format_number(0.1) == "0.1");
        CHECK(format_number(-0.03) == "-0.03");
        CHECK(format_number(1.0 / 3.0) == "0.333333333333");
        CHECK(format_number(1e-20) == "1e-20");
    }

    TEST_CASE("curve csv layout") {
        RunConfig c = parse(kMinimal);
        const std::string csv = run_curve(c);
        CHECK(csv.rfind("t,q_star,q_naive,p\n", 0) == 0);
        CHECK(csv.find('\r') == std::string::npos);
        CHECK(csv.back() == '\n');
        std::size_t lines = 0;
        for (char ch : csv) lines += ch == '\n';
        CHECK(lines == 202);
        CHECK(csv == run_curve(c));
    }

    TEST_CASE("without impact the optimal column equals the naive one") {
        const std::string csv = run_curve(load_run_config(config_path("no_impact.ini")));
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string t, qs, qn;
            std::getline(row, t, ',');
            std::getline(row, qs, ',');
            std::getline(row, qn, ',');
            REQUIRE(qs == qn);
        }
    }

    TEST_CASE("price report") {
        const std::string r = run_price(load_run_config(config_path("no_impact.ini")));
        CHECK(line_value(r, "premium") == "6000 currency");
        CHECK(line_value(r, "premium_bps") == "3 bps");
        CHECK(line_value(r, "lambda_star_bps") == "3 bps");
        CHECK(line_value(r, "solver_converged") == "true");
        CHECK(line_value(r, "vwap_prime_factor").empty());

        const std::string v = run_price(load_run_config(config_path("flat_own_volume.ini")));
        CHECK(line_value(v, "vwap_prime_factor") == "0.909090909091 ratio");
        CHECK(line_value(v, "vwap_prime_premium") == line_value(v, "premium"));
    }

    TEST_CASE("verify with a tiny sample is inconclusive, not failed") {
        RunConfig c = parse(std::string(kMinimal) + "[mc]\nn_paths = 1\n");
        const VerifyResult v = run_verify(c);
        CHECK_FALSE(v.failed);
        CHECK(line_value(v.report, "mean_check").rfind("INCONCLUSIVE", 0) == 0);
    }

    TEST_CASE("verify on a strategy with deterministic slippage") {
        RunConfig c = parse(std::string(kMinimal) + "[mc]\nn_paths = 5000\nseed = 3\n");
        const VerifyResult v = run_verify(c);
        CHECK_FALSE(v.failed);
        CHECK(line_value(v.report, "mean_check").rfind("PASS", 0) == 0);
        CHECK(line_value(v.report, "pathwise_identity_check").empty());
    }
}
