#include "vwapguard/run_config.hpp"

#include "vwapguard/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace vwapguard {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"market", {"q0", "T", "S0", "sigma", "gamma"}},
        {"cost", {"kind", "eta", "phi", "psi"}},
        {"impact", {"kind", "k", "alpha"}},
        {"volume", {"kind", "value", "times", "values"}},
        {"solver", {"steps", "tol", "max_iter", "damping"}},
        {"pricing", {"vwap_prime", "relative", "lambda_lo", "lambda_hi"}},
        {"mc", {"n_paths", "seed", "mode", "steps"}},
        {"output", {"curve", "report"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Reader {
public:
    explicit Reader(pt::ptree tree) : tree_(std::move(tree)) {}

    bool has(const std::string& field) const { return tree_.get_optional<std::string>(path(field)).has_value(); }

    std::string text(const std::string& field) const {
        auto v = tree_.get_optional<std::string>(path(field));
        if (!v) throw InvalidParameter(field, "missing");
        return trim(*v);
    }

    std::string text_or(const std::string& field, const std::string& fallback) const {
        return has(field) ? text(field) : fallback;
    }

    double number(const std::string& field) const { return to_number(field, text(field)); }
    double number_or(const std::string& field, double fallback) const {
        return has(field) ? number(field) : fallback;
    }

    template <class Int>
    Int integer_or(const std::string& field, Int fallback) const {
        if (!has(field)) return fallback;
        const std::string s = text(field);
        Int value{};
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || end != s.data() + s.size()) {
            throw InvalidParameter(field, "expected a non-negative integer, got '" + s + "'");
        }
        return value;
    }

    bool flag_or(const std::string& field, bool fallback) const {
        if (!has(field)) return fallback;
        const std::string s = text(field);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw InvalidParameter(field, "expected true or false, got '" + s + "'");
    }

    std::vector<double> list(const std::string& field) const {
        const std::string s = text(field);
        std::vector<double> out;
        std::size_t start = 0;
        while (start <= s.size()) {
            const auto comma = s.find(',', start);
            const auto item = trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            out.push_back(to_number(field, item));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [section, body] : tree_) {
            if (!body.data().empty()) throw InvalidParameter(section, "key outside of any section");
            const auto it = known_keys().find(section);
            if (it == known_keys().end()) throw InvalidParameter(section, "unknown section");
            for (const auto& [key, value] : body) {
                if (!it->second.count(key)) throw InvalidParameter(section + "." + key, "unknown key");
            }
        }
    }

private:
    static pt::ptree::path_type path(const std::string& field) { return pt::ptree::path_type(field, '.'); }

    static double to_number(const std::string& field, const std::string& s) {
        double value = 0.0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
            throw InvalidParameter(field, "expected a number, got '" + s + "'");
        }
        return value;
    }

    pt::ptree tree_;
};

CostSpec read_cost(const Reader& r) {
    const std::string kind = r.text_or("cost.kind", "quadratic");
    if (kind == "quadratic") return CostSpec::quadratic(r.number("cost.eta"));
    if (kind == "power_law") return CostSpec::power_law(r.number("cost.eta"), r.number("cost.phi"));
    if (kind == "power_law_plus_linear") {
        return CostSpec::power_law_plus_linear(r.number("cost.eta"), r.number("cost.phi"), r.number("cost.psi"));
    }
    throw InvalidParameter("cost.kind", "expected quadratic, power_law or power_law_plus_linear, got '" + kind + "'");
}

ImpactSpec read_impact(const Reader& r) {
    const std::string kind = r.text_or("impact.kind", "zero");
    if (kind == "zero") return ImpactSpec::zero();
    if (kind == "linear") return ImpactSpec::linear(r.number("impact.k"));
    if (kind == "power") return ImpactSpec::power(r.number("impact.k"), r.number("impact.alpha"));
    throw InvalidParameter("impact.kind", "expected zero, linear or power, got '" + kind + "'");
}

VolumeProfile read_volume(const Reader& r, double horizon) {
    const std::string kind = r.text_or("volume.kind", "flat");
    if (kind == "flat") return VolumeProfile::flat(r.number("volume.value"), horizon);
    if (kind == "table") return VolumeProfile::table(r.list("volume.times"), r.list("volume.values"), horizon);
    throw InvalidParameter("volume.kind", "expected flat or table, got '" + kind + "'");
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidParameter("config", "line " + std::to_string(e.line()) + ": " + e.message());
    }
    const Reader r(std::move(tree));
    r.reject_unknown();

    RunConfig cfg;
    MarketParams& m = cfg.market;
    m.q0 = r.number("market.q0");
    m.horizon = r.number("market.T");
    m.s0 = r.number("market.S0");
    m.sigma = r.number("market.sigma");
    m.gamma = r.number("market.gamma");
    if (!(std::isfinite(m.horizon) && m.horizon > 0.0)) throw InvalidParameter("market.T", "must be finite and > 0");
    m.cost = read_cost(r);
    m.impact = read_impact(r);
    m.volume = read_volume(r, m.horizon);
    m.validate();

    SolverConfig& s = cfg.pricing.solver;
    s.steps = r.integer_or<std::size_t>("solver.steps", s.steps);
    if (r.has("solver.tol")) s.tol = r.number("solver.tol");
    s.max_iter = r.integer_or<int>("solver.max_iter", s.max_iter);
    s.damping = r.integer_or<int>("solver.damping", s.damping);
    s.validate();

    PricingConfig& p = cfg.pricing;
    p.vwap_prime = r.flag_or("pricing.vwap_prime", false);
    p.relative = r.flag_or("pricing.relative", false);
    p.lambda_lo = r.number_or("pricing.lambda_lo", p.lambda_lo);
    p.lambda_hi = r.number_or("pricing.lambda_hi", p.lambda_hi);
    if (!std::isfinite(p.lambda_hi) || p.lambda_hi > 1.0) {
        throw InvalidParameter("pricing.lambda_hi", "must be finite and <= 1");
    }
    if (!std::isfinite(p.lambda_lo) || !(p.lambda_lo < p.lambda_hi)) {
        throw InvalidParameter("pricing.lambda_lo", "must be finite and < pricing.lambda_hi");
    }

    SimulationSpec& mc = cfg.mc;
    mc.n_paths = r.integer_or<std::size_t>("mc.n_paths", mc.n_paths);
    mc.seed = r.integer_or<std::uint64_t>("mc.seed", mc.seed);
    mc.steps = r.integer_or<std::size_t>("mc.steps", mc.steps);
    const std::string mode = r.text_or("mc.mode", "formula");
    if (mode == "formula") {
        mc.mode = SimulationMode::FormulaSlippage;
    } else if (mode == "full") {
        mc.mode = SimulationMode::FullSimulation;
    } else {
        throw InvalidParameter("mc.mode", "expected formula or full, got '" + mode + "'");
    }
    mc.validate();
    mc.resolve_steps(s.steps);

    cfg.curve_path = r.text_or("output.curve", "");
    cfg.report_path = r.text_or("output.report", "");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("config", "cannot open '" + path + "'");
    return parse_run_config(in);
}

}  // namespace vwapguard
