#include "vwapguard/commands.hpp"
#include "vwapguard/errors.hpp"
#include "vwapguard/run_config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNonConvergence = 3, kVerificationFailed = 4 };

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw vwapguard::InvalidParameter("output", "cannot write '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal liquidation curves and premia for guaranteed-VWAP contracts"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    auto* curve = app.add_subcommand("curve", "write the optimal trading curve as CSV");
    auto* price = app.add_subcommand("price", "print the pricing report");
    auto* verify = app.add_subcommand("verify", "Monte Carlo check of the slippage distribution");
    for (auto* sub : {curve, price, verify}) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_path, "output file (overrides the [output] section)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        const vwapguard::RunConfig config = vwapguard::load_run_config(config_path);
        if (curve->parsed()) {
            emit(vwapguard::run_curve(config), out_path.empty() ? config.curve_path : out_path);
            return kOk;
        }
        if (price->parsed()) {
            const std::string report = vwapguard::run_price(config);
            std::cout << report;
            const std::string path = out_path.empty() ? config.report_path : out_path;
            if (!path.empty()) emit(report, path);
            return kOk;
        }
        const vwapguard::VerifyResult result = vwapguard::run_verify(config);
        std::cout << result.report;
        if (!out_path.empty()) emit(result.report, out_path);
        return result.failed ? kVerificationFailed : kOk;
    } catch (const vwapguard::InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const vwapguard::ModelMismatch& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const vwapguard::NonConvergence& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const vwapguard::SingularLinearSystem& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const vwapguard::ImpactDerivativeUnavailable& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const vwapguard::NoSignChange& e) {
        std::cerr << "pricing error: " << e.what() << '\n';
        for (const auto& [lambda, h] : e.samples()) std::cerr << "  h(" << lambda << ") = " << h << '\n';
        return kNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
