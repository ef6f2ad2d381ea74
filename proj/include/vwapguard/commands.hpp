#pragma once

#include "vwapguard/run_config.hpp"
#include "vwapguard/trading_curve.hpp"

#include <string>

namespace vwapguard {

/// 12 significant digits, general format, locale independent.
std::string format_number(double value);

/// Header `t,q_star,q_naive,p`, one LF-terminated row per node.
std::string curve_csv(const TradingCurve& optimal, const TradingCurve& naive);

/// Solves the configured problem and returns the CSV text.
std::string run_curve(const RunConfig& config);

/// Prices the configured contract; labeled `key = value unit` lines.
std::string run_price(const RunConfig& config);

struct VerifyResult {
    std::string report;
    bool failed = false;  ///< at least one check is FAIL
};

/// Monte Carlo check of the slippage distribution of the optimal curve.
VerifyResult run_verify(const RunConfig& config);

}  // namespace vwapguard
