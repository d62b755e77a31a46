#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "portopt/backtest.hpp"
#include "portopt/frontier.hpp"
#include "portopt/quota.hpp"
#include "portopt/series.hpp"

namespace portopt::reports {

struct ReportOptions {
    std::filesystem::path out_dir = ".";
    // Decimal places for display columns (returns, percents, quota values).
    // Currency is always shown with 2 places; plot and recompute columns are
    // written at full round-trip precision.
    int precision = 4;
};

// Fixed-point with `places` decimals; "-0.0000" collapses to "0.0000".
std::string fixed(double value, int places);
// Shortest representation that round-trips a double.
std::string full(double value);

// Each emitter writes its files under out_dir and returns their paths.

// stats.csv, covariance.csv, correlation.csv
std::vector<std::filesystem::path> emit_stats_report(const ReturnMatrix& returns,
                                                     const CovarianceModel& cov,
                                                     const ReportOptions& options);

// frontier.csv (r, sigma, weight columns) and frontier_summary.txt
std::vector<std::filesystem::path> emit_frontier_report(const std::vector<std::string>& assets,
                                                        const FrontierModel<double>& frontier,
                                                        const ReportOptions& options,
                                                        int grid_rows = 200);

// min_risk.txt
std::vector<std::filesystem::path> emit_min_risk_report(const std::vector<std::string>& assets,
                                                        const MinRiskPortfolio<double>& portfolio,
                                                        const ReportOptions& options);

// backtest_monthly.csv, backtest_decisions.csv, backtest_summary.txt
std::vector<std::filesystem::path> emit_backtest_report(const BacktestState& state,
                                                        const ReportOptions& options);

// quota_ledger.csv, quota_summary.txt
std::vector<std::filesystem::path> emit_quota_report(const QuotaLedger& ledger,
                                                     const ReportOptions& options);

}  // namespace portopt::reports
