#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "portopt/dates.hpp"
#include "portopt/series.hpp"

/// Monthly-contribution backtest. One asset receives the whole contribution
/// each month, selected either by the naive rule or by the Markowitz rule
/// (buy whatever sits furthest below its minimum-risk target share). Shares
/// are fractional, so every contribution converts fully and cash stays zero.
namespace portopt {

enum class ContributionRule {
    naive,
    markowitz,
    markowitz_with_injected_targets,
};

enum class NaiveMode {
    below_half,    ///< buy the asset whose value share is furthest below 50%
    lowest_close,  ///< buy the asset with the lowest close on the decision date
};

struct StrategyConfig {
    ContributionRule rule = ContributionRule::naive;
    NaiveMode naive_mode = NaiveMode::below_half;
    double initial_contribution = 1000.0;
    double monthly_contribution = 400.0;  ///< zero disables monthly buying
    int warmup_months = 12;               ///< trailing window for suggested targets
    Date start_date;
};

struct MonthRecord {
    Date month;           ///< first calendar day, labels the month
    Date trade_date;      ///< first observation of the month
    Date month_end_date;  ///< last observation of the month
    std::string chosen_asset;             ///< empty on the start month and when skipped
    Eigen::VectorXd current_percent;      ///< value shares at the decision date, sum 100
    Eigen::VectorXd suggested_percent;    ///< target shares, sum 100
    Eigen::VectorXd percent_gaps;         ///< current - suggested, sums to 0
    Eigen::VectorXd month_end_closes;
    Eigen::VectorXd shares_after;
    double patrimony_after = 0.0;         ///< holdings valued at month-end closes
    bool skipped = false;                 ///< no trade this month (degenerate window)
    std::string warning;
};

struct BacktestState {
    std::vector<std::string> assets;
    Eigen::VectorXd holdings;  ///< fractional share counts, never negative
    double cash = 0.0;         ///< always 0 after each contribution
    double contributed = 0.0;  ///< sum of invested contributions
    std::vector<MonthRecord> ledger;
};

struct ContributionSplit {
    double contributed = 0.0;
    double growth = 0.0;
    double percent_contributed = 0.0;  ///< share of final patrimony
    double percent_growth = 0.0;
};

/// Index of the asset whose gap (current - suggested) is most negative, the
/// one furthest below target. Both vectors are percentages summing to 100
/// (within 1e-9). Ties resolve to the lowest index.
[[nodiscard]] std::size_t choose_asset_markowitz(const Eigen::VectorXd& current_percent,
                                                 const Eigen::VectorXd& suggested_percent);

/// Naive pick from value shares: the asset furthest below an even share.
/// Ties resolve to the lowest index.
[[nodiscard]] std::size_t choose_asset_naive_below_half(const Eigen::VectorXd& current_percent);

/// Naive pick from closes: the cheapest asset on the decision date.
/// Ties resolve to the lowest index.
[[nodiscard]] std::size_t choose_asset_naive_lowest_close(const Eigen::VectorXd& decision_closes);

/// Minimum-risk weights over a trailing return window, as an Allocation
/// (fractions summing to 1). Propagates NotPositiveDefiniteError when the
/// window covariance fails its factorization.
[[nodiscard]] Allocation suggested_allocation(const ReturnMatrix& window);

/// Month-keyed target percentages used to replay recorded decisions.
using InjectedTargets = std::vector<std::pair<Date, Eigen::VectorXd>>;

/// Runs the strategy over the aligned price history.
///
/// The initial contribution buys at the first observation on or after the
/// start date: the Markowitz rule buys at its suggested split, the naive rule
/// buys an even split. Every later month makes one decision from data strictly
/// before the month and buys at the month's first observation. Patrimony is
/// marked at month-end closes. A missing price falls back to the nearest
/// prior observation; a gap wider than 14 calendar days is an error.
[[nodiscard]] BacktestState run_backtest(const std::vector<PriceSeries>& prices,
                                         const StrategyConfig& config,
                                         const InjectedTargets* injected = nullptr);

/// Splits the final patrimony into contributed capital and market growth.
[[nodiscard]] ContributionSplit contribution_vs_interest_split(const BacktestState& state);

}  // namespace portopt
