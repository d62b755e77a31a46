#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "portopt/backtest.hpp"
#include "portopt/csv.hpp"
#include "portopt/errors.hpp"
#include "portopt/frontier.hpp"
#include "portopt/series.hpp"

using portopt::ContributionRule;
using portopt::DataGapError;
using portopt::Date;
using portopt::NaiveMode;
using portopt::PriceSeries;
using portopt::StrategyConfig;
using portopt::ValidationError;

namespace {

std::filesystem::path data_dir() { return std::filesystem::path(PORTOPT_DATA_DIR); }

Eigen::VectorXd pct(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

std::vector<Date> month_ends_2021() {
    return {{2021, 1, 31},  {2021, 2, 28},  {2021, 3, 31},  {2021, 4, 30},
            {2021, 5, 31},  {2021, 6, 30},  {2021, 7, 31},  {2021, 8, 31},
            {2021, 9, 30},  {2021, 10, 31}, {2021, 11, 30}, {2021, 12, 31}};
}

void check_ledger_invariants(const portopt::BacktestState& state) {
    CHECK(state.cash == doctest::Approx(0.0));
    CHECK(state.holdings.minCoeff() >= 0.0);
    Eigen::VectorXd previous = Eigen::VectorXd::Zero(state.holdings.size());
    for (const auto& rec : state.ledger) {
        CHECK(rec.patrimony_after ==
              doctest::Approx(rec.shares_after.dot(rec.month_end_closes)).epsilon(1e-12));
        CHECK(rec.current_percent.sum() == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(rec.suggested_percent.sum() == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(std::abs(rec.percent_gaps.sum()) < 1e-9);
        // Contributions only add shares.
        CHECK(((rec.shares_after - previous).array() >= -1e-12).all());
        previous = rec.shares_after;
    }
    CHECK(state.holdings.isApprox(state.ledger.back().shares_after));
}

}  // namespace

TEST_CASE("pick the asset furthest below its target share") {
    CHECK(portopt::choose_asset_markowitz(pct({44.86, 55.14}), pct({41.31, 58.69})) == 1);
    CHECK(portopt::choose_asset_markowitz(pct({33.04, 66.96}), pct({41.24, 58.76})) == 0);
    // Exactly on target everywhere: tie resolves to the lowest index.
    CHECK(portopt::choose_asset_markowitz(pct({50.0, 50.0}), pct({50.0, 50.0})) == 0);
    CHECK_THROWS_AS((void)portopt::choose_asset_markowitz(pct({50.0, 49.0}), pct({50.0, 50.0})),
                    ValidationError);
    CHECK_THROWS_AS((void)portopt::choose_asset_markowitz(pct({100.0}), pct({50.0, 50.0})),
                    ValidationError);
}

TEST_CASE("naive picks") {
    CHECK(portopt::choose_asset_naive_below_half(pct({30.0, 70.0})) == 0);
    CHECK(portopt::choose_asset_naive_below_half(pct({40.0, 25.0, 35.0})) == 1);
    CHECK(portopt::choose_asset_naive_below_half(pct({50.0, 50.0})) == 0);
    CHECK(portopt::choose_asset_naive_lowest_close(pct({3.0, 2.0, 2.0})) == 1);
    CHECK_THROWS_AS((void)portopt::choose_asset_naive_lowest_close(Eigen::VectorXd()),
                    ValidationError);
}

TEST_CASE("suggested allocation is the minimum-risk point of the window") {
    portopt::ReturnMatrix window;
    window.assets = {"A", "B"};
    window.dates = {{2021, 2, 28}, {2021, 3, 31}, {2021, 4, 30}, {2021, 5, 31}};
    window.returns.resize(4, 2);
    window.returns << 0.02, -0.01, -0.015, 0.012, 0.008, 0.002, -0.004, 0.009;
    window.means = window.returns.colwise().mean();

    const auto x = portopt::suggested_allocation(window);
    CHECK(x.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const auto direct = portopt::min_risk_portfolio(portopt::frontier_for(window));
    CHECK(x.weights.isApprox(direct.weights, 1e-12));

    portopt::ReturnMatrix tiny = window;
    tiny.dates.resize(1);
    tiny.returns.conservativeResize(1, 2);
    CHECK_THROWS_AS((void)portopt::suggested_allocation(tiny), ValidationError);
}

TEST_CASE("replayed targets reproduce the reference decision sequence") {
    const auto prices =
        portopt::csv::read_price_csv(data_dir() / "prices_monthly_2018.csv",
                                     portopt::csv::Locale::dot);
    const auto injected = portopt::csv::read_injected_targets_csv(
        data_dir() / "injected_targets_2018.csv", portopt::csv::Locale::dot);

    StrategyConfig config;
    config.rule = ContributionRule::markowitz_with_injected_targets;
    config.initial_contribution = 1000.0;
    config.monthly_contribution = 400.0;
    config.start_date = {2018, 1, 1};
    const auto state = portopt::run_backtest(prices, config, &injected);

    REQUIRE(state.ledger.size() == 12);
    check_ledger_invariants(state);
    CHECK(state.contributed == doctest::Approx(1000.0 + 11 * 400.0));

    // Start month buys exactly the injected split; trade and mark share a date.
    const auto& start = state.ledger.front();
    CHECK(start.chosen_asset.empty());
    CHECK(start.trade_date == Date{2018, 1, 31});
    CHECK(start.month_end_date == Date{2018, 1, 31});
    CHECK(start.suggested_percent(0) == doctest::Approx(42.47));
    CHECK(start.suggested_percent(1) == doctest::Approx(57.53));
    CHECK(start.percent_gaps.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(start.patrimony_after == doctest::Approx(1000.0).epsilon(1e-12));

    const std::vector<std::string> expected_choice = {
        "IVVB11", "BOVA11", "IVVB11", "BOVA11", "IVVB11", "BOVA11",
        "IVVB11", "BOVA11", "IVVB11", "IVVB11", "BOVA11"};
    for (std::size_t i = 0; i < expected_choice.size(); ++i) {
        const auto& rec = state.ledger[i + 1];
        CHECK_FALSE(rec.skipped);
        CHECK(rec.chosen_asset == expected_choice[i]);
        // Decision marks value at the previous month-end observation.
        CHECK(rec.month == Date{2018, static_cast<int>(i) + 2, 1});
    }

    const auto split = portopt::contribution_vs_interest_split(state);
    CHECK(split.contributed == doctest::Approx(5400.0));
    CHECK(split.contributed + split.growth ==
          doctest::Approx(state.ledger.back().patrimony_after).epsilon(1e-12));
    CHECK(split.percent_contributed + split.percent_growth == doctest::Approx(100.0));
}

TEST_CASE("computed targets match the trailing-window minimum-risk point") {
    const auto prices =
        portopt::csv::read_price_csv(data_dir() / "prices_monthly_2018.csv",
                                     portopt::csv::Locale::dot);
    StrategyConfig config;
    config.rule = ContributionRule::markowitz;
    config.warmup_months = 3;
    config.start_date = {2018, 6, 1};
    const auto state = portopt::run_backtest(prices, config);

    REQUIRE(state.ledger.size() == 7);  // June through December
    check_ledger_invariants(state);

    // Recompute each month's target from the same trailing window.
    const auto returns = portopt::simple_returns(prices);
    for (const auto& rec : state.ledger) {
        const Date window_end = portopt::month_start(rec.month);
        const Date window_begin = portopt::shift_month_start(window_end, -3);
        const auto window = portopt::slice_by_date(returns, window_begin, window_end);
        const auto expected = portopt::suggested_allocation(window);
        for (Eigen::Index j = 0; j < expected.weights.size(); ++j)
            CHECK(rec.suggested_percent(j) ==
                  doctest::Approx(100.0 * expected.weights(j)).epsilon(1e-10));
    }
}

TEST_CASE("degenerate trailing windows skip the month instead of trading") {
    // Asset B doubles asset A's closes from April through September, so any
    // three-month window inside that range has perfectly coupled returns.
    const auto dates = month_ends_2021();
    const PriceSeries a{"A", dates, {100, 102, 101, 103, 104, 106, 104, 106, 107, 105, 108, 110}};
    const PriceSeries b{"B", dates, {50, 53, 50.5, 206, 208, 212, 208, 212, 214, 216, 215, 214}};

    StrategyConfig config;
    config.rule = ContributionRule::markowitz;
    config.warmup_months = 3;
    config.start_date = {2021, 5, 1};
    const auto state = portopt::run_backtest({a, b}, config);

    REQUIRE(state.ledger.size() == 8);  // May through December
    check_ledger_invariants(state);

    const std::vector<bool> expected_skipped = {false, false, false, true,
                                                true,  true,  false, false};
    for (std::size_t i = 0; i < expected_skipped.size(); ++i) {
        const auto& rec = state.ledger[i];
        CHECK(rec.skipped == expected_skipped[i]);
        CHECK(rec.warning.empty() != expected_skipped[i]);
        if (rec.skipped) {
            CHECK(rec.chosen_asset.empty());
            CHECK(rec.percent_gaps.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        }
    }
    // Only the start month and the four tradable months moved money.
    CHECK(state.contributed == doctest::Approx(1000.0 + 4 * 400.0));
    for (std::size_t i = 1; i < state.ledger.size(); ++i) {
        const bool traded = !state.ledger[i].skipped;
        const double moved =
            (state.ledger[i].shares_after - state.ledger[i - 1].shares_after)
                .cwiseAbs()
                .sum();
        CHECK((moved > 0.0) == traded);
    }
}

TEST_CASE("zero monthly contribution only marks patrimony") {
    const auto prices =
        portopt::csv::read_price_csv(data_dir() / "prices_monthly_2018.csv",
                                     portopt::csv::Locale::dot);
    StrategyConfig config;
    config.rule = ContributionRule::naive;
    config.monthly_contribution = 0.0;
    config.start_date = {2018, 1, 1};
    const auto state = portopt::run_backtest(prices, config);

    REQUIRE(state.ledger.size() == 12);
    CHECK(state.contributed == doctest::Approx(1000.0));
    for (std::size_t i = 1; i < state.ledger.size(); ++i) {
        CHECK(state.ledger[i].chosen_asset.empty());
        CHECK(state.ledger[i].shares_after.isApprox(state.ledger.front().shares_after));
    }
}

TEST_CASE("the two naive modes can disagree") {
    const std::vector<Date> dates = {{2021, 1, 29}, {2021, 1, 31}, {2021, 2, 3}, {2021, 2, 26}};
    // The cheap asset is overweight at the decision date: the value rule tops
    // up the expensive one, the price rule still buys the cheap one.
    const PriceSeries cheap{"A", dates, {10.0, 12.0, 12.5, 13.0}};
    const PriceSeries dear{"B", dates, {100.0, 100.0, 101.0, 102.0}};

    StrategyConfig config;
    config.rule = ContributionRule::naive;
    config.start_date = {2021, 1, 29};

    config.naive_mode = NaiveMode::below_half;
    const auto by_value = portopt::run_backtest({cheap, dear}, config);
    config.naive_mode = NaiveMode::lowest_close;
    const auto by_price = portopt::run_backtest({cheap, dear}, config);

    REQUIRE(by_value.ledger.size() == 2);
    REQUIRE(by_price.ledger.size() == 2);
    CHECK(by_value.ledger[1].chosen_asset == "B");
    CHECK(by_price.ledger[1].chosen_asset == "A");
}

TEST_CASE("data gaps stop the run") {
    StrategyConfig config;
    config.rule = ContributionRule::naive;

    SUBCASE("a month without observations") {
        const std::vector<Date> dates = {{2021, 1, 4}, {2021, 1, 29}, {2021, 3, 1}, {2021, 3, 31}};
        const PriceSeries a{"A", dates, {1, 2, 3, 4}};
        const PriceSeries b{"B", dates, {4, 3, 2, 1}};
        config.start_date = {2021, 1, 4};
        CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, config), DataGapError);
    }
    SUBCASE("a decision date with only stale data behind it") {
        const std::vector<Date> dates = {{2021, 1, 4}, {2021, 1, 17}, {2021, 2, 18}, {2021, 2, 26}};
        const PriceSeries a{"A", dates, {1, 2, 3, 4}};
        const PriceSeries b{"B", dates, {4, 3, 2, 1}};
        config.start_date = {2021, 1, 4};
        CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, config), DataGapError);
    }
    SUBCASE("a month whose last observation sits too far from its end") {
        const std::vector<Date> dates = {{2021, 1, 4}, {2021, 1, 10}};
        const PriceSeries a{"A", dates, {1, 2}};
        const PriceSeries b{"B", dates, {4, 3}};
        config.start_date = {2021, 1, 4};
        CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, config), DataGapError);
    }
    SUBCASE("no observation on or after the start date within its month") {
        const std::vector<Date> dates = {{2021, 1, 4}, {2021, 2, 3}, {2021, 2, 26}};
        const PriceSeries a{"A", dates, {1, 2, 3}};
        const PriceSeries b{"B", dates, {4, 3, 2}};
        config.start_date = {2021, 1, 10};
        CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, config), DataGapError);
    }
}

TEST_CASE("configuration and injected-target validation") {
    const std::vector<Date> dates = {{2021, 1, 4}, {2021, 1, 29}, {2021, 2, 3}, {2021, 2, 26}};
    const PriceSeries a{"A", dates, {10, 11, 12, 13}};
    const PriceSeries b{"B", dates, {20, 19, 18, 17}};

    StrategyConfig config;
    config.rule = ContributionRule::naive;
    config.start_date = {2021, 1, 4};

    auto broken = config;
    broken.initial_contribution = 0.0;
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, broken), ValidationError);
    broken = config;
    broken.monthly_contribution = -1.0;
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, broken), ValidationError);
    broken = config;
    broken.warmup_months = 0;
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, broken), ValidationError);
    broken = config;
    broken.start_date = {2021, 2, 30};
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, broken), ValidationError);
    broken = config;
    broken.start_date = {2022, 1, 1};
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, broken), ValidationError);

    auto injected_rule = config;
    injected_rule.rule = ContributionRule::markowitz_with_injected_targets;
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, injected_rule), ValidationError);

    portopt::InjectedTargets only_january = {{Date{2021, 1, 1}, pct({40.0, 60.0})}};
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, injected_rule, &only_january),
                    ValidationError);

    portopt::InjectedTargets bad_sum = {{Date{2021, 1, 1}, pct({40.0, 59.0})},
                                        {Date{2021, 2, 1}, pct({40.0, 59.0})}};
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, injected_rule, &bad_sum),
                    ValidationError);

    portopt::InjectedTargets bad_width = {{Date{2021, 1, 1}, pct({40.0, 30.0, 30.0})},
                                          {Date{2021, 2, 1}, pct({40.0, 30.0, 30.0})}};
    CHECK_THROWS_AS((void)portopt::run_backtest({a, b}, injected_rule, &bad_width),
                    ValidationError);
}

TEST_CASE("split of an empty run is rejected") {
    CHECK_THROWS_AS((void)portopt::contribution_vs_interest_split(portopt::BacktestState{}),
                    ValidationError);
}
