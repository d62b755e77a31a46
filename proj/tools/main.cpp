#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "portopt/backtest.hpp"
#include "portopt/csv.hpp"
#include "portopt/errors.hpp"
#include "portopt/reports.hpp"
#include "portopt/series.hpp"

namespace {

struct GlobalOptions {
    std::string input;
    std::string out_dir = ".";
    int precision = 4;
    std::string locale_name = "dot";

    portopt::csv::Locale locale() const {
        return locale_name == "comma" ? portopt::csv::Locale::comma
                                      : portopt::csv::Locale::dot;
    }
    portopt::reports::ReportOptions report_options() const {
        return {std::filesystem::path(out_dir), precision};
    }
};

struct BacktestOptions {
    std::string rule;
    std::string naive_mode = "below-half";
    std::string injected_path;
    double initial = 1000.0;
    double monthly = 400.0;
    int warmup_months = 12;
    std::string start_date;
};

void announce(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

int run_stats(const GlobalOptions& opts) {
    const auto prices = portopt::csv::read_price_csv(opts.input, opts.locale());
    const auto returns = portopt::simple_returns(prices);
    const auto cov = portopt::covariance_model(returns);
    announce(portopt::reports::emit_stats_report(returns, cov, opts.report_options()));
    return 0;
}

int run_frontier(const GlobalOptions& opts) {
    const auto prices = portopt::csv::read_price_csv(opts.input, opts.locale());
    const auto returns = portopt::simple_returns(prices);
    const auto frontier = portopt::frontier_for(returns);
    announce(portopt::reports::emit_frontier_report(returns.assets, frontier,
                                                    opts.report_options()));
    return 0;
}

int run_min_risk(const GlobalOptions& opts) {
    const auto prices = portopt::csv::read_price_csv(opts.input, opts.locale());
    const auto returns = portopt::simple_returns(prices);
    const auto frontier = portopt::frontier_for(returns);
    announce(portopt::reports::emit_min_risk_report(
        returns.assets, portopt::min_risk_portfolio(frontier), opts.report_options()));
    return 0;
}

int run_backtest_cmd(const GlobalOptions& opts, const BacktestOptions& bt) {
    const auto prices = portopt::csv::read_price_csv(opts.input, opts.locale());

    portopt::StrategyConfig config;
    config.rule = bt.rule == "naive" ? portopt::ContributionRule::naive
                                     : portopt::ContributionRule::markowitz;
    config.naive_mode = bt.naive_mode == "lowest-close" ? portopt::NaiveMode::lowest_close
                                                        : portopt::NaiveMode::below_half;
    config.initial_contribution = bt.initial;
    config.monthly_contribution = bt.monthly;
    config.warmup_months = bt.warmup_months;

    portopt::InjectedTargets injected;
    const portopt::InjectedTargets* injected_ptr = nullptr;
    if (!bt.injected_path.empty()) {
        if (config.rule != portopt::ContributionRule::markowitz)
            throw portopt::ValidationError("--injected-targets requires --rule markowitz");
        injected = portopt::csv::read_injected_targets_csv(bt.injected_path, opts.locale());
        injected_ptr = &injected;
        config.rule = portopt::ContributionRule::markowitz_with_injected_targets;
    }

    if (!bt.start_date.empty()) {
        config.start_date = portopt::parse_date(bt.start_date);
    } else {
        // Default: the first month after the warmup span, measured from the
        // month the history begins in.
        const auto aligned = portopt::align_prices(prices);
        const portopt::Date first_month = portopt::month_start(aligned.dates.front());
        config.start_date = injected_ptr == nullptr
                                ? portopt::shift_month_start(first_month, config.warmup_months)
                                : first_month;
    }

    const auto state = portopt::run_backtest(prices, config, injected_ptr);
    announce(portopt::reports::emit_backtest_report(state, opts.report_options()));
    return 0;
}

int run_quota(const GlobalOptions& opts) {
    const auto input = portopt::csv::read_quota_input_csv(opts.input, opts.locale());
    const auto ledger = portopt::csv::ledger_from_quota_input(input);
    announce(portopt::reports::emit_quota_report(ledger, opts.report_options()));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-variance portfolio toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file; flags win");

    GlobalOptions opts;
    app.add_option("--input", opts.input, "Input CSV file")->required();
    app.add_option("--out-dir", opts.out_dir, "Directory for report files")
        ->capture_default_str();
    app.add_option("--precision", opts.precision, "Decimal places for display columns")
        ->capture_default_str()
        ->check(CLI::Range(0, 17));
    app.add_option("--locale", opts.locale_name,
                   "Input encoding: dot (comma-separated, '.' decimals) or comma "
                   "(semicolon-separated, ',' decimals)")
        ->capture_default_str()
        ->check(CLI::IsMember({"dot", "comma"}));

    auto* stats = app.add_subcommand("stats", "Per-asset return statistics and comovement");
    auto* frontier = app.add_subcommand("frontier", "Efficient-frontier curve and constants");
    auto* min_risk = app.add_subcommand("min-risk", "Least-risk fully invested allocation");
    auto* backtest = app.add_subcommand("backtest", "Monthly contribution strategy simulation");
    auto* quota = app.add_subcommand("quota", "Unitized fund ledger from a daily history");

    BacktestOptions bt;
    backtest->add_option("--rule", bt.rule, "Contribution rule")
        ->required()
        ->check(CLI::IsMember({"naive", "markowitz"}));
    backtest->add_option("--naive-mode", bt.naive_mode, "Asset choice under the naive rule")
        ->capture_default_str()
        ->check(CLI::IsMember({"below-half", "lowest-close"}));
    backtest->add_option("--injected-targets", bt.injected_path,
                         "CSV of dated target percents replacing computed allocations");
    backtest->add_option("--initial", bt.initial, "Opening contribution")
        ->capture_default_str();
    backtest->add_option("--monthly", bt.monthly, "Contribution added each later month")
        ->capture_default_str();
    backtest->add_option("--warmup-months", bt.warmup_months,
                         "Trailing window length for computed allocations")
        ->capture_default_str();
    backtest->add_option("--start-date", bt.start_date,
                         "First trade date (ISO-8601); defaults to the first month after "
                         "the warmup span");

    for (auto* sub : {stats, frontier, min_risk, backtest, quota}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (stats->parsed()) return run_stats(opts);
        if (frontier->parsed()) return run_frontier(opts);
        if (min_risk->parsed()) return run_min_risk(opts);
        if (backtest->parsed()) return run_backtest_cmd(opts, bt);
        if (quota->parsed()) return run_quota(opts);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const portopt::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const portopt::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
