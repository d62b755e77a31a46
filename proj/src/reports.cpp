#include "portopt/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "portopt/errors.hpp"

namespace portopt::reports {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

std::filesystem::path target(const ReportOptions& options, const char* name) {
    std::filesystem::create_directories(options.out_dir);
    return options.out_dir / name;
}

// Commas and newlines would break the single-cell warning column.
std::string sanitize_cell(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

}  // namespace

std::string fixed(double value, int places) {
    if (places < 0 || places > 17) throw ValidationError("display precision must be in [0, 17]");
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", places, value);
    std::string text = buffer;
    if (text.find_first_not_of("-0.") == std::string::npos && text.front() == '-')
        text.erase(0, 1);
    return text;
}

std::string full(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::vector<std::filesystem::path> emit_stats_report(const ReturnMatrix& returns,
                                                     const CovarianceModel& cov,
                                                     const ReportOptions& options) {
    const int p = options.precision;
    const auto n = static_cast<std::size_t>(returns.returns.cols());
    if (cov.matrix.rows() != static_cast<Eigen::Index>(n))
        throw ValidationError("emit_stats_report: covariance size does not match the universe");

    const auto stats_path = target(options, "stats.csv");
    {
        auto out = open_out(stats_path);
        out << "asset,mean_return,stddev_return\n";
        for (std::size_t j = 0; j < n; ++j) {
            const auto col = static_cast<Eigen::Index>(j);
            out << returns.assets[j] << ',' << fixed(returns.means(col), p) << ','
                << fixed(cov.stddevs(col), p) << '\n';
        }
    }

    const auto cov_path = target(options, "covariance.csv");
    {
        auto out = open_out(cov_path);
        out << "asset";
        for (const auto& a : returns.assets) out << ',' << a;
        out << '\n';
        for (std::size_t i = 0; i < n; ++i) {
            out << returns.assets[i];
            for (std::size_t j = 0; j < n; ++j)
                out << ','
                    << full(cov.matrix(static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(j)));
            out << '\n';
        }
    }

    const auto corr_path = target(options, "correlation.csv");
    {
        auto out = open_out(corr_path);
        out << "asset";
        for (const auto& a : returns.assets) out << ',' << a;
        out << '\n';
        for (std::size_t i = 0; i < n; ++i) {
            out << returns.assets[i];
            for (std::size_t j = 0; j < n; ++j) {
                const double denom = cov.stddevs(static_cast<Eigen::Index>(i)) *
                                     cov.stddevs(static_cast<Eigen::Index>(j));
                if (!(denom > 0.0))
                    throw DegenerateSeriesError(
                        "correlation undefined for constant series " +
                        returns.assets[cov.stddevs(static_cast<Eigen::Index>(i)) > 0.0 ? j : i]);
                const double rho = cov.matrix(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)) /
                                   denom;
                out << ',' << fixed(std::clamp(rho, -1.0, 1.0), p);
            }
            out << '\n';
        }
    }

    return {stats_path, cov_path, corr_path};
}

std::vector<std::filesystem::path> emit_frontier_report(const std::vector<std::string>& assets,
                                                        const FrontierModel<double>& frontier,
                                                        const ReportOptions& options,
                                                        int grid_rows) {
    if (grid_rows < 2) throw ValidationError("frontier grid needs at least 2 rows");
    if (assets.size() != static_cast<std::size_t>(frontier.m.size()))
        throw ValidationError("emit_frontier_report: asset list does not match the model");

    const MinRiskPortfolio<double> vertex = min_risk_portfolio(frontier);

    // Presentation grid: quarter of the vertex return up to four times it,
    // floored away from zero since the curve is only defined for r > 0.
    const double lo = std::max(1e-6, vertex.expected_return / 4.0);
    const double hi = 4.0 * vertex.expected_return;
    if (!(hi > lo))
        throw ValidationError(
            "emit_frontier_report: vertex return too small for the report grid");

    const auto grid_path = target(options, "frontier.csv");
    {
        auto out = open_out(grid_path);
        out << "r,sigma";
        for (std::size_t j = 1; j <= assets.size(); ++j) out << ",x_" << j;
        out << '\n';
        for (int i = 0; i < grid_rows; ++i) {
            const double r = lo + (hi - lo) * static_cast<double>(i) /
                                      static_cast<double>(grid_rows - 1);
            const Eigen::VectorXd x = frontier_allocation(frontier, r);
            out << full(r) << ',' << full(frontier_risk(frontier, r));
            for (Eigen::Index j = 0; j < x.size(); ++j) out << ',' << full(x(j));
            out << '\n';
        }
    }

    const auto summary_path = target(options, "frontier_summary.txt");
    {
        auto out = open_out(summary_path);
        out << "assets=";
        for (std::size_t j = 0; j < assets.size(); ++j)
            out << (j ? "," : "") << assets[j];
        out << '\n';
        out << "a=" << full(frontier.a) << '\n';
        out << "b=" << full(frontier.b) << '\n';
        out << "c=" << full(frontier.c) << '\n';
        out << "delta=" << full(frontier.delta) << '\n';
        out << "r_min=" << full(vertex.expected_return) << '\n';
        out << "sigma_min=" << full(vertex.risk) << '\n';
        for (std::size_t j = 0; j < assets.size(); ++j)
            out << "x_min_" << assets[j] << '='
                << full(vertex.weights(static_cast<Eigen::Index>(j))) << '\n';
    }

    return {grid_path, summary_path};
}

std::vector<std::filesystem::path> emit_min_risk_report(const std::vector<std::string>& assets,
                                                        const MinRiskPortfolio<double>& portfolio,
                                                        const ReportOptions& options) {
    if (assets.size() != static_cast<std::size_t>(portfolio.weights.size()))
        throw ValidationError("emit_min_risk_report: asset list does not match the portfolio");
    const int p = options.precision;

    const auto path = target(options, "min_risk.txt");
    {
        auto out = open_out(path);
        out << "expected_return=" << full(portfolio.expected_return) << '\n';
        out << "risk=" << full(portfolio.risk) << '\n';
        for (std::size_t j = 0; j < assets.size(); ++j)
            out << "weight_" << assets[j] << '='
                << full(portfolio.weights(static_cast<Eigen::Index>(j))) << '\n';
        for (std::size_t j = 0; j < assets.size(); ++j)
            out << "percent_" << assets[j] << '='
                << fixed(100.0 * portfolio.weights(static_cast<Eigen::Index>(j)), p) << '\n';
    }
    return {path};
}

std::vector<std::filesystem::path> emit_backtest_report(const BacktestState& state,
                                                        const ReportOptions& options) {
    if (state.ledger.empty()) throw ValidationError("emit_backtest_report: no months recorded");
    const int p = options.precision;
    const auto& assets = state.assets;

    const auto monthly_path = target(options, "backtest_monthly.csv");
    {
        auto out = open_out(monthly_path);
        out << "month,trade_date,month_end";
        for (const auto& a : assets) out << ",close_" << a;
        for (const auto& a : assets) out << ",shares_" << a;
        out << ",patrimony,skipped,warning\n";
        for (const auto& rec : state.ledger) {
            out << to_iso_month(rec.month) << ',' << to_iso(rec.trade_date) << ','
                << to_iso(rec.month_end_date);
            for (Eigen::Index j = 0; j < rec.month_end_closes.size(); ++j)
                out << ',' << full(rec.month_end_closes(j));
            for (Eigen::Index j = 0; j < rec.shares_after.size(); ++j)
                out << ',' << full(rec.shares_after(j));
            out << ',' << fixed(rec.patrimony_after, 2) << ',' << (rec.skipped ? 1 : 0) << ','
                << sanitize_cell(rec.warning) << '\n';
        }
    }

    const auto decisions_path = target(options, "backtest_decisions.csv");
    {
        auto out = open_out(decisions_path);
        out << "month";
        for (const auto& a : assets) out << ",p_" << a;
        for (const auto& a : assets) out << ",ps_" << a;
        for (const auto& a : assets) out << ",dp_" << a;
        out << ",chosen\n";
        for (const auto& rec : state.ledger) {
            out << to_iso_month(rec.month);
            for (Eigen::Index j = 0; j < rec.current_percent.size(); ++j)
                out << ',' << fixed(rec.current_percent(j), p);
            for (Eigen::Index j = 0; j < rec.suggested_percent.size(); ++j)
                out << ',' << fixed(rec.suggested_percent(j), p);
            for (Eigen::Index j = 0; j < rec.percent_gaps.size(); ++j)
                out << ',' << fixed(rec.percent_gaps(j), p);
            out << ',' << rec.chosen_asset << '\n';
        }
    }

    const auto summary_path = target(options, "backtest_summary.txt");
    {
        const ContributionSplit split = contribution_vs_interest_split(state);
        auto out = open_out(summary_path);
        out << "months=" << state.ledger.size() << '\n';
        out << "contributed=" << fixed(split.contributed, 2) << '\n';
        out << "final_patrimony=" << fixed(state.ledger.back().patrimony_after, 2) << '\n';
        out << "growth=" << fixed(split.growth, 2) << '\n';
        out << "percent_contributed=" << fixed(split.percent_contributed, 2) << '\n';
        out << "percent_growth=" << fixed(split.percent_growth, 2) << '\n';
    }

    return {monthly_path, decisions_path, summary_path};
}

std::vector<std::filesystem::path> emit_quota_report(const QuotaLedger& ledger,
                                                     const ReportOptions& options) {
    const int p = options.precision;
    const auto& entries = ledger.entries();
    if (entries.empty()) throw ValidationError("emit_quota_report: empty ledger");

    const auto ledger_path = target(options, "quota_ledger.csv");
    {
        auto out = open_out(ledger_path);
        out << "date,portfolio_return,flow,quota_value,quota_count,capital\n";
        for (const auto& e : entries) {
            out << to_iso(e.date) << ',' << fixed(e.portfolio_return, p) << ','
                << fixed(e.flow, 2) << ',' << fixed(e.quota_value, p) << ','
                << fixed(e.quota_count, 2) << ',' << fixed(e.capital, 2) << '\n';
        }
    }

    const auto summary_path = target(options, "quota_summary.txt");
    {
        auto out = open_out(summary_path);
        out << "days=" << entries.size() << '\n';
        out << "final_quota=" << fixed(entries.back().quota_value, p) << '\n';
        out << "final_capital=" << fixed(entries.back().capital, 2) << '\n';
        out << "net_deposited=" << fixed(ledger.net_deposited(), 2) << '\n';
        out << "quota_return=" << fixed(ledger.quota_return(), p) << '\n';
        out << "capital_return=" << fixed(ledger.capital_return(), p) << '\n';
        if (entries.size() >= 2) {
            out << "risk=" << fixed(ledger.risk(), p) << '\n';
            const double risk = ledger.risk();
            if (risk > 0.0)
                out << "performance_quotient="
                    << fixed(ledger.performance_quotient(), p) << '\n';
        }
    }

    return {ledger_path, summary_path};
}

}  // namespace portopt::reports
