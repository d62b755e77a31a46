#include "portopt/backtest.hpp"

#include <algorithm>
#include <cmath>

#include "portopt/errors.hpp"

namespace portopt {

namespace {

// Widest tolerated distance between a required date and the observation that
// stands in for it: 10 trading days, counted as 14 calendar days.
constexpr std::int64_t kMaxGapDays = 14;

std::size_t argmin_with_lowest_index_tie(const Eigen::VectorXd& v) {
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) < v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
    return best;
}

void require_percent_vector(const Eigen::VectorXd& v, const char* who) {
    if (v.size() == 0) throw ValidationError(std::string(who) + ": empty percent vector");
    if (std::abs(v.sum() - 100.0) > 1e-9)
        throw ValidationError(std::string(who) + ": percentages must sum to 100");
}

}  // namespace

std::size_t choose_asset_markowitz(const Eigen::VectorXd& current_percent,
                                   const Eigen::VectorXd& suggested_percent) {
    require_percent_vector(current_percent, "choose_asset_markowitz");
    require_percent_vector(suggested_percent, "choose_asset_markowitz");
    if (current_percent.size() != suggested_percent.size())
        throw ValidationError("choose_asset_markowitz: vector lengths differ");
    return argmin_with_lowest_index_tie(current_percent - suggested_percent);
}

std::size_t choose_asset_naive_below_half(const Eigen::VectorXd& current_percent) {
    require_percent_vector(current_percent, "choose_asset_naive_below_half");
    // Furthest below an even share; the even target is constant across
    // assets, so this is the smallest current share.
    return argmin_with_lowest_index_tie(current_percent);
}

std::size_t choose_asset_naive_lowest_close(const Eigen::VectorXd& decision_closes) {
    if (decision_closes.size() == 0)
        throw ValidationError("choose_asset_naive_lowest_close: empty close vector");
    return argmin_with_lowest_index_tie(decision_closes);
}

Allocation suggested_allocation(const ReturnMatrix& window) {
    if (window.returns.rows() < 2)
        throw ValidationError("suggested_allocation: trailing window has fewer than 2 returns");
    const FrontierModel<double> f = frontier_for(window);
    return make_allocation(window.assets, min_risk_portfolio(f).weights);
}

namespace {

struct MonthSpan {
    Eigen::Index first_obs;  // index into aligned rows
    Eigen::Index last_obs;
};

class Runner {
public:
    Runner(const std::vector<PriceSeries>& prices, const StrategyConfig& config,
           const InjectedTargets* injected)
        : config_(config), injected_(injected), aligned_(align_prices(prices, 1)) {
        if (!(config.initial_contribution > 0.0))
            throw ValidationError("backtest: initial contribution must be positive");
        if (config.monthly_contribution < 0.0)
            throw ValidationError("backtest: monthly contribution must not be negative");
        if (config.warmup_months < 1)
            throw ValidationError("backtest: warmup must cover at least one month");
        if (!is_valid_date(config.start_date))
            throw ValidationError("backtest: invalid start date");
        const bool wants_injected =
            config.rule == ContributionRule::markowitz_with_injected_targets;
        if (wants_injected && injected == nullptr)
            throw ValidationError("backtest: rule requires injected targets");

        n_ = aligned_.closes.cols();
        state_.assets = aligned_.assets;
        state_.holdings = Eigen::VectorXd::Zero(n_);

        // Per-asset returns over the full aligned grid; decision windows are
        // date slices of this matrix.
        if (aligned_.dates.size() >= 2) {
            std::vector<PriceSeries> aligned_series(static_cast<std::size_t>(n_));
            for (Eigen::Index j = 0; j < n_; ++j) {
                auto& s = aligned_series[static_cast<std::size_t>(j)];
                s.asset_id = aligned_.assets[static_cast<std::size_t>(j)];
                s.dates = aligned_.dates;
                s.closes.assign(aligned_.closes.col(j).begin(), aligned_.closes.col(j).end());
            }
            returns_ = simple_returns(aligned_series);
        } else {
            returns_.assets = aligned_.assets;
            returns_.returns.resize(0, n_);
            returns_.means = Eigen::VectorXd::Zero(n_);
        }
    }

    BacktestState run() {
        const int first_month = month_key(config_.start_date);
        const int last_month = month_key(aligned_.dates.back());
        if (first_month > last_month)
            throw ValidationError("backtest: start date lies beyond the price history");

        for (int key = first_month; key <= last_month; ++key) {
            const MonthSpan span = month_span(key);
            if (key == first_month)
                run_start_month(key, span);
            else
                run_contribution_month(key, span);
        }
        return std::move(state_);
    }

private:
    // Observation rows belonging to calendar month `key`; on the start month
    // only rows on or after the start date count. The trade executes at the
    // first trading day found in the month, however late it falls; the
    // month-end patrimony mark is calendar-anchored, so the nearest prior
    // observation must sit within the gap allowance of the month's last day.
    MonthSpan month_span(int key) const {
        const Date lo = date_from_month_key(key);
        Date cutoff = lo;
        if (key == month_key(config_.start_date) && config_.start_date > lo)
            cutoff = config_.start_date;
        const Date hi = shift_month_start(lo, 1);
        const auto begin = std::lower_bound(aligned_.dates.begin(), aligned_.dates.end(), cutoff);
        const auto end = std::lower_bound(aligned_.dates.begin(), aligned_.dates.end(), hi);
        if (begin == end)
            throw DataGapError("backtest: no observations in " + to_iso_month(lo) +
                               (cutoff > lo ? " on or after the start date" : ""));
        const auto first = static_cast<Eigen::Index>(begin - aligned_.dates.begin());
        const auto last = static_cast<Eigen::Index>(end - aligned_.dates.begin()) - 1;
        const std::int64_t month_last_day = serial_day(hi) - 1;
        if (month_last_day - serial_day(aligned_.dates[static_cast<std::size_t>(last)]) >
            kMaxGapDays)
            throw DataGapError("backtest: last observation of " + to_iso_month(lo) +
                               " is more than " + std::to_string(kMaxGapDays) +
                               " days before the month's end");
        return MonthSpan{first, last};
    }

    // Target split for a decision dated `decision`, as fractions summing to 1.
    Eigen::VectorXd target_fractions(int month_of, const Date& decision) {
        if (config_.rule == ContributionRule::naive)
            return Eigen::VectorXd::Constant(n_, 1.0 / static_cast<double>(n_));
        if (injected_ != nullptr) {
            for (const auto& [date, percents] : *injected_) {
                if (month_key(date) != month_of) continue;
                if (percents.size() != n_)
                    throw ValidationError("backtest: injected target width does not match "
                                          "the universe");
                if (std::abs(percents.sum() - 100.0) > 1e-6)
                    throw ValidationError("backtest: injected targets must sum to 100 for " +
                                          to_iso_month(date));
                return percents / 100.0;
            }
            throw ValidationError("backtest: no injected target row for month " +
                                  std::to_string(month_of / 12) + "-" +
                                  std::to_string(month_of % 12 + 1));
        }
        const Date window_end = month_start(decision);
        const Date window_begin = shift_month_start(window_end, -config_.warmup_months);
        const ReturnMatrix window = slice_by_date(returns_, window_begin, window_end);
        if (window.returns.rows() < 2)
            throw ValidationError("backtest: trailing window before " + to_iso(window_end) +
                                  " has fewer than 2 returns");
        return suggested_allocation(window).weights;
    }

    void run_start_month(int key, const MonthSpan& span) {
        const Eigen::VectorXd trade_closes = aligned_.closes.row(span.first_obs);
        Eigen::VectorXd split;
        if (config_.rule == ContributionRule::naive)
            split = Eigen::VectorXd::Constant(n_, 1.0 / static_cast<double>(n_));
        else
            split = target_fractions(key, config_.start_date);

        // A buy-only start cannot execute a short suggestion: drop negative
        // components and rescale. The clamped sum is at least the original
        // sum of 1, so the divisor stays positive.
        Eigen::VectorXd bought = split;
        if (bought.minCoeff() < 0.0) {
            bought = bought.cwiseMax(0.0);
            bought /= bought.sum();
        }

        state_.holdings +=
            (config_.initial_contribution * bought.array() / trade_closes.array()).matrix();
        state_.contributed += config_.initial_contribution;

        MonthRecord rec;
        rec.month = month_start(config_.start_date);
        rec.trade_date = aligned_.dates[static_cast<std::size_t>(span.first_obs)];
        rec.month_end_date = aligned_.dates[static_cast<std::size_t>(span.last_obs)];
        rec.suggested_percent = split * 100.0;
        rec.current_percent = bought * 100.0;
        rec.percent_gaps = rec.current_percent - rec.suggested_percent;
        finish_record(rec, span);
    }

    void run_contribution_month(int key, const MonthSpan& span) {
        const Date month = date_from_month_key(key);
        MonthRecord rec;
        rec.month = month;
        rec.trade_date = aligned_.dates[static_cast<std::size_t>(span.first_obs)];
        rec.month_end_date = aligned_.dates[static_cast<std::size_t>(span.last_obs)];

        if (config_.monthly_contribution == 0.0) {
            rec.current_percent = current_percents(decision_row(month));
            rec.suggested_percent = rec.current_percent;
            rec.percent_gaps = Eigen::VectorXd::Zero(n_);
            finish_record(rec, span);
            return;
        }

        const Eigen::Index decision = decision_row(month);
        rec.current_percent = current_percents(decision);

        Eigen::VectorXd target;
        if (config_.rule == ContributionRule::naive) {
            // Both naive modes report an even split as the reference target.
            target = Eigen::VectorXd::Constant(n_, 100.0 / static_cast<double>(n_));
        } else {
            try {
                target = target_fractions(key, month) * 100.0;
            } catch (const NumericalError& err) {
                rec.suggested_percent = rec.current_percent;
                rec.percent_gaps = Eigen::VectorXd::Zero(n_);
                rec.skipped = true;
                rec.warning = err.what();
                finish_record(rec, span);
                return;
            }
        }
        rec.suggested_percent = target;
        rec.percent_gaps = rec.current_percent - target;

        std::size_t pick = 0;
        if (config_.rule == ContributionRule::naive) {
            pick = config_.naive_mode == NaiveMode::lowest_close
                       ? choose_asset_naive_lowest_close(aligned_.closes.row(decision))
                       : choose_asset_naive_below_half(rec.current_percent);
        } else {
            pick = choose_asset_markowitz(rec.current_percent, rec.suggested_percent);
        }
        rec.chosen_asset = state_.assets[pick];

        const double price = aligned_.closes(span.first_obs, static_cast<Eigen::Index>(pick));
        state_.holdings(static_cast<Eigen::Index>(pick)) +=
            config_.monthly_contribution / price;
        state_.contributed += config_.monthly_contribution;
        finish_record(rec, span);
    }

    // Row used to value the portfolio for month's decision: nearest
    // observation strictly before the month.
    Eigen::Index decision_row(const Date& month) const {
        const auto it = std::lower_bound(aligned_.dates.begin(), aligned_.dates.end(), month);
        if (it == aligned_.dates.begin())
            throw DataGapError("backtest: no observation before " + to_iso_month(month));
        const auto row = static_cast<Eigen::Index>(it - aligned_.dates.begin()) - 1;
        if (serial_day(month) - serial_day(aligned_.dates[static_cast<std::size_t>(row)]) >
            kMaxGapDays)
            throw DataGapError("backtest: nearest observation before " + to_iso_month(month) +
                               " is more than " + std::to_string(kMaxGapDays) + " days stale");
        return row;
    }

    Eigen::VectorXd current_percents(Eigen::Index row) const {
        const Eigen::VectorXd values =
            (state_.holdings.array() * aligned_.closes.row(row).transpose().array()).matrix();
        const double total = values.sum();
        if (!(total > 0.0)) throw NumericalError("backtest: portfolio value vanished");
        return values * (100.0 / total);
    }

    void finish_record(MonthRecord& rec, const MonthSpan& span) {
        rec.month_end_closes = aligned_.closes.row(span.last_obs);
        rec.shares_after = state_.holdings;
        rec.patrimony_after = state_.holdings.dot(rec.month_end_closes);
        state_.ledger.push_back(std::move(rec));
    }

    static Date date_from_month_key(int key) {
        const int y = (key >= 0 ? key / 12 : (key - 11) / 12);
        return Date{y, key - y * 12 + 1, 1};
    }

    StrategyConfig config_;
    const InjectedTargets* injected_;
    AlignedPrices aligned_;
    ReturnMatrix returns_;
    Eigen::Index n_ = 0;
    BacktestState state_;
};

}  // namespace

BacktestState run_backtest(const std::vector<PriceSeries>& prices, const StrategyConfig& config,
                           const InjectedTargets* injected) {
    return Runner(prices, config, injected).run();
}

ContributionSplit contribution_vs_interest_split(const BacktestState& state) {
    if (state.ledger.empty())
        throw ValidationError("contribution_vs_interest_split: backtest has no months");
    ContributionSplit split;
    split.contributed = state.contributed;
    const double final_patrimony = state.ledger.back().patrimony_after;
    split.growth = final_patrimony - split.contributed;
    if (!(final_patrimony > 0.0))
        throw NumericalError("contribution_vs_interest_split: final patrimony is not positive");
    split.percent_contributed = 100.0 * split.contributed / final_patrimony;
    split.percent_growth = 100.0 * split.growth / final_patrimony;
    return split;
}

}  // namespace portopt
