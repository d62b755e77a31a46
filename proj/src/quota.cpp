#include "portopt/quota.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <tuple>

#include "portopt/errors.hpp"
#include "portopt/frontier.hpp"
#include "portopt/stats.hpp"

namespace portopt {

QuotaLedger::QuotaLedger(const Date& start, double initial_deposit) {
    if (!is_valid_date(start)) throw ValidationError("quota ledger: invalid start date");
    if (!(initial_deposit > 0.0))
        throw ValidationError("quota ledger: initial deposit must be positive");
    QuotaEntry e;
    e.date = start;
    e.flow = initial_deposit;
    e.quota_value = 1.0;
    e.quota_count = initial_deposit;
    e.capital = initial_deposit;
    entries_.push_back(e);
}

void QuotaLedger::apply_day(const Date& date, double portfolio_return, double flow) {
    if (!is_valid_date(date)) throw ValidationError("quota ledger: invalid date");
    if (!(entries_.back().date < date))
        throw ValidationError("quota ledger: dates must strictly increase");
    if (!(1.0 + portfolio_return > 0.0))
        throw ValidationError("quota ledger: return at or below -100% on " + to_iso(date));

    QuotaEntry e;
    e.date = date;
    e.portfolio_return = portfolio_return;
    e.flow = flow;
    e.quota_value = entries_.back().quota_value * (1.0 + portfolio_return);
    e.quota_count = entries_.back().quota_count;
    if (flow != 0.0) {
        const double capital_before_flow = e.quota_count * e.quota_value;
        if (flow < 0.0 && -flow > capital_before_flow * (1.0 + 1e-12) + 1e-9)
            throw InsufficientCapitalError("quota ledger: withdrawal of " +
                                           std::to_string(-flow) + " exceeds capital on " +
                                           to_iso(date));
        e.quota_count += flow / e.quota_value;
        if (e.quota_count < 0.0) e.quota_count = 0.0;  // guards roundoff on full withdrawal
    }
    e.capital = e.quota_count * e.quota_value;
    entries_.push_back(e);
}

double QuotaLedger::quota_return() const {
    return entries_.back().quota_value / entries_.front().quota_value - 1.0;
}

double QuotaLedger::capital_return() const {
    const double net = net_deposited();
    if (!(net > 0.0)) throw ValidationError("quota ledger: no net deposits to measure against");
    return entries_.back().capital / net - 1.0;
}

double QuotaLedger::net_deposited() const noexcept {
    double net = 0.0;
    for (const auto& e : entries_) net += e.flow;
    return net;
}

double QuotaLedger::risk() const {
    const auto m = static_cast<Eigen::Index>(entries_.size()) - 1;
    if (m < 1) throw ValidationError("quota ledger: no returns recorded yet");
    Eigen::VectorXd returns(m);
    for (Eigen::Index i = 0; i < m; ++i)
        returns(i) = entries_[static_cast<std::size_t>(i) + 1].portfolio_return;
    return stats::stddev_population(returns);
}

double QuotaLedger::performance_quotient() const {
    return portopt::performance_quotient(quota_return(), risk());
}

QuotaLedger ledger_from_balances(
    const Date& start, double initial_deposit,
    const std::vector<std::tuple<Date, double, double>>& balance_then_flow) {
    QuotaLedger ledger(start, initial_deposit);
    double capital_after_flow = initial_deposit;
    for (const auto& [date, balance, flow] : balance_then_flow) {
        if (!(capital_after_flow > 0.0))
            throw ValidationError("quota ledger: cannot infer a return from zero capital");
        if (!(balance > 0.0))
            throw ValidationError("quota ledger: observed balance must be positive");
        const double period_return = balance / capital_after_flow - 1.0;
        ledger.apply_day(date, period_return, flow);
        capital_after_flow = balance + flow;
    }
    return ledger;
}

}  // namespace portopt
