#pragma once

#include <vector>

#include "portopt/dates.hpp"

/// Unitization of a portfolio. The quota value starts at 1 and compounds the
/// per-period portfolio returns; deposits and withdrawals change only the
/// quota count, never the quota value. Cumulative quota return is therefore
/// immune to cash flows, which is what makes strategies comparable.
namespace portopt {

struct QuotaEntry {
    Date date;
    double portfolio_return = 0.0;  ///< period return applied on this date
    double flow = 0.0;              ///< signed cash flow after the return
    double quota_value = 1.0;
    double quota_count = 0.0;
    double capital = 0.0;           ///< quota_count * quota_value
};

class QuotaLedger {
public:
    /// Opens the ledger with quota value 1 and an initial deposit.
    QuotaLedger(const Date& start, double initial_deposit);

    /// Appends one period: the return compounds the quota value first, then
    /// the flow converts into quota count at the post-return value.
    ///
    /// A return at or below -100% and a withdrawal larger than the
    /// post-return capital are rejected.
    void apply_day(const Date& date, double portfolio_return, double flow);

    [[nodiscard]] const std::vector<QuotaEntry>& entries() const noexcept { return entries_; }

    /// Final quota value over initial quota value, minus one.
    [[nodiscard]] double quota_return() const;

    /// Final capital over net deposits, minus one. Requires net deposits > 0.
    [[nodiscard]] double capital_return() const;

    /// Sum of all flows (deposits minus withdrawals).
    [[nodiscard]] double net_deposited() const noexcept;

    /// Population standard deviation of the per-period returns (the opening
    /// entry carries no return and is excluded).
    [[nodiscard]] double risk() const;

    /// quota_return() / risk().
    [[nodiscard]] double performance_quotient() const;

private:
    std::vector<QuotaEntry> entries_;
};

/// Builds a ledger when only dated balances and flows are known. Each row
/// states the capital observed after that period's return and the flow paid
/// in or out right after the observation; the period returns are inferred.
[[nodiscard]] QuotaLedger ledger_from_balances(
    const Date& start, double initial_deposit,
    const std::vector<std::tuple<Date, double, double>>& balance_then_flow);

}  // namespace portopt
