#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "portopt/backtest.hpp"
#include "portopt/quota.hpp"
#include "portopt/series.hpp"

namespace portopt::csv {

// Input encoding. `dot` is comma-separated with '.' decimals; `comma` is
// semicolon-separated with ',' decimals and tolerates '.' thousands marks and
// a leading "R$". Every file written by this library uses `dot`.
enum class Locale { dot, comma };

char separator(Locale locale);

// Number parser for a single cell, already split on the separator.
double parse_number(const std::string& cell, Locale locale, const std::string& context);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // each exactly header.size() wide
    std::vector<std::size_t> line_numbers;       // 1-based source line per row
};

Table read_table(const std::filesystem::path& path, Locale locale);

// Wide price file: header `date,<asset>...`, one row per observation date.
std::vector<PriceSeries> read_price_csv(const std::filesystem::path& path, Locale locale);

void write_price_csv(const std::filesystem::path& path, const std::vector<PriceSeries>& series);

// Dated percent targets: header `date,<column per asset>`, percents sum to 100.
InjectedTargets read_injected_targets_csv(const std::filesystem::path& path, Locale locale);

// Daily fund history: `date,close,flow` or `date,return,flow`. Missing flow
// cells read as 0.
struct QuotaInput {
    bool values_are_returns = false;
    std::vector<Date> dates;
    std::vector<double> values;
    std::vector<double> flows;
};

QuotaInput read_quota_input_csv(const std::filesystem::path& path, Locale locale);

// Builds the unitized ledger: the first row funds the account (its flow is
// the opening deposit), later rows replay return-then-flow.
QuotaLedger ledger_from_quota_input(const QuotaInput& input);

}  // namespace portopt::csv
