#include "portopt/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "portopt/errors.hpp"

namespace portopt::csv {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) cells.push_back("");
    return cells;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::string lowered(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

char separator(Locale locale) { return locale == Locale::dot ? ',' : ';'; }

double parse_number(const std::string& cell, Locale locale, const std::string& context) {
    std::string text = trim(cell);
    if (text.rfind("R$", 0) == 0) text = trim(text.substr(2));
    if (locale == Locale::comma) {
        std::erase(text, '.');
        std::replace(text.begin(), text.end(), ',', '.');
    }
    if (text.empty()) throw ValidationError(context + ": empty numeric cell");
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ValidationError(context + ": cannot parse number '" + cell + "'");
    return value;
}

Table read_table(const std::filesystem::path& path, Locale locale) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    const char sep = separator(locale);

    Table table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cells = split_line(line, sep);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size())
            throw ValidationError(where(path, line_number) + ": expected " +
                                  std::to_string(table.header.size()) + " cells, found " +
                                  std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_number);
    }
    if (table.header.empty()) throw ValidationError(path.string() + ": file has no header row");
    return table;
}

std::vector<PriceSeries> read_price_csv(const std::filesystem::path& path, Locale locale) {
    const Table table = read_table(path, locale);
    if (table.header.size() < 2)
        throw ValidationError(path.string() + ": price file needs a date column and at least "
                                              "one asset column");
    if (lowered(table.header[0]) != "date")
        throw ValidationError(path.string() + ": first column must be 'date'");
    if (table.rows.empty()) throw ValidationError(path.string() + ": price file has no rows");

    std::vector<PriceSeries> series(table.header.size() - 1);
    for (std::size_t j = 0; j < series.size(); ++j) {
        series[j].asset_id = table.header[j + 1];
        if (series[j].asset_id.empty())
            throw ValidationError(path.string() + ": empty asset name in header");
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string context = where(path, table.line_numbers[i]);
        Date date;
        try {
            date = parse_date(row[0]);
        } catch (const ValidationError& err) {
            throw ValidationError(context + ": " + err.what());
        }
        for (std::size_t j = 0; j < series.size(); ++j) {
            const double close = parse_number(row[j + 1], locale, context);
            if (!(close > 0.0))
                throw ValidationError(context + ": close for " + series[j].asset_id +
                                      " must be positive");
            series[j].dates.push_back(date);
            series[j].closes.push_back(close);
        }
    }
    for (const auto& s : series) validate(s);
    return series;
}

void write_price_csv(const std::filesystem::path& path, const std::vector<PriceSeries>& series) {
    if (series.empty()) throw ValidationError("write_price_csv: no series");
    for (const auto& s : series) {
        validate(s);
        if (s.dates != series.front().dates)
            throw ValidationError("write_price_csv: series dates differ; align them first");
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << "date";
    for (const auto& s : series) out << ',' << s.asset_id;
    out << '\n';
    char buffer[64];
    for (std::size_t i = 0; i < series.front().dates.size(); ++i) {
        out << to_iso(series.front().dates[i]);
        for (const auto& s : series) {
            std::snprintf(buffer, sizeof buffer, "%.17g", s.closes[i]);
            out << ',' << buffer;
        }
        out << '\n';
    }
    if (!out) throw ValidationError("failed writing " + path.string());
}

InjectedTargets read_injected_targets_csv(const std::filesystem::path& path, Locale locale) {
    const Table table = read_table(path, locale);
    if (table.header.size() < 3)
        throw ValidationError(path.string() + ": target file needs a date column and at least "
                                              "two percent columns");
    if (lowered(table.header[0]) != "date")
        throw ValidationError(path.string() + ": first column must be 'date'");

    InjectedTargets targets;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string context = where(path, table.line_numbers[i]);
        Date date;
        try {
            date = parse_date(row[0]);
        } catch (const ValidationError& err) {
            throw ValidationError(context + ": " + err.what());
        }
        Eigen::VectorXd percents(static_cast<Eigen::Index>(row.size() - 1));
        for (std::size_t j = 1; j < row.size(); ++j)
            percents(static_cast<Eigen::Index>(j - 1)) = parse_number(row[j], locale, context);
        targets.emplace_back(date, std::move(percents));
    }
    if (targets.empty()) throw ValidationError(path.string() + ": target file has no rows");
    return targets;
}

QuotaInput read_quota_input_csv(const std::filesystem::path& path, Locale locale) {
    const Table table = read_table(path, locale);
    if (table.header.size() != 3)
        throw ValidationError(path.string() +
                              ": expected columns date,close,flow or date,return,flow");
    if (lowered(table.header[0]) != "date")
        throw ValidationError(path.string() + ": first column must be 'date'");
    if (lowered(table.header[2]) != "flow")
        throw ValidationError(path.string() + ": third column must be 'flow'");

    QuotaInput input;
    const std::string kind = lowered(table.header[1]);
    if (kind == "return")
        input.values_are_returns = true;
    else if (kind != "close")
        throw ValidationError(path.string() + ": second column must be 'close' or 'return'");

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string context = where(path, table.line_numbers[i]);
        try {
            input.dates.push_back(parse_date(row[0]));
        } catch (const ValidationError& err) {
            throw ValidationError(context + ": " + err.what());
        }
        // A return file may leave the first return blank; there is no prior
        // day to measure against. A close file always needs the baseline.
        if (i == 0 && input.values_are_returns && trim(row[1]).empty())
            input.values.push_back(0.0);
        else
            input.values.push_back(parse_number(row[1], locale, context));
        if (!input.values_are_returns && !(input.values.back() > 0.0))
            throw ValidationError(context + ": close must be positive");
        input.flows.push_back(trim(row[2]).empty() ? 0.0
                                                   : parse_number(row[2], locale, context));
    }
    if (input.dates.empty()) throw ValidationError(path.string() + ": fund file has no rows");
    return input;
}

QuotaLedger ledger_from_quota_input(const QuotaInput& input) {
    if (input.dates.empty()) throw ValidationError("quota input has no rows");
    if (!(input.flows.front() > 0.0))
        throw ValidationError("quota input: first row must carry the opening deposit as a "
                              "positive flow");
    QuotaLedger ledger(input.dates.front(), input.flows.front());
    for (std::size_t i = 1; i < input.dates.size(); ++i) {
        double ret;
        if (input.values_are_returns)
            ret = input.values[i];
        else
            ret = input.values[i] / input.values[i - 1] - 1.0;
        ledger.apply_day(input.dates[i], ret, input.flows[i]);
    }
    return ledger;
}

}  // namespace portopt::csv
