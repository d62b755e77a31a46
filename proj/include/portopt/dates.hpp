#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace portopt {

/// Proleptic Gregorian calendar date. Ordered lexicographically by (year, month, day).
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const Date&) const = default;
};

[[nodiscard]] bool is_valid_date(const Date& d) noexcept;

/// Days since 1970-01-01 (negative before it).
[[nodiscard]] std::int64_t serial_day(const Date& d) noexcept;

[[nodiscard]] Date date_from_serial(std::int64_t days) noexcept;

/// Strict ISO-8601 "YYYY-MM-DD". Throws ValidationError on anything else.
[[nodiscard]] Date parse_date(const std::string& text);

[[nodiscard]] std::string to_iso(const Date& d);

/// First calendar day of d's month.
[[nodiscard]] Date month_start(const Date& d) noexcept;

/// First calendar day of the month `count` months after d's month; count may be negative.
[[nodiscard]] Date shift_month_start(const Date& d, int count) noexcept;

/// Orders and groups dates by calendar month.
[[nodiscard]] constexpr int month_key(const Date& d) noexcept {
    return d.year * 12 + (d.month - 1);
}

/// "YYYY-MM" label for a month.
[[nodiscard]] std::string to_iso_month(const Date& d);

}  // namespace portopt
