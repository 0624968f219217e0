#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <string_view>

namespace hyprec {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
// Parsing accepts strict ISO-8601 `YYYY-MM-DD` only.
struct Date {
    std::int32_t days = 0;

    static Date parse(std::string_view iso);       // throws ParseError
    static Date from_ymd(int year, int month, int day);  // throws ParseError

    std::string iso() const;
    int year() const;

    Date plus_days(std::int32_t n) const { return Date{days + n}; }

    auto operator<=>(const Date&) const = default;
};

// b - a in whole days.
inline std::int32_t days_between(Date a, Date b) { return b.days - a.days; }

}  // namespace hyprec
