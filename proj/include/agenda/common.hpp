#pragma once

#include <chrono>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace agenda {

/// Malformed or missing input data (CLI exit code 2).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Estimation failure such as a non-finite posterior (CLI exit code 3).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Chamber { HouseOfRepresentatives, Senate };

inline constexpr int kChamberCount = 2;

/// Short lowercase code used in file names and CSV columns: "hor" or "senate".
std::string_view to_string(Chamber chamber);

/// Accepts "hor", "house", "reps", "senate" (case-insensitive).
Chamber parse_chamber(std::string_view text);

inline int chamber_index(Chamber chamber) { return chamber == Chamber::HouseOfRepresentatives ? 0 : 1; }

using Date = std::chrono::year_month_day;

/// Strict ISO-8601 calendar date, YYYY-MM-DD.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// Signed calendar-day difference `to - from`.
inline int days_between(Date from, Date to)
{
    return static_cast<int>((std::chrono::sys_days{to} - std::chrono::sys_days{from}).count());
}

inline Date add_days(Date date, int days)
{
    return Date{std::chrono::sys_days{date} + std::chrono::days{days}};
}

/// Identifies one day-level document: the proceedings of a chamber on a date.
struct DocKey {
    Chamber chamber = Chamber::HouseOfRepresentatives;
    Date date{};

    friend bool operator==(const DocKey&, const DocKey&) = default;
    friend auto operator<=>(const DocKey& a, const DocKey& b)
    {
        if (auto c = a.date <=> b.date; c != 0) return c;
        return chamber_index(a.chamber) <=> chamber_index(b.chamber);
    }
};

std::string trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);

} // namespace agenda
