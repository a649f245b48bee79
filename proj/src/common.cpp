#include "agenda/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace agenda {

std::string_view to_string(Chamber chamber)
{
    return chamber == Chamber::HouseOfRepresentatives ? "hor" : "senate";
}

Chamber parse_chamber(std::string_view text)
{
    const std::string key = to_lower_ascii(trim(text));
    if (key == "hor" || key == "house" || key == "reps" || key == "houseofrepresentatives")
        return Chamber::HouseOfRepresentatives;
    if (key == "senate")
        return Chamber::Senate;
    throw InputError("unknown chamber '" + std::string(text) + "'");
}

Date parse_date(std::string_view text)
{
    auto fail = [&] { return InputError("invalid ISO date '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw fail();
    auto field = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
        if (ec != std::errc{} || ptr != text.data() + pos + len)
            throw fail();
        return value;
    };
    const Date date{std::chrono::year{field(0, 4)}, std::chrono::month{static_cast<unsigned>(field(5, 2))},
                    std::chrono::day{static_cast<unsigned>(field(8, 2))}};
    if (!date.ok())
        throw fail();
    return date;
}

std::string format_date(Date date)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::string trim(std::string_view text)
{
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    auto first = std::find_if_not(text.begin(), text.end(), is_space);
    auto last = std::find_if_not(text.rbegin(), std::string_view::reverse_iterator(first), is_space).base();
    return std::string(first, last);
}

std::string to_lower_ascii(std::string_view text)
{
    std::string out(text);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

} // namespace agenda
