#include "agenda/timeline.hpp"

#include "agenda/csv.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace agenda {

Timeline::Timeline(std::vector<Government> governments, std::vector<Election> elections)
    : governments_(std::move(governments)), elections_(std::move(elections))
{
    if (governments_.empty())
        throw InputError("timeline has no governments");
    if (elections_.empty())
        throw InputError("timeline has no elections");

    std::set<int> gov_ids;
    for (std::size_t i = 0; i < governments_.size(); ++i) {
        const auto& g = governments_[i];
        if (!gov_ids.insert(g.id).second)
            throw InputError("duplicate government id " + std::to_string(g.id));
        if (g.end && *g.end < g.start)
            throw InputError("government " + g.name + " ends before it starts");
        if (i > 0) {
            const auto& prev = governments_[i - 1];
            if (!prev.end)
                throw InputError("government " + prev.name + " has no end date but is not the last");
            if (g.start < *prev.end)
                throw InputError("governments " + prev.name + " and " + g.name + " overlap or are out of order");
        }
    }
    for (const auto& g : governments_) {
        if (!g.compare_to)
            continue;
        if (!gov_ids.contains(*g.compare_to))
            throw InputError("government " + g.name + " compares to unknown id " + std::to_string(*g.compare_to));
        const auto& target = governments_[static_cast<std::size_t>(government_index(*g.compare_to))];
        if (target.excluded)
            throw InputError("government " + g.name + " compares to excluded government " + target.name);
        if (!(target.start < g.start))
            throw InputError("government " + g.name + " compares to a later government");
    }

    std::set<int> el_ids;
    for (std::size_t i = 0; i < elections_.size(); ++i) {
        if (!el_ids.insert(elections_[i].id).second)
            throw InputError("duplicate election id " + std::to_string(elections_[i].id));
        if (i > 0 && !(elections_[i - 1].date < elections_[i].date))
            throw InputError("elections are not in date order");
    }
}

namespace {

bool parse_bool(std::string_view text, const std::string& where)
{
    const std::string t = to_lower_ascii(trim(text));
    if (t == "true" || t == "yes" || t == "1")
        return true;
    if (t == "false" || t == "no" || t == "0" || t.empty())
        return false;
    throw InputError(where + ": cannot read '" + std::string(text) + "' as a boolean");
}

} // namespace

Timeline Timeline::load(const std::filesystem::path& governments_csv, const std::filesystem::path& elections_csv)
{
    const auto gt = csv::Table::read(governments_csv);
    const auto c_id = gt.column("id"), c_name = gt.column("name"), c_party = gt.column("party"),
               c_start = gt.column("start"), c_end = gt.column("end"), c_ex = gt.column("excluded"),
               c_cmp = gt.column("compare_to");
    const bool has_pm = gt.has_column("prime_minister");
    std::vector<Government> govs;
    for (const auto& r : gt.rows()) {
        Government g;
        g.id = static_cast<int>(csv::parse_integer(r[c_id]));
        g.name = r[c_name];
        g.prime_minister = has_pm ? r[gt.column("prime_minister")] : g.name;
        g.party = r[c_party];
        g.start = parse_date(r[c_start]);
        if (!trim(r[c_end]).empty())
            g.end = parse_date(r[c_end]);
        g.excluded = parse_bool(r[c_ex], governments_csv.string());
        if (!trim(r[c_cmp]).empty())
            g.compare_to = static_cast<int>(csv::parse_integer(r[c_cmp]));
        govs.push_back(std::move(g));
    }

    const auto et = csv::Table::read(elections_csv);
    const auto e_id = et.column("id"), e_date = et.column("date"), e_win = et.column("winner");
    const bool has_seats = et.has_column("seats");
    std::vector<Election> els;
    for (const auto& r : et.rows()) {
        Election e;
        e.id = static_cast<int>(csv::parse_integer(r[e_id]));
        e.date = parse_date(r[e_date]);
        e.winner = r[e_win];
        if (has_seats)
            e.seats = static_cast<int>(csv::parse_integer(r[et.column("seats")]));
        els.push_back(std::move(e));
    }
    return Timeline(std::move(govs), std::move(els));
}

int Timeline::government_at(Date day) const
{
    const auto it = std::upper_bound(governments_.begin(), governments_.end(), day,
                                     [](Date d, const Government& g) { return d < g.start; });
    if (it == governments_.begin())
        throw InputError(format_date(day) + " precedes the first government");
    const auto& g = *std::prev(it);
    if (g.end && *g.end < day)
        throw InputError(format_date(day) + " falls after the last listed government ended");
    return static_cast<int>(std::prev(it) - governments_.begin());
}

int Timeline::election_at(Date day) const
{
    const auto it = std::upper_bound(elections_.begin(), elections_.end(), day,
                                     [](Date d, const Election& e) { return d < e.date; });
    if (it == elections_.begin())
        throw InputError(format_date(day) + " precedes the first election");
    return static_cast<int>(std::prev(it) - elections_.begin());
}

int Timeline::government_index(int id) const
{
    for (std::size_t i = 0; i < governments_.size(); ++i)
        if (governments_[i].id == id)
            return static_cast<int>(i);
    throw InputError("unknown government id " + std::to_string(id));
}

int Timeline::election_index(int id) const
{
    for (std::size_t i = 0; i < elections_.size(); ++i)
        if (elections_[i].id == id)
            return static_cast<int>(i);
    throw InputError("unknown election id " + std::to_string(id));
}

std::vector<std::pair<int, int>> Timeline::government_pairs() const
{
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < governments_.size(); ++i) {
        const auto& g = governments_[i];
        if (g.excluded || !g.compare_to)
            continue;
        pairs.emplace_back(government_index(*g.compare_to), static_cast<int>(i));
    }
    return pairs;
}

std::vector<std::pair<int, int>> Timeline::election_pairs() const
{
    std::vector<std::pair<int, int>> pairs;
    for (int e = 1; e < static_cast<int>(elections_.size()); ++e)
        pairs.emplace_back(e - 1, e);
    return pairs;
}

PeriodMap map_periods(const SittingCalendar& calendar, const Timeline& timeline)
{
    std::vector<std::map<int, int>> gov_days(static_cast<std::size_t>(calendar.period_count));
    std::vector<std::map<int, int>> el_days(static_cast<std::size_t>(calendar.period_count));
    for (std::size_t i = 0; i < calendar.days.size(); ++i) {
        const auto s = static_cast<std::size_t>(calendar.period_of_day[i]);
        ++gov_days[s][timeline.government_at(calendar.days[i])];
        ++el_days[s][timeline.election_at(calendar.days[i])];
    }
    auto majority = [](const std::map<int, int>& counts) {
        int best = -1, best_n = 0;
        for (const auto& [unit, n] : counts)
            if (n > best_n) {
                best = unit;
                best_n = n;
            }
        return best;
    };
    PeriodMap map;
    for (int s = 0; s < calendar.period_count; ++s) {
        map.government.push_back(majority(gov_days[static_cast<std::size_t>(s)]));
        map.election.push_back(majority(el_days[static_cast<std::size_t>(s)]));
    }
    return map;
}

} // namespace agenda
