#pragma once

#include "agenda/common.hpp"
#include "agenda/corpus.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace agenda {

/// One prime-ministerial period.
struct Government {
    int id = 0;
    std::string name;
    std::string prime_minister;
    std::string party;
    Date start{};
    std::optional<Date> end; ///< empty for the sitting government
    bool excluded = false;   ///< never used as a comparison unit
    std::optional<int> compare_to; ///< id of the predecessor it is compared with
};

struct Election {
    int id = 0;
    Date date{};
    std::string winner;
    int seats = 0;
};

class Timeline {
public:
    Timeline() = default;
    /// Validates ordering, id uniqueness and comparison links.
    Timeline(std::vector<Government> governments, std::vector<Election> elections);

    /// governments: `id,name,party,start,end,excluded,compare_to` (extra columns
    /// ignored); elections: `id,date,winner` plus optional `seats`.
    static Timeline load(const std::filesystem::path& governments_csv, const std::filesystem::path& elections_csv);

    const std::vector<Government>& governments() const { return governments_; }
    const std::vector<Election>& elections() const { return elections_; }

    /// Index of the government in office on `day` (latest start <= day).
    int government_at(Date day) const;
    /// Index of the election period containing `day` (latest election <= day).
    int election_at(Date day) const;

    int government_index(int id) const;
    int election_index(int id) const;

    /// (earlier, later) government indices for every non-excluded government
    /// with a comparison predecessor, in chronological order of the later one.
    std::vector<std::pair<int, int>> government_pairs() const;
    /// Consecutive elections (e-1, e).
    std::vector<std::pair<int, int>> election_pairs() const;

private:
    std::vector<Government> governments_;
    std::vector<Election> elections_;
};

/// Government and election of each sitting period, by majority of its sitting
/// days (ties go to the earlier unit).
struct PeriodMap {
    std::vector<int> government; ///< timeline index per period
    std::vector<int> election;   ///< timeline index per period
};

PeriodMap map_periods(const SittingCalendar& calendar, const Timeline& timeline);

} // namespace agenda
