#pragma once

#include "agenda/common.hpp"
#include "agenda/corpus.hpp"
#include "agenda/timeline.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agenda {

struct CapTopic {
    int code = 0;
    std::string_view name;
};

/// Major topics of the CAP master codebook (there is no 11 or 22).
const std::vector<CapTopic>& cap_codebook();
std::optional<std::string_view> cap_name(int code);

/// Grouping of fitted topics (ids 1..K) into CAP major topics.
class CapScheme {
public:
    struct Entry {
        int topic_id = 0;
        int cap_code = 0;
        std::string cap_name;
    };
    struct Group {
        int cap_code = 0;
        std::string cap_name;
    };

    /// Validates: positive unique topic ids, codebook codes, one name per
    /// code, at least 2 groups.
    explicit CapScheme(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; } ///< by topic id
    const std::vector<Group>& groups() const { return groups_; }   ///< by cap code
    int group_count() const { return static_cast<int>(groups_.size()); }
    /// Group index of a topic id; -1 when the topic is not in the scheme.
    int group_of(int topic_id) const;
    int max_topic_id() const { return entries_.empty() ? 0 : entries_.back().topic_id; }

private:
    std::vector<Entry> entries_;
    std::vector<Group> groups_;
    std::vector<int> group_of_topic_; ///< indexed by topic id
};

/// CSV with header `topic_id,cap_code,cap_name`.
CapScheme load_scheme(const std::filesystem::path& path);
CapScheme read_scheme(std::istream& in, const std::string& source = "<scheme>");
void save_scheme(const std::filesystem::path& path, const CapScheme& scheme);

inline constexpr double kShareFloor = 1e-6;

/// Sums member-topic shares per group (columns ordered as scheme.groups()),
/// then applies max(share, floor) and renormalizes each row. floor = 0 gives
/// the plain sums. Throws InputError listing topic ids missing from the
/// scheme, or scheme ids beyond the K columns of theta.
Eigen::MatrixXd aggregate(const Eigen::MatrixXd& theta, const CapScheme& scheme, double floor = kShareFloor);

struct PanelRow {
    Chamber chamber = Chamber::HouseOfRepresentatives;
    Date date{};
    int period = 0;
    int government_id = 0;
    int election_id = 0;
};

/// Day-by-group share panel, the input to the event model.
struct ThetaPanel {
    std::vector<PanelRow> rows;
    Eigen::MatrixXd shares; ///< D x P
    std::vector<std::string> group_names;

    int days() const { return static_cast<int>(rows.size()); }
    int groups() const { return static_cast<int>(shares.cols()); }
};

/// Attaches sitting period, government and election ids to aggregated shares.
/// The calendar is derived from the documents' dates (both chambers).
ThetaPanel build_panel(const std::vector<DocKey>& docs, const Eigen::MatrixXd& shares,
                       std::vector<std::string> group_names, const Timeline& timeline);

/// Checks shape, row sums (1e-8), positivity and id consistency.
void validate_panel(const ThetaPanel& panel);

/// `chamber,date,period_id,government_id,election_id,share_1..share_P`
void write_panel_csv(std::ostream& out, const ThetaPanel& panel);
ThetaPanel read_panel_csv(const std::filesystem::path& path);

} // namespace agenda
