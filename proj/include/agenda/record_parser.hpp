#pragma once

#include "agenda/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace agenda {

/// Column tag attached to each extracted line by the upstream OCR step.
enum class Column { Left, Right, Full, Untagged };

struct PageLine {
    Column column = Column::Untagged;
    std::string text;
    int line_no = 0; ///< 1-based line number in the source file
};

/// One transcript file: the extracted text of a chamber's sitting day.
struct RawPage {
    Chamber chamber = Chamber::HouseOfRepresentatives;
    Date date{};
    std::vector<PageLine> lines;
};

struct SpeakerTurn {
    std::string speaker;
    Date date{};
    Chamber chamber = Chamber::HouseOfRepresentatives;
    std::string text;
    int turn_index = 0;
    std::string header; ///< matched speaker introduction, empty for UNATTRIBUTED
};

/// One row of the tidy transcript table.
struct TidyRow {
    Date date{};
    Chamber chamber = Chamber::HouseOfRepresentatives;
    std::string speaker;
    std::string text;

    friend bool operator==(const TidyRow&, const TidyRow&) = default;
};

inline constexpr std::string_view kUnattributed = "UNATTRIBUTED";

/// Parses `L|`, `R|`, `F|` prefixed lines. Lines without a prefix are kept as
/// Untagged; blank lines are dropped.
RawPage parse_page(std::string_view content, Chamber chamber, Date date);

/// File names follow `<chamber>_<YYYY-MM-DD>.txt`, e.g. `senate_1901-05-09.txt`.
std::pair<Chamber, Date> parse_page_filename(std::string_view filename);
RawPage load_page(const std::filesystem::path& path);

/// Reading order for a two-column page: within each region delimited by
/// full-width lines, every left-column line precedes every right-column line.
/// Throws InputError naming the line when an untagged line sits in a
/// two-column region.
std::vector<PageLine> reflow_columns(const RawPage& page);

/// Set of regular expressions recognising how a speaker turn opens. Capture
/// group 1 of each pattern holds the speaker's name.
class SpeakerPatterns {
public:
    struct Match {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::string speaker;
    };

    /// Honorific + capitalised surname + dash ("Mr SMITH—", "Senator O'BRIEN (Tas) —")
    /// and presiding officers ("The PRESIDENT—", "The DEPUTY SPEAKER—").
    static SpeakerPatterns defaults();

    /// One ECMAScript regex per line; blank lines and lines starting with '#' ignored.
    static SpeakerPatterns load(const std::filesystem::path& path);
    static SpeakerPatterns from_strings(const std::vector<std::string>& patterns);

    /// All non-overlapping matches in order of appearance. When patterns
    /// overlap, the earliest start wins, then the earlier pattern.
    std::vector<Match> find_all(std::string_view text) const;

    std::size_t size() const { return patterns_.size(); }

private:
    std::vector<std::regex> patterns_;
};

/// Uppercases and collapses whitespace: "Smith  Jones" -> "SMITH JONES".
std::string normalize_speaker(std::string_view name);

/// Segments a day's reading-order text into speaker turns. Text preceding the
/// first recognised introduction becomes an UNATTRIBUTED turn; whitespace
/// inside each turn is collapsed. Never throws on content.
std::vector<SpeakerTurn> split_speakers(std::string_view day_text, Chamber chamber, Date date,
                                        const SpeakerPatterns& patterns);
std::vector<SpeakerTurn> split_speakers(const std::vector<PageLine>& stream, Chamber chamber, Date date,
                                        const SpeakerPatterns& patterns);

std::string join_lines(const std::vector<PageLine>& stream);

std::vector<TidyRow> export_tidy(const std::vector<SpeakerTurn>& turns);

/// Rebuilds turns from tidy rows; turn_index restarts at 0 for each (chamber, date).
std::vector<SpeakerTurn> import_tidy(const std::vector<TidyRow>& rows);

/// Header `date,chamber,speaker,text`, RFC-4180 quoting, LF line ends.
void write_tidy_csv(std::ostream& out, const std::vector<TidyRow>& rows);
std::vector<TidyRow> read_tidy_csv(std::istream& in);
std::vector<TidyRow> read_tidy_csv(const std::filesystem::path& path);

/// Whole-word replacements for recurrent OCR confusions ("thc" -> "the").
/// Matching is on lowercase ASCII words.
class SubstitutionTable {
public:
    static SubstitutionTable defaults();
    static SubstitutionTable empty() { return {}; }
    /// Whitespace-separated `from to` pairs, one per line, '#' comments.
    static SubstitutionTable load(const std::filesystem::path& path);

    void add(std::string from, std::string to);
    const std::string* lookup(std::string_view word) const;
    std::size_t size() const { return table_.size(); }

private:
    std::unordered_map<std::string, std::string> table_;
};

} // namespace agenda
