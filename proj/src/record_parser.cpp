#include "agenda/record_parser.hpp"

#include "agenda/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace agenda {

RawPage parse_page(std::string_view content, Chamber chamber, Date date)
{
    RawPage page{chamber, date, {}};
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const std::size_t nl = content.find('\n', pos);
        std::string_view line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (trim(line).empty())
            continue;

        PageLine entry;
        entry.line_no = line_no;
        if (line.size() >= 2 && line[1] == '|' && (line[0] == 'L' || line[0] == 'R' || line[0] == 'F')) {
            entry.column = line[0] == 'L' ? Column::Left : line[0] == 'R' ? Column::Right : Column::Full;
            entry.text = std::string(line.substr(2));
        } else {
            entry.text = std::string(line);
        }
        page.lines.push_back(std::move(entry));
    }
    return page;
}

std::pair<Chamber, Date> parse_page_filename(std::string_view filename)
{
    constexpr std::string_view ext = ".txt";
    const auto bad = [&] {
        return InputError("malformed page file name '" + std::string(filename) + "' (expected <chamber>_<YYYY-MM-DD>.txt)");
    };
    if (filename.size() <= ext.size() || filename.substr(filename.size() - ext.size()) != ext)
        throw bad();
    const std::string_view stem = filename.substr(0, filename.size() - ext.size());
    const auto sep = stem.rfind('_');
    if (sep == std::string_view::npos)
        throw bad();
    try {
        return {parse_chamber(stem.substr(0, sep)), parse_date(stem.substr(sep + 1))};
    } catch (const InputError&) {
        throw bad();
    }
}

RawPage load_page(const std::filesystem::path& path)
{
    const auto [chamber, date] = parse_page_filename(path.filename().string());
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_page(buffer.str(), chamber, date);
}

std::vector<PageLine> reflow_columns(const RawPage& page)
{
    std::vector<PageLine> out;
    out.reserve(page.lines.size());

    std::vector<const PageLine*> left, right, untagged;
    auto flush = [&] {
        if (!untagged.empty() && (!left.empty() || !right.empty()))
            throw InputError(format_date(page.date) + " " + std::string(to_string(page.chamber)) +
                             ": untagged line " + std::to_string(untagged.front()->line_no) +
                             " inside a two-column region");
        for (const auto* l : untagged)
            out.push_back(*l);
        for (const auto* l : left)
            out.push_back(*l);
        for (const auto* l : right)
            out.push_back(*l);
        left.clear();
        right.clear();
        untagged.clear();
    };

    for (const auto& line : page.lines) {
        switch (line.column) {
        case Column::Full:
            flush();
            out.push_back(line);
            break;
        case Column::Left:
            left.push_back(&line);
            break;
        case Column::Right:
            right.push_back(&line);
            break;
        case Column::Untagged:
            untagged.push_back(&line);
            break;
        }
    }
    flush();
    return out;
}

SpeakerPatterns SpeakerPatterns::defaults()
{
    return from_strings({
        R"(\b(?:Mr|Mrs|Ms|Miss|Dr|Sir|Senator)\.?\s+((?:[A-Z][A-Z'\-]+)(?:\s+[A-Z][A-Z'\-]+)*)(?:\s*\([^)]*\))*\s*(?:—|–|--))",
        R"(\bThe\s+((?:DEPUTY\s+|ACTING\s+)?(?:PRESIDENT|SPEAKER|CHAIRMAN|CHAIR))(?:\s*\([^)]*\))*\s*(?:—|–|--))",
    });
}

SpeakerPatterns SpeakerPatterns::from_strings(const std::vector<std::string>& patterns)
{
    SpeakerPatterns set;
    for (const auto& p : patterns) {
        try {
            set.patterns_.emplace_back(p, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            throw InputError("invalid speaker pattern '" + p + "': " + e.what());
        }
    }
    return set;
}

SpeakerPatterns SpeakerPatterns::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open speaker pattern file " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        lines.push_back(t);
    }
    if (lines.empty())
        throw InputError("speaker pattern file " + path.string() + " has no patterns");
    return from_strings(lines);
}

std::vector<SpeakerPatterns::Match> SpeakerPatterns::find_all(std::string_view text) const
{
    struct Candidate {
        std::size_t begin, end, pattern;
        std::string name;
    };
    std::vector<Candidate> candidates;
    for (std::size_t p = 0; p < patterns_.size(); ++p) {
        using It = std::regex_iterator<std::string_view::const_iterator>;
        for (It it(text.begin(), text.end(), patterns_[p]), last; it != last; ++it) {
            const auto& m = *it;
            const auto begin = static_cast<std::size_t>(m.position(0));
            const std::string name = m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
            candidates.push_back({begin, begin + static_cast<std::size_t>(m.length(0)), p, name});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.pattern < b.pattern;
    });

    std::vector<Match> out;
    std::size_t cursor = 0;
    for (auto& c : candidates) {
        if (c.begin < cursor || c.end == c.begin)
            continue;
        out.push_back({c.begin, c.end, normalize_speaker(c.name)});
        cursor = c.end;
    }
    return out;
}

std::string normalize_speaker(std::string_view name)
{
    std::string out;
    bool pending_space = false;
    for (char c : name) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

namespace {

std::string collapse_whitespace(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string join_lines(const std::vector<PageLine>& stream)
{
    std::string text;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (i)
            text.push_back('\n');
        text += stream[i].text;
    }
    return text;
}

std::vector<SpeakerTurn> split_speakers(std::string_view day_text, Chamber chamber, Date date,
                                        const SpeakerPatterns& patterns)
{
    std::vector<SpeakerTurn> turns;
    const auto matches = patterns.find_all(day_text);

    auto emit = [&](std::string speaker, std::string header, std::string_view body) {
        std::string text = collapse_whitespace(body);
        if (text.empty())
            return;
        SpeakerTurn turn;
        turn.speaker = std::move(speaker);
        turn.date = date;
        turn.chamber = chamber;
        turn.text = std::move(text);
        turn.turn_index = static_cast<int>(turns.size());
        turn.header = std::move(header);
        turns.push_back(std::move(turn));
    };

    const std::size_t first = matches.empty() ? day_text.size() : matches.front().begin;
    emit(std::string(kUnattributed), {}, day_text.substr(0, first));
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const std::size_t body_end = i + 1 < matches.size() ? matches[i + 1].begin : day_text.size();
        emit(matches[i].speaker, std::string(day_text.substr(matches[i].begin, matches[i].end - matches[i].begin)),
             day_text.substr(matches[i].end, body_end - matches[i].end));
    }
    return turns;
}

std::vector<SpeakerTurn> split_speakers(const std::vector<PageLine>& stream, Chamber chamber, Date date,
                                        const SpeakerPatterns& patterns)
{
    return split_speakers(join_lines(stream), chamber, date, patterns);
}

std::vector<TidyRow> export_tidy(const std::vector<SpeakerTurn>& turns)
{
    std::vector<TidyRow> rows;
    rows.reserve(turns.size());
    for (const auto& t : turns)
        rows.push_back({t.date, t.chamber, t.speaker, t.text});
    return rows;
}

std::vector<SpeakerTurn> import_tidy(const std::vector<TidyRow>& rows)
{
    std::map<DocKey, int> next_index;
    std::vector<SpeakerTurn> turns;
    turns.reserve(rows.size());
    for (const auto& r : rows) {
        SpeakerTurn t;
        t.speaker = r.speaker;
        t.date = r.date;
        t.chamber = r.chamber;
        t.text = r.text;
        t.turn_index = next_index[DocKey{r.chamber, r.date}]++;
        turns.push_back(std::move(t));
    }
    return turns;
}

void write_tidy_csv(std::ostream& out, const std::vector<TidyRow>& rows)
{
    csv::write_record(out, {"date", "chamber", "speaker", "text"});
    for (const auto& r : rows)
        csv::write_record(out, {format_date(r.date), std::string(to_string(r.chamber)), r.speaker, r.text});
}

namespace {

std::vector<TidyRow> rows_from_table(const csv::Table& table)
{
    const auto c_date = table.column("date");
    const auto c_chamber = table.column("chamber");
    const auto c_speaker = table.column("speaker");
    const auto c_text = table.column("text");
    std::vector<TidyRow> rows;
    rows.reserve(table.size());
    for (const auto& r : table.rows())
        rows.push_back({parse_date(r[c_date]), parse_chamber(r[c_chamber]), r[c_speaker], r[c_text]});
    return rows;
}

} // namespace

std::vector<TidyRow> read_tidy_csv(std::istream& in)
{
    return rows_from_table(csv::Table::from_records(csv::parse(in), "tidy csv"));
}

std::vector<TidyRow> read_tidy_csv(const std::filesystem::path& path)
{
    return rows_from_table(csv::Table::read(path));
}

SubstitutionTable SubstitutionTable::defaults()
{
    // frequent OCR confusions in older scanned transcripts
    SubstitutionTable t;
    t.add("thc", "the");
    t.add("tbe", "the");
    t.add("tlie", "the");
    t.add("aud", "and");
    t.add("tbat", "that");
    t.add("wbich", "which");
    return t;
}

SubstitutionTable SubstitutionTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open substitution table " + path.string());
    SubstitutionTable t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        std::istringstream fields(s);
        std::string from, to, extra;
        if (!(fields >> from >> to) || (fields >> extra))
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected '<from> <to>'");
        t.add(to_lower_ascii(from), to_lower_ascii(to));
    }
    return t;
}

void SubstitutionTable::add(std::string from, std::string to) { table_[std::move(from)] = std::move(to); }

const std::string* SubstitutionTable::lookup(std::string_view word) const
{
    const auto it = table_.find(std::string(word));
    return it == table_.end() ? nullptr : &it->second;
}

} // namespace agenda
