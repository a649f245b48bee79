#include "agenda/cap_mapping.hpp"

#include "agenda/csv.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace agenda {

const std::vector<CapTopic>& cap_codebook()
{
    static const std::vector<CapTopic> book = {
        {1, "Macroeconomics"},      {2, "Civil Rights"},           {3, "Health"},
        {4, "Agriculture"},         {5, "Labor"},                  {6, "Education"},
        {7, "Environment"},         {8, "Energy"},                 {9, "Immigration"},
        {10, "Transportation"},     {12, "Law and Crime"},         {13, "Social Welfare"},
        {14, "Housing"},            {15, "Domestic Commerce"},     {16, "Defense"},
        {17, "Technology"},         {18, "Foreign Trade"},         {19, "International Affairs"},
        {20, "Government Operations"}, {21, "Public Lands"},       {23, "Culture"},
    };
    return book;
}

std::optional<std::string_view> cap_name(int code)
{
    for (const auto& t : cap_codebook())
        if (t.code == code)
            return t.name;
    return std::nullopt;
}

CapScheme::CapScheme(std::vector<Entry> entries) : entries_(std::move(entries))
{
    if (entries_.empty())
        throw InputError("CAP scheme is empty");
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.topic_id < b.topic_id; });
    std::map<int, std::string> names;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.topic_id < 1)
            throw InputError("CAP scheme topic ids start at 1 (got " + std::to_string(e.topic_id) + ")");
        if (i > 0 && entries_[i - 1].topic_id == e.topic_id)
            throw InputError("CAP scheme lists topic " + std::to_string(e.topic_id) + " more than once");
        if (!cap_name(e.cap_code))
            throw InputError("unknown CAP code " + std::to_string(e.cap_code) + " for topic " + std::to_string(e.topic_id));
        const auto [it, fresh] = names.emplace(e.cap_code, e.cap_name);
        if (!fresh && it->second != e.cap_name)
            throw InputError("CAP code " + std::to_string(e.cap_code) + " has two names: '" + it->second + "' and '" +
                             e.cap_name + "'");
    }
    if (names.size() < 2)
        throw InputError("CAP scheme needs at least 2 groups");
    std::map<int, int> index_of_code;
    for (const auto& [code, name] : names) {
        index_of_code[code] = static_cast<int>(groups_.size());
        groups_.push_back({code, name});
    }
    group_of_topic_.assign(static_cast<std::size_t>(entries_.back().topic_id) + 1, -1);
    for (const auto& e : entries_)
        group_of_topic_[static_cast<std::size_t>(e.topic_id)] = index_of_code[e.cap_code];
}

int CapScheme::group_of(int topic_id) const
{
    if (topic_id < 0 || topic_id >= static_cast<int>(group_of_topic_.size()))
        return -1;
    return group_of_topic_[static_cast<std::size_t>(topic_id)];
}

namespace {

CapScheme scheme_from_table(const csv::Table& t)
{
    const auto ct = t.column("topic_id"), cc = t.column("cap_code"), cn = t.column("cap_name");
    std::vector<CapScheme::Entry> entries;
    for (const auto& r : t.rows())
        entries.push_back({static_cast<int>(csv::parse_integer(r[ct])), static_cast<int>(csv::parse_integer(r[cc])),
                           trim(r[cn])});
    try {
        return CapScheme(std::move(entries));
    } catch (const InputError& e) {
        throw InputError(t.source() + ": " + e.what());
    }
}

} // namespace

CapScheme load_scheme(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open CAP scheme " + path.string());
    return read_scheme(in, path.string());
}

CapScheme read_scheme(std::istream& in, const std::string& source)
{
    auto records = csv::parse(in);
    if (records.empty())
        throw InputError(source + ": empty CAP scheme file");
    return scheme_from_table(csv::Table::from_records(std::move(records), source));
}

void save_scheme(const std::filesystem::path& path, const CapScheme& scheme)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path.string());
    csv::write_record(out, {"topic_id", "cap_code", "cap_name"});
    for (const auto& e : scheme.entries())
        csv::write_record(out, {std::to_string(e.topic_id), std::to_string(e.cap_code), e.cap_name});
}

Eigen::MatrixXd aggregate(const Eigen::MatrixXd& theta, const CapScheme& scheme, double floor)
{
    const int K = static_cast<int>(theta.cols());
    if (!(floor >= 0.0) || floor * scheme.group_count() >= 1.0)
        throw InputError("share floor must be in [0, 1/P)");
    std::string missing, extra;
    for (int k = 1; k <= K; ++k)
        if (scheme.group_of(k) < 0)
            missing += (missing.empty() ? "" : ", ") + std::to_string(k);
    for (const auto& e : scheme.entries())
        if (e.topic_id > K)
            extra += (extra.empty() ? "" : ", ") + std::to_string(e.topic_id);
    if (!missing.empty())
        throw InputError("topics missing from the CAP scheme: " + missing);
    if (!extra.empty())
        throw InputError("CAP scheme lists topics beyond the fitted " + std::to_string(K) + ": " + extra);

    const int P = scheme.group_count();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(theta.rows(), P);
    for (int k = 0; k < K; ++k)
        out.col(scheme.group_of(k + 1)) += theta.col(k);
    if (floor > 0.0) {
        out = out.cwiseMax(floor);
        out.array().colwise() /= out.rowwise().sum().array();
    }
    return out;
}

ThetaPanel build_panel(const std::vector<DocKey>& docs, const Eigen::MatrixXd& shares,
                       std::vector<std::string> group_names, const Timeline& timeline)
{
    if (static_cast<Eigen::Index>(docs.size()) != shares.rows())
        throw InputError("document list and share matrix disagree on the number of days");
    if (static_cast<Eigen::Index>(group_names.size()) != shares.cols())
        throw InputError("group names do not match the share columns");
    std::vector<Date> days;
    days.reserve(docs.size());
    for (const auto& d : docs)
        days.push_back(d.date);
    const SittingCalendar calendar = derive_sitting_periods(days);
    const PeriodMap map = map_periods(calendar, timeline);

    ThetaPanel panel;
    panel.shares = shares;
    panel.group_names = std::move(group_names);
    for (const auto& d : docs) {
        const int s = calendar.period_of(d.date);
        panel.rows.push_back({d.chamber, d.date, s,
                              timeline.governments()[static_cast<std::size_t>(map.government[static_cast<std::size_t>(s)])].id,
                              timeline.elections()[static_cast<std::size_t>(map.election[static_cast<std::size_t>(s)])].id});
    }
    validate_panel(panel);
    return panel;
}

void validate_panel(const ThetaPanel& panel)
{
    if (panel.rows.empty())
        throw InputError("panel has no days");
    if (static_cast<Eigen::Index>(panel.rows.size()) != panel.shares.rows())
        throw InputError("panel rows and share matrix disagree");
    if (panel.shares.cols() < 2)
        throw InputError("panel needs at least 2 topic groups");
    for (Eigen::Index d = 0; d < panel.shares.rows(); ++d) {
        const auto& r = panel.rows[static_cast<std::size_t>(d)];
        const std::string where = format_date(r.date) + " " + std::string(to_string(r.chamber));
        if (!(panel.shares.row(d).array() > 0.0).all() || !panel.shares.row(d).allFinite())
            throw InputError("panel row " + where + " has a non-positive share");
        if (std::abs(panel.shares.row(d).sum() - 1.0) > 1e-8)
            throw InputError("panel row " + where + " does not sum to 1");
        if (r.period < 0)
            throw InputError("panel row " + where + " has a negative sitting period");
    }
    std::set<std::pair<int, Date>> seen;
    for (const auto& r : panel.rows)
        if (!seen.insert({chamber_index(r.chamber), r.date}).second)
            throw InputError("panel has two rows for " + format_date(r.date) + " " + std::string(to_string(r.chamber)));
}

void write_panel_csv(std::ostream& out, const ThetaPanel& panel)
{
    std::vector<std::string> header = {"chamber", "date", "period_id", "government_id", "election_id"};
    for (int p = 1; p <= panel.groups(); ++p)
        header.push_back("share_" + std::to_string(p));
    csv::write_record(out, header);
    for (int d = 0; d < panel.days(); ++d) {
        const auto& r = panel.rows[static_cast<std::size_t>(d)];
        std::vector<std::string> f = {std::string(to_string(r.chamber)), format_date(r.date), std::to_string(r.period),
                                      std::to_string(r.government_id), std::to_string(r.election_id)};
        for (int p = 0; p < panel.groups(); ++p)
            f.push_back(csv::format_number(panel.shares(d, p)));
        csv::write_record(out, f);
    }
}

ThetaPanel read_panel_csv(const std::filesystem::path& path)
{
    const auto t = csv::Table::read(path);
    const auto cc = t.column("chamber"), cd = t.column("date"), cs = t.column("period_id"),
               cg = t.column("government_id"), ce = t.column("election_id");
    std::vector<std::size_t> share_cols;
    for (int p = 1;; ++p) {
        const std::string name = "share_" + std::to_string(p);
        if (!t.has_column(name))
            break;
        share_cols.push_back(t.column(name));
    }
    ThetaPanel panel;
    panel.shares.resize(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(share_cols.size()));
    for (std::size_t p = 0; p < share_cols.size(); ++p)
        panel.group_names.push_back("share_" + std::to_string(p + 1));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& r = t.rows()[i];
        panel.rows.push_back({parse_chamber(r[cc]), parse_date(r[cd]), static_cast<int>(csv::parse_integer(r[cs])),
                              static_cast<int>(csv::parse_integer(r[cg])), static_cast<int>(csv::parse_integer(r[ce]))});
        for (std::size_t p = 0; p < share_cols.size(); ++p)
            panel.shares(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = csv::parse_number(r[share_cols[p]]);
    }
    try {
        validate_panel(panel);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return panel;
}

} // namespace agenda
