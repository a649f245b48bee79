#include "agenda/synthetic.hpp"

#include "agenda/csv.hpp"
#include "agenda/random.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>

namespace agenda {

const std::vector<SyntheticTopic>& synthetic_topics()
{
    static const std::vector<SyntheticTopic> topics = {
        {6, {"education", "schools", "students", "school", "university", "universities", "training", "student", "funding", "children"}},
        {3, {"health", "medical", "hospital", "private", "insurance", "medicare", "hospitals", "scheme", "services", "patients"}},
        {16, {"defence", "forces", "personnel", "army", "military", "equipment", "base", "navy", "soldiers", "war"}},
        {5, {"workers", "employees", "relations", "industrial", "employers", "workplace", "employment", "employer", "union", "wages"}},
        {8, {"energy", "gas", "nuclear", "fuel", "emissions", "power", "climate", "carbon", "coal", "electricity"}},
        {10, {"roads", "road", "water", "railway", "line", "transport", "construction", "river", "freight", "bridge"}},
        {20, {"electoral", "vote", "election", "voting", "votes", "system", "party", "electors", "elections", "candidates"}},
        {4, {"wheat", "wool", "growers", "farmers", "board", "prices", "marketing", "production", "drought", "rural"}},
        {12, {"law", "person", "offence", "criminal", "police", "crime", "offences", "evidence", "penalty", "court"}},
        {1, {"budget", "increase", "economic", "unemployment", "economy", "inflation", "deficit", "revenue", "growth", "interest"}},
    };
    return topics;
}

CapScheme synthetic_scheme()
{
    std::vector<CapScheme::Entry> entries;
    const auto& topics = synthetic_topics();
    for (std::size_t k = 0; k < topics.size(); ++k)
        entries.push_back({static_cast<int>(k) + 1, topics[k].cap_code, std::string(*cap_name(topics[k].cap_code))});
    return CapScheme(std::move(entries));
}

namespace {

const std::vector<std::string> kBackground = {"minister", "government", "member", "bill", "honourable", "motion",
                                              "debate", "committee", "question", "report", "national", "today",
                                              "people", "states", "federal", "support", "important", "matter",
                                              "program", "community"};
const std::vector<std::string> kFunction = {"the", "of", "and", "to", "that", "is", "in", "for", "this", "we", "it",
                                            "be", "as", "on", "has"};
const std::vector<std::string> kHorSpeakers = {"Mr SMITH", "Ms NGUYEN", "Mr O'BRIEN", "Dr KELLY", "Mrs WILLIAMS",
                                               "The SPEAKER"};
const std::vector<std::string> kSenateSpeakers = {"Senator BROWN", "Senator PATEL", "Senator MACDONALD",
                                                  "Senator WONG-LEE", "The PRESIDENT"};

std::string weekday_name(Date d)
{
    static const char* names[] = {"Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"};
    return names[std::chrono::weekday{std::chrono::sys_days{d}}.c_encoding()];
}

std::string month_name(Date d)
{
    static const char* names[] = {"January", "February", "March",     "April",   "May",      "June",
                                  "July",    "August",   "September", "October", "November", "December"};
    return names[static_cast<unsigned>(d.month()) - 1];
}

struct DayWriter {
    const HansardSimulationSpec& spec;
    Rng& rng;
    Eigen::VectorXd word_cdf; // Zipf-like weights over a topic's ranks

    std::string content_word(const Eigen::VectorXd& theta)
    {
        const auto& topics = synthetic_topics();
        if (rng.uniform() < spec.topic_word_share) {
            const int k = rng.categorical(theta);
            const auto& words = topics[static_cast<std::size_t>(k)].words;
            return words[static_cast<std::size_t>(rng.categorical(word_cdf.head(static_cast<Eigen::Index>(words.size()))))];
        }
        return kBackground[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(kBackground.size())))];
    }

    std::string sentence(const Eigen::VectorXd& theta)
    {
        const int len = 10 + rng.uniform_int(5);
        std::string s;
        for (int i = 0; i < len; ++i) {
            std::string w = rng.uniform() < 0.35
                                ? kFunction[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(kFunction.size())))]
                                : content_word(theta);
            if (i == 0)
                w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
            if (!s.empty())
                s += ' ';
            s += w;
            const double u = rng.uniform();
            if (u < 0.03)
                s += " " + std::to_string(1990 + rng.uniform_int(30));
            else if (u < 0.1 && i + 1 < len)
                s += ',';
        }
        return s + '.';
    }

    std::string page(Chamber chamber, Date date, const Eigen::VectorXd& theta)
    {
        const auto& speakers = chamber == Chamber::Senate ? kSenateSpeakers : kHorSpeakers;
        std::vector<std::string> lines;
        for (int t = 0; t < spec.turns_per_day; ++t) {
            std::vector<std::string> words;
            words.push_back(speakers[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(speakers.size())))] + "—");
            for (int s = 0; s < spec.sentences_per_turn; ++s) {
                std::string text = sentence(theta);
                std::size_t pos = 0;
                while (pos < text.size()) {
                    const auto next = text.find(' ', pos);
                    words.push_back(text.substr(pos, next - pos));
                    pos = next == std::string::npos ? text.size() : next + 1;
                }
            }
            for (std::size_t i = 0; i < words.size(); i += static_cast<std::size_t>(spec.words_per_line)) {
                std::string line;
                for (std::size_t j = i; j < std::min(words.size(), i + static_cast<std::size_t>(spec.words_per_line)); ++j)
                    line += (line.empty() ? "" : " ") + words[j];
                lines.push_back(line);
            }
        }

        std::string out = "F|" + std::string(chamber == Chamber::Senate ? "SENATE" : "HOUSE") + "\n";
        out += "F|" + weekday_name(date) + ", " + std::to_string(static_cast<unsigned>(date.day())) + " " +
               month_name(date) + " " + std::to_string(static_cast<int>(date.year())) + "\n";
        const std::size_t per_region = 2 * static_cast<std::size_t>(spec.lines_per_column);
        for (std::size_t r = 0, region = 0; r < lines.size(); r += per_region, ++region) {
            if (region > 0)
                out += "F|" + std::to_string(region + 1) + "\n";
            const std::size_t end = std::min(lines.size(), r + per_region);
            const std::size_t half = r + (end - r + 1) / 2;
            // extracted text arrives row by row across both columns
            for (std::size_t i = 0; r + i < half || half + i < end; ++i) {
                if (r + i < half)
                    out += "L|" + lines[r + i] + "\n";
                if (half + i < end)
                    out += "R|" + lines[half + i] + "\n";
            }
        }
        return out;
    }
};

} // namespace

SyntheticHansard simulate_hansard(const HansardSimulationSpec& spec, const Timeline& timeline)
{
    if (spec.sitting_periods < 1 || spec.days_per_period < 1 || spec.turns_per_day < 1 || spec.sentences_per_turn < 1 ||
        spec.words_per_line < 1 || spec.lines_per_column < 1)
        throw InputError("invalid synthetic Hansard layout");
    const int span = days_between(spec.first, spec.last);
    const int spacing = spec.sitting_periods > 1 ? span / (spec.sitting_periods - 1) : 0;
    if (spec.sitting_periods > 1 && spacing - spec.days_per_period + 1 < kPeriodGapDays)
        throw InputError("synthetic sitting periods are too close together");
    if (!(spec.day_precision > 0.0) || !(spec.topic_word_share >= 0.0 && spec.topic_word_share <= 1.0))
        throw InputError("invalid synthetic Hansard mixing parameters");

    const int K = static_cast<int>(synthetic_topics().size());
    Rng rng(spec.seed, 0x4a25);
    const int G = static_cast<int>(timeline.governments().size());
    Eigen::MatrixXd gov_effect(G, K);
    for (Eigen::Index i = 0; i < gov_effect.size(); ++i)
        gov_effect.data()[i] = spec.government_sd * rng.normal();

    DayWriter writer{spec, rng, Eigen::VectorXd(10)};
    for (int r = 0; r < 10; ++r)
        writer.word_cdf[r] = 1.0 / (r + 1.0);

    SyntheticHansard sim;
    std::vector<Eigen::VectorXd> thetas;
    for (int s = 0; s < spec.sitting_periods; ++s) {
        const Date start = add_days(spec.first, s * spacing);
        const int g = timeline.government_at(start);
        Eigen::VectorXd eta = gov_effect.row(g).transpose();
        for (int k = 0; k < K; ++k)
            eta[k] += spec.period_sd * rng.normal();
        Eigen::VectorXd mean = (eta.array() - eta.maxCoeff()).exp();
        mean /= mean.sum();
        for (int d = 0; d < spec.days_per_period; ++d) {
            const Date day = add_days(start, d);
            timeline.government_at(day); // throws when the day falls outside the timeline
            for (Chamber c : {Chamber::HouseOfRepresentatives, Chamber::Senate}) {
                const Eigen::VectorXd theta = rng.dirichlet(spec.day_precision * mean);
                sim.docs.push_back({c, day});
                sim.pages.push_back({std::string(to_string(c)) + "_" + format_date(day) + ".txt", writer.page(c, day, theta)});
                thetas.push_back(theta);
            }
        }
    }
    sim.theta.resize(static_cast<Eigen::Index>(thetas.size()), K);
    for (std::size_t i = 0; i < thetas.size(); ++i)
        sim.theta.row(static_cast<Eigen::Index>(i)) = thetas[i].transpose();
    return sim;
}

void write_hansard(const SyntheticHansard& sim, const std::filesystem::path& dir, const std::filesystem::path& theta_path)
{
    std::filesystem::create_directories(dir);
    for (const auto& p : sim.pages) {
        std::ofstream out(dir / p.filename, std::ios::binary);
        if (!out)
            throw InputError("cannot write " + (dir / p.filename).string());
        out << p.content;
    }
    std::ofstream out(theta_path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + theta_path.string());
    std::vector<std::string> header = {"chamber", "date"};
    for (Eigen::Index k = 1; k <= sim.theta.cols(); ++k)
        header.push_back("topic_" + std::to_string(k));
    csv::write_record(out, header);
    for (std::size_t i = 0; i < sim.docs.size(); ++i) {
        std::vector<std::string> f = {std::string(to_string(sim.docs[i].chamber)), format_date(sim.docs[i].date)};
        for (Eigen::Index k = 0; k < sim.theta.cols(); ++k)
            f.push_back(csv::format_number(sim.theta(static_cast<Eigen::Index>(i), k)));
        csv::write_record(out, f);
    }
}

} // namespace agenda
