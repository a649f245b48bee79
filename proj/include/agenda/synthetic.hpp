#pragma once

#include "agenda/cap_mapping.hpp"
#include "agenda/common.hpp"
#include "agenda/timeline.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace agenda {

/// A generator topic: its CAP group and the words it emits, most likely first.
struct SyntheticTopic {
    int cap_code = 0;
    std::vector<std::string> words;
};

/// Ten topics built from top-word lists of the 80-topic Hansard model, each
/// in a different CAP group.
const std::vector<SyntheticTopic>& synthetic_topics();

/// CAP scheme with generator topic k mapped to synthetic_topics()[k - 1].
CapScheme synthetic_scheme();

struct HansardSimulationSpec {
    int sitting_periods = 25;
    int days_per_period = 4;   ///< consecutive sitting days, both chambers
    Date first = Date{std::chrono::year{2007}, std::chrono::month{2}, std::chrono::day{6}};
    Date last = Date{std::chrono::year{2016}, std::chrono::month{9}, std::chrono::day{13}}; ///< start of the last period
    int turns_per_day = 10;
    int sentences_per_turn = 5;
    double government_sd = 0.8; ///< log-scale topic effect of each government
    double period_sd = 0.3;
    double day_precision = 40.0; ///< Dirichlet precision of a day around its period mean
    double topic_word_share = 0.6; ///< share of content words drawn from the day's topics
    int words_per_line = 9;
    int lines_per_column = 8;
    std::uint64_t seed = 1;
};

struct SyntheticPage {
    std::string filename; ///< `<chamber>_<date>.txt`
    std::string content;
};

struct SyntheticHansard {
    std::vector<DocKey> docs;
    std::vector<SyntheticPage> pages; ///< aligned with docs
    Eigen::MatrixXd theta;            ///< docs x topics, generating shares
};

/// Two-column tagged transcript pages whose topic mix shifts with the
/// government in office. Periods are spread evenly between spec.first and
/// spec.last; every day lies inside a government of `timeline`.
SyntheticHansard simulate_hansard(const HansardSimulationSpec& spec, const Timeline& timeline);

/// Writes the pages into `dir` and the generating shares to `theta_path`.
void write_hansard(const SyntheticHansard& sim, const std::filesystem::path& dir,
                   const std::filesystem::path& theta_path);

} // namespace agenda
