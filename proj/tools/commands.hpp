#pragma once

#include "manifest.hpp"
#include "settings.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace agenda::cli {

/// Options shared by every subcommand.
struct CommonOptions {
    std::filesystem::path out;
    std::optional<std::filesystem::path> config;
    std::map<std::string, std::string> flags; ///< setting overrides given on the command line
    bool force = false;
};

/// Named directory or file arguments of a subcommand (`--in`, `--corpus`, ...).
using Inputs = std::map<std::string, std::filesystem::path>;

int cmd_parse(const CommonOptions& common, const Inputs& in);
int cmd_preprocess(const CommonOptions& common, const Inputs& in);
int cmd_fit_topics(const CommonOptions& common, const Inputs& in);
int cmd_diagnostics(const CommonOptions& common, const Inputs& in);
int cmd_map_cap(const CommonOptions& common, const Inputs& in);
int cmd_fit_events(const CommonOptions& common, const Inputs& in);
int cmd_compare(const CommonOptions& common, const Inputs& in);
int cmd_outliers(const CommonOptions& common, const Inputs& in);
int cmd_figures(const CommonOptions& common, const Inputs& in);
int cmd_simulate(const CommonOptions& common, const std::string& kind);

} // namespace agenda::cli
