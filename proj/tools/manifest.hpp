#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace agenda::cli {

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_text(const std::string& text);

inline constexpr const char* kManifestName = "manifest.json";

/// Record of one command run, written as `manifest.json` in its output
/// directory. Everything except the timestamps is a function of the inputs,
/// settings and seed.
struct Manifest {
    std::string command;
    std::map<std::string, std::string> settings;
    std::string config_file_hash; ///< empty without a config file
    std::map<std::string, std::string> inputs;  ///< path -> sha256
    std::map<std::string, std::string> outputs; ///< file name -> sha256
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> warnings;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
    std::string started_at, finished_at;

    std::string settings_hash() const;
    nlohmann::ordered_json to_json() const;
    static Manifest read(const std::filesystem::path& dir);
};

/// Refuses (InputError) when an input was produced by an earlier command whose
/// manifest records a different hash for it, or a different config file than
/// `config_hash` (when both exist).
void check_fresh(const std::vector<std::filesystem::path>& inputs, const std::string& config_hash);

/// True when `dir` already holds a manifest for the same command, settings
/// and input hashes whose outputs are all intact.
bool up_to_date(const std::filesystem::path& dir, const Manifest& planned);

std::string utc_now();

} // namespace agenda::cli
