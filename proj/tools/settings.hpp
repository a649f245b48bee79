#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace agenda::cli {

/// Effective key-value settings of one command: flags over config file over
/// defaults. Every lookup is recorded so the manifest can list (and hash)
/// exactly the settings a command used.
class Settings {
public:
    Settings() = default;
    /// Reads `key = value` lines; '#' starts a comment line.
    explicit Settings(std::optional<std::filesystem::path> config_file);

    void set_flag(const std::string& key, std::string value) { flags_[key] = std::move(value); }

    std::string text(const std::string& key, const std::string& fallback);
    int integer(const std::string& key, int fallback);
    double number(const std::string& key, double fallback);
    bool boolean(const std::string& key, bool fallback);
    std::vector<int> integer_list(const std::string& key, const std::string& fallback);
    /// Path setting; relative values from the config file resolve against its directory.
    std::filesystem::path path(const std::string& key, const std::filesystem::path& fallback);
    /// Flag, then config, then AGENDA_SEED, then 1.
    std::uint64_t seed();

    const std::map<std::string, std::string>& used() const { return used_; }
    const std::optional<std::filesystem::path>& config_file() const { return config_file_; }

private:
    std::optional<std::string> lookup(const std::string& key, bool& from_file) const;

    std::optional<std::filesystem::path> config_file_;
    std::map<std::string, std::string> file_;
    std::map<std::string, std::string> flags_;
    std::map<std::string, std::string> used_;
};

} // namespace agenda::cli
