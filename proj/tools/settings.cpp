#include "settings.hpp"

#include "agenda/common.hpp"
#include "agenda/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace agenda::cli {

Settings::Settings(std::optional<std::filesystem::path> config_file) : config_file_(std::move(config_file))
{
    if (!config_file_)
        return;
    std::ifstream in(*config_file_);
    if (!in)
        throw InputError("cannot open config " + config_file_->string());
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw InputError(config_file_->string() + ":" + std::to_string(line_no) + ": expected key = value");
        file_[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
}

std::optional<std::string> Settings::lookup(const std::string& key, bool& from_file) const
{
    from_file = false;
    if (auto it = flags_.find(key); it != flags_.end())
        return it->second;
    if (auto it = file_.find(key); it != file_.end()) {
        from_file = true;
        return it->second;
    }
    return std::nullopt;
}

std::string Settings::text(const std::string& key, const std::string& fallback)
{
    bool from_file = false;
    std::string v = lookup(key, from_file).value_or(fallback);
    used_[key] = v;
    return v;
}

int Settings::integer(const std::string& key, int fallback)
{
    const std::string v = text(key, std::to_string(fallback));
    try {
        return static_cast<int>(csv::parse_integer(v));
    } catch (const InputError&) {
        throw InputError("setting " + key + ": '" + v + "' is not an integer");
    }
}

double Settings::number(const std::string& key, double fallback)
{
    const std::string v = text(key, csv::format_number(fallback));
    try {
        return csv::parse_number(v);
    } catch (const InputError&) {
        throw InputError("setting " + key + ": '" + v + "' is not a number");
    }
}

bool Settings::boolean(const std::string& key, bool fallback)
{
    const std::string v = to_lower_ascii(text(key, fallback ? "true" : "false"));
    if (v == "true" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "0")
        return false;
    throw InputError("setting " + key + ": '" + v + "' is not a boolean");
}

std::vector<int> Settings::integer_list(const std::string& key, const std::string& fallback)
{
    const std::string v = text(key, fallback);
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(static_cast<int>(csv::parse_integer(trim(item))));
    if (out.empty())
        throw InputError("setting " + key + " is empty");
    return out;
}

std::filesystem::path Settings::path(const std::string& key, const std::filesystem::path& fallback)
{
    bool from_file = false;
    const auto v = lookup(key, from_file);
    std::filesystem::path p = v ? std::filesystem::path(*v) : fallback;
    if (v && from_file && p.is_relative() && config_file_)
        p = config_file_->parent_path() / p;
    used_[key] = p.string();
    return p;
}

std::uint64_t Settings::seed()
{
    bool from_file = false;
    auto v = lookup("seed", from_file);
    if (!v)
        if (const char* env = std::getenv("AGENDA_SEED"); env && *env)
            v = env;
    const std::string s = v.value_or("1");
    used_["seed"] = s;
    const long long n = csv::parse_integer(s);
    if (n < 0)
        throw InputError("seed must be non-negative");
    return static_cast<std::uint64_t>(n);
}

} // namespace agenda::cli
