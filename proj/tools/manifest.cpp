#include "manifest.hpp"

#include "agenda/common.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

namespace agenda::cli {

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free)
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("SHA-256 initialisation failed");
    }
    void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
    std::string hex()
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

} // namespace

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in.read(buf.data(), buf.size()) || in.gcount() > 0)
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    return h.hex();
}

std::string sha256_text(const std::string& text)
{
    Sha256 h;
    h.update(text.data(), text.size());
    return h.hex();
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string Manifest::settings_hash() const
{
    std::string canon = command + "\n";
    for (const auto& [k, v] : settings)
        canon += k + "=" + v + "\n";
    return sha256_text(canon);
}

nlohmann::ordered_json Manifest::to_json() const
{
    nlohmann::ordered_json j;
    j["command"] = command;
    j["settings"] = settings;
    j["settings_hash"] = settings_hash();
    j["config_file_hash"] = config_file_hash;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["seeds"] = seeds;
    j["versions"] = {{"agenda", AGENDA_VERSION},
                     {"compiler", __VERSION__},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}};
    j["warnings"] = warnings;
    j["extra"] = extra;
    j["timestamps"] = {{"started", started_at}, {"finished", finished_at}};
    return j;
}

Manifest Manifest::read(const std::filesystem::path& dir)
{
    std::ifstream in(dir / kManifestName);
    if (!in)
        throw InputError("no manifest in " + dir.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError((dir / kManifestName).string() + ": " + e.what());
    }
    Manifest m;
    m.command = j.value("command", "");
    m.settings = j.value("settings", std::map<std::string, std::string>{});
    m.config_file_hash = j.value("config_file_hash", "");
    m.inputs = j.value("inputs", std::map<std::string, std::string>{});
    m.outputs = j.value("outputs", std::map<std::string, std::string>{});
    return m;
}

void check_fresh(const std::vector<std::filesystem::path>& inputs, const std::string& config_hash)
{
    for (const auto& input : inputs) {
        const auto dir = input.parent_path().empty() ? std::filesystem::path(".") : input.parent_path();
        if (!std::filesystem::exists(dir / kManifestName))
            continue;
        const Manifest m = Manifest::read(dir);
        const auto it = m.outputs.find(input.filename().string());
        if (it != m.outputs.end() && it->second != sha256_file(input))
            throw InputError("stale input: " + input.string() + " changed after `" + m.command +
                             "` wrote it (rerun that stage or pass --force)");
        if (!config_hash.empty() && !m.config_file_hash.empty() && m.config_file_hash != config_hash)
            throw InputError("stale input: " + input.string() + " was produced under a different config file " +
                             "(rerun `" + m.command + "` or pass --force)");
    }
}

bool up_to_date(const std::filesystem::path& dir, const Manifest& planned)
{
    if (!std::filesystem::exists(dir / kManifestName))
        return false;
    Manifest m;
    try {
        m = Manifest::read(dir);
    } catch (const InputError&) {
        return false;
    }
    if (m.command != planned.command || m.settings_hash() != planned.settings_hash() || m.inputs != planned.inputs ||
        m.outputs.empty())
        return false;
    for (const auto& [name, hash] : m.outputs)
        if (!std::filesystem::exists(dir / name) || sha256_file(dir / name) != hash)
            return false;
    return true;
}

} // namespace agenda::cli
