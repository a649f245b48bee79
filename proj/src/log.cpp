#include "agenda/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace agenda {
namespace {

std::mutex sink_mutex;
std::vector<std::string> sink;
std::atomic<bool> echo{true};

} // namespace

void warn(std::string message)
{
    std::lock_guard lock(sink_mutex);
    if (echo.load())
        std::cerr << "warning: " << message << '\n';
    sink.push_back(std::move(message));
}

std::vector<std::string> drain_warnings()
{
    std::lock_guard lock(sink_mutex);
    std::vector<std::string> out;
    out.swap(sink);
    return out;
}

void set_warnings_to_stderr(bool enabled) { echo.store(enabled); }

} // namespace agenda
