#pragma once

#include <string>
#include <vector>

namespace agenda {

/// Records a non-fatal condition. Messages go to stderr (unless silenced) and
/// are retained so the CLI can copy them into the run manifest.
void warn(std::string message);

/// Returns and clears every warning recorded so far.
std::vector<std::string> drain_warnings();

void set_warnings_to_stderr(bool enabled);

} // namespace agenda
