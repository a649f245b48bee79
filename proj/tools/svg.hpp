#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace agenda::cli {

struct Series {
    std::string name;
    std::vector<double> x, y;
};

/// Multi-series line chart.
void write_line_chart(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

struct Interval {
    std::string label;
    double low = 0.0, mid = 0.0, high = 0.0;
};

/// One panel per group: point estimates with interval bars along the x axis.
struct IntervalPanel {
    std::string title;
    std::vector<Interval> intervals;
};

void write_interval_chart(const std::filesystem::path& path, const std::string& title,
                          const std::vector<IntervalPanel>& panels);

} // namespace agenda::cli
