#include "svg.hpp"

#include "agenda/common.hpp"
#include "agenda/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace agenda::cli {

namespace {

const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
                          "#666666", "#1f78b4", "#b2df8a", "#fb9a99", "#cab2d6"};

std::string esc(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// fixed precision keeps the files byte-stable and small
std::string num(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

std::string tick(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(3);
    os << v;
    return os.str();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
    void add(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad()
    {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

void write_file(const std::filesystem::path& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << body;
}

} // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series)
{
    const double W = 900, H = 480, L = 70, R = 190, T = 40, B = 50;
    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x)
            xr.add(v);
        for (double v : s.y)
            yr.add(v);
    }
    xr.pad();
    yr.pad();
    auto px = [&](double x) { return L + (x - xr.lo) / (xr.hi - xr.lo) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - yr.lo) / (yr.hi - yr.lo) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0, xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        o << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
        o << "<text x=\"" << num(px(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << esc(x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << esc(y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = kPalette[s % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i)
            o << (i ? " " : "") << num(px(series[s].x[i])) << "," << num(py(series[s].y[i]));
        o << "\"/>\n";
        const double ly = T + 14.0 * static_cast<double>(s);
        o << "<rect x=\"" << W - R + 12 << "\" y=\"" << num(ly) << "\" width=\"10\" height=\"10\" fill=\"" << colour << "\"/>\n";
        o << "<text x=\"" << W - R + 28 << "\" y=\"" << num(ly + 9) << "\">" << esc(series[s].name) << "</text>\n";
    }
    o << "</svg>\n";
    write_file(path, o.str());
}

void write_interval_chart(const std::filesystem::path& path, const std::string& title,
                          const std::vector<IntervalPanel>& panels)
{
    const double W = 900, panel_h = 150, L = 70, R = 30, T = 40, gap = 40;
    const double H = T + static_cast<double>(panels.size()) * (panel_h + gap) + 20;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << num(H) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const double top = T + static_cast<double>(p) * (panel_h + gap), bottom = top + panel_h;
        Range yr;
        for (const auto& iv : panel.intervals) {
            yr.add(iv.low);
            yr.add(iv.high);
        }
        yr.pad();
        auto py = [&](double y) { return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (panel_h - 10); };
        const double n = std::max<double>(1.0, static_cast<double>(panel.intervals.size()));
        auto px = [&](std::size_t i) { return L + (static_cast<double>(i) + 0.5) / n * (W - L - R); };
        o << "<text x=\"" << L << "\" y=\"" << num(top - 4) << "\" font-size=\"12\">" << esc(panel.title) << "</text>\n";
        o << "<line x1=\"" << L << "\" y1=\"" << num(bottom) << "\" x2=\"" << W - R << "\" y2=\"" << num(bottom) << "\" stroke=\"black\"/>\n";
        o << "<line x1=\"" << L << "\" y1=\"" << num(top) << "\" x2=\"" << L << "\" y2=\"" << num(bottom) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yr.hi) + 4) << "\" text-anchor=\"end\">" << tick(yr.hi) << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yr.lo) + 4) << "\" text-anchor=\"end\">" << tick(yr.lo) << "</text>\n";
        for (std::size_t i = 0; i < panel.intervals.size(); ++i) {
            const auto& iv = panel.intervals[i];
            o << "<line x1=\"" << num(px(i)) << "\" y1=\"" << num(py(iv.low)) << "\" x2=\"" << num(px(i)) << "\" y2=\""
              << num(py(iv.high)) << "\" stroke=\"#1f78b4\"/>\n";
            o << "<circle cx=\"" << num(px(i)) << "\" cy=\"" << num(py(iv.mid)) << "\" r=\"2.5\" fill=\"#1f78b4\"/>\n";
            o << "<text x=\"" << num(px(i)) << "\" y=\"" << num(bottom + 12) << "\" text-anchor=\"middle\">" << esc(iv.label) << "</text>\n";
        }
    }
    o << "</svg>\n";
    write_file(path, o.str());
}

} // namespace agenda::cli
