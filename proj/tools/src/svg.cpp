#include "ibdwaves_cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ibdwaves_cli/csv.hpp"

namespace ibdwaves::cli {

namespace {

constexpr double kW = 820, kH = 520, kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            default: o += c;
        }
    }
    return o;
}

double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return mag * (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0);
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// numeric group values print with %g in legends
std::string short_label(const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') return cell;
    return num(v);
}

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
};

}  // namespace

void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& svg, const PlotSpec& spec) {
    const CsvTable t = read_csv(csv);
    const std::size_t xc = t.column(spec.x_col);
    std::vector<std::size_t> gc;
    for (const auto& g : spec.group_cols) gc.push_back(t.column(g));

    std::map<std::string, Series> series;
    std::vector<std::string> order;
    for (const auto& yname : spec.y_cols) {
        const std::size_t yc = t.column(yname);
        for (const auto& r : t.rows) {
            std::string key = spec.y_cols.size() > 1 ? yname : "";
            for (std::size_t g : gc) key += (key.empty() ? "" : " ") + short_label(r.at(g));
            if (key.empty()) key = yname;
            if (!series.count(key)) {
                order.push_back(key);
                series[key].label = key;
            }
            const double x = std::strtod(r.at(xc).c_str(), nullptr);
            const double y = std::strtod(r.at(yc).c_str(), nullptr);
            series[key].pts.emplace_back(x, y);
        }
    }

    if (spec.max_groups && order.size() > spec.max_groups) {
        std::vector<std::string> kept;
        const double stride = static_cast<double>(order.size() - 1) / static_cast<double>(std::max<std::size_t>(1, spec.max_groups - 1));
        for (std::size_t k = 0; k < spec.max_groups; ++k) {
            kept.push_back(order[static_cast<std::size_t>(std::lround(stride * static_cast<double>(k)))]);
        }
        for (const auto& key : order) {
            if (std::find(kept.begin(), kept.end(), key) == kept.end()) series.erase(key);
        }
        order = kept;
    }

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& [k, s] : series) {
        for (auto [x, y] : s.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x0 = std::min(x0, x), x1 = std::max(x1, x);
            y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad, y1 += pad;

    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

    std::ofstream out(svg, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + svg.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(spec.title) << "</text>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = nice_step(x1 - x0), ys = nice_step(y1 - y0);
    for (double v = std::ceil(x0 / xs) * xs; v <= x1 + 1e-9 * xs; v += xs) {
        out << "<line x1=\"" << px(v) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(v) << "\" y2=\""
            << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(v) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
            << num(std::abs(v) < 1e-12 * xs ? 0.0 : v) << "</text>\n";
    }
    for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-9 * ys; v += ys) {
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << kLeft << "\" y2=\""
            << py(v) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
            << num(std::abs(v) < 1e-12 * ys ? 0.0 : v) << "</text>\n";
    }
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">"
        << escape(spec.x_label.empty() ? spec.x_col : spec.x_label) << "</text>\n";
    out << "<text transform=\"translate(20," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(spec.y_label) << "</text>\n";

    std::size_t idx = 0;
    for (const auto& key : order) {
        const auto& s = series[key];
        const char* colour = kPalette[idx % std::size(kPalette)];
        std::ostringstream pts;
        auto flush = [&] {
            if (!pts.str().empty()) {
                out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\""
                    << pts.str() << "\"/>\n";
            }
            pts.str("");
        };
        for (auto [x, y] : s.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            pts << px(x) << ',' << py(y) << ' ';
            if (spec.markers) {
                out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << colour
                    << "\"/>\n";
            }
        }
        flush();
        if (!spec.legend) {
            ++idx;
            continue;
        }
        const double ly = kTop + 14 + 18 * static_cast<double>(idx);
        out << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 36
            << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kW - kRight + 42 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

}  // namespace ibdwaves::cli
