#include "lep/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lep::svg {

namespace {

constexpr double kWidth = 480;
constexpr double kHeight = 360;
constexpr double kLeft = 64;
constexpr double kRight = 24;
constexpr double kTop = 36;
constexpr double kBottom = 52;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi)
{
    if (!(hi > lo)) {
        const double pad = std::abs(lo) > 0 ? 0.05 * std::abs(lo) : 1.0;
        lo -= pad;
        hi += pad;
    }
}

void axes(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xlabel,
          const std::string& ylabel)
{
    const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
    os << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l) << "\" height=\""
       << num(b - t) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
        os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(b + 16) << "\" font-size=\"11\" "
           << "text-anchor=\"middle\">" << tick(xv) << "</text>\n";
        os << "<text x=\"" << num(l - 6) << "\" y=\"" << num(f.py(yv) + 4) << "\" font-size=\"11\" "
           << "text-anchor=\"end\">" << tick(yv) << "</text>\n";
    }
    os << "<text x=\"" << num((l + r) / 2) << "\" y=\"" << num(kHeight - 12) << "\" font-size=\"12\" "
       << "text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    os << "<text x=\"14\" y=\"" << num((t + b) / 2) << "\" font-size=\"12\" text-anchor=\"middle\" "
       << "transform=\"rotate(-90 14 " << num((t + b) / 2) << ")\">" << escape(ylabel) << "</text>\n";
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" font-size=\"13\" text-anchor=\"middle\">"
       << escape(title) << "</text>\n";
}

// Piecewise-linear approximation of a perceptual sequential colormap.
std::string colormap(double u)
{
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
    }};
    u = std::clamp(u, 0.0, 1.0) * (stops.size() - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(u), stops.size() - 2);
    const double w = u - k;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[k][0] * (1 - w) + stops[k + 1][0] * w)),
                  static_cast<int>(std::lround(stops[k][1] * (1 - w) + stops[k + 1][1] * w)),
                  static_cast<int>(std::lround(stops[k][2] * (1 - w) + stops[k + 1][2] * w)));
    return buf;
}

} // namespace

Panel line_plot(const std::vector<Series>& series, const LineOptions& opts)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (double x : s.x)
            x0 = std::min(x0, x), x1 = std::max(x1, x);
        for (double y : s.y)
            y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    if (!std::isfinite(x0))
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (opts.ymin)
        y0 = *opts.ymin;
    if (opts.ymax)
        y1 = *opts.ymax;
    widen(x0, x1);
    widen(y0, y1);
    const Frame f{x0, x1, y0, y1};

    std::ostringstream os;
    axes(os, f, opts.title, opts.xlabel, opts.ylabel);
    for (double v : opts.vlines) {
        if (v < x0 || v > x1)
            continue;
        os << "<line x1=\"" << num(f.px(v)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(f.px(v)) << "\" y2=\""
           << num(kHeight - kBottom) << "\" stroke=\"#e377c2\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
           << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << " points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            os << (i ? " " : "") << num(f.px(s.x[i])) << ',' << num(f.py(std::clamp(s.y[i], y0, y1)));
        os << "\"/>\n";
        const double ly = kTop + 14 + 14 * static_cast<double>(k);
        os << "<line x1=\"" << num(kWidth - kRight - 110) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
           << num(kWidth - kRight - 92) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\""
           << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n";
        os << "<text x=\"" << num(kWidth - kRight - 88) << "\" y=\"" << num(ly) << "\" font-size=\"10\">"
           << escape(s.label) << "</text>\n";
    }
    return {os.str()};
}

Panel heatmap(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& values,
              const HeatmapOptions& opts)
{
    if (xs.size() < 2 || ys.size() < 2 || values.size() != xs.size() * ys.size())
        throw std::invalid_argument("heatmap needs a grid of at least 2x2 matching the value count");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    widen(lo, hi);
    const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    const double dy = (ys.back() - ys.front()) / static_cast<double>(ys.size() - 1);
    const Frame f{xs.front() - dx / 2, xs.back() + dx / 2, ys.front() - dy / 2, ys.back() + dy / 2};

    std::ostringstream os;
    const double cw = f.px(xs.front() + dx) - f.px(xs.front());
    const double ch = f.py(ys.front()) - f.py(ys.front() + dy);
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double v = values[j * xs.size() + i];
            os << "<rect x=\"" << num(f.px(xs[i] - dx / 2)) << "\" y=\"" << num(f.py(ys[j] + dy / 2))
               << "\" width=\"" << num(cw + 0.3) << "\" height=\"" << num(ch + 0.3) << "\" fill=\""
               << colormap((v - lo) / (hi - lo)) << "\"/>\n";
        }
    axes(os, f, opts.title, opts.xlabel, opts.ylabel);
    if (opts.rect) {
        const auto& r = *opts.rect;
        const double x = f.px(std::min(r.x0, r.x1)), y = f.py(std::max(r.y0, r.y1));
        os << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
           << num(std::abs(f.px(r.x1) - f.px(r.x0))) << "\" height=\"" << num(std::abs(f.py(r.y1) - f.py(r.y0)))
           << "\" fill=\"none\" stroke=\"#fff\" stroke-width=\"2\"/>\n";
    }
    for (const auto& m : opts.markers) {
        const bool inside = m.x >= f.x0 && m.x <= f.x1 && m.y >= f.y0 && m.y <= f.y1;
        const double cx = f.px(std::clamp(m.x, f.x0, f.x1));
        const double cy = f.py(std::clamp(m.y, f.y0, f.y1));
        os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"5\" fill=\""
           << (inside ? "#d62728" : "none") << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << num(cx + 8) << "\" y=\"" << num(cy - 6) << "\" font-size=\"11\" fill=\"#d62728\">"
           << escape(m.label + (inside ? "" : " (off-grid)")) << "</text>\n";
    }
    os << "<text x=\"" << num(kWidth - kRight) << "\" y=\"" << num(kTop - 4) << "\" font-size=\"10\" "
       << "text-anchor=\"end\">range " << tick(lo) << " .. " << tick(hi) << "</text>\n";
    return {os.str()};
}

std::string compose(const std::vector<Panel>& panels, int columns)
{
    columns = std::max(1, columns);
    const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth * columns) << "\" height=\""
       << num(kHeight * std::max(rows, 1)) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t k = 0; k < panels.size(); ++k) {
        const int c = static_cast<int>(k) % columns;
        const int r = static_cast<int>(k) / columns;
        os << "<g transform=\"translate(" << num(kWidth * c) << ',' << num(kHeight * r) << ")\">\n"
           << panels[k].body << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace lep::svg
