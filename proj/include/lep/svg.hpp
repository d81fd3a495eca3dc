#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lep::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color{"#1f77b4"};
    bool dashed{false};
};

struct Marker {
    double x{0};
    double y{0};
    std::string label;
};

struct Rect {
    double x0{0}, y0{0}, x1{0}, y1{0};
};

/// A plot panel; rendered at a fixed size and composed into a grid.
struct Panel {
    std::string body;
};

struct LineOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::optional<double> ymin;
    std::optional<double> ymax;
    std::vector<double> vlines;
};

Panel line_plot(const std::vector<Series>& series, const LineOptions& opts);

struct HeatmapOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Marker> markers;
    std::optional<Rect> rect;
};

/// values[j * xs.size() + i] is drawn at (xs[i], ys[j]); axes ascending.
Panel heatmap(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& values,
              const HeatmapOptions& opts);

/// Lays panels out row-major with `columns` per row into a complete document.
std::string compose(const std::vector<Panel>& panels, int columns);

} // namespace lep::svg
