#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geobias/core.hpp"

namespace geobias::simpson {
struct ParallelCoordsTable;
}
namespace geobias::kde {
struct VectorField;
}
namespace geobias::maup {
struct ZonePartition;
}

namespace geobias::svg {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
};

std::string to_hex(const Rgb& c);

// Categorical palette (Okabe-Ito, colorblind-safe); index wraps modulo 8.
Rgb categorical_color(std::size_t index);

// Sequential ramp (dark violet to yellow), t clamped to [0, 1]; t = 0 and
// t = 1 return the exact endpoint colors.
Rgb sequential_color(double t);

// Diverging ramp (blue - near-white - red), same endpoint guarantee.
Rgb diverging_color(double t);

// Minimal deterministic SVG assembler: fixed two-decimal coordinate format,
// no locale dependence, elements appear exactly in emission order.
class SvgBuilder {
public:
    SvgBuilder(double width, double height);

    void open_group(const std::string& raw_attrs);
    void close_group();
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& extra = "");
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width, const std::string& extra = "");
    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& extra = "");
    void polyline(const std::vector<std::pair<double, double>>& points,
                  const std::string& stroke, double stroke_width, const std::string& extra = "");
    void text(double x, double y, const std::string& content, double size,
              const std::string& anchor = "start", const std::string& fill = "#333333");

    std::string finish();

    static std::string fmt(double v);
    static std::string escape(const std::string& s);

private:
    std::string body_;
    double width_, height_;
    int open_groups_ = 0;
    bool finished_ = false;
};

struct FitLine {
    double slope = 0.0;
    double intercept = 0.0;
    std::string label;
    std::string color = "#000000";
    bool dashed = false;
};

struct ScatterOptions {
    std::string x_axis = "x";  // attribute name, or the coordinate axes "x"/"y"
    std::string y_axis = "y";
    std::vector<FitLine> group_lines;
    std::optional<FitLine> pooled_line;
    std::string title;
    double max_px = 640.0;
};

// Scatter of records (group-colored when the dataset has groups) with
// optional per-group and pooled regression lines.
std::string render_scatter(const PointDataset& d, const ScatterOptions& opt);

struct ParallelCoordsOptions {
    std::string title;
    double max_px = 720.0;
};

// One vertical axis per column, one polyline per record, group-colored.
std::string render_parallel_coords(const simpson::ParallelCoordsTable& table,
                                   const ParallelCoordsOptions& opt = {});

enum class Ramp { sequential, diverging };

struct HeatmapOptions {
    Ramp ramp = Ramp::sequential;
    // Color-mapping range override; defaults to the grid's min/max.
    std::optional<std::pair<double, double>> value_range;
    std::vector<std::size_t> flagged_cells;  // row-major cell indices, outlined
    const kde::VectorField* quiver = nullptr;
    int quiver_stride = 1;
    const maup::ZonePartition* zones = nullptr;  // boundary overlay
    std::string title;
    double max_px = 640.0;
};

// One rect per valid cell, min-max color mapping, overlays in their own
// groups. World y points up, so grid row 0 is drawn at the bottom.
std::string render_heatmap(const RasterGrid& r, const HeatmapOptions& opt = {});

}  // namespace geobias::svg
