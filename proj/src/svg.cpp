#include "geobias/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "geobias/errors.hpp"
#include "geobias/kde.hpp"
#include "geobias/maup.hpp"
#include "geobias/simpson.hpp"

namespace geobias::svg {

namespace {

constexpr Rgb kCategorical[8] = {
    {0xE6, 0x9F, 0x00},  // orange
    {0x56, 0xB4, 0xE9},  // sky blue
    {0x00, 0x9E, 0x73},  // bluish green
    {0xD5, 0x5E, 0x00},  // vermillion
    {0x00, 0x72, 0xB2},  // blue
    {0xCC, 0x79, 0xA7},  // reddish purple
    {0xF0, 0xE4, 0x42},  // yellow
    {0x00, 0x00, 0x00},  // black
};

constexpr Rgb kSequentialStops[5] = {
    {0x44, 0x01, 0x54}, {0x3B, 0x52, 0x8B}, {0x21, 0x91, 0x8C},
    {0x5E, 0xC9, 0x62}, {0xFD, 0xE7, 0x25},
};

constexpr Rgb kDivergingStops[3] = {
    {0x21, 0x66, 0xAC}, {0xF7, 0xF7, 0xF7}, {0xB2, 0x18, 0x2B},
};

Rgb ramp_color(const Rgb* stops, std::size_t n_stops, double t) {
    t = std::clamp(t, 0.0, 1.0);
    if (t <= 0.0) return stops[0];
    if (t >= 1.0) return stops[n_stops - 1];
    const double pos = t * static_cast<double>(n_stops - 1);
    const std::size_t seg = std::min(static_cast<std::size_t>(pos), n_stops - 2);
    const double f = pos - static_cast<double>(seg);
    auto lerp = [f](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround(a + f * (b - a)));
    };
    return Rgb{lerp(stops[seg].r, stops[seg + 1].r), lerp(stops[seg].g, stops[seg + 1].g),
               lerp(stops[seg].b, stops[seg + 1].b)};
}

// %.4g value label formatting (axis extents, legends).
std::string fmt_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// Axis lookup shared with the parallel-coordinates table: attributes first,
// then the coordinate axes.
const std::vector<double>& axis_values(const PointDataset& d, const std::string& name) {
    if (d.has_attr(name)) return d.attr(name);
    if (name == "x") return d.xs();
    if (name == "y") return d.ys();
    throw SchemaError("render_scatter: unknown axis '" + name + "'");
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double span() const { return hi - lo; }
};

Range padded_range(const std::vector<double>& v, double pad_fraction) {
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = *lo_it, hi = *hi_it;
    const double pad = hi > lo ? (hi - lo) * pad_fraction : 1.0;
    return Range{lo - pad, hi + pad};
}

// Clips the segment (x1,y1)-(x2,y2) to an axis-aligned box (Liang-Barsky).
bool clip_segment(double& x1, double& y1, double& x2, double& y2, const Range& xr,
                  const Range& yr) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = x2 - x1, dy = y2 - y1;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {x1 - xr.lo, xr.hi - x1, y1 - yr.lo, yr.hi - y1};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) {
            if (t > t1) return false;
            t0 = std::max(t0, t);
        } else {
            if (t < t0) return false;
            t1 = std::min(t1, t);
        }
    }
    const double nx1 = x1 + t0 * dx, ny1 = y1 + t0 * dy;
    const double nx2 = x1 + t1 * dx, ny2 = y1 + t1 * dy;
    x1 = nx1;
    y1 = ny1;
    x2 = nx2;
    y2 = ny2;
    return true;
}

}  // namespace

std::string to_hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", c.r, c.g, c.b);
    return buf;
}

Rgb categorical_color(std::size_t index) { return kCategorical[index % 8]; }

Rgb sequential_color(double t) { return ramp_color(kSequentialStops, 5, t); }

Rgb diverging_color(double t) { return ramp_color(kDivergingStops, 3, t); }

SvgBuilder::SvgBuilder(double width, double height) : width_(width), height_(height) {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) +
             "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) + " " +
             fmt(height_) + "\">\n";
    body_ += "<rect class=\"bg\" x=\"0\" y=\"0\" width=\"" + fmt(width_) + "\" height=\"" +
             fmt(height_) + "\" fill=\"#FFFFFF\"/>\n";
}

void SvgBuilder::open_group(const std::string& raw_attrs) {
    body_ += "<g " + raw_attrs + ">\n";
    ++open_groups_;
}

void SvgBuilder::close_group() {
    if (open_groups_ <= 0) throw InternalError("SvgBuilder: unbalanced close_group");
    body_ += "</g>\n";
    --open_groups_;
}

void SvgBuilder::rect(double x, double y, double w, double h, const std::string& fill,
                      const std::string& extra) {
    body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
             "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\"" + extra + "/>\n";
}

void SvgBuilder::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                      double stroke_width, const std::string& extra) {
    body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
             "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             fmt(stroke_width) + "\"" + extra + "/>\n";
}

void SvgBuilder::circle(double cx, double cy, double r, const std::string& fill,
                        const std::string& extra) {
    body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
             "\" fill=\"" + fill + "\"" + extra + "/>\n";
}

void SvgBuilder::polyline(const std::vector<std::pair<double, double>>& points,
                          const std::string& stroke, double stroke_width,
                          const std::string& extra) {
    body_ += "<polyline points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_ += ' ';
        body_ += fmt(points[i].first) + "," + fmt(points[i].second);
    }
    body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(stroke_width) +
             "\"" + extra + "/>\n";
}

void SvgBuilder::text(double x, double y, const std::string& content, double size,
                      const std::string& anchor, const std::string& fill) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"sans-serif\"" +
             " font-size=\"" + fmt(size) + "\" text-anchor=\"" + anchor + "\" fill=\"" + fill +
             "\">" + escape(content) + "</text>\n";
}

std::string SvgBuilder::finish() {
    if (finished_) throw InternalError("SvgBuilder: finish called twice");
    if (open_groups_ != 0) throw InternalError("SvgBuilder: unbalanced groups at finish");
    finished_ = true;
    return body_ + "</svg>\n";
}

std::string SvgBuilder::fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string SvgBuilder::escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

std::string render_scatter(const PointDataset& d, const ScatterOptions& opt) {
    if (d.empty()) throw EmptyInputError("render_scatter: no points");
    const std::vector<double>& xs = axis_values(d, opt.x_axis);
    const std::vector<double>& ys = axis_values(d, opt.y_axis);

    const double width = opt.max_px;
    const double height = 0.75 * opt.max_px;
    const double ml = 48, mr = 14, mb = 36;
    const double mt = opt.title.empty() ? 14 : 30;
    const double pw = width - ml - mr, ph = height - mt - mb;

    const Range xr = padded_range(xs, 0.05);
    const Range yr = padded_range(ys, 0.05);
    auto px = [&](double x) { return ml + (x - xr.lo) / xr.span() * pw; };
    auto py = [&](double y) { return mt + (1.0 - (y - yr.lo) / yr.span()) * ph; };

    std::map<std::string, std::size_t> group_index;
    if (d.has_groups()) {
        const auto groups = d.distinct_groups();
        for (std::size_t i = 0; i < groups.size(); ++i) group_index[groups[i]] = i;
    }

    SvgBuilder b(width, height);
    if (!opt.title.empty()) b.text(width / 2, 19, opt.title, 13, "middle");

    b.open_group("class=\"axes\"");
    b.line(ml, mt, ml, mt + ph, "#333333", 1);
    b.line(ml, mt + ph, ml + pw, mt + ph, "#333333", 1);
    b.text(ml, mt + ph + 14, fmt_value(xr.lo), 10, "middle");
    b.text(ml + pw, mt + ph + 14, fmt_value(xr.hi), 10, "middle");
    b.text(ml - 4, mt + ph, fmt_value(yr.lo), 10, "end");
    b.text(ml - 4, mt + 8, fmt_value(yr.hi), 10, "end");
    b.text(ml + pw / 2, mt + ph + 28, opt.x_axis, 11, "middle");
    b.text(14, mt + ph / 2, opt.y_axis, 11, "middle");
    b.close_group();

    b.open_group("class=\"points\"");
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Rgb c = d.has_groups() ? categorical_color(group_index.at(d.group(i)))
                                     : categorical_color(0);
        b.circle(px(xs[i]), py(ys[i]), 3, to_hex(c), " class=\"pt\"");
    }
    b.close_group();

    auto draw_fit = [&](const FitLine& fit, const char* cls) {
        double x1 = xr.lo, y1 = fit.intercept + fit.slope * xr.lo;
        double x2 = xr.hi, y2 = fit.intercept + fit.slope * xr.hi;
        if (!clip_segment(x1, y1, x2, y2, xr, yr)) return;
        std::string extra = std::string(" class=\"") + cls + "\"";
        if (fit.dashed) extra += " stroke-dasharray=\"6,4\"";
        if (!fit.label.empty()) extra += " data-label=\"" + SvgBuilder::escape(fit.label) + "\"";
        b.line(px(x1), py(y1), px(x2), py(y2), fit.color, 2, extra);
    };
    b.open_group("class=\"fits\"");
    for (const FitLine& fit : opt.group_lines) draw_fit(fit, "fit-group");
    if (opt.pooled_line) draw_fit(*opt.pooled_line, "fit-pooled");
    b.close_group();

    return b.finish();
}

std::string render_parallel_coords(const simpson::ParallelCoordsTable& table,
                                   const ParallelCoordsOptions& opt) {
    if (table.rows.empty()) throw EmptyInputError("render_parallel_coords: empty table");
    const std::size_t k = table.axes.size();
    if (k < 2) throw ParameterError("render_parallel_coords: need at least 2 axes");

    const double width = opt.max_px;
    const double height = 0.6 * opt.max_px;
    const double ml = 44, mr = 44, mb = 30;
    const double mt = opt.title.empty() ? 16 : 32;
    const double pw = width - ml - mr, ph = height - mt - mb;

    // Per-axis display range (normalization for pixels; the table's own
    // normalization may be unbounded z-scores).
    std::vector<Range> ranges(k);
    for (std::size_t a = 0; a < k; ++a) {
        double lo = table.rows[0][a], hi = table.rows[0][a];
        for (const auto& row : table.rows) {
            lo = std::min(lo, row[a]);
            hi = std::max(hi, row[a]);
        }
        ranges[a] = Range{lo, hi};
    }
    auto axis_x = [&](std::size_t a) {
        return ml + pw * static_cast<double>(a) / static_cast<double>(k - 1);
    };
    auto axis_y = [&](std::size_t a, double v) {
        const Range& r = ranges[a];
        const double t = r.hi > r.lo ? (v - r.lo) / r.span() : 0.5;
        return mt + (1.0 - t) * ph;
    };

    std::map<std::string, std::size_t> group_index;
    for (const std::string& g : table.groups)
        group_index.emplace(g, 0);
    std::size_t gi = 0;
    for (auto& [g, idx] : group_index) idx = gi++;

    SvgBuilder b(width, height);
    if (!opt.title.empty()) b.text(width / 2, 20, opt.title, 13, "middle");

    b.open_group("class=\"records\"");
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(k);
        for (std::size_t a = 0; a < k; ++a)
            pts.emplace_back(axis_x(a), axis_y(a, table.rows[row][a]));
        const Rgb c = table.groups.empty()
                          ? categorical_color(0)
                          : categorical_color(group_index.at(table.groups[row]));
        b.polyline(pts, to_hex(c), 1, " class=\"record\" opacity=\"0.55\"");
    }
    b.close_group();

    b.open_group("class=\"axes\"");
    for (std::size_t a = 0; a < k; ++a) {
        b.line(axis_x(a), mt, axis_x(a), mt + ph, "#333333", 1, " class=\"axis\"");
        b.text(axis_x(a), mt + ph + 16, table.axes[a], 11, "middle");
    }
    b.close_group();

    return b.finish();
}

std::string render_heatmap(const RasterGrid& r, const HeatmapOptions& opt) {
    const auto computed_range = r.value_range();
    if (!computed_range) throw EmptyInputError("render_heatmap: every cell is no-data");
    const auto [lo, hi] = opt.value_range.value_or(*computed_range);

    const GridSpec& spec = r.spec();
    if (opt.quiver && !opt.quiver->spec.same_layout(spec))
        throw ParameterError("render_heatmap: quiver field layout differs from grid");
    if (opt.zones && !opt.zones->grid.same_layout(spec))
        throw ParameterError("render_heatmap: zone partition layout differs from grid");
    if (opt.quiver_stride < 1) throw ParameterError("render_heatmap: quiver_stride must be >= 1");

    const double s = opt.max_px / static_cast<double>(std::max(spec.width, spec.height));
    const double ml = 10, mr = 10, mb = 26;
    const double mt = opt.title.empty() ? 10 : 30;
    const double pw = s * spec.width, ph = s * spec.height;
    const double width = ml + pw + mr, height = mt + ph + mb;

    // Screen position of a cell's top-left corner; world y points up.
    auto cell_x = [&](int ix) { return ml + ix * s; };
    auto cell_y = [&](int iy) { return mt + (spec.height - 1 - iy) * s; };

    auto color_at = [&](double v) {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return to_hex(opt.ramp == Ramp::sequential ? sequential_color(t) : diverging_color(t));
    };

    SvgBuilder b(width, height);
    if (!opt.title.empty()) b.text(width / 2, 19, opt.title, 13, "middle");

    b.open_group("class=\"cells\" shape-rendering=\"crispEdges\"");
    r.for_each_valid([&](int ix, int iy, double v) {
        b.rect(cell_x(ix), cell_y(iy), s, s, color_at(v), " class=\"cell\"");
    });
    b.close_group();

    if (!opt.flagged_cells.empty()) {
        b.open_group("class=\"flagged\"");
        for (std::size_t idx : opt.flagged_cells) {
            const int ix = static_cast<int>(idx % static_cast<std::size_t>(spec.width));
            const int iy = static_cast<int>(idx / static_cast<std::size_t>(spec.width));
            b.rect(cell_x(ix), cell_y(iy), s, s, "none",
                   " class=\"flag\" stroke=\"#000000\" stroke-width=\"1.50\"");
        }
        b.close_group();
    }

    if (opt.quiver) {
        // Longest drawn arrow spans 80% of a stride block.
        double max_mag = 0.0;
        for (int iy = 0; iy < spec.height; iy += opt.quiver_stride)
            for (int ix = 0; ix < spec.width; ix += opt.quiver_stride) {
                const std::size_t i = spec.index(ix, iy);
                max_mag = std::max(max_mag, std::hypot(opt.quiver->gx[i], opt.quiver->gy[i]));
            }
        b.open_group("class=\"quiver\"");
        if (max_mag > 0.0) {
            const double full = 0.8 * s * opt.quiver_stride;
            for (int iy = 0; iy < spec.height; iy += opt.quiver_stride)
                for (int ix = 0; ix < spec.width; ix += opt.quiver_stride) {
                    const std::size_t i = spec.index(ix, iy);
                    const double gx = opt.quiver->gx[i], gy = opt.quiver->gy[i];
                    const double mag = std::hypot(gx, gy);
                    if (mag < 1e-15) continue;
                    const double len = full * mag / max_mag;
                    const double ux = gx / mag, uy = -gy / mag;  // screen y flip
                    const double cx = cell_x(ix) + 0.5 * s, cy = cell_y(iy) + 0.5 * s;
                    const double tx = cx + ux * len / 2, ty = cy + uy * len / 2;
                    b.line(cx - ux * len / 2, cy - uy * len / 2, tx, ty, "#000000", 1,
                           " class=\"arrow\"");
                    // Arrowhead: two barbs at 150 degrees off the shaft.
                    const double barb = std::min(4.0, len * 0.35);
                    const double c150 = -0.8660254037844387, s150 = 0.5;
                    b.line(tx, ty, tx + barb * (ux * c150 - uy * s150),
                           ty + barb * (ux * s150 + uy * c150), "#000000", 1,
                           " class=\"arrow-head\"");
                    b.line(tx, ty, tx + barb * (ux * c150 + uy * s150),
                           ty + barb * (-ux * s150 + uy * c150), "#000000", 1,
                           " class=\"arrow-head\"");
                }
        }
        b.close_group();
    }

    if (opt.zones) {
        b.open_group("class=\"zones\"");
        const std::vector<int>& zone = opt.zones->zone_of;
        for (int iy = 0; iy < spec.height; ++iy)
            for (int ix = 0; ix < spec.width; ++ix) {
                if (ix + 1 < spec.width &&
                    zone[spec.index(ix, iy)] != zone[spec.index(ix + 1, iy)])
                    b.line(cell_x(ix + 1), cell_y(iy), cell_x(ix + 1), cell_y(iy) + s,
                           "#000000", 1.2, " class=\"zone-edge\"");
                if (iy + 1 < spec.height &&
                    zone[spec.index(ix, iy)] != zone[spec.index(ix, iy + 1)])
                    b.line(cell_x(ix), cell_y(iy), cell_x(ix) + s, cell_y(iy), "#000000", 1.2,
                           " class=\"zone-edge\"");
            }
        b.close_group();
    }

    b.text(ml, mt + ph + 16, "min " + fmt_value(lo) + "   max " + fmt_value(hi), 11, "start");
    return b.finish();
}

}  // namespace geobias::svg
