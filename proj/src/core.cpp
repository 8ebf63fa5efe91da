#include "geobias/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace geobias {

const char* to_string(Severity s) {
    switch (s) {
        case Severity::info: return "info";
        case Severity::warning: return "warning";
        case Severity::critical: return "critical";
    }
    return "info";
}

void Rect::validate() const {
    if (!std::isfinite(min_x) || !std::isfinite(min_y) || !std::isfinite(max_x) ||
        !std::isfinite(max_y))
        throw ParameterError("rect coordinates must be finite");
    if (min_x > max_x || min_y > max_y)
        throw ParameterError("rect must satisfy min <= max on both axes");
}

void GridSpec::validate() const {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw ParameterError("grid cell_size must be positive and finite");
    if (width < 1 || height < 1)
        throw ParameterError("grid width and height must be positive");
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
        throw ParameterError("grid origin must be finite");
}

bool GridSpec::locate(double x, double y, int& ix, int& iy) const {
    if (x < origin_x || y < origin_y || x > max_x() || y > max_y()) return false;
    ix = static_cast<int>(std::floor((x - origin_x) / cell_size));
    iy = static_cast<int>(std::floor((y - origin_y) / cell_size));
    // Max-boundary points belong to the last cell.
    if (ix >= width) ix = width - 1;
    if (iy >= height) iy = height - 1;
    return true;
}

bool GridSpec::same_layout(const GridSpec& other) const {
    return width == other.width && height == other.height && origin_x == other.origin_x &&
           origin_y == other.origin_y && cell_size == other.cell_size;
}

GridSpec grid_over(const Rect& bounds, int width, int height) {
    bounds.validate();
    if (width < 1 || height < 1) throw ParameterError("grid_over: width and height must be >= 1");
    double cell = std::max(bounds.width() / width, bounds.height() / height);
    if (!(cell > 0.0)) cell = 1.0;  // degenerate rect (single point)
    GridSpec spec{bounds.min_x, bounds.min_y, cell, width, height};
    spec.validate();
    return spec;
}

RasterGrid::RasterGrid(GridSpec spec) : spec_(spec) {
    spec_.validate();
    values_.assign(spec_.cell_count(), 0.0);
    valid_.assign(spec_.cell_count(), 0);
}

RasterGrid RasterGrid::filled(GridSpec spec, double value) {
    RasterGrid g(spec);
    if (!std::isfinite(value)) throw ParameterError("fill value must be finite");
    std::fill(g.values_.begin(), g.values_.end(), value);
    std::fill(g.valid_.begin(), g.valid_.end(), std::uint8_t{1});
    return g;
}

void RasterGrid::check_index(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= spec_.width || iy >= spec_.height)
        throw InternalError("raster index out of range");
}

double RasterGrid::value(int ix, int iy) const {
    check_index(ix, iy);
    const std::size_t i = spec_.index(ix, iy);
    if (!valid_[i]) throw InternalError("read of no-data cell");
    return values_[i];
}

std::optional<double> RasterGrid::value_opt(int ix, int iy) const {
    check_index(ix, iy);
    const std::size_t i = spec_.index(ix, iy);
    if (!valid_[i]) return std::nullopt;
    return values_[i];
}

void RasterGrid::set(int ix, int iy, double v) {
    check_index(ix, iy);
    if (!std::isfinite(v)) throw InternalError("raster values must be finite; use set_nodata");
    const std::size_t i = spec_.index(ix, iy);
    values_[i] = v;
    valid_[i] = 1;
}

void RasterGrid::set_nodata(int ix, int iy) {
    check_index(ix, iy);
    const std::size_t i = spec_.index(ix, iy);
    values_[i] = 0.0;
    valid_[i] = 0;
}

std::size_t RasterGrid::valid_count() const {
    std::size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
}

std::optional<std::pair<double, double>> RasterGrid::value_range() const {
    std::optional<std::pair<double, double>> range;
    for_each_valid([&](int, int, double v) {
        if (!range) {
            range = {v, v};
        } else {
            range->first = std::min(range->first, v);
            range->second = std::max(range->second, v);
        }
    });
    return range;
}

PointDataset::PointDataset(std::vector<std::string> attr_names, bool with_groups)
    : attr_names_(std::move(attr_names)), with_groups_(with_groups) {
    std::set<std::string> seen;
    for (const auto& name : attr_names_) {
        if (name.empty()) throw SchemaError("attribute names must be non-empty");
        if (!seen.insert(name).second) throw SchemaError("duplicate attribute name: " + name);
    }
    columns_.resize(attr_names_.size());
}

void PointDataset::add(double x, double y, std::span<const double> attrs,
                       const std::string& group) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw ParameterError("point coordinates must be finite");
    if (attrs.size() != attr_names_.size())
        throw SchemaError("record has " + std::to_string(attrs.size()) + " attributes, expected " +
                          std::to_string(attr_names_.size()));
    if (with_groups_ && group.empty())
        throw SchemaError("group label must be a non-empty string");
    if (!with_groups_ && !group.empty())
        throw SchemaError("dataset has no group column");
    for (double v : attrs)
        if (!std::isfinite(v)) throw ParameterError("attribute values must be finite");

    xs_.push_back(x);
    ys_.push_back(y);
    for (std::size_t c = 0; c < columns_.size(); ++c) columns_[c].push_back(attrs[c]);
    if (with_groups_) groups_.push_back(group);
}

bool PointDataset::has_attr(const std::string& name) const {
    return std::find(attr_names_.begin(), attr_names_.end(), name) != attr_names_.end();
}

const std::vector<double>& PointDataset::attr(const std::string& name) const {
    for (std::size_t c = 0; c < attr_names_.size(); ++c)
        if (attr_names_[c] == name) return columns_[c];
    throw SchemaError("unknown attribute: " + name);
}

const std::string& PointDataset::group(std::size_t i) const {
    if (!with_groups_) throw SchemaError("dataset has no group labels");
    return groups_[i];
}

std::vector<std::string> PointDataset::distinct_groups() const {
    if (!with_groups_) return {};
    std::set<std::string> s(groups_.begin(), groups_.end());
    return {s.begin(), s.end()};
}

Rect bounding_box(const PointDataset& d) {
    if (d.empty()) throw EmptyInputError("bounding_box: dataset is empty");
    Rect r{d.x(0), d.y(0), d.x(0), d.y(0)};
    for (std::size_t i = 1; i < d.size(); ++i) {
        r.min_x = std::min(r.min_x, d.x(i));
        r.max_x = std::max(r.max_x, d.x(i));
        r.min_y = std::min(r.min_y, d.y(i));
        r.max_y = std::max(r.max_y, d.y(i));
    }
    return r;
}

RasterGrid rasterize(const PointDataset& d, const std::string& attr, const GridSpec& grid,
                     Aggregator aggregator) {
    grid.validate();
    const std::vector<double>* col = nullptr;
    if (aggregator != Aggregator::count || !attr.empty()) col = &d.attr(attr);

    std::vector<double> sum(grid.cell_count(), 0.0);
    std::vector<std::size_t> count(grid.cell_count(), 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        int ix, iy;
        if (!grid.locate(d.x(i), d.y(i), ix, iy)) continue;
        const std::size_t c = grid.index(ix, iy);
        if (col) sum[c] += (*col)[i];
        count[c] += 1;
    }

    RasterGrid out(grid);
    for (int iy = 0; iy < grid.height; ++iy) {
        for (int ix = 0; ix < grid.width; ++ix) {
            const std::size_t c = grid.index(ix, iy);
            switch (aggregator) {
                case Aggregator::mean:
                    if (count[c] == 0)
                        out.set_nodata(ix, iy);
                    else
                        out.set(ix, iy, sum[c] / static_cast<double>(count[c]));
                    break;
                case Aggregator::sum:
                    out.set(ix, iy, sum[c]);
                    break;
                case Aggregator::count:
                    out.set(ix, iy, static_cast<double>(count[c]));
                    break;
            }
        }
    }
    return out;
}

}  // namespace geobias
