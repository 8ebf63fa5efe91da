#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geobias/errors.hpp"

namespace geobias {

// Severity attached to audit findings. Ordered: info < warning < critical.
enum class Severity { info, warning, critical };

const char* to_string(Severity s);

struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }

    bool contains(double x, double y) const {
        return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
    }

    // Throws ParameterError unless min <= max on both axes and all finite.
    void validate() const;
};

// Layout of a regular grid: square cells of side cell_size, cell (0,0)
// anchored at (origin_x, origin_y), row-major indexing with y as the
// slow axis.
struct GridSpec {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double cell_size = 1.0;
    int width = 0;
    int height = 0;

    void validate() const;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(ix);
    }
    double cell_center_x(int ix) const { return origin_x + (ix + 0.5) * cell_size; }
    double cell_center_y(int iy) const { return origin_y + (iy + 0.5) * cell_size; }
    double max_x() const { return origin_x + width * cell_size; }
    double max_y() const { return origin_y + height * cell_size; }
    Rect bounds() const { return Rect{origin_x, origin_y, max_x(), max_y()}; }

    // Cell containing (x, y) under half-open intervals [lo, lo + cell_size);
    // a point exactly on the grid's max boundary falls into the last cell.
    // Returns false for points outside the grid.
    bool locate(double x, double y, int& ix, int& iy) const;

    bool same_layout(const GridSpec& other) const;
};

// Grid of width x height cells covering `bounds`. Cells stay square:
// cell_size = max(span_x / width, span_y / height), so the grid may
// overhang the rect on one axis but never undershoots it.
GridSpec grid_over(const Rect& bounds, int width, int height);

// Regular grid of scalars with explicit per-cell no-data flags. Values are
// always finite; absence is a flag, never a sentinel.
class RasterGrid {
public:
    explicit RasterGrid(GridSpec spec);
    static RasterGrid filled(GridSpec spec, double value);

    const GridSpec& spec() const { return spec_; }
    int width() const { return spec_.width; }
    int height() const { return spec_.height; }
    double cell_size() const { return spec_.cell_size; }

    bool has_value(int ix, int iy) const { return valid_[spec_.index(ix, iy)] != 0; }
    double value(int ix, int iy) const;
    std::optional<double> value_opt(int ix, int iy) const;

    void set(int ix, int iy, double v);
    void set_nodata(int ix, int iy);

    std::size_t valid_count() const;
    // min/max over valid cells; empty when every cell is no-data.
    std::optional<std::pair<double, double>> value_range() const;

    template <typename Fn>  // Fn(int ix, int iy, double v)
    void for_each_valid(Fn&& fn) const {
        for (int iy = 0; iy < spec_.height; ++iy)
            for (int ix = 0; ix < spec_.width; ++ix) {
                const std::size_t i = spec_.index(ix, iy);
                if (valid_[i]) fn(ix, iy, values_[i]);
            }
    }

private:
    void check_index(int ix, int iy) const;

    GridSpec spec_;
    std::vector<double> values_;
    std::vector<std::uint8_t> valid_;
};

// Georeferenced records: planar coordinates, a shared set of named numeric
// attributes (column-major), and an optional group label per record.
// Immutable once built apart from add().
class PointDataset {
public:
    PointDataset() = default;
    PointDataset(std::vector<std::string> attr_names, bool with_groups);

    void add(double x, double y, std::span<const double> attrs, const std::string& group = "");

    std::size_t size() const { return xs_.size(); }
    bool empty() const { return xs_.empty(); }

    double x(std::size_t i) const { return xs_[i]; }
    double y(std::size_t i) const { return ys_[i]; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

    const std::vector<std::string>& attr_names() const { return attr_names_; }
    bool has_attr(const std::string& name) const;
    // Throws SchemaError for unknown names.
    const std::vector<double>& attr(const std::string& name) const;
    double attr_at(const std::string& name, std::size_t i) const { return attr(name)[i]; }

    bool has_groups() const { return with_groups_; }
    const std::string& group(std::size_t i) const;
    const std::vector<std::string>& groups() const { return groups_; }
    std::vector<std::string> distinct_groups() const;  // sorted

private:
    std::vector<std::string> attr_names_;
    std::vector<std::vector<double>> columns_;
    std::vector<double> xs_, ys_;
    std::vector<std::string> groups_;
    bool with_groups_ = false;
};

Rect bounding_box(const PointDataset& d);

enum class Aggregator { mean, sum, count };

// Bins points into grid cells and aggregates `attr` per cell. Cells with no
// points are no-data for mean and 0 for sum/count. Points outside the grid
// are ignored. `attr` may be empty for count.
RasterGrid rasterize(const PointDataset& d, const std::string& attr, const GridSpec& grid,
                     Aggregator aggregator);

}  // namespace geobias
