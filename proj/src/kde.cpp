#include "geobias/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "geobias/errors.hpp"
#include "geobias/numeric.hpp"

namespace geobias::kde {

Bandwidth2D silverman_bandwidth(const PointDataset& d) {
    if (d.size() < 2) throw SampleSizeError("silverman_bandwidth: need at least 2 points");
    const double sx = num::sample_sd(d.xs());
    const double sy = num::sample_sd(d.ys());
    if (sx <= 0.0) throw DegenerateDataError("silverman_bandwidth: zero variance on the x axis");
    if (sy <= 0.0) throw DegenerateDataError("silverman_bandwidth: zero variance on the y axis");
    const double factor = std::pow(static_cast<double>(d.size()), -1.0 / 6.0);
    return Bandwidth2D{sx * factor, sy * factor};
}

RasterGrid kde_grid(const PointDataset& d, const Bandwidth2D& h, const GridSpec& grid) {
    if (d.empty()) throw EmptyInputError("kde_grid: empty dataset");
    if (!(h.hx > 0.0) || !(h.hy > 0.0) || !std::isfinite(h.hx) || !std::isfinite(h.hy))
        throw ParameterError("kde_grid: bandwidths must be positive and finite");
    grid.validate();

    const double norm =
        1.0 / (static_cast<double>(d.size()) * 2.0 * std::numbers::pi * h.hx * h.hy);
    const double inv_x = 1.0 / (2.0 * h.hx * h.hx);
    const double inv_y = 1.0 / (2.0 * h.hy * h.hy);

    RasterGrid out(grid);
    for (int iy = 0; iy < grid.height; ++iy) {
        const double cy = grid.cell_center_y(iy);
        for (int ix = 0; ix < grid.width; ++ix) {
            const double cx = grid.cell_center_x(ix);
            double sum = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const double dx = cx - d.x(i);
                const double dy = cy - d.y(i);
                sum += std::exp(-(dx * dx * inv_x + dy * dy * inv_y));
            }
            out.set(ix, iy, sum * norm);
        }
    }
    return out;
}

VectorField gradient_field(const RasterGrid& r) {
    const GridSpec& spec = r.spec();
    if (spec.width < 3 || spec.height < 3)
        throw ParameterError("gradient_field: grid must be at least 3x3");
    if (r.valid_count() != spec.cell_count())
        throw ParameterError("gradient_field: grid has no-data cells");

    VectorField f;
    f.spec = spec;
    f.gx.resize(spec.cell_count());
    f.gy.resize(spec.cell_count());
    const double inv_cell = 1.0 / spec.cell_size;
    for (int iy = 0; iy < spec.height; ++iy) {
        for (int ix = 0; ix < spec.width; ++ix) {
            double dx, dy;
            if (ix == 0)
                dx = r.value(1, iy) - r.value(0, iy);
            else if (ix == spec.width - 1)
                dx = r.value(ix, iy) - r.value(ix - 1, iy);
            else
                dx = (r.value(ix + 1, iy) - r.value(ix - 1, iy)) * 0.5;
            if (iy == 0)
                dy = r.value(ix, 1) - r.value(ix, 0);
            else if (iy == spec.height - 1)
                dy = r.value(ix, iy) - r.value(ix, iy - 1);
            else
                dy = (r.value(ix, iy + 1) - r.value(ix, iy - 1)) * 0.5;
            f.gx[spec.index(ix, iy)] = dx * inv_cell;
            f.gy[spec.index(ix, iy)] = dy * inv_cell;
        }
    }
    return f;
}

DivergenceStats gradient_divergence(const VectorField& a, const VectorField& b,
                                    const Rect& window) {
    if (!a.spec.same_layout(b.spec))
        throw ParameterError("gradient_divergence: vector fields have different layouts");
    window.validate();

    constexpr double kMinMagnitude = 1e-15;
    DivergenceStats stats;
    double sum = 0.0;
    for (int iy = 0; iy < a.spec.height; ++iy) {
        const double cy = a.spec.cell_center_y(iy);
        for (int ix = 0; ix < a.spec.width; ++ix) {
            const double cx = a.spec.cell_center_x(ix);
            if (!window.contains(cx, cy)) continue;
            const std::size_t i = a.spec.index(ix, iy);
            const double ax = a.gx[i], ay = a.gy[i];
            const double bx = b.gx[i], by = b.gy[i];
            if (std::hypot(ax, ay) < kMinMagnitude || std::hypot(bx, by) < kMinMagnitude) {
                ++stats.cells_skipped;
                continue;
            }
            const double cross = ax * by - ay * bx;
            const double dot = ax * bx + ay * by;
            const double angle = std::atan2(std::abs(cross), dot);
            sum += angle;
            stats.max_angle = std::max(stats.max_angle, angle);
            ++stats.cells_used;
        }
    }
    if (stats.cells_used == 0)
        throw EmptyWindowError(
            stats.cells_skipped > 0
                ? "gradient_divergence: every cell in the window has near-zero gradient"
                : "gradient_divergence: window contains no grid cells");
    stats.mean_angle = sum / static_cast<double>(stats.cells_used);
    return stats;
}

KdeFinding bandwidth_sweep(const PointDataset& d, double h_lo, double h_hi, int steps,
                           const GridSpec& grid) {
    if (!(h_lo > 0.0) || !std::isfinite(h_lo) || !std::isfinite(h_hi))
        throw ParameterError("bandwidth_sweep: bandwidths must be positive and finite");
    if (!(h_lo < h_hi)) throw ParameterError("bandwidth_sweep: requires h_lo < h_hi");
    if (steps < 2) throw ParameterError("bandwidth_sweep: requires steps >= 2");
    if (d.empty()) throw EmptyInputError("bandwidth_sweep: empty dataset");

    KdeFinding finding;
    finding.grid = grid;
    const double log_ratio = std::log(h_hi / h_lo);
    for (int k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
        // Endpoints are pinned so steps=2 yields exactly {h_lo, h_hi}.
        const double h = k == 0 ? h_lo : (k == steps - 1 ? h_hi : h_lo * std::exp(t * log_ratio));
        finding.sweep_bandwidths.push_back(h);

        const RasterGrid density = kde_grid(d, Bandwidth2D{h, h}, grid);
        ModeTrack track;
        track.bandwidth = h;
        track.mode_density = -1.0;
        density.for_each_valid([&](int ix, int iy, double v) {
            if (v > track.mode_density) {
                track.mode_density = v;
                track.mode_ix = ix;
                track.mode_iy = iy;
            }
        });
        finding.mode_tracks.push_back(track);
    }
    return finding;
}

double median_nn_distance(const PointDataset& d) {
    const std::size_t n = d.size();
    if (n < 2) return 0.0;
    std::vector<double> nn(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            best = std::min(best, std::hypot(d.x(i) - d.x(j), d.y(i) - d.y(j)));
        }
        nn[i] = best;
    }
    return num::quantile_linear(std::move(nn), 0.5);
}

KdeFinding false_center_audit(KdeFinding sweep, const PointDataset& d, double radius_factor) {
    if (!(radius_factor > 0.0) || !std::isfinite(radius_factor))
        throw ParameterError("false_center_audit: radius_factor must be positive and finite");
    sweep.radius_factor = radius_factor;
    sweep.median_nn_dist = median_nn_distance(d);
    sweep.false_center_bandwidths.clear();
    if (d.size() < 2) return sweep;  // no distance scale to judge against

    for (ModeTrack& track : sweep.mode_tracks) {
        const double cx = sweep.grid.cell_center_x(track.mode_ix);
        const double cy = sweep.grid.cell_center_y(track.mode_iy);
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < d.size(); ++i)
            nearest = std::min(nearest, std::hypot(cx - d.x(i), cy - d.y(i)));
        track.false_center = nearest > radius_factor * sweep.median_nn_dist;
        if (track.false_center) sweep.false_center_bandwidths.push_back(track.bandwidth);
    }
    return sweep;
}

}  // namespace geobias::kde
