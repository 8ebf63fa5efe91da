#include "geobias/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "geobias/rng.hpp"

namespace geobias::synth {

PointDataset gen_simpson_regions(const SimpsonParams& params, std::uint64_t seed) {
    if (params.n_per_region < 3)
        throw ParameterError("gen_simpson_regions: n_per_region must be >= 3");
    if (params.noise_sd < 0.0) throw ParameterError("gen_simpson_regions: noise_sd must be >= 0");
    if (params.v1_spread < 0.0) throw ParameterError("gen_simpson_regions: v1_spread must be >= 0");
    for (const auto& box : params.region_boxes) box.validate();

    static const std::array<const char*, 3> kLabels = {"A", "B", "C"};
    Pcg32 rng(seed);
    PointDataset d({"var1", "var2"}, true);
    for (std::size_t g = 0; g < 3; ++g) {
        const auto [mean_v1, mean_v2] = params.region_offsets[g];
        const Rect& box = params.region_boxes[g];
        const double offset = mean_v2 - params.within_slope * mean_v1;
        for (int i = 0; i < params.n_per_region; ++i) {
            const double x = rng.uniform(box.min_x, box.max_x);
            const double y = rng.uniform(box.min_y, box.max_y);
            const double var1 = mean_v1 + rng.uniform(-params.v1_spread, params.v1_spread);
            const double var2 =
                params.within_slope * var1 + offset + rng.gaussian(0.0, params.noise_sd);
            d.add(x, y, std::array{var1, var2}, kLabels[g]);
        }
    }
    return d;
}

GwrSurfaceKind parse_gwr_surface_kind(const std::string& name) {
    if (name == "step_x") return GwrSurfaceKind::step_x;
    if (name == "step_diag") return GwrSurfaceKind::step_diag;
    if (name == "circular_patch") return GwrSurfaceKind::circular_patch;
    if (name == "smooth_ramp") return GwrSurfaceKind::smooth_ramp;
    throw ParameterError("unknown surface kind '" + name +
                         "' (expected step_x, step_diag, circular_patch, or smooth_ramp)");
}

const char* to_string(GwrSurfaceKind kind) {
    switch (kind) {
        case GwrSurfaceKind::step_x: return "step_x";
        case GwrSurfaceKind::step_diag: return "step_diag";
        case GwrSurfaceKind::circular_patch: return "circular_patch";
        case GwrSurfaceKind::smooth_ramp: return "smooth_ramp";
    }
    return "step_x";
}

namespace {

double p_true_at(const GwrSurfaceParams& params, double cx, double cy) {
    const GridSpec& g = params.grid;
    const double span_x = g.width * g.cell_size;
    const double span_y = g.height * g.cell_size;
    const double u = (cx - g.origin_x) / span_x;
    const double v = (cy - g.origin_y) / span_y;
    switch (params.kind) {
        case GwrSurfaceKind::step_x:
            return u < 0.5 ? params.p_low : params.p_high;
        case GwrSurfaceKind::step_diag:
            return (u + v) < 1.0 ? params.p_low : params.p_high;
        case GwrSurfaceKind::circular_patch: {
            const double ccx = g.origin_x + span_x / 2.0;
            const double ccy = g.origin_y + span_y / 2.0;
            const double radius = 0.25 * std::min(span_x, span_y);
            const double dx = cx - ccx;
            const double dy = cy - ccy;
            return (dx * dx + dy * dy) < radius * radius ? params.p_high : params.p_low;
        }
        case GwrSurfaceKind::smooth_ramp:
            return params.p_low + (params.p_high - params.p_low) * u;
    }
    return params.p_low;
}

}  // namespace

PointDataset gen_gwr_surface(const GwrSurfaceParams& params, std::uint64_t seed) {
    params.grid.validate();
    if (params.noise_sd < 0.0) throw ParameterError("gen_gwr_surface: noise_sd must be >= 0");
    if (params.x1_hi < params.x1_lo) throw ParameterError("gen_gwr_surface: x1 range inverted");
    const bool needs_contrast = params.kind != GwrSurfaceKind::smooth_ramp;
    if (needs_contrast && params.p_low == params.p_high)
        throw ParameterError("gen_gwr_surface: p_low must differ from p_high for step/patch kinds");

    Pcg32 rng(seed);
    PointDataset d({"x1", "y", "p_true"}, false);
    for (int iy = 0; iy < params.grid.height; ++iy) {
        for (int ix = 0; ix < params.grid.width; ++ix) {
            const double cx = params.grid.cell_center_x(ix);
            const double cy = params.grid.cell_center_y(iy);
            const double p = p_true_at(params, cx, cy);
            const double x1 = rng.uniform(params.x1_lo, params.x1_hi);
            const double y = x1 * p + rng.gaussian(0.0, params.noise_sd);
            d.add(cx, cy, std::array{x1, y, p});
        }
    }
    return d;
}

PointDataset gen_clusters(const std::vector<std::pair<double, double>>& centers,
                          const std::vector<double>& sigmas, const std::vector<int>& counts,
                          std::uint64_t seed) {
    if (centers.size() != sigmas.size() || centers.size() != counts.size())
        throw ParameterError("gen_clusters: centers, sigmas, and counts must have equal length");
    if (centers.empty()) throw ParameterError("gen_clusters: at least one cluster required");
    for (double s : sigmas)
        if (!(s > 0.0)) throw ParameterError("gen_clusters: sigmas must be positive");
    for (int c : counts)
        if (c < 0) throw ParameterError("gen_clusters: counts must be non-negative");

    Pcg32 rng(seed);
    PointDataset d({}, true);
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const std::string label = std::to_string(k);
        for (int i = 0; i < counts[k]; ++i) {
            const double x = rng.gaussian(centers[k].first, sigmas[k]);
            const double y = rng.gaussian(centers[k].second, sigmas[k]);
            d.add(x, y, {}, label);
        }
    }
    return d;
}

RasterGrid gen_random_surface(int side, int smoothness, std::uint64_t seed) {
    if (side < 1) throw ParameterError("gen_random_surface: side must be >= 1");
    if (smoothness < 0) throw ParameterError("gen_random_surface: smoothness must be >= 0");

    Pcg32 rng(seed);
    std::vector<double> values(static_cast<std::size_t>(side) * side);
    for (auto& v : values) v = rng.next_double();

    // Reflective index for the 3x3 mean filter.
    const auto reflect = [side](int i) {
        if (i < 0) return -i - 1;
        if (i >= side) return 2 * side - i - 1;
        return i;
    };
    std::vector<double> next(values.size());
    for (int pass = 0; pass < smoothness; ++pass) {
        for (int iy = 0; iy < side; ++iy) {
            for (int ix = 0; ix < side; ++ix) {
                double s = 0.0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        s += values[static_cast<std::size_t>(reflect(iy + dy)) * side +
                                    reflect(ix + dx)];
                next[static_cast<std::size_t>(iy) * side + ix] = s / 9.0;
            }
        }
        values.swap(next);
    }

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    RasterGrid out(GridSpec{0.0, 0.0, 1.0, side, side});
    for (int iy = 0; iy < side; ++iy)
        for (int ix = 0; ix < side; ++ix) {
            const double v = values[static_cast<std::size_t>(iy) * side + ix];
            out.set(ix, iy, span > 0.0 ? (v - lo) / span : 0.5);
        }
    return out;
}

}  // namespace geobias::synth
