#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geobias/core.hpp"

namespace geobias::synth {

// Three-region generator for the heterogeneity / pooled-reversal demo.
// Per region g: points uniform in region_boxes[g]; var1 is uniform around
// the region's mean_v1 (+- v1_spread); var2 = within_slope * var1 + offset
// + N(0, noise_sd), with the offset chosen so E[var2] = mean_v2.
struct SimpsonParams {
    int n_per_region = 100;
    double within_slope = 1.0;
    std::array<std::pair<double, double>, 3> region_offsets = {{{0.0, 4.0}, {2.0, 2.0}, {4.0, 0.0}}};
    double noise_sd = 0.3;
    std::array<Rect, 3> region_boxes = {{{0, 0, 10, 10}, {12, 6, 22, 16}, {24, 12, 34, 22}}};
    double v1_spread = 1.0;
};

// Attrs: var1, var2. Groups: A, B, C.
PointDataset gen_simpson_regions(const SimpsonParams& params, std::uint64_t seed);

enum class GwrSurfaceKind { step_x, step_diag, circular_patch, smooth_ramp };

GwrSurfaceKind parse_gwr_surface_kind(const std::string& name);
const char* to_string(GwrSurfaceKind kind);

struct GwrSurfaceParams {
    GwrSurfaceKind kind = GwrSurfaceKind::step_x;
    GridSpec grid{0, 0, 1.0, 32, 32};
    double x1_lo = 1.0;
    double x1_hi = 2.0;
    double noise_sd = 0.1;
    double p_low = 1.0;
    double p_high = 3.0;
};

// One sample per cell center with attrs {x1, y, p_true}; y = x1 * p_true +
// N(0, noise_sd). The spatial layout of p_true follows `kind`:
//   step_x         - p_low left of the vertical midline, p_high right
//   step_diag      - split along the anti-diagonal
//   circular_patch - p_high inside a central disc of radius min(w,h)/4
//   smooth_ramp    - linear in x from p_low to p_high
PointDataset gen_gwr_surface(const GwrSurfaceParams& params, std::uint64_t seed);

// Gaussian blobs; group label = cluster index ("0", "1", ...).
PointDataset gen_clusters(const std::vector<std::pair<double, double>>& centers,
                          const std::vector<double>& sigmas, const std::vector<int>& counts,
                          std::uint64_t seed);

// side x side grid (cell size 1, origin (0,0)): uniform white noise smoothed
// by `smoothness` passes of a 3x3 mean filter with reflective borders, then
// min-max normalized to [0, 1].
RasterGrid gen_random_surface(int side, int smoothness, std::uint64_t seed);

}  // namespace geobias::synth
