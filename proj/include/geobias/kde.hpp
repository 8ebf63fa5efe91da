#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "geobias/core.hpp"

namespace geobias::kde {

struct Bandwidth2D {
    double hx = 0.0;
    double hy = 0.0;
};

// Silverman's rule for the 2D Gaussian product kernel: h = sd * n^(-1/6)
// per axis (the d=2 prefactor (4/(d+2))^(1/(d+4)) is exactly 1).
Bandwidth2D silverman_bandwidth(const PointDataset& d);

// Gaussian product-kernel density at every cell center:
//   f(c) = 1/(n 2 pi hx hy) * sum_i exp(-(dx^2/(2hx^2) + dy^2/(2hy^2)))
RasterGrid kde_grid(const PointDataset& d, const Bandwidth2D& h, const GridSpec& grid);

struct VectorField {
    GridSpec spec;
    std::vector<double> gx;
    std::vector<double> gy;

    std::size_t index(int ix, int iy) const { return spec.index(ix, iy); }
};

// Finite-difference gradient: central in the interior, one-sided at the
// borders, components divided by cell_size. Requires a >= 3x3 grid with
// every cell valid.
VectorField gradient_field(const RasterGrid& r);

struct DivergenceStats {
    double mean_angle = 0.0;  // radians, [0, pi]
    double max_angle = 0.0;
    std::size_t cells_used = 0;
    std::size_t cells_skipped = 0;  // near-zero magnitude on either side
};

// Angle between paired vectors over cells whose centers lie in `window`.
DivergenceStats gradient_divergence(const VectorField& a, const VectorField& b,
                                    const Rect& window);

struct ModeTrack {
    double bandwidth = 0.0;
    int mode_ix = 0;
    int mode_iy = 0;
    double mode_density = 0.0;
    bool false_center = false;
};

struct KdeFinding {
    GridSpec grid;
    std::vector<double> sweep_bandwidths;
    std::vector<ModeTrack> mode_tracks;
    std::vector<double> false_center_bandwidths;
    std::optional<DivergenceStats> divergence;
    double radius_factor = 0.0;
    double median_nn_dist = 0.0;
};

// Isotropic KDE at `steps` geometrically spaced bandwidths in [h_lo, h_hi];
// records the global argmax cell (first in row-major order on ties) and its
// density per bandwidth.
KdeFinding bandwidth_sweep(const PointDataset& d, double h_lo, double h_hi, int steps,
                           const GridSpec& grid);

// Median distance to the nearest other data point; 0 for n < 2.
double median_nn_distance(const PointDataset& d);

// Flags sweep bandwidths whose mode cell sits farther from any data point
// than radius_factor times the dataset's median nearest-neighbor distance.
KdeFinding false_center_audit(KdeFinding sweep, const PointDataset& d,
                              double radius_factor = 2.0);

}  // namespace geobias::kde
