#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geobias/core.hpp"

namespace geobias::gwr {

// Local regression estimates on a grid. slope/intercept share validity
// (degenerate local designs are no-data); residual is the mean of y - yhat
// over the samples falling in each cell, no-data where a cell holds none.
struct CoefficientSurface {
    RasterGrid slope;
    RasterGrid intercept;
    RasterGrid residual;
    double bandwidth = 0.0;

    const GridSpec& spec() const { return slope.spec(); }
};

// Weighted least squares of y on x at every cell center of eval_grid, with
// Gaussian kernel weights w_i = exp(-d_i^2 / (2 bw^2)). Cells whose local
// weighted x-variance falls below 1e-12 are marked no-data rather than
// failing the fit.
CoefficientSurface gwr_fit(const PointDataset& d, const std::string& x_attr,
                           const std::string& y_attr, double bandwidth,
                           const GridSpec& eval_grid);

struct LocalFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    bool valid = false;
};

// Local fits evaluated at the sample locations themselves.
std::vector<LocalFit> gwr_fit_at_samples(const PointDataset& d, const std::string& x_attr,
                                         const std::string& y_attr, double bandwidth);

// Leave-one-out squared prediction error at the given bandwidth. Degenerate
// local designs fall back to the weighted mean of y; samples with no other
// point in reach are skipped.
double loo_cv_score(const PointDataset& d, const std::string& x_attr, const std::string& y_attr,
                    double bandwidth);

// Golden-section minimization of loo_cv_score over [lo, hi].
double select_bandwidth_cv(const PointDataset& d, const std::string& x_attr,
                           const std::string& y_attr, double lo, double hi, double tolerance);

// Per cell: max |slope - neighbor slope| over the 4-neighborhood, skipping
// no-data neighbors; cells with no valid neighbor are no-data.
RasterGrid discontinuity_score(const CoefficientSurface& s);

struct GwrFinding {
    RasterGrid discontinuity;
    double rank_correlation = 0.0;     // Spearman(score, |residual|)
    std::vector<std::size_t> flagged_cells;  // row-major indices above threshold
    double threshold = 0.0;
    double threshold_quantile = 0.0;
    double bandwidth = 0.0;
    std::size_t cells_used = 0;
    Severity severity = Severity::info;
};

// Correlates the discontinuity score against |residual| across cells where
// both exist; flags cells above the threshold_quantile of the score
// distribution. Severity grows with the rank correlation.
GwrFinding continuity_audit(const CoefficientSurface& s, double threshold_quantile = 0.95);

}  // namespace geobias::gwr
