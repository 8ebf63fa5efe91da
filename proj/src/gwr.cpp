#include "geobias/gwr.hpp"

#include <algorithm>
#include <cmath>

#include "geobias/numeric.hpp"

namespace geobias::gwr {

namespace {

constexpr double kDegenerateVariance = 1e-12;

struct WlsResult {
    double slope = 0.0;
    double intercept = 0.0;
    double weight_sum = 0.0;
    bool valid = false;
};

// Weighted least squares of y on x around (ex, ey). Weights below
// kWeightFloor are dropped so far-away samples cost nothing.
WlsResult local_wls(std::span<const double> xs, std::span<const double> ys,
                    std::span<const double> px, std::span<const double> py, double ex, double ey,
                    double bandwidth, std::size_t skip_index) {
    constexpr double kWeightFloor = 1e-300;
    const double inv_two_bw2 = 1.0 / (2.0 * bandwidth * bandwidth);

    double sw = 0.0, swx = 0.0, swy = 0.0;
    const std::size_t n = xs.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == skip_index) continue;
        const double dx = px[i] - ex;
        const double dy = py[i] - ey;
        const double wi = std::exp(-(dx * dx + dy * dy) * inv_two_bw2);
        if (wi < kWeightFloor) continue;
        w[i] = wi;
        sw += wi;
        swx += wi * xs[i];
        swy += wi * ys[i];
    }

    WlsResult r;
    r.weight_sum = sw;
    if (sw <= 0.0) return r;
    const double mx = swx / sw;
    const double my = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] == 0.0) continue;
        const double dx = xs[i] - mx;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (ys[i] - my);
    }
    if (sxx / sw < kDegenerateVariance) {
        // Intercept-only fallback: callers decide whether that is usable.
        r.intercept = my;
        return r;
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.valid = true;
    return r;
}

void check_inputs(const PointDataset& d, double bandwidth) {
    if (d.size() < 5) throw SampleSizeError("gwr_fit requires >= 5 samples");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw ParameterError("bandwidth must be positive and finite");
}

}  // namespace

CoefficientSurface gwr_fit(const PointDataset& d, const std::string& x_attr,
                           const std::string& y_attr, double bandwidth,
                           const GridSpec& eval_grid) {
    check_inputs(d, bandwidth);
    eval_grid.validate();
    const auto& xs = d.attr(x_attr);
    const auto& ys = d.attr(y_attr);

    CoefficientSurface surface{RasterGrid(eval_grid), RasterGrid(eval_grid), RasterGrid(eval_grid),
                               bandwidth};
    for (int iy = 0; iy < eval_grid.height; ++iy) {
        for (int ix = 0; ix < eval_grid.width; ++ix) {
            const double cx = eval_grid.cell_center_x(ix);
            const double cy = eval_grid.cell_center_y(iy);
            const WlsResult fit =
                local_wls(xs, ys, d.xs(), d.ys(), cx, cy, bandwidth, d.size());
            if (fit.valid) {
                surface.slope.set(ix, iy, fit.slope);
                surface.intercept.set(ix, iy, fit.intercept);
            } else {
                surface.slope.set_nodata(ix, iy);
                surface.intercept.set_nodata(ix, iy);
            }
        }
    }

    // Residuals at the samples, averaged per containing cell.
    std::vector<double> res_sum(eval_grid.cell_count(), 0.0);
    std::vector<std::size_t> res_count(eval_grid.cell_count(), 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        int ix, iy;
        if (!eval_grid.locate(d.x(i), d.y(i), ix, iy)) continue;
        if (!surface.slope.has_value(ix, iy)) continue;
        const double yhat =
            surface.intercept.value(ix, iy) + surface.slope.value(ix, iy) * xs[i];
        res_sum[eval_grid.index(ix, iy)] += ys[i] - yhat;
        res_count[eval_grid.index(ix, iy)] += 1;
    }
    for (int iy = 0; iy < eval_grid.height; ++iy)
        for (int ix = 0; ix < eval_grid.width; ++ix) {
            const std::size_t c = eval_grid.index(ix, iy);
            if (res_count[c] > 0)
                surface.residual.set(ix, iy, res_sum[c] / static_cast<double>(res_count[c]));
            else
                surface.residual.set_nodata(ix, iy);
        }
    return surface;
}

std::vector<LocalFit> gwr_fit_at_samples(const PointDataset& d, const std::string& x_attr,
                                         const std::string& y_attr, double bandwidth) {
    check_inputs(d, bandwidth);
    const auto& xs = d.attr(x_attr);
    const auto& ys = d.attr(y_attr);

    std::vector<LocalFit> fits(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const WlsResult fit =
            local_wls(xs, ys, d.xs(), d.ys(), d.x(i), d.y(i), bandwidth, d.size());
        fits[i].valid = fit.valid;
        if (fit.valid) {
            fits[i].slope = fit.slope;
            fits[i].intercept = fit.intercept;
            fits[i].residual = ys[i] - (fit.intercept + fit.slope * xs[i]);
        }
    }
    return fits;
}

double loo_cv_score(const PointDataset& d, const std::string& x_attr, const std::string& y_attr,
                    double bandwidth) {
    if (d.size() < 10) throw SampleSizeError("bandwidth CV requires >= 10 samples");
    if (!(bandwidth > 0.0)) throw ParameterError("bandwidth must be positive");
    const auto& xs = d.attr(x_attr);
    const auto& ys = d.attr(y_attr);

    double score = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const WlsResult fit = local_wls(xs, ys, d.xs(), d.ys(), d.x(i), d.y(i), bandwidth, i);
        if (fit.weight_sum <= 0.0) continue;  // nothing in reach
        const double yhat = fit.valid ? fit.intercept + fit.slope * xs[i] : fit.intercept;
        const double e = ys[i] - yhat;
        score += e * e;
    }
    return score;
}

double select_bandwidth_cv(const PointDataset& d, const std::string& x_attr,
                           const std::string& y_attr, double lo, double hi, double tolerance) {
    if (!(lo > 0.0) || !(hi > lo)) throw ParameterError("bandwidth search needs 0 < lo < hi");
    if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");
    if (d.size() < 10) throw SampleSizeError("bandwidth CV requires >= 10 samples");

    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double e = a + kInvPhi * (b - a);
    double fc = loo_cv_score(d, x_attr, y_attr, c);
    double fe = loo_cv_score(d, x_attr, y_attr, e);
    while (b - a > tolerance) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - kInvPhi * (b - a);
            fc = loo_cv_score(d, x_attr, y_attr, c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + kInvPhi * (b - a);
            fe = loo_cv_score(d, x_attr, y_attr, e);
        }
    }
    return (a + b) / 2.0;
}

RasterGrid discontinuity_score(const CoefficientSurface& s) {
    const GridSpec& g = s.spec();
    RasterGrid score(g);
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            if (!s.slope.has_value(ix, iy)) {
                score.set_nodata(ix, iy);
                continue;
            }
            const double v = s.slope.value(ix, iy);
            double best = -1.0;
            for (int k = 0; k < 4; ++k) {
                const int nx = ix + dx[k];
                const int ny = iy + dy[k];
                if (nx < 0 || ny < 0 || nx >= g.width || ny >= g.height) continue;
                if (!s.slope.has_value(nx, ny)) continue;
                best = std::max(best, std::fabs(v - s.slope.value(nx, ny)));
            }
            if (best < 0.0)
                score.set_nodata(ix, iy);
            else
                score.set(ix, iy, best);
        }
    }
    return score;
}

GwrFinding continuity_audit(const CoefficientSurface& s, double threshold_quantile) {
    if (!(threshold_quantile > 0.0 && threshold_quantile < 1.0))
        throw ParameterError("threshold_quantile must be in (0, 1)");
    RasterGrid score = discontinuity_score(s);

    const GridSpec& g = s.spec();
    std::vector<double> scores, abs_residuals;
    for (int iy = 0; iy < g.height; ++iy)
        for (int ix = 0; ix < g.width; ++ix) {
            if (!score.has_value(ix, iy) || !s.residual.has_value(ix, iy)) continue;
            scores.push_back(score.value(ix, iy));
            abs_residuals.push_back(std::fabs(s.residual.value(ix, iy)));
        }
    if (scores.size() < 10)
        throw SampleSizeError("continuity_audit requires >= 10 valid cells, got " +
                              std::to_string(scores.size()));

    GwrFinding finding{std::move(score), 0.0, {}, 0.0, threshold_quantile, s.bandwidth,
                       scores.size(), Severity::info};
    // Constant inputs (e.g. an exactly recovered constant coefficient) have
    // no rank structure; report zero correlation instead of failing.
    const bool const_scores =
        std::all_of(scores.begin(), scores.end(), [&](double v) { return v == scores.front(); });
    const bool const_resid = std::all_of(abs_residuals.begin(), abs_residuals.end(),
                                         [&](double v) { return v == abs_residuals.front(); });
    finding.rank_correlation =
        (const_scores || const_resid) ? 0.0 : num::spearman(scores, abs_residuals);

    finding.threshold = num::quantile_linear(scores, threshold_quantile);
    finding.discontinuity.for_each_valid([&](int ix, int iy, double v) {
        if (v > finding.threshold) finding.flagged_cells.push_back(g.index(ix, iy));
    });

    if (finding.rank_correlation >= 0.6)
        finding.severity = Severity::critical;
    else if (finding.rank_correlation >= 0.2)
        finding.severity = Severity::warning;
    return finding;
}

}  // namespace geobias::gwr
