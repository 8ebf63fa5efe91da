#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "geobias/gwr.hpp"
#include "geobias/rng.hpp"
#include "geobias/simpson.hpp"
#include "geobias/synthgen.hpp"

using namespace geobias;

namespace {

// Independent weighted-least-squares oracle at one location: direct 2x2
// normal equations, no shared code with gwr_fit.
void wls_at(const PointDataset& d, double cx, double cy, double bw, double& slope,
            double& intercept) {
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double dx = d.x(i) - cx;
        const double dy = d.y(i) - cy;
        const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * bw * bw));
        const double x = d.attr_at("x1", i);
        const double y = d.attr_at("y", i);
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
    }
    const double det = sw * swxx - swx * swx;
    slope = (sw * swxy - swx * swy) / det;
    intercept = (swxx * swy - swx * swxy) / det;
}

PointDataset scattered_linear(int n, double noise_sd, std::uint64_t seed) {
    Pcg32 rng(seed);
    PointDataset d({"x1", "y"}, false);
    for (int i = 0; i < n; ++i) {
        const double px = rng.uniform(0.0, 10.0);
        const double py = rng.uniform(0.0, 10.0);
        const double x1 = rng.uniform(-1.0, 3.0);
        const double y = 2.0 * x1 + 1.0 + rng.gaussian(0.0, noise_sd);
        d.add(px, py, std::array{x1, y});
    }
    return d;
}

}  // namespace

TEST_CASE("noise-free constant coefficients are recovered exactly") {
    const PointDataset d = scattered_linear(200, 0.0, 5);
    const GridSpec grid = grid_over(bounding_box(d), 8, 8);
    const gwr::CoefficientSurface s = gwr::gwr_fit(d, "x1", "y", 1.5, grid);
    s.slope.for_each_valid([](int, int, double v) { CHECK(v == doctest::Approx(2.0).epsilon(1e-9)); });
    s.intercept.for_each_valid(
        [](int, int, double v) { CHECK(v == doctest::Approx(1.0).epsilon(1e-9)); });
    CHECK(s.slope.valid_count() == 64);
    CHECK(s.bandwidth == doctest::Approx(1.5));
}

TEST_CASE("local fits match an independent weighted oracle") {
    const PointDataset d = scattered_linear(80, 0.5, 9);
    const GridSpec grid = grid_over(bounding_box(d), 5, 5);
    const double bw = 2.0;
    const gwr::CoefficientSurface s = gwr::gwr_fit(d, "x1", "y", bw, grid);
    for (int iy = 0; iy < 5; ++iy)
        for (int ix = 0; ix < 5; ++ix) {
            REQUIRE(s.slope.has_value(ix, iy));
            double slope = 0.0, intercept = 0.0;
            wls_at(d, grid.cell_center_x(ix), grid.cell_center_y(iy), bw, slope, intercept);
            CHECK(s.slope.value(ix, iy) == doctest::Approx(slope).epsilon(1e-9));
            CHECK(s.intercept.value(ix, iy) == doctest::Approx(intercept).epsilon(1e-9));
        }
}

TEST_CASE("huge bandwidth reproduces the global fit everywhere") {
    const PointDataset d = scattered_linear(150, 0.8, 21);
    const simpson::RegressionFit global = simpson::fit_ols(d.attr("x1"), d.attr("y"));
    const Rect bbox = bounding_box(d);
    const double diameter = std::hypot(bbox.width(), bbox.height());
    const GridSpec grid = grid_over(bbox, 6, 6);
    const gwr::CoefficientSurface s = gwr::gwr_fit(d, "x1", "y", 1e6 * diameter, grid);
    s.slope.for_each_valid([&](int, int, double v) {
        CHECK(v == doctest::Approx(global.slope).epsilon(1e-6));
    });
    s.intercept.for_each_valid([&](int, int, double v) {
        CHECK(v == doctest::Approx(global.intercept).epsilon(1e-6));
    });
}

TEST_CASE("parameter and data validation") {
    const PointDataset d = scattered_linear(30, 0.1, 2);
    const GridSpec grid = grid_over(bounding_box(d), 4, 4);
    CHECK_THROWS_AS(gwr::gwr_fit(d, "x1", "y", 0.0, grid), ParameterError);
    CHECK_THROWS_AS(gwr::gwr_fit(d, "x1", "y", -1.0, grid), ParameterError);
    CHECK_THROWS_AS(gwr::gwr_fit(PointDataset({"x1", "y"}, false), "x1", "y", 1.0, grid),
                    SampleSizeError);
    CHECK_THROWS_AS(gwr::gwr_fit(d, "missing", "y", 1.0, grid), SchemaError);
    CHECK_THROWS_AS(gwr::select_bandwidth_cv(d, "x1", "y", 2.0, 1.0, 0.01), ParameterError);
    CHECK_THROWS_AS(gwr::select_bandwidth_cv(d, "x1", "y", 1.0, 2.0, 0.0), ParameterError);
}

TEST_CASE("degenerate local designs become no-data, not failures") {
    // all x1 identical near one corner: local variance is 0 everywhere the
    // kernel only reaches these points
    PointDataset d({"x1", "y"}, false);
    for (int i = 0; i < 10; ++i) d.add(0.1 * i, 0.1 * i, std::array{1.0, 2.0});
    for (int i = 0; i < 10; ++i) d.add(9.0 + 0.1 * i, 9.0, std::array{i * 0.1, i * 0.25});
    const GridSpec grid{0.0, 0.0, 5.0, 2, 2};  // covers [0,10]^2
    const gwr::CoefficientSurface s = gwr::gwr_fit(d, "x1", "y", 0.5, grid);
    CHECK_FALSE(s.slope.has_value(0, 0));  // constant-x corner
    CHECK(s.slope.has_value(1, 1));        // informative corner
}

TEST_CASE("cross-validation selects a sensible bandwidth deterministically") {
    synth::GwrSurfaceParams params;  // step_x
    const PointDataset d = synth::gen_gwr_surface(params, 42);
    const double lo = 0.05, hi = 2.0;
    const double bw1 = gwr::select_bandwidth_cv(d, "x1", "y", lo, hi, (hi - lo) * 1e-3);
    const double bw2 = gwr::select_bandwidth_cv(d, "x1", "y", lo, hi, (hi - lo) * 1e-3);
    CHECK(bw1 == bw2);
    CHECK(bw1 >= lo);
    CHECK(bw1 <= hi);

    // the CV score at the chosen bandwidth beats both endpoints
    const double score = gwr::loo_cv_score(d, "x1", "y", bw1);
    CHECK(score <= gwr::loo_cv_score(d, "x1", "y", lo));
    CHECK(score <= gwr::loo_cv_score(d, "x1", "y", hi));
}

TEST_CASE("discontinuity score singles out the step edge") {
    synth::GwrSurfaceParams params;  // step_x, p jumps 1 -> 3 at u = 0.5
    params.noise_sd = 0.0;
    const PointDataset d = synth::gen_gwr_surface(params, 7);
    const GridSpec grid = grid_over(bounding_box(d), 32, 32);
    const gwr::CoefficientSurface s = gwr::gwr_fit(d, "x1", "y", 0.1, grid);
    const RasterGrid score = gwr::discontinuity_score(s);

    // columns far from the edge are exactly flat (no noise); the edge
    // columns carry the full coefficient jump p_high - p_low = 2
    double edge_max = 0.0, far_max = 0.0;
    score.for_each_valid([&](int ix, int, double v) {
        if (ix == 15 || ix == 16)
            edge_max = std::max(edge_max, v);
        else if (ix < 10 || ix > 21)
            far_max = std::max(far_max, v);
    });
    CHECK(edge_max > 1.9);
    CHECK(far_max < 1e-9);

    const gwr::GwrFinding finding = gwr::continuity_audit(s, 0.95);
    CHECK(finding.cells_used > 700);
    CHECK_FALSE(finding.flagged_cells.empty());
    // flagged cells all hug the edge columns
    for (const std::size_t idx : finding.flagged_cells) {
        const int ix = static_cast<int>(idx % 32);
        CHECK(ix >= 14);
        CHECK(ix <= 17);
    }
}

TEST_CASE("rank correlation separates step from smooth surfaces") {
    synth::GwrSurfaceParams params;
    params.kind = synth::GwrSurfaceKind::step_x;
    const PointDataset step = synth::gen_gwr_surface(params, 42);
    params.kind = synth::GwrSurfaceKind::smooth_ramp;
    const PointDataset ramp = synth::gen_gwr_surface(params, 42);

    const auto audit = [](const PointDataset& d) {
        const Rect bbox = bounding_box(d);
        const GridSpec grid = grid_over(bbox, 32, 32);
        const double diameter = std::hypot(bbox.width(), bbox.height());
        const double lo = diameter / 64.0, hi = diameter / 4.0;
        const double bw = gwr::select_bandwidth_cv(d, "x1", "y", lo, hi, (hi - lo) * 1e-3);
        return gwr::continuity_audit(gwr::gwr_fit(d, "x1", "y", bw, grid), 0.95);
    };

    const gwr::GwrFinding on_step = audit(step);
    const gwr::GwrFinding on_ramp = audit(ramp);
    CHECK(on_step.rank_correlation >= 0.3);
    CHECK(on_ramp.rank_correlation <= 0.2);
    CHECK(on_step.severity != Severity::critical);  // 0.31 lands in the warning band
    CHECK(on_ramp.severity == Severity::info);
}
