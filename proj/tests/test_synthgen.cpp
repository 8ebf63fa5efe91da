#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "geobias/numeric.hpp"
#include "geobias/rng.hpp"
#include "geobias/synthgen.hpp"

using namespace geobias;

TEST_CASE("pcg32 streams are deterministic and seed-sensitive") {
    Pcg32 a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 256; ++i) {
        const std::uint32_t va = a.next_u32();
        all_equal = all_equal && (va == b.next_u32());
        any_diff = any_diff || (va != c.next_u32());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("pcg32 uniform and gaussian have sane statistics") {
    Pcg32 rng(7);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0, lo = 1.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);

    double gsum = 0.0, gsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        gsum += g;
        gsum2 += g * g;
    }
    CHECK(gsum / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(gsum2 / n == doctest::Approx(1.0).epsilon(0.02));

    const double shifted = Pcg32(9).gaussian(10.0, 0.0);
    CHECK(shifted == doctest::Approx(10.0));
}

TEST_CASE("simpson generator layout") {
    const synth::SimpsonParams params;
    const PointDataset d = synth::gen_simpson_regions(params, 42);
    REQUIRE(d.size() == 300);
    CHECK(d.distinct_groups() == std::vector<std::string>{"A", "B", "C"});

    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < d.size(); ++i) by_group[d.group(i)].push_back(i);
    REQUIRE(by_group.size() == 3);

    const std::array<const char*, 3> labels = {"A", "B", "C"};
    for (std::size_t g = 0; g < 3; ++g) {
        const auto& idx = by_group[labels[g]];
        CHECK(idx.size() == 100);
        const Rect& box = params.region_boxes[g];
        std::vector<double> v1, v2;
        for (std::size_t i : idx) {
            CHECK(box.contains(d.x(i), d.y(i)));
            v1.push_back(d.attr_at("var1", i));
            v2.push_back(d.attr_at("var2", i));
            // var1 stays within spread of the region mean
            CHECK(std::abs(v1.back() - params.region_offsets[g].first) <=
                  params.v1_spread + 1e-12);
        }
        // within-region association is strongly positive
        CHECK(num::pearson(v1, v2) > 0.7);
    }

    // descending offsets make the pooled trend negative
    CHECK(num::pearson(d.attr("var1"), d.attr("var2")) < -0.5);

    // determinism and seed sensitivity
    const PointDataset again = synth::gen_simpson_regions(params, 42);
    CHECK(again.x(17) == d.x(17));
    CHECK(again.attr_at("var2", 123) == d.attr_at("var2", 123));
    const PointDataset other = synth::gen_simpson_regions(params, 43);
    CHECK(other.attr_at("var2", 123) != d.attr_at("var2", 123));

    synth::SimpsonParams bad;
    bad.n_per_region = 2;
    CHECK_THROWS_AS(synth::gen_simpson_regions(bad, 1), ParameterError);
}

TEST_CASE("gwr surface kinds") {
    synth::GwrSurfaceParams params;  // step_x over the unit square, 32x32
    const PointDataset d = synth::gen_gwr_surface(params, 42);
    REQUIRE(d.size() == 1024);

    // row-major: index iy*32+ix; left half coefficient p_low, right p_high
    for (int iy : {0, 15, 31}) {
        CHECK(d.attr_at("p_true", static_cast<std::size_t>(iy) * 32 + 3) ==
              doctest::Approx(params.p_low));
        CHECK(d.attr_at("p_true", static_cast<std::size_t>(iy) * 32 + 28) ==
              doctest::Approx(params.p_high));
    }
    // response is coefficient times x1 plus modest noise
    for (std::size_t i : {std::size_t{5}, std::size_t{777}}) {
        const double expected = d.attr_at("x1", i) * d.attr_at("p_true", i);
        CHECK(std::abs(d.attr_at("y", i) - expected) < 6.0 * params.noise_sd);
    }

    params.kind = synth::GwrSurfaceKind::smooth_ramp;
    const PointDataset ramp = synth::gen_gwr_surface(params, 42);
    CHECK(ramp.attr_at("p_true", 0) < ramp.attr_at("p_true", 16));
    CHECK(ramp.attr_at("p_true", 16) < ramp.attr_at("p_true", 31));
    CHECK(ramp.attr_at("p_true", 0) >= params.p_low);
    CHECK(ramp.attr_at("p_true", 31) <= params.p_high);

    params.kind = synth::GwrSurfaceKind::circular_patch;
    const PointDataset patch = synth::gen_gwr_surface(params, 42);
    CHECK(patch.attr_at("p_true", 16 * 32 + 16) == doctest::Approx(params.p_high));  // center
    CHECK(patch.attr_at("p_true", 0) == doctest::Approx(params.p_low));              // corner

    CHECK(synth::parse_gwr_surface_kind("step_diag") == synth::GwrSurfaceKind::step_diag);
    CHECK_THROWS_AS(synth::parse_gwr_surface_kind("bogus"), ParameterError);
    CHECK(std::string(synth::to_string(synth::GwrSurfaceKind::circular_patch)) ==
          "circular_patch");
}

TEST_CASE("cluster generator") {
    const PointDataset d =
        synth::gen_clusters({{0.0, 0.0}, {50.0, 0.0}}, {1.0, 2.0}, {200, 100}, 11);
    REQUIRE(d.size() == 300);

    double mx0 = 0.0, mx1 = 0.0;
    int n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.group(i) == "0") {
            mx0 += d.x(i);
            ++n0;
        } else {
            REQUIRE(d.group(i) == "1");
            mx1 += d.x(i);
            ++n1;
        }
    }
    CHECK(n0 == 200);
    CHECK(n1 == 100);
    CHECK(std::abs(mx0 / n0) < 0.5);
    CHECK(std::abs(mx1 / n1 - 50.0) < 1.5);

    CHECK_THROWS_AS(synth::gen_clusters({{0, 0}}, {1.0, 1.0}, {5}, 1), ParameterError);
    CHECK_THROWS_AS(synth::gen_clusters({{0, 0}}, {0.0}, {5}, 1), ParameterError);
    CHECK_THROWS_AS(synth::gen_clusters({}, {}, {}, 1), ParameterError);
}

TEST_CASE("random surface is normalized and smoothing works") {
    const RasterGrid raw = synth::gen_random_surface(40, 0, 3);
    const RasterGrid smooth = synth::gen_random_surface(40, 25, 3);
    REQUIRE(raw.valid_count() == 1600);
    REQUIRE(smooth.valid_count() == 1600);

    const auto raw_range = raw.value_range();
    REQUIRE(raw_range.has_value());
    CHECK(raw_range->first == doctest::Approx(0.0));
    CHECK(raw_range->second == doctest::Approx(1.0));

    // mean absolute neighbor difference shrinks under smoothing
    const auto roughness = [](const RasterGrid& g) {
        double acc = 0.0;
        int n = 0;
        for (int iy = 0; iy < g.height(); ++iy)
            for (int ix = 0; ix + 1 < g.width(); ++ix) {
                acc += std::abs(g.value(ix + 1, iy) - g.value(ix, iy));
                ++n;
            }
        return acc / n;
    };
    CHECK(roughness(smooth) < 0.25 * roughness(raw));

    // determinism
    const RasterGrid again = synth::gen_random_surface(40, 25, 3);
    CHECK(again.value(7, 9) == smooth.value(7, 9));

    CHECK_THROWS_AS(synth::gen_random_surface(0, 1, 1), ParameterError);
    CHECK_THROWS_AS(synth::gen_random_surface(10, -1, 1), ParameterError);
}
