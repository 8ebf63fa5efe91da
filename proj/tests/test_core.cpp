#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <vector>

#include "geobias/core.hpp"
#include "geobias/errors.hpp"

using namespace geobias;

TEST_CASE("rect validation and containment") {
    Rect r{0.0, -1.0, 4.0, 3.0};
    r.validate();
    CHECK(r.width() == doctest::Approx(4.0));
    CHECK(r.height() == doctest::Approx(4.0));
    CHECK(r.contains(0.0, -1.0));
    CHECK(r.contains(4.0, 3.0));
    CHECK_FALSE(r.contains(4.0001, 0.0));

    CHECK_THROWS_AS((Rect{2.0, 0.0, 1.0, 1.0}.validate()), ParameterError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((Rect{0.0, nan, 1.0, 1.0}.validate()), ParameterError);
}

TEST_CASE("grid spec indexing, centers, and locate") {
    GridSpec g{10.0, 20.0, 2.0, 4, 3};
    g.validate();
    CHECK(g.cell_count() == 12);
    CHECK(g.index(0, 0) == 0);
    CHECK(g.index(3, 0) == 3);
    CHECK(g.index(0, 1) == 4);  // y is the slow axis
    CHECK(g.cell_center_x(0) == doctest::Approx(11.0));
    CHECK(g.cell_center_y(2) == doctest::Approx(25.0));
    CHECK(g.max_x() == doctest::Approx(18.0));
    CHECK(g.max_y() == doctest::Approx(26.0));

    int ix = -1, iy = -1;
    REQUIRE(g.locate(10.0, 20.0, ix, iy));
    CHECK(ix == 0);
    CHECK(iy == 0);
    // interior boundary belongs to the right/upper cell
    REQUIRE(g.locate(12.0, 22.0, ix, iy));
    CHECK(ix == 1);
    CHECK(iy == 1);
    // the global max edge folds into the last cell
    REQUIRE(g.locate(18.0, 26.0, ix, iy));
    CHECK(ix == 3);
    CHECK(iy == 2);
    CHECK_FALSE(g.locate(9.999, 20.0, ix, iy));
    CHECK_FALSE(g.locate(10.0, 26.001, ix, iy));

    CHECK_THROWS_AS((GridSpec{0, 0, 0.0, 4, 3}.validate()), ParameterError);
    CHECK_THROWS_AS((GridSpec{0, 0, 1.0, 0, 3}.validate()), ParameterError);
}

TEST_CASE("grid_over keeps cells square and never undershoots") {
    const Rect r{0.0, 0.0, 10.0, 4.0};
    const GridSpec g = grid_over(r, 5, 5);
    CHECK(g.cell_size == doctest::Approx(2.0));  // max(10/5, 4/5)
    CHECK(g.origin_x == doctest::Approx(0.0));
    CHECK(g.max_x() >= r.max_x - 1e-12);
    CHECK(g.max_y() >= r.max_y - 1e-12);  // overhangs y, never undershoots
    CHECK_THROWS_AS(grid_over(r, 0, 5), ParameterError);
}

TEST_CASE("raster grid no-data bookkeeping") {
    RasterGrid g(GridSpec{0, 0, 1.0, 3, 2});
    CHECK(g.valid_count() == 0);
    CHECK_FALSE(g.value_range().has_value());
    CHECK_FALSE(g.has_value(1, 1));
    CHECK_THROWS_AS(g.value(1, 1), InternalError);

    g.set(1, 1, 7.5);
    g.set(0, 0, -2.0);
    CHECK(g.valid_count() == 2);
    CHECK(g.value(1, 1) == doctest::Approx(7.5));
    CHECK(g.value_opt(2, 1) == std::nullopt);
    auto range = g.value_range();
    REQUIRE(range.has_value());
    CHECK(range->first == doctest::Approx(-2.0));
    CHECK(range->second == doctest::Approx(7.5));

    g.set_nodata(1, 1);
    CHECK(g.valid_count() == 1);
    CHECK_FALSE(g.has_value(1, 1));

    CHECK_THROWS_AS(g.set(0, 0, std::numeric_limits<double>::infinity()), InternalError);
    CHECK_THROWS_AS(g.set(5, 0, 1.0), InternalError);

    const RasterGrid f = RasterGrid::filled(GridSpec{0, 0, 1.0, 2, 2}, 3.0);
    CHECK(f.valid_count() == 4);
    CHECK(f.value(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("point dataset attributes and groups") {
    PointDataset d({"a", "b"}, true);
    d.add(0.0, 0.0, std::vector<double>{1.0, 10.0}, "g1");
    d.add(1.0, 2.0, std::vector<double>{2.0, 20.0}, "g2");
    d.add(3.0, 1.0, std::vector<double>{3.0, 30.0}, "g1");

    CHECK(d.size() == 3);
    CHECK(d.attr("a") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(d.attr_at("b", 2) == doctest::Approx(30.0));
    CHECK_THROWS_AS(d.attr("missing"), SchemaError);
    CHECK(d.has_groups());
    CHECK(d.group(1) == "g2");
    CHECK(d.distinct_groups() == std::vector<std::string>{"g1", "g2"});

    // arity mismatch is a schema violation
    CHECK_THROWS_AS(d.add(0.0, 0.0, std::vector<double>{1.0}, "g1"), SchemaError);

    PointDataset plain({}, false);
    plain.add(5.0, 6.0, {});
    CHECK_FALSE(plain.has_groups());
    CHECK_THROWS_AS(plain.group(0), SchemaError);
}

TEST_CASE("bounding box") {
    PointDataset d({}, false);
    d.add(2.0, -1.0, {});
    d.add(-3.0, 4.0, {});
    d.add(0.0, 0.0, {});
    const Rect r = bounding_box(d);
    CHECK(r.min_x == doctest::Approx(-3.0));
    CHECK(r.min_y == doctest::Approx(-1.0));
    CHECK(r.max_x == doctest::Approx(2.0));
    CHECK(r.max_y == doctest::Approx(4.0));

    CHECK_THROWS_AS(bounding_box(PointDataset({}, false)), EmptyInputError);
}

TEST_CASE("rasterize aggregates per cell and ignores outside points") {
    PointDataset d({"v"}, false);
    d.add(0.5, 0.5, std::vector<double>{2.0});
    d.add(0.7, 0.3, std::vector<double>{4.0});   // same cell (0,0)
    d.add(1.5, 0.5, std::vector<double>{10.0});  // cell (1,0)
    d.add(9.0, 9.0, std::vector<double>{99.0});  // outside, ignored
    const GridSpec grid{0, 0, 1.0, 2, 2};

    const RasterGrid mean = rasterize(d, "v", grid, Aggregator::mean);
    CHECK(mean.value(0, 0) == doctest::Approx(3.0));
    CHECK(mean.value(1, 0) == doctest::Approx(10.0));
    CHECK_FALSE(mean.has_value(0, 1));  // empty cell stays no-data for mean

    const RasterGrid sum = rasterize(d, "v", grid, Aggregator::sum);
    CHECK(sum.value(0, 0) == doctest::Approx(6.0));
    CHECK(sum.value(0, 1) == doctest::Approx(0.0));  // empty cell is 0 for sum

    const RasterGrid count = rasterize(d, "", grid, Aggregator::count);
    CHECK(count.value(0, 0) == doctest::Approx(2.0));
    CHECK(count.value(1, 0) == doctest::Approx(1.0));
    CHECK(count.value(1, 1) == doctest::Approx(0.0));

    CHECK_THROWS_AS(rasterize(d, "missing", grid, Aggregator::mean), SchemaError);
}
