#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "geobias/numeric.hpp"
#include "geobias/simpson.hpp"
#include "geobias/synthgen.hpp"

using namespace geobias;
using simpson::RegressionFit;
using simpson::SimpsonKind;

// Reference values computed with exact rational arithmetic for the sums and
// 60-digit arithmetic for the sqrt / incomplete-beta steps.
TEST_CASE("ols matches high-precision reference values") {
    const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0};
    const std::vector<double> ys = {1.2, 1.9, 3.1, 3.9, 5.2, 5.8, 7.1, 8.2, 8.9, 10.1};
    const RegressionFit f = simpson::fit_ols(xs, ys);
    CHECK(f.n == 10);
    CHECK(f.slope == doctest::Approx(0.998787878787878758542).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(1.045454545454545466657).epsilon(1e-12));
    CHECK(f.slope_se == doctest::Approx(0.01757575757575756585722).epsilon(1e-11));
    CHECK(f.t_stat == doctest::Approx(56.82758620689658206574).epsilon(1e-11));
    CHECK(f.p_value == doctest::Approx(1.020647931079717590293e-11).epsilon(1e-9));
    CHECK(f.r2 == doctest::Approx(0.9975288617778678892949).epsilon(1e-12));

    const std::vector<double> xs2 = {1.5, 2.25, 3.0, 4.5, 5.0, 6.75, 8.0, 9.5};
    const std::vector<double> ys2 = {2.0, 1.0, 4.0, 3.5, 6.0, 5.5, 9.0, 7.25};
    const RegressionFit g = simpson::fit_ols(xs2, ys2);
    CHECK(g.slope == doctest::Approx(0.840543538546866333888).epsilon(1e-12));
    CHECK(g.intercept == doctest::Approx(0.5259983361064891846922).epsilon(1e-12));
    CHECK(g.slope_se == doctest::Approx(0.1751597182911480841584).epsilon(1e-11));
    CHECK(g.t_stat == doctest::Approx(4.798726252515012493156).epsilon(1e-11));
    CHECK(g.p_value == doctest::Approx(0.003004657630492058168064).epsilon(1e-10));
    CHECK(g.r2 == doctest::Approx(0.7933014059895848849492).epsilon(1e-12));
}

TEST_CASE("t distribution and incomplete beta match reference values") {
    CHECK(num::student_t_two_sided_p(2.5, 8) ==
          doctest::Approx(0.03694203771362410480336).epsilon(1e-12));
    CHECK(num::student_t_two_sided_p(0.3, 3) ==
          doctest::Approx(0.7837632920399190422912).epsilon(1e-12));
    CHECK(num::student_t_two_sided_p(12.0, 1) ==
          doctest::Approx(0.05292935211917975090364).epsilon(1e-12));
    CHECK(num::student_t_two_sided_p(4.75, 28) ==
          doctest::Approx(0.00005493177528887740306688).epsilon(1e-11));
    CHECK(num::student_t_two_sided_p(1.0, 300) ==
          doctest::Approx(0.3181164044306262769232).epsilon(1e-12));
    // symmetry in t
    CHECK(num::student_t_two_sided_p(-2.5, 8) ==
          doctest::Approx(num::student_t_two_sided_p(2.5, 8)).epsilon(1e-15));

    CHECK(num::regularized_incomplete_beta(0.5, 0.5, 0.25) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(num::regularized_incomplete_beta(2.0, 3.0, 0.4) ==
          doctest::Approx(0.5248).epsilon(1e-13));
    CHECK(num::regularized_incomplete_beta(5.0, 1.5, 0.9) ==
          doctest::Approx(0.7761721343162156683267).epsilon(1e-13));
    CHECK(num::regularized_incomplete_beta(4.0, 0.5, 0.99) ==
          doctest::Approx(0.7834244062499999057408).epsilon(1e-13));
    CHECK(num::regularized_incomplete_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
    CHECK(num::regularized_incomplete_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("spearman and pearson match reference values") {
    const std::vector<double> a = {1.0, 2.0, 2.0, 3.0, 5.0, 4.0, 4.0, 8.0};
    const std::vector<double> b = {3.0, 1.0, 4.0, 4.0, 6.0, 5.0, 9.0, 7.0};
    CHECK(num::spearman(a, b) == doctest::Approx(0.8424397143700718829259).epsilon(1e-13));

    const std::vector<double> c = {0.5, 1.25, 2.0, 3.75, 4.0, 5.5};
    const std::vector<double> d = {2.1, 1.8, 3.9, 3.0, 5.6, 4.9};
    CHECK(num::pearson(c, d) == doctest::Approx(0.7858745781559588193514).epsilon(1e-13));

    // average ranks under ties
    const auto r = num::ranks_average_ties(std::vector<double>{10.0, 20.0, 20.0, 30.0});
    CHECK(r == std::vector<double>{1.0, 2.5, 2.5, 4.0});
}

TEST_CASE("quantile type-7 reference values") {
    const std::vector<double> v = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
    CHECK(num::quantile_linear(v, 0.25) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(num::quantile_linear(v, 0.5) == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(num::quantile_linear(v, 0.75) == doctest::Approx(5.25).epsilon(1e-15));
    CHECK(num::quantile_linear(v, 0.9) == doctest::Approx(6.8999999999999995).epsilon(1e-15));
    CHECK(num::quantile_linear(v, 0.0) == doctest::Approx(1.0));
    CHECK(num::quantile_linear(v, 1.0) == doctest::Approx(9.0));
}

TEST_CASE("ols error and edge cases") {
    CHECK_THROWS_AS(
        simpson::fit_ols(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}),
        SampleSizeError);
    CHECK_THROWS_AS(
        simpson::fit_ols(std::vector<double>{2.0, 2.0, 2.0}, std::vector<double>{1.0, 2.0, 3.0}),
        DegenerateDataError);
    CHECK_THROWS_AS(
        simpson::fit_ols(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0, 2.0}),
        ParameterError);

    // perfect fit: zero residual, p -> 0, r2 = 1
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys = {3.0, 5.0, 7.0, 9.0};
    const RegressionFit f = simpson::fit_ols(xs, ys);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.slope_se == doctest::Approx(0.0));
    CHECK(f.p_value == doctest::Approx(0.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.significant(0.05));
}

namespace {

RegressionFit make_fit(double slope, double p) {
    RegressionFit f;
    f.slope = slope;
    f.p_value = p;
    f.n = 50;
    return f;
}

}  // namespace

TEST_CASE("simpson decision rules fire in documented order") {
    const double alpha = 0.05;

    SUBCASE("mixed groups dominate everything") {
        const std::map<std::string, RegressionFit> groups = {
            {"a", make_fit(1.0, 0.001)}, {"b", make_fit(-1.0, 0.001)}, {"c", make_fit(0.5, 0.3)}};
        const auto f = simpson::detect_simpson(make_fit(-2.0, 0.001), groups, alpha);
        CHECK(f.kind == SimpsonKind::mixed_groups);
    }
    SUBCASE("insufficient group evidence yields none even when pooled flips") {
        const std::map<std::string, RegressionFit> groups = {{"a", make_fit(1.0, 0.001)},
                                                             {"b", make_fit(1.0, 0.2)}};
        const auto f = simpson::detect_simpson(make_fit(-2.0, 0.001), groups, alpha);
        CHECK(f.kind == SimpsonKind::none);
        CHECK(f.non_significant_groups == std::vector<std::string>{"b"});
    }
    SUBCASE("sign reversal") {
        const std::map<std::string, RegressionFit> groups = {{"a", make_fit(1.0, 0.001)},
                                                             {"b", make_fit(0.8, 0.001)}};
        const auto f = simpson::detect_simpson(make_fit(-2.0, 0.001), groups, alpha);
        CHECK(f.kind == SimpsonKind::sign_reversal);
    }
    SUBCASE("significance loss") {
        const std::map<std::string, RegressionFit> groups = {{"a", make_fit(1.0, 0.001)},
                                                             {"b", make_fit(0.8, 0.001)}};
        const auto f = simpson::detect_simpson(make_fit(0.9, 0.4), groups, alpha);
        CHECK(f.kind == SimpsonKind::significance_loss);
    }
    SUBCASE("agreeing significant trends are no finding") {
        const std::map<std::string, RegressionFit> groups = {{"a", make_fit(1.0, 0.001)},
                                                             {"b", make_fit(0.8, 0.001)}};
        const auto f = simpson::detect_simpson(make_fit(0.9, 0.001), groups, alpha);
        CHECK(f.kind == SimpsonKind::none);
        CHECK(f.non_significant_groups.empty());
    }
    SUBCASE("empty group map is rejected") {
        CHECK_THROWS_AS(simpson::detect_simpson(make_fit(1.0, 0.5), {}, alpha), EmptyInputError);
        CHECK_THROWS_AS(
            simpson::detect_simpson(make_fit(1.0, 0.5), {{"a", make_fit(1.0, 0.01)}}, 1.5),
            ParameterError);
    }
}

TEST_CASE("grouped fits and the seeded paradox dataset") {
    const PointDataset d = synth::gen_simpson_regions(synth::SimpsonParams{}, 42);
    const RegressionFit pooled = simpson::fit_ols(d.attr("var1"), d.attr("var2"));
    const auto groups = simpson::fit_grouped(d, "var1", "var2");
    REQUIRE(groups.size() == 3);
    for (const auto& [label, fit] : groups) {
        CHECK(fit.slope > 0.0);
        CHECK(fit.p_value < 0.01);
        CHECK(fit.n == 100);
    }
    CHECK(pooled.slope < 0.0);

    const auto finding = simpson::detect_simpson(pooled, groups, 0.05);
    CHECK(finding.kind == SimpsonKind::sign_reversal);

    // grouping by a discrete attribute works the same way
    PointDataset by_attr({"x1", "y1", "region"}, false);
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < 10; ++i) {
            const double x = i * 0.5 + r * 10.0;
            const double y = x * 1.0 - r * 25.0 + (i % 3) * 0.01;
            by_attr.add(x, y, std::array{x, y, static_cast<double>(r)});
        }
    const auto fits =
        simpson::fit_grouped(by_attr, "x1", "y1", simpson::GroupKey::by_attribute("region"));
    REQUIRE(fits.size() == 2);
    for (const auto& [key, fit] : fits) CHECK(fit.slope > 0.9);

    // tiny group raises a named error
    PointDataset tiny({"a", "b"}, true);
    tiny.add(0, 0, std::array{0.0, 0.0}, "solo");
    tiny.add(1, 1, std::array{1.0, 1.0}, "solo");
    tiny.add(0, 0, std::array{0.0, 0.0}, "full");
    tiny.add(1, 1, std::array{1.0, 1.5}, "full");
    tiny.add(2, 2, std::array{2.0, 2.0}, "full");
    CHECK_THROWS_WITH_AS(simpson::fit_grouped(tiny, "a", "b"),
                         doctest::Contains("solo"), SampleSizeError);
}

TEST_CASE("parallel coordinates normalization") {
    PointDataset d({"v"}, true);
    d.add(0.0, 10.0, std::array{5.0}, "g1");
    d.add(5.0, 20.0, std::array{5.0}, "g2");
    d.add(10.0, 40.0, std::array{5.0}, "g1");

    const auto t = simpson::parallel_coords_table(d, {"x", "y", "v"},
                                                  simpson::AxisNormalization::minmax);
    REQUIRE(t.axes == std::vector<std::string>{"x", "y", "v"});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][0] == doctest::Approx(0.0));
    CHECK(t.rows[1][0] == doctest::Approx(0.5));
    CHECK(t.rows[2][0] == doctest::Approx(1.0));
    CHECK(t.rows[1][1] == doctest::Approx(1.0 / 3.0));
    // constant axis pins to the middle
    CHECK(t.rows[0][2] == doctest::Approx(0.5));
    CHECK(t.rows[2][2] == doctest::Approx(0.5));
    CHECK(t.groups == std::vector<std::string>{"g1", "g2", "g1"});

    const auto z =
        simpson::parallel_coords_table(d, {"x", "y"}, simpson::AxisNormalization::zscore);
    double mean = 0.0;
    for (const auto& row : z.rows) mean += row[0];
    CHECK(mean == doctest::Approx(0.0));
    CHECK(z.rows[2][0] > 0.9);  // about one sd above the mean

    CHECK_THROWS_AS(
        simpson::parallel_coords_table(d, {"nope", "x"}, simpson::AxisNormalization::minmax),
        SchemaError);
    CHECK_THROWS_AS(simpson::parallel_coords_table(d, {"x"}, simpson::AxisNormalization::minmax),
                    ParameterError);
}
