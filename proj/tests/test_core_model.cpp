#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vspline/fitted_spline.hpp"
#include "vspline/hermite.hpp"
#include "vspline/rng.hpp"
#include "vspline/time_grid.hpp"

using namespace vspline;

namespace {

TimeGrid random_grid(Rng& rng, int n) {
    std::vector<double> times(n);
    double t = rng.uniform() * 2.0 - 1.0;
    for (int i = 0; i < n; ++i) {
        times[i] = t;
        t += 0.1 + 2.0 * rng.uniform();
    }
    return TimeGrid(times);
}

FittedVSpline random_spline(Rng& rng, int n, int d = 1) {
    const TimeGrid grid = random_grid(rng, n);
    Eigen::MatrixXd theta(2 * n, d);
    for (int r = 0; r < 2 * n; ++r)
        for (int c = 0; c < d; ++c) theta(r, c) = rng.normal();
    return FittedVSpline(grid, theta, 1.0, std::vector<double>(n - 1, 1.0));
}

}  // namespace

TEST_CASE("time grid validates its knots") {
    CHECK_THROWS_AS(TimeGrid({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, 2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, std::nan("")}), std::invalid_argument);

    const TimeGrid grid({0.0, 1.0, 3.0});
    CHECK(grid.size() == 3);
    CHECK(grid.interval_count() == 2);
    CHECK(grid.dt(1) == 2.0);
    CHECK(grid.locate(0.5) == 0);
    CHECK(grid.locate(1.0) == 1);   // half-open intervals
    CHECK(grid.locate(3.0) == 1);   // last interval keeps its right endpoint
    CHECK(grid.locate(-5.0) == 0);
}

TEST_CASE("hermite basis endpoint identities") {
    const TimeGrid unit({0.0, 1.0});
    CHECK(hermite_basis(HermiteKind::H00, unit, 0, 0.0, 0) == 1.0);
    CHECK(hermite_basis(HermiteKind::H10, unit, 0, 0.0, 1) == 1.0);
    CHECK(hermite_basis(HermiteKind::H00, unit, 0, 0.5, 0) == 0.5);
    CHECK(hermite_basis(HermiteKind::H01, unit, 0, 0.0, 0) == 0.0);
    CHECK(hermite_basis(HermiteKind::H11, unit, 0, 0.0, 0) == 0.0);

    // Unit right-endpoint slope of h11 survives nonunit interval lengths.
    const TimeGrid wide({0.0, 2.0});
    CHECK(hermite_basis(HermiteKind::H11, wide, 0, 2.0, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermite basis vanishes outside its interval") {
    const TimeGrid grid({0.0, 1.0, 2.0});
    for (const auto kind :
         {HermiteKind::H00, HermiteKind::H10, HermiteKind::H01, HermiteKind::H11}) {
        CHECK(hermite_basis(kind, grid, 0, 1.5, 0) == 0.0);
        CHECK(hermite_basis(kind, grid, 0, -0.5, 0) == 0.0);
        CHECK(hermite_basis(kind, grid, 1, 0.5, 0) == 0.0);
        // Interval 0 is half-open, so its basis is zero at the shared knot.
        CHECK(hermite_basis(kind, grid, 0, 1.0, 0) == 0.0);
    }
    CHECK_THROWS_WITH_AS(hermite_basis(HermiteKind::H00, grid, 2, 0.5, 0),
                         "hermite_basis: interval out of range", std::out_of_range);
}

TEST_CASE("value and slope basis functions sum to constants") {
    Rng rng(7);
    const TimeGrid grid = random_grid(rng, 5);
    for (int trial = 0; trial < 50; ++trial) {
        const int i = static_cast<int>(rng.bounded(grid.interval_count()));
        const double s = rng.uniform();
        const double dt = grid.dt(i);
        const double sum = hermite_local(HermiteKind::H00, s, dt, 0) +
                           hermite_local(HermiteKind::H01, s, dt, 0);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("spline interpolates its coefficients at the knots") {
    Rng rng(11);
    const FittedVSpline s = random_spline(rng, 6, 2);
    for (int k = 0; k < s.grid.size(); ++k) {
        const Eigen::VectorXd f = s.evaluate(s.grid.time(k), 0);
        const Eigen::VectorXd df = s.evaluate(s.grid.time(k), 1);
        for (int a = 0; a < 2; ++a) {
            CHECK(f[a] == s.theta(2 * k, a));
            CHECK(df[a] == s.theta(2 * k + 1, a));
        }
    }
}

TEST_CASE("midpoint of the antisymmetric interpolant vanishes") {
    Eigen::MatrixXd theta(4, 1);
    theta << 0.0, 1.0, 0.0, 1.0;
    const FittedVSpline s(TimeGrid({0.0, 1.0}), theta, 1.0, {1.0});
    CHECK(s.evaluate(0.5, 0)[0] == 0.0);
}

TEST_CASE("quadratic reconstruction has the right second derivative") {
    Eigen::MatrixXd theta(4, 1);
    theta << 0.0, 0.0, 1.0, 2.0;  // f(s) = s^2 on [0, 1]
    const FittedVSpline s(TimeGrid({0.0, 1.0}), theta, 1.0, {1.0});
    CHECK(s.evaluate(0.5, 2)[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.evaluate(0.25, 0)[0] == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("linear extrapolation outside the knot span") {
    Eigen::MatrixXd theta(4, 1);
    theta << 1.0, 2.0, 4.0, -1.0;
    const FittedVSpline s(TimeGrid({0.0, 1.0}), theta, 1.0, {1.0});
    CHECK(s.evaluate(-2.0, 0)[0] == doctest::Approx(1.0 + 2.0 * -2.0).epsilon(1e-14));
    CHECK(s.evaluate(-2.0, 1)[0] == 2.0);
    CHECK(s.evaluate(-2.0, 2)[0] == 0.0);
    CHECK(s.evaluate(3.0, 0)[0] == doctest::Approx(4.0 + -1.0 * 2.0).epsilon(1e-14));
    CHECK(s.evaluate(3.0, 1)[0] == -1.0);
    CHECK(s.evaluate(3.0, 2)[0] == 0.0);
    CHECK_THROWS_AS(s.evaluate(0.5, 3), std::invalid_argument);
}

TEST_CASE("first derivative matches a central finite difference") {
    Rng rng(13);
    const FittedVSpline s = random_spline(rng, 8);
    const double a = s.grid.front(), b = s.grid.back();
    const double h = 1e-6 * (b - a);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 100; ++trial) {
        const double t = a + (b - a) * rng.uniform();
        if (t - h <= a || t + h >= b) continue;
        // Skip points whose stencil straddles a knot; f'' jumps there.
        if (s.grid.locate(t - h) != s.grid.locate(t + h)) continue;
        const double fd = (s.evaluate(t + h, 0)[0] - s.evaluate(t - h, 0)[0]) / (2.0 * h);
        const double exact = s.evaluate(t, 1)[0];
        CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("straight lines are reproduced exactly") {
    Rng rng(17);
    const TimeGrid grid = random_grid(rng, 7);
    const double c = 2.5, m = -0.75;
    Eigen::MatrixXd theta(2 * grid.size(), 1);
    for (int k = 0; k < grid.size(); ++k) {
        theta(2 * k, 0) = c + m * grid.time(k);
        theta(2 * k + 1, 0) = m;
    }
    const FittedVSpline s(grid, theta, 1.0, std::vector<double>(grid.interval_count(), 1.0));
    for (int trial = 0; trial < 100; ++trial) {
        const double t = grid.front() + (grid.back() - grid.front()) * rng.uniform();
        CHECK(s.evaluate(t, 0)[0] == doctest::Approx(c + m * t).epsilon(1e-12));
        CHECK(s.evaluate(t, 1)[0] == doctest::Approx(m).epsilon(1e-12));
    }
}

TEST_CASE("sampling covers the span inclusively") {
    Rng rng(19);
    const FittedVSpline s = random_spline(rng, 4);
    CHECK_THROWS_AS(sample_spline(s, 1), std::invalid_argument);

    const auto two = sample_spline(s, 2);
    REQUIRE(two.size() == 2);
    CHECK(two.front().t == s.grid.front());
    CHECK(two.back().t == s.grid.back());

    const auto many = sample_spline(s, 37);
    REQUIRE(many.size() == 37);
    CHECK(many.front().t == s.grid.front());
    CHECK(many.back().t == s.grid.back());
}

TEST_CASE("sampled values at knots equal the stored coefficients") {
    Eigen::MatrixXd theta(6, 1);
    theta << 1.0, 0.5, -2.0, 0.25, 3.0, -1.0;
    const FittedVSpline s(TimeGrid({0.0, 1.0, 2.0}), theta, 1.0, {1.0, 1.0});
    const auto rows = sample_spline(s, 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(rows[k].t == s.grid.time(k));
        CHECK(rows[k].f[0] == theta(2 * k, 0));
    }
}

TEST_CASE("json round trip preserves the fit") {
    Rng rng(23);
    const FittedVSpline s = random_spline(rng, 5, 2);
    std::stringstream buffer;
    buffer << s.to_json();
    nlohmann::json j;
    buffer >> j;
    const FittedVSpline back = FittedVSpline::from_json(j);
    CHECK(back.grid == s.grid);
    CHECK(back.gamma == s.gamma);
    CHECK(back.lambdas == s.lambdas);
    CHECK(back.theta == s.theta);
}
