#include "support.hpp"

#include <gsres/analysis.hpp>

#include <doctest.h>

#include <cmath>

using namespace gsres;
using namespace gsres::test;

namespace {

std::vector<Vec2> spiral_points(SpiralKind kind, double a, double b, Vec2 c, int n, double rotation = 0.0,
                                bool clockwise = false)
{
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
        const double theta = 0.7 * i;
        const double r = kind == SpiralKind::archimedean ? a + b * theta : a * std::exp(b * theta);
        const double phi = (clockwise ? -theta : theta) + rotation;
        pts.push_back({c.x + r * std::cos(phi), c.y + r * std::sin(phi)});
    }
    return pts;
}

} // namespace

TEST_CASE("exact archimedean spiral")
{
    const auto pts = spiral_points(SpiralKind::archimedean, 1.0, 0.5, {0, 0}, 20);
    const auto f = fit_spiral(pts, SpiralKind::archimedean, CenterMode::given, {0, 0});
    CHECK(f.residual < 1e-9);
    CHECK(f.a == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.b == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_FALSE(f.clockwise);
}

TEST_CASE("exact logarithmic spiral")
{
    const auto pts = spiral_points(SpiralKind::logarithmic, 2.0, 0.3, {5, -3}, 15);
    const auto f = fit_spiral(pts, SpiralKind::logarithmic, CenterMode::given, {5, -3});
    CHECK(f.b == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(f.a == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(f.residual < 1e-6);
}

TEST_CASE("spiral fit is invariant under rotation and winding sense")
{
    const auto base = spiral_points(SpiralKind::archimedean, 3.0, 1.5, {10, 10}, 12);
    const auto f0 = fit_spiral(base, SpiralKind::archimedean, CenterMode::given, {10, 10});
    for (double rot : {0.5, 2.0, -1.3}) {
        const auto pts = spiral_points(SpiralKind::archimedean, 3.0, 1.5, {10, 10}, 12, rot);
        const auto f = fit_spiral(pts, SpiralKind::archimedean, CenterMode::given, {10, 10});
        CHECK(f.b == doctest::Approx(f0.b).epsilon(1e-9));
        CHECK(f.residual < 1e-9);
    }
    const auto cw = spiral_points(SpiralKind::archimedean, 3.0, 1.5, {10, 10}, 12, 0.0, true);
    const auto f = fit_spiral(cw, SpiralKind::archimedean, CenterMode::given, {10, 10});
    CHECK(f.clockwise);
    CHECK(f.b == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("grid-search centre recovers an offset spiral")
{
    const Vec2 c{3.0, -2.0};
    const auto pts = spiral_points(SpiralKind::archimedean, 1.0, 1.0, c, 16);
    const auto f = fit_spiral(pts, SpiralKind::archimedean, CenterMode::grid_search);
    const auto at_truth = fit_spiral(pts, SpiralKind::archimedean, CenterMode::given, c);
    CHECK(f.residual <= fit_spiral(pts, SpiralKind::archimedean, CenterMode::centroid).residual);
    CHECK(distance(f.center, c) < 1.0);
    CHECK(at_truth.residual < 1e-9);
}

TEST_CASE("spiral fit errors")
{
    const std::vector<Vec2> three{{1, 0}, {0, 1}, {-1, 0}};
    CHECK_THROWS_AS(fit_spiral(three, SpiralKind::archimedean, CenterMode::given), FitError);
    const std::vector<Vec2> through_center{{1, 0}, {0, 0}, {0, 1}, {-1, 0}};
    CHECK_THROWS_AS(fit_spiral(through_center, SpiralKind::archimedean, CenterMode::given), FitError);
    const std::vector<Vec2> origin_radius{{1, 0}, {0, 2}, {-3, 0}, {0, -4}};
    CHECK_NOTHROW(fit_spiral(origin_radius, SpiralKind::logarithmic, CenterMode::given));
}

TEST_CASE("activation ordering")
{
    Solution s;
    s.sensors = {sensor_at({1, 0}, {30}), sensor_at({2, 0}, {10}), sensor_at({3, 0}, {10}), sensor_at({4, 0}, {5})};
    s.sensors[3].active = false;
    const auto pts = activation_ordered_positions(s);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].x == 2);
    CHECK(pts[1].x == 3);
    CHECK(pts[2].x == 1);
}

TEST_CASE("track spacing")
{
    CHECK(track_spacing({1.0, 10.0, 5.0, 1.0, 3.0}) == 8.0);
    CHECK(track_spacing({1.0, 10.0, 20.0, 1.0, 3.0}) == 10.0);
    CHECK(track_spacing({5.0, 1.0, 1.0, 1.0, 0.0}) == 10.0);
    double prev = 0.0;
    for (double ray = 0.0; ray < 50.0; ray += 0.5) {
        const double ts = track_spacing({1.0, ray, 20.0, 1.2, 2.0});
        CHECK(ts >= prev);
        CHECK(ts >= 2.0);
        prev = ts;
    }
}

TEST_CASE("detection attribution")
{
    auto cs = square_constraints(1000, 100, 60, 3, 1);
    Scorer scorer(cs, straight_line({100, 500}, 0.0, 10.0), {}, 200);
    CHECK(detection_attribution({}, scorer, 1).empty());

    Solution one;
    one.sensors = {sensor_at({500, 500}, {40.0})};
    one = compute_setup_times(one, cs);
    auto counts = detection_attribution(one, scorer, 1);
    CHECK(counts == std::vector<std::int64_t>{200});

    // Two sensors covering the same pass: the earlier ping gets the credit.
    Solution two;
    two.sensors = {sensor_at({600, 500}, {50.0}), sensor_at({500, 500}, {40.0})};
    two = compute_setup_times(two, cs);
    counts = detection_attribution(two, scorer, 1);
    CHECK(counts == std::vector<std::int64_t>{0, 200});

    // Counts add up to the estimated score times N on a random target.
    auto params = DynamicsParams{};
    params.start_center = Vec2{500, 500};
    params.start_sigma = 200;
    params.speed_mean = 5;
    params.speed_std = 1;
    params.speed_half_width = 2;
    params.leg_mean = 20;
    params.leg_std = 5;
    params.leg_half_width = 10;
    Scorer noisy(cs, params, {}, 500);
    Solution three;
    three.sensors = {sensor_at({500, 500}, {20.0}), sensor_at({400, 500}, {50.0}), sensor_at({600, 600}, {80.0})};
    three = compute_setup_times(three, cs);
    counts = detection_attribution(three, noisy, 7);
    std::int64_t total = 0;
    for (auto v : counts)
        total += v;
    CHECK(static_cast<double>(total) == doctest::Approx(noisy.score(three, 7).value * 500));
}

TEST_CASE("single-sensor grid search")
{
    auto cs = square_constraints(1000, 100, 150, 1, 1);
    cs.spec.carrier_speed = 100;
    cs.theater.hunter_delay = 5;
    auto params = DynamicsParams{};
    params.reactive = false;
    params.start_center = Vec2{500, 500};
    params.start_sigma = 100;
    params.speed_mean = 2;
    params.speed_std = 0.5;
    params.speed_half_width = 1;
    Scorer scorer(cs, params, {}, 64);
    scorer.use_fixed_bank(64, 3);
    const auto r = grid_search_single(scorer, 0, 11, 1);
    CHECK(r.evaluated > 0);
    CHECK(is_feasible(r.best.solution, cs));
    CHECK(scorer.score(r.best.solution, 0).value == r.best.score);
    CHECK(r.best.score > 0.5);
    const auto threaded = grid_search_single(scorer, 0, 11, 3);
    CHECK(threaded.best.score == r.best.score);
    CHECK(threaded.best.solution.sensors[0].position.x == r.best.solution.sensors[0].position.x);
    CHECK_THROWS(grid_search_single(scorer, 0, 1));
}
