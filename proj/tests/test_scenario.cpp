#include <gsres/scenario.hpp>

#include <doctest.h>

using namespace gsres;

namespace {

ConstraintSet square(double side = 10.0)
{
    ConstraintSet c;
    c.theater.area = ConvexPolygon::rectangle({0, 0}, {side, side});
    c.theater.horizon = 100.0;
    c.theater.hunter_delay = 0.0;
    c.spec = {1.0, 2.0, 3, 10.0};
    c.max_sensors = 5;
    return c;
}

Sensor at(Vec2 p, std::vector<double> acts)
{
    Sensor s;
    s.position = p;
    s.activations = std::move(acts);
    return s;
}

} // namespace

TEST_CASE("contains")
{
    const auto c = square();
    CHECK(contains(c.theater, {5, 5}));
    CHECK(contains(c.theater, {10, 10}));
    CHECK_FALSE(contains(c.theater, {11, 5}));
}

TEST_CASE("validation of theater and sensor spec")
{
    auto c = square();
    CHECK_NOTHROW(c.validate());
    c.theater.hunter_delay = 100.0;
    CHECK_THROWS_AS(c.validate(), InvalidSpecError);
    c = square();
    c.spec.counter_detection_radius = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidSpecError);
    c = square();
    c.spec.max_activations = 0;
    CHECK_THROWS_AS(c.validate(), InvalidSpecError);
    c = square();
    c.carrier_entry = Vec2{20, 20};
    CHECK_THROWS_AS(c.validate(), InvalidSpecError);
}

TEST_CASE("setup times follow the carrier route")
{
    ConstraintSet c = square(1000.0);
    c.spec.carrier_speed = 10.0;

    Solution one;
    one.sensors = {at({100, 0}, {50})};
    CHECK(compute_setup_times(one, c, {0, 0}).sensors[0].setup_time == doctest::Approx(10.0));

    one.sensors[0].position = {0, 0};
    CHECK(compute_setup_times(one, c, {0, 0}).sensors[0].setup_time == 0.0);

    c.theater.hunter_delay = 5.0;
    Solution two;
    two.sensors = {at({100, 0}, {50}), at({200, 0}, {50})};
    const auto out = compute_setup_times(two, c, {0, 0});
    CHECK(out.sensors[0].setup_time == doctest::Approx(15.0));
    CHECK(out.sensors[1].setup_time == doctest::Approx(25.0));

    // Inactive sensors are skipped by the carrier.
    Solution gap;
    gap.sensors = {at({100, 0}, {50}), at({900, 900}, {}), at({200, 0}, {50})};
    gap.sensors[1].active = false;
    const auto g = compute_setup_times(gap, c, {0, 0});
    CHECK(g.sensors[2].setup_time == doctest::Approx(25.0));
    CHECK(g.sensors[1].setup_time == 0.0);

    c.spec.carrier_speed = 0.0;
    CHECK_THROWS_AS(compute_setup_times(two, c, {0, 0}), InvalidSpecError);
}

TEST_CASE("feasibility")
{
    ConstraintSet c = square();
    c.carrier_entry = Vec2{5, 5};
    Solution s;
    s.sensors = {at({5, 5}, {1.0})};
    CHECK(is_feasible(s, c));

    c.theater.hunter_delay = 2.0;
    CHECK_FALSE(is_feasible(s, c)); // activation before setup
    CHECK(*feasibility_violation(s, c) == "activation before sensor setup");

    c.theater.hunter_delay = 0.0;
    s.sensors[0].position = {11, 5};
    CHECK_FALSE(is_feasible(s, c));

    s.sensors[0].position = {5, 5};
    s.sensors[0].activations = {3.0, 2.0};
    CHECK_FALSE(is_feasible(s, c));
    s.sensors[0].activations = {1.0, 2.0, 3.0, 4.0};
    CHECK_FALSE(is_feasible(s, c)); // exceeds max_activations = 3
    s.sensors[0].activations = {};
    CHECK_FALSE(is_feasible(s, c));
    s.sensors[0].activations = {101.0};
    CHECK_FALSE(is_feasible(s, c));

    // Disabling a sensor does not change the feasibility of the rest.
    s.sensors = {at({5, 5}, {10.0}), at({50, 50}, {})};
    CHECK_FALSE(is_feasible(s, c));
    s.sensors[1].active = false;
    CHECK(is_feasible(s, c));

    s.sensors.assign(6, at({5, 5}, {50.0}));
    CHECK_FALSE(is_feasible(s, c));
}

TEST_CASE("setup times are nondecreasing in deployment order")
{
    ConstraintSet c = square(1000.0);
    Solution s;
    for (int i = 0; i < 5; ++i)
        s.sensors.push_back(at({100.0 * i, 37.0 * (i % 3)}, {99.0}));
    const auto out = compute_setup_times(s, c);
    for (std::size_t i = 1; i < out.sensors.size(); ++i)
        CHECK(out.sensors[i].setup_time >= out.sensors[i - 1].setup_time);
}
