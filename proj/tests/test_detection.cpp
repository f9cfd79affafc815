#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace gsres;
using namespace gsres::test;

TEST_CASE("cookie-cutter ping outcome")
{
    const SensorSpec spec{10.0, 20.0, 1, 1.0};
    const Sensor s = sensor_at({0, 0}, {1.0});
    CHECK(ping_outcome(s, spec, {0, 0}) == Contact::detection);
    CHECK(ping_outcome(s, spec, {10, 0}) == Contact::detection);
    CHECK(ping_outcome(s, spec, {15, 0}) == Contact::counter_detection);
    CHECK(ping_outcome(s, spec, {20, 0}) == Contact::counter_detection);
    CHECK(ping_outcome(s, spec, {40, 0}) == Contact::none);
}

TEST_CASE("cost function")
{
    auto c = square_constraints(100, 100, 5);
    c.carrier_entry = Vec2{50, 50};
    Solution sol;
    sol.sensors = {sensor_at({50, 50}, {10.0})};
    DetectionCriteria crit;

    Trajectory tr;
    tr.waypoints = {{{0, 0}, {1, 0}, 0.0}, {{100, 0}, {1, 0}, 100.0}};
    tr.events = {{10.0, 0, Contact::detection}};
    CHECK(cost_f(tr, sol, c, crit) == 1);

    tr.events = {{10.0, 0, Contact::counter_detection}};
    CHECK(cost_f(tr, sol, c, crit) == 0);

    tr.events = {{10.0, 0, Contact::detection}};
    Solution bad = sol;
    bad.sensors[0].position = {500, 500};
    CHECK(cost_f(tr, bad, c, crit) == 0);

    crit.min_detections = 2;
    CHECK(cost_f(tr, sol, c, crit) == 0);
    crit = {};
    crit.max_avoidances = 0;
    tr.events = {{5.0, 0, Contact::counter_detection}, {10.0, 0, Contact::detection}};
    CHECK(cost_f(tr, sol, c, crit) == 0);
    crit.max_avoidances = 1;
    CHECK(cost_f(tr, sol, c, crit) == 1);
}

TEST_CASE("relative error formula")
{
    CHECK(*relative_error(0.5, 50000) == doctest::Approx(std::sqrt(0.5) / std::sqrt(25000.0)));
    CHECK(*relative_error(0.5, 50000) == doctest::Approx(0.00447).epsilon(1e-3));
    CHECK_FALSE(relative_error(0.0, 100).has_value());
    CHECK(*relative_error(1.0, 10) == 0.0);
}

TEST_CASE("estimate extremes")
{
    auto c = square_constraints(1000, 500, 5000);
    c.carrier_entry = Vec2{500, 500};
    const DynamicsParams p;
    Solution cover;
    cover.sensors = {sensor_at({500, 500}, {100.0})};
    const auto full = estimate_score(cover, c, p, {}, 500, 1);
    CHECK(full.value == 1.0);
    CHECK(*full.relative_error == 0.0);

    const auto none = estimate_score(Solution{}, c, p, {}, 500, 1);
    CHECK(none.value == 0.0);
    CHECK_FALSE(none.relative_error.has_value());
    CHECK(none.n_trajectories == 500);
}

TEST_CASE("estimates are reproducible and independent of thread count")
{
    auto c = square_constraints(10000, 3600, 800);
    Solution sol;
    for (int k = 0; k < 4; ++k)
        sol.sensors.push_back(sensor_at({4000.0 + 600 * k, 5000.0 + 300 * (k % 2)}, {600.0 + 300 * k}));
    const DynamicsParams p;
    const auto a = estimate_score(sol, c, p, {}, 3000, 17, 1);
    const auto b = estimate_score(sol, c, p, {}, 3000, 17, 1);
    const auto d = estimate_score(sol, c, p, {}, 3000, 17, 3);
    CHECK(a.value == b.value);
    CHECK(a.value == d.value);
    CHECK(a.value > 0.0);
    CHECK(a.value < 1.0);

    const auto other = estimate_score(sol, c, p, {}, 3000, 18, 1);
    CHECK(other.value != a.value);
}

TEST_CASE("scorer threshold test agrees with the full estimate")
{
    auto c = square_constraints(10000, 3600, 800);
    Solution sol;
    for (int k = 0; k < 3; ++k)
        sol.sensors.push_back(sensor_at({4500.0 + 500 * k, 5000.0}, {700.0 + 200 * k}));
    const Scorer scorer(c, DynamicsParams{}, {}, 1000);
    const double full = scorer.score(sol, 3).value;
    for (double gamma : {0.0, full / 2, full, full + 1e-3, 0.9, 1.0}) {
        const auto r = scorer.score_at_least(sol, 3, gamma);
        CHECK(r.has_value() == (full >= gamma));
        if (r)
            CHECK(*r == full);
    }
}

TEST_CASE("fixed trajectory bank")
{
    auto c = square_constraints(1000, 100, 50);
    Scorer reactive(c, DynamicsParams{}, {}, 10);
    CHECK_THROWS_AS(reactive.use_fixed_bank(8, 1), InvalidSpecError);

    DynamicsParams myopic;
    myopic.reactive = false;
    myopic.leg_mean = 30;
    myopic.leg_std = 10;
    myopic.leg_half_width = 20;
    myopic.start_sigma = 100;
    myopic.speed_mean = 5;
    myopic.speed_std = 1;
    myopic.speed_half_width = 3;
    Scorer scorer(c, myopic, {}, 10);
    scorer.use_fixed_bank(64, 3);
    CHECK(scorer.n() == 64);
    CHECK(scorer.bank().size() == 64);

    // Any seed scores against the same trajectories.
    Solution sol;
    sol.sensors = {sensor_at({500, 500}, {40.0})};
    CHECK(scorer.score(sol, 1).value == scorer.score(sol, 99).value);

    // Replay matches fresh generation for a target that ignores sensors.
    for (std::size_t i = 0; i < 8; ++i) {
        Stream rng(derive_seed(3, {i}));
        const auto fresh = generate_trajectory(sol, c, myopic, rng);
        const auto replayed = replay_events(scorer.bank()[i], sol, c.spec);
        REQUIRE(fresh.events.size() == replayed.size());
        for (std::size_t k = 0; k < replayed.size(); ++k) {
            CHECK(fresh.events[k].kind == replayed[k].kind);
            CHECK(fresh.events[k].time == replayed[k].time);
        }
    }
}

TEST_CASE("more activations never hurt against a myopic target")
{
    auto c = square_constraints(2000, 600, 100, 10, 5);
    DynamicsParams myopic;
    myopic.reactive = false;
    myopic.leg_mean = 100;
    myopic.leg_std = 30;
    myopic.leg_half_width = 60;
    myopic.start_sigma = 300;
    Scorer scorer(c, myopic, {}, 10);
    scorer.use_fixed_bank(300, 8);

    Stream rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        Solution sol;
        for (int k = 0; k < 3; ++k)
            sol.sensors.push_back(sensor_at({rng.uniform(500, 1500), rng.uniform(500, 1500)}, {rng.uniform(10, 300)}));
        Solution more = sol;
        auto& acts = more.sensors[rng.index(3)].activations;
        acts.push_back(acts.back() + rng.uniform(1, 290));
        for (const auto& tr : scorer.bank()) {
            const int base = criteria_met(replay_events(tr, sol, c.spec), {}) ? 1 : 0;
            const int sup = criteria_met(replay_events(tr, more, c.spec), {}) ? 1 : 0;
            CHECK(sup >= base);
        }
    }
}
