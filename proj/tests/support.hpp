#pragma once

#include <gsres/splitting.hpp>

#include <numbers>

namespace gsres::test {

inline Sensor sensor_at(Vec2 p, std::vector<double> activations)
{
    Sensor s;
    s.position = p;
    s.activations = std::move(activations);
    return s;
}

/// Square theater with a fast carrier entering at the centre.
inline ConstraintSet square_constraints(double side, double horizon, double radius, int max_sensors = 10,
                                        int max_activations = 3)
{
    ConstraintSet c;
    c.theater.area = ConvexPolygon::rectangle({0, 0}, {side, side});
    c.theater.horizon = horizon;
    c.theater.hunter_delay = 0.0;
    c.spec = {radius, 2.0 * radius, max_activations, 1e6};
    c.max_sensors = max_sensors;
    return c;
}

/// Straight line at constant speed from a fixed start; one leg longer than any horizon.
inline DynamicsParams straight_line(Vec2 start, double course, double speed)
{
    DynamicsParams p;
    p.leg_mean = 1e9;
    p.leg_std = 0.0;
    p.leg_half_width = 1.0;
    p.course_std = 0.0;
    p.initial_course = course;
    p.start_mode = StartMode::gaussian;
    p.start_center = start;
    p.start_sigma = 1e-12;
    p.speed_mean = speed;
    p.speed_std = 0.0;
    p.speed_half_width = speed / 2;
    return p;
}

} // namespace gsres::test
