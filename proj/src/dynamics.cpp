#include <gsres/detection.hpp>
#include <gsres/dynamics.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gsres {

namespace {

constexpr double time_eps = 1e-9;
constexpr int max_bounces_per_leg = 10000;

struct Ping {
    double time;
    std::size_t sensor;
};

std::vector<Ping> collect_pings(const Solution& solution)
{
    std::vector<Ping> pings;
    for (std::size_t i = 0; i < solution.sensors.size(); ++i) {
        const Sensor& s = solution.sensors[i];
        if (!s.active)
            continue;
        for (double t : s.activations)
            pings.push_back({t, i});
    }
    std::sort(pings.begin(), pings.end(),
              [](const Ping& a, const Ping& b) { return a.time < b.time || (a.time == b.time && a.sensor < b.sensor); });
    return pings;
}

Vec2 sample_start(const ConstraintSet& constraints, const DynamicsParams& params, Stream& rng)
{
    const ConvexPolygon& area = constraints.theater.area;
    const Box box = area.bounding_box();
    const Vec2 center = params.start_center.value_or(area.centroid());
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec2 p;
        if (params.start_mode == StartMode::uniform) {
            p.x = rng.uniform(box.lo.x, box.hi.x);
            p.y = rng.uniform(box.lo.y, box.hi.y);
        }
        else {
            p.x = rng.normal(center.x, params.start_sigma);
            p.y = rng.normal(center.y, params.start_sigma);
        }
        if (area.contains(p))
            return p;
    }
    return area.contains(center) ? center : area.centroid();
}

struct Laws {
    explicit Laws(const DynamicsParams& p)
        : speed(p.speed_mean, p.speed_std, std::max(p.speed_mean - p.speed_half_width, 1e-6 * p.speed_mean),
                p.speed_mean + p.speed_half_width),
          leg(p.leg_mean, p.leg_std, std::max(p.leg_mean - p.leg_half_width, 1e-6 * p.leg_mean),
              p.leg_mean + p.leg_half_width),
          course(0.0, p.course_std, -p.course_half_width, p.course_half_width),
          escape_half_width(p.escape_half_width)
    {
    }

    double sample_course(const CourseMean& cm, Stream& rng) const
    {
        if (cm.law == CourseLaw::uniform_radial)
            return rng.uniform(cm.mean - escape_half_width, cm.mean + escape_half_width);
        return cm.mean + course(rng);
    }

    TruncatedGaussian speed;
    TruncatedGaussian leg;
    TruncatedGaussian course; // deviation about the course mean
    double escape_half_width;
};

/// Deflects `course` onto the nearer tangent of the disk of radius `radius`
/// around `center` when the course would enter it; otherwise returns it unchanged.
double avoid_disk(const Vec2& from, double course, const Vec2& center, double radius)
{
    const Vec2 to = center - from;
    const double d = norm(to);
    if (d <= radius)
        return course;
    const double bearing = heading(to);
    const double half_cone = std::asin(radius / d);
    const double off = wrap_angle(course - bearing);
    if (std::abs(off) >= half_cone)
        return course;
    return off >= 0.0 ? bearing + half_cone : bearing - half_cone;
}

} // namespace

void DynamicsParams::validate() const
{
    if (!(leg_mean > 0.0))
        throw InvalidSpecError("leg_mean must be > 0");
    if (!(leg_std >= 0.0) || !(leg_half_width > 0.0))
        throw InvalidSpecError("leg_std must be >= 0 and leg_half_width > 0");
    if (!(course_std >= 0.0) || !(course_half_width > 0.0))
        throw InvalidSpecError("course_std must be >= 0 and course_half_width > 0");
    if (!(escape_half_width >= 0.0))
        throw InvalidSpecError("escape_half_width must be >= 0");
    if (!(start_sigma > 0.0))
        throw InvalidSpecError("start_sigma must be > 0");
    if (!(speed_mean > 0.0) || !(speed_std >= 0.0) || !(speed_half_width > 0.0))
        throw InvalidSpecError("speed_mean and speed_half_width must be > 0, speed_std >= 0");
}

Vec2 Trajectory::position_at(double t) const
{
    if (waypoints.empty())
        return {};
    auto it = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                               [](double v, const Waypoint& w) { return v < w.time; });
    if (it == waypoints.begin())
        return waypoints.front().position;
    const Waypoint& w = *std::prev(it);
    const double end = waypoints.back().time;
    return w.position + (std::min(t, end) - w.time) * w.velocity;
}

Waypoint transition(const Waypoint& y, double dt)
{
    return {y.position + dt * y.velocity, y.velocity, y.time + dt};
}

Waypoint apply_course(const Waypoint& y, double beta) { return {y.position, rotate(y.velocity, beta), y.time}; }

CourseMean next_course_mean(const IntelligenceState& state, const Waypoint& y, double memory_course,
                            const Solution& solution, const SensorSpec& spec)
{
    switch (state.mu) {
    case Awareness::unaware:
        return {memory_course, CourseLaw::truncated_gaussian};
    case Awareness::avoiding: {
        const Vec2 threat = solution.sensors.at(*state.threat).position;
        const double d = distance(y.position, threat);
        // Outside the counter-detection circle steer around it; inside it the
        // detection circle is the one that still matters.
        const double radius = d > spec.counter_detection_radius ? spec.counter_detection_radius : spec.detection_radius;
        return {avoid_disk(y.position, memory_course, threat, radius), CourseLaw::truncated_gaussian};
    }
    case Awareness::escaping: {
        const Vec2 threat = solution.sensors.at(*state.threat).position;
        const Vec2 away = y.position - threat;
        const double bearing = norm(away) > 0.0 ? heading(away) : memory_course;
        return {bearing, CourseLaw::uniform_radial};
    }
    }
    return {memory_course, CourseLaw::truncated_gaussian};
}

Trajectory generate_trajectory(const Solution& solution, const ConstraintSet& constraints,
                               const DynamicsParams& params, Stream& rng, int stop_after_detections,
                               bool stop_after_last_ping)
{
    const ConvexPolygon& area = constraints.theater.area;
    const double T = constraints.theater.horizon;
    const std::vector<Ping> pings = collect_pings(solution);
    std::size_t next_ping = 0;

    Trajectory traj;
    IntelligenceState state;
    int detections = 0;

    if (stop_after_last_ping && pings.empty())
        return traj;
    Vec2 pos = sample_start(constraints, params, rng);
    const double initial_course = params.initial_course.value_or(rng.uniform(0.0, 2.0 * std::numbers::pi));
    const Laws laws(params);
    double speed = laws.speed(rng);
    Vec2 vel = speed * unit_from_heading(initial_course);
    double t = 0.0;

    auto emit = [&](double at) {
        if (!traj.waypoints.empty() && traj.waypoints.back().time >= at) {
            traj.waypoints.back().velocity = vel;
            return;
        }
        traj.waypoints.push_back({pos, vel, at});
    };
    auto memory_course = [&] {
        return params.course_memory == CourseMemory::initial_course ? initial_course : heading(vel);
    };
    auto new_course = [&] {
        const Waypoint here{pos, vel, t};
        const double course = laws.sample_course(next_course_mean(state, here, memory_course(), solution, constraints.spec), rng);
        if (params.speed_per_leg)
            speed = laws.speed(rng);
        vel = speed * unit_from_heading(course);
    };

    emit(0.0);
    while (t < T) {
        double leg_end = std::min(t + laws.leg(rng), T);
        if (T - leg_end < time_eps)
            leg_end = T;

        int bounces = 0;
        while (t < leg_end) {
            const double ping_time = next_ping < pings.size() ? pings[next_ping].time : T + 1.0;
            const ConvexPolygon::Exit exit = area.exit_time(pos, vel);
            const double wall_time = t + exit.time;
            const double stop = std::min({leg_end, std::max(ping_time, t), wall_time});

            pos += (stop - t) * vel;
            t = stop;

            if (stop == wall_time && stop < leg_end && stop < ping_time && bounces < max_bounces_per_leg) {
                for (std::size_t e : exit.edges())
                    vel = area.reflect(vel, e);
                ++bounces;
                emit(t);
                continue;
            }
            if (ping_time <= t && next_ping < pings.size()) {
                // Every ping at this instant is tested before the target reacts.
                bool contact = false;
                Contact worst = Contact::none;
                std::size_t worst_sensor = 0;
                double worst_dist = 0.0;
                while (next_ping < pings.size() && pings[next_ping].time <= t) {
                    const std::size_t idx = pings[next_ping].sensor;
                    ++next_ping;
                    const Sensor& s = solution.sensors[idx];
                    const Contact c = ping_outcome(s, constraints.spec, pos);
                    if (c == Contact::none)
                        continue;
                    contact = true;
                    traj.events.push_back({t, idx, c});
                    if (c == Contact::detection)
                        ++detections;
                    const double d = distance(s.position, pos);
                    if (static_cast<int>(c) > static_cast<int>(worst) || (c == worst && d < worst_dist)) {
                        worst = c;
                        worst_sensor = idx;
                        worst_dist = d;
                    }
                }
                if (contact) {
                    if (params.reactive) {
                        if (worst == Contact::detection)
                            state.mu = Awareness::escaping;
                        else if (state.mu == Awareness::unaware)
                            state.mu = Awareness::avoiding;
                        state.threat = worst_sensor;
                        new_course();
                    }
                    emit(t);
                    if (stop_after_detections > 0 && detections >= stop_after_detections)
                        return traj;
                }
                if (stop_after_last_ping && next_ping == pings.size())
                    return traj;
                continue;
            }
            if (stop == wall_time && stop < leg_end) {
                // Bounce budget exhausted in a degenerate corner: stop moving for the leg.
                vel = {0.0, 0.0};
                emit(t);
            }
        }
        if (t >= T)
            break;
        new_course();
        emit(t);
    }
    emit(T);
    return traj;
}

} // namespace gsres
