#pragma once

#include <gsres/random.hpp>
#include <gsres/scenario.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace gsres {

/// Target state at the start of a leg: position, outgoing velocity, absolute time.
struct Waypoint {
    Vec2 position;
    Vec2 velocity;
    double time = 0.0;
};

enum class Contact { none, counter_detection, detection };

struct ContactEvent {
    double time = 0.0;
    std::size_t sensor = 0;
    Contact kind = Contact::none;
};

struct Trajectory {
    std::vector<Waypoint> waypoints;
    std::vector<ContactEvent> events; // time order

    std::size_t point_count() const { return waypoints.size(); }
    double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().time - waypoints.front().time; }
    /// Position at absolute time t, clamped to the trajectory's time span.
    Vec2 position_at(double t) const;
};

enum class Awareness : int { unaware = 0, avoiding = 1, escaping = 2 };

struct IntelligenceState {
    Awareness mu = Awareness::unaware;
    std::optional<std::size_t> threat;
};

enum class CourseMemory { initial_course, last_course };
enum class CourseLaw { truncated_gaussian, uniform_radial };
enum class StartMode { uniform, gaussian };

struct DynamicsParams {
    // Leg durations, seconds.
    double leg_mean = 600.0;
    double leg_std = 200.0;
    double leg_half_width = 400.0;

    // Course changes, radians.
    double course_std = 0.3;
    double course_half_width = 0.6;
    double escape_half_width = 0.7853981633974483; // pi/4
    CourseMemory course_memory = CourseMemory::last_course;
    /// Fixed initial course; drawn uniformly on [0, 2 pi) when unset.
    std::optional<double> initial_course;

    StartMode start_mode = StartMode::gaussian;
    std::optional<Vec2> start_center; // defaults to the theater centroid
    double start_sigma = 1000.0;

    double speed_mean = 4.0;
    double speed_std = 0.5;
    double speed_half_width = 1.5;
    bool speed_per_leg = false;

    /// A myopic target ignores contacts; its trajectory law does not depend on the solution.
    bool reactive = true;

    void validate() const;
};

/// Rectilinear transition: position advanced by velocity * dt, velocity kept.
Waypoint transition(const Waypoint& y, double dt);

/// Rotates the velocity by `beta`, keeping speed, position and time.
Waypoint apply_course(const Waypoint& y, double beta);

struct CourseMean {
    double mean;
    CourseLaw law;
};

/// Mean and law of the next course given what the target knows.
/// `memory_course` is the course the target would hold if unaware (initial or last course).
CourseMean next_course_mean(const IntelligenceState& state, const Waypoint& y, double memory_course,
                            const Solution& solution, const SensorSpec& spec);

/// Samples a complete trajectory on [0, T]. Pings are tested only at activation
/// instants; a contact splits the current leg and, for a reactive target, updates
/// its awareness and course. The target reflects off the theater boundary.
/// When `stop_after_detections` is positive generation stops once that many
/// detections are recorded, and `stop_after_last_ping` stops it after the last
/// ping; either way the trajectory is truncated but its events are complete.
Trajectory generate_trajectory(const Solution& solution, const ConstraintSet& constraints,
                               const DynamicsParams& params, Stream& rng, int stop_after_detections = 0,
                               bool stop_after_last_ping = false);

} // namespace gsres
