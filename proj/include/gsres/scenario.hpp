#pragma once

#include <gsres/geometry.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsres {

struct InvalidSpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Operational theater: convex search area, horizon and hunter arrival delay.
struct Theater {
    ConvexPolygon area;
    double horizon = 0.0;      // T, seconds
    double hunter_delay = 0.0; // seconds before the first sensor can be set up

    void validate() const;
};

/// Shared by every sensor of a scenario.
struct SensorSpec {
    double detection_radius = 0.0;
    double counter_detection_radius = 0.0;
    int max_activations = 1;
    double carrier_speed = 0.0;

    void validate() const;
};

struct Sensor {
    Vec2 position;
    std::vector<double> activations; // strictly increasing when active
    double setup_time = 0.0;
    bool active = true;

    int activation_count() const { return static_cast<int>(activations.size()); }
    double first_activation() const { return activations.empty() ? -1.0 : activations.front(); }
};

/// Decision variable: sensors in deployment order. Inactive sensors keep their
/// slot but are ignored by scoring and by the carrier route.
struct Solution {
    std::vector<Sensor> sensors;

    int active_count() const;
    std::vector<std::size_t> active_indices() const;
};

struct ConstraintSet {
    Theater theater;
    SensorSpec spec;
    int max_sensors = 1;
    std::optional<Vec2> carrier_entry; // defaults to the theater centroid

    Vec2 entry() const { return carrier_entry.value_or(theater.area.centroid()); }
    void validate() const;
};

bool contains(const Theater& theater, const Vec2& p);

/// Sets every active sensor's setup time to the hunter delay plus the carrier's
/// cumulative travel time from the entry point through the active sensors in
/// list order. Inactive sensors get setup time 0.
Solution compute_setup_times(Solution solution, const ConstraintSet& constraints);
Solution compute_setup_times(Solution solution, const ConstraintSet& constraints, const Vec2& carrier_entry);

/// First violated constraint, or nullopt. Setup times are derived from the
/// positions, not trusted from the input.
std::optional<std::string> feasibility_violation(const Solution& solution, const ConstraintSet& constraints);

inline bool is_feasible(const Solution& solution, const ConstraintSet& constraints)
{
    return !feasibility_violation(solution, constraints).has_value();
}

} // namespace gsres
