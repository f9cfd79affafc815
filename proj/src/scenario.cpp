#include <gsres/scenario.hpp>

#include <algorithm>

namespace gsres {

void Theater::validate() const
{
    if (area.size() < 3)
        throw InvalidSpecError("theater needs a convex polygon with at least 3 vertices");
    if (!(horizon > 0.0))
        throw InvalidSpecError("horizon must be > 0");
    if (!(hunter_delay >= 0.0 && hunter_delay < horizon))
        throw InvalidSpecError("hunter_delay must be in [0, horizon)");
}

void SensorSpec::validate() const
{
    if (!(detection_radius > 0.0))
        throw InvalidSpecError("detection_radius must be > 0");
    if (!(counter_detection_radius > detection_radius))
        throw InvalidSpecError("counter_detection_radius must exceed detection_radius");
    if (max_activations < 1)
        throw InvalidSpecError("max_activations must be >= 1");
    if (!(carrier_speed > 0.0))
        throw InvalidSpecError("carrier_speed must be > 0");
}

void ConstraintSet::validate() const
{
    theater.validate();
    spec.validate();
    if (max_sensors < 1)
        throw InvalidSpecError("max_sensors must be >= 1");
    if (carrier_entry && !theater.area.contains(*carrier_entry))
        throw InvalidSpecError("carrier_entry must lie inside the theater");
}

int Solution::active_count() const
{
    return static_cast<int>(std::count_if(sensors.begin(), sensors.end(), [](const Sensor& s) { return s.active; }));
}

std::vector<std::size_t> Solution::active_indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sensors.size(); ++i)
        if (sensors[i].active)
            out.push_back(i);
    return out;
}

bool contains(const Theater& theater, const Vec2& p) { return theater.area.contains(p); }

Solution compute_setup_times(Solution solution, const ConstraintSet& constraints)
{
    const Vec2 entry = constraints.entry();
    return compute_setup_times(std::move(solution), constraints, entry);
}

Solution compute_setup_times(Solution solution, const ConstraintSet& constraints, const Vec2& carrier_entry)
{
    const double speed = constraints.spec.carrier_speed;
    if (!(speed > 0.0))
        throw InvalidSpecError("carrier_speed must be > 0");

    Vec2 at = carrier_entry;
    double travelled = 0.0;
    for (auto& s : solution.sensors) {
        if (!s.active) {
            s.setup_time = 0.0;
            continue;
        }
        travelled += distance(at, s.position);
        at = s.position;
        s.setup_time = constraints.theater.hunter_delay + travelled / speed;
    }
    return solution;
}

std::optional<std::string> feasibility_violation(const Solution& solution, const ConstraintSet& constraints)
{
    if (static_cast<int>(solution.sensors.size()) > constraints.max_sensors)
        return "sensor count exceeds max_sensors";

    const double T = constraints.theater.horizon;
    const double speed = constraints.spec.carrier_speed;
    Vec2 at = constraints.entry();
    double travelled = 0.0;
    for (const auto& s : solution.sensors) {
        if (!s.active)
            continue;
        if (!contains(constraints.theater, s.position))
            return "sensor outside the theater";
        const int np = s.activation_count();
        if (np < 1 || np > constraints.spec.max_activations)
            return "activation count outside [1, max_activations]";
        travelled += distance(at, s.position);
        at = s.position;
        const double setup = constraints.theater.hunter_delay + travelled / speed;
        for (std::size_t k = 0; k < s.activations.size(); ++k) {
            const double t = s.activations[k];
            if (k > 0 && !(t > s.activations[k - 1]))
                return "activations not strictly increasing";
            if (t < setup)
                return "activation before sensor setup";
            if (t > T)
                return "activation after horizon";
        }
    }
    return std::nullopt;
}

} // namespace gsres
