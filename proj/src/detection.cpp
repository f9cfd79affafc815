#include <gsres/detection.hpp>
#include <gsres/parallel.hpp>

#include <algorithm>
#include <cmath>

namespace gsres {

std::optional<double> relative_error(double value, std::int64_t n)
{
    if (!(value > 0.0) || n <= 0)
        return std::nullopt;
    return std::sqrt(1.0 - value) / std::sqrt(static_cast<double>(n) * value);
}

void DetectionCriteria::validate() const
{
    if (min_detections < 1)
        throw InvalidSpecError("min_detections must be >= 1");
    if (max_avoidances && *max_avoidances < 0)
        throw InvalidSpecError("max_avoidances must be >= 0");
}

Contact ping_outcome(const Sensor& sensor, const SensorSpec& spec, const Vec2& target_position)
{
    const double d = distance(sensor.position, target_position);
    if (d <= spec.detection_radius)
        return Contact::detection;
    if (d <= spec.counter_detection_radius)
        return Contact::counter_detection;
    return Contact::none;
}

bool criteria_met(const std::vector<ContactEvent>& events, const DetectionCriteria& criteria)
{
    int detections = 0;
    int avoidances = 0;
    for (const auto& e : events) {
        if (e.kind == Contact::detection)
            ++detections;
        else if (e.kind == Contact::counter_detection)
            ++avoidances;
    }
    if (detections < criteria.min_detections)
        return false;
    return !criteria.max_avoidances || avoidances <= *criteria.max_avoidances;
}

int cost_f(const Trajectory& trajectory, const Solution& solution, const ConstraintSet& constraints,
           const DetectionCriteria& criteria)
{
    if (!is_feasible(solution, constraints))
        return 0;
    return criteria_met(trajectory.events, criteria) ? 1 : 0;
}

std::vector<ContactEvent> replay_events(const Trajectory& trajectory, const Solution& solution, const SensorSpec& spec)
{
    std::vector<ContactEvent> events;
    for (std::size_t i = 0; i < solution.sensors.size(); ++i) {
        const Sensor& s = solution.sensors[i];
        if (!s.active)
            continue;
        for (double t : s.activations) {
            const Contact c = ping_outcome(s, spec, trajectory.position_at(t));
            if (c != Contact::none)
                events.push_back({t, i, c});
        }
    }
    std::stable_sort(events.begin(), events.end(), [](const ContactEvent& a, const ContactEvent& b) {
        return a.time < b.time || (a.time == b.time && a.sensor < b.sensor);
    });
    return events;
}

ScoreEstimate estimate_score(const Solution& solution, const ConstraintSet& constraints, const DynamicsParams& params,
                             const DetectionCriteria& criteria, std::int64_t n, std::uint64_t root, int threads)
{
    Scorer scorer(constraints, params, criteria, n);
    if (threads <= 1)
        return scorer.score(solution, root);

    ScoreEstimate out;
    out.n_trajectories = n;
    if (!is_feasible(solution, constraints) || solution.active_count() == 0)
        return out;

    const int max_detections = criteria.max_avoidances ? 0 : criteria.min_detections;
    std::vector<char> hit(static_cast<std::size_t>(n), 0);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        Stream rng(derive_seed(root, {i}));
        const Trajectory traj = generate_trajectory(solution, constraints, params, rng, max_detections, true);
        hit[i] = criteria_met(traj.events, criteria) ? 1 : 0;
    });
    const auto hits = std::count(hit.begin(), hit.end(), 1);
    out.value = static_cast<double>(hits) / static_cast<double>(n);
    out.relative_error = relative_error(out.value, n);
    return out;
}

Scorer::Scorer(ConstraintSet constraints, DynamicsParams params, DetectionCriteria criteria, std::int64_t n)
    : _constraints(std::move(constraints)), _params(std::move(params)), _criteria(criteria), _n(n)
{
    if (_n < 1)
        throw InvalidSpecError("number of trajectories must be >= 1");
}

void Scorer::use_fixed_bank(std::int64_t bank_size, std::uint64_t bank_seed)
{
    if (_params.reactive)
        throw InvalidSpecError("a fixed trajectory bank requires a myopic (non-reactive) target");
    if (bank_size < 1)
        throw InvalidSpecError("trajectory bank size must be >= 1");
    _bank.clear();
    _bank.reserve(static_cast<std::size_t>(bank_size));
    const Solution empty;
    for (std::int64_t i = 0; i < bank_size; ++i) {
        Stream rng(derive_seed(bank_seed, {static_cast<std::uint64_t>(i)}));
        _bank.push_back(generate_trajectory(empty, _constraints, _params, rng));
    }
    _n = bank_size;
}

std::vector<ContactEvent> Scorer::events_for(const Solution& solution, std::uint64_t seed, std::int64_t i,
                                             bool full) const
{
    if (!_bank.empty())
        return replay_events(_bank[static_cast<std::size_t>(i)], solution, _constraints.spec);
    Stream rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    const int stop = full ? 0 : (_criteria.max_avoidances ? 0 : _criteria.min_detections);
    return generate_trajectory(solution, _constraints, _params, rng, stop, true).events;
}

bool Scorer::detected(const Solution& solution, std::uint64_t seed, std::int64_t i) const
{
    return criteria_met(events_for(solution, seed, i, false), _criteria);
}

ScoreEstimate Scorer::score(const Solution& solution, std::uint64_t seed) const
{
    ScoreEstimate out;
    out.n_trajectories = _n;
    if (!is_feasible(solution, _constraints) || solution.active_count() == 0)
        return out;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < _n; ++i)
        hits += detected(solution, seed, i) ? 1 : 0;
    out.value = static_cast<double>(hits) / static_cast<double>(_n);
    out.relative_error = relative_error(out.value, _n);
    return out;
}

std::optional<double> Scorer::score_at_least(const Solution& solution, std::uint64_t seed, double threshold) const
{
    if (!is_feasible(solution, _constraints))
        return std::nullopt;
    const auto n = static_cast<double>(_n);
    if (solution.active_count() == 0)
        return 0.0 >= threshold ? std::optional<double>(0.0) : std::nullopt;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < _n; ++i) {
        if (static_cast<double>(hits + (_n - i)) / n < threshold)
            return std::nullopt;
        hits += detected(solution, seed, i) ? 1 : 0;
    }
    const double value = static_cast<double>(hits) / n;
    if (value < threshold)
        return std::nullopt;
    return value;
}

std::vector<std::optional<std::size_t>> Scorer::first_detections(const Solution& solution, std::uint64_t seed) const
{
    std::vector<std::optional<std::size_t>> out(static_cast<std::size_t>(_n));
    if (solution.active_count() == 0)
        return out;
    for (std::int64_t i = 0; i < _n; ++i) {
        const auto events = events_for(solution, seed, i, true);
        if (criteria_met(events, _criteria)) {
            for (const auto& e : events) {
                if (e.kind == Contact::detection) {
                    out[static_cast<std::size_t>(i)] = e.sensor;
                    break;
                }
            }
        }
    }
    return out;
}

} // namespace gsres
