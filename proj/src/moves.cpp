#include <gsres/moves.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsres {

namespace {

constexpr int max_kind_redraws = 100;

bool single_sensor_move(MoveKind k)
{
    return k == MoveKind::AddActivation || k == MoveKind::RemoveSensor || k == MoveKind::RemoveActivation ||
           k == MoveKind::MoveSensor;
}

std::size_t pick_active(const Solution& s, Stream& rng, std::optional<std::size_t> target)
{
    if (target)
        return *target;
    const auto active = s.active_indices();
    return active[rng.index(active.size())];
}

Vec2 uniform_in(const ConvexPolygon& area, Stream& rng)
{
    const Box box = area.bounding_box();
    for (;;) {
        const Vec2 p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
        if (area.contains(p))
            return p;
    }
}

std::optional<Solution> add_sensor(Solution s, const ConstraintSet& c, Stream& rng)
{
    if (s.active_count() >= c.max_sensors)
        return std::nullopt;
    std::erase_if(s.sensors, [](const Sensor& x) { return !x.active; });
    Sensor fresh;
    fresh.position = uniform_in(c.theater.area, rng);
    fresh.active = true;
    s.sensors.push_back(fresh);
    s = compute_setup_times(std::move(s), c);
    Sensor& added = s.sensors.back();
    const double T = c.theater.horizon;
    // An empty window leaves the activation past T; the feasibility test rejects it.
    added.activations = {added.setup_time <= T ? rng.uniform(added.setup_time, T) : added.setup_time};
    return s;
}

std::optional<Solution> remove_sensor(Solution s, const ConstraintSet& c, Stream& rng, std::optional<std::size_t> target)
{
    if (s.active_count() < 1)
        return std::nullopt;
    Sensor& victim = s.sensors[pick_active(s, rng, target)];
    victim.active = false;
    victim.activations.clear();
    return compute_setup_times(std::move(s), c);
}

} // namespace

std::string_view to_string(MoveKind kind)
{
    switch (kind) {
    case MoveKind::AddSensor: return "add_sensor";
    case MoveKind::AddActivation: return "add_activation";
    case MoveKind::RemoveSensor: return "remove_sensor";
    case MoveKind::RemoveActivation: return "remove_activation";
    case MoveKind::MoveSensor: return "move_sensor";
    case MoveKind::SwapSensors: return "swap_sensors";
    }
    return "unknown";
}

void MoveWeights::validate() const
{
    double sum = 0.0;
    for (double l : lambda) {
        if (!(l >= 0.0))
            throw InvalidSpecError("move weights must be nonnegative");
        sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidSpecError("move weights must sum to 1");
}

MoveKind MoveWeights::draw(Stream& rng) const
{
    const double u = rng.uniform();
    double acc = 0.0;
    int last = 0;
    for (int k = 0; k < move_kind_count; ++k) {
        if (lambda[static_cast<std::size_t>(k)] <= 0.0)
            continue;
        acc += lambda[static_cast<std::size_t>(k)];
        last = k;
        if (u < acc)
            return static_cast<MoveKind>(k);
    }
    return static_cast<MoveKind>(last);
}

MoveWeights MoveWeights::uniform()
{
    MoveWeights w;
    w.lambda.fill(1.0 / move_kind_count);
    return w;
}

MoveWeights MoveWeights::fixed_count()
{
    MoveWeights w;
    w[MoveKind::RemoveSensor] = 0.5;
    w[MoveKind::MoveSensor] = 0.5;
    return w;
}

double MoveSensorParams::weight_at(int iteration, int last_iteration) const
{
    if (!w_small_final || last_iteration <= 0)
        return w_small;
    const double f = std::clamp(static_cast<double>(iteration) / last_iteration, 0.0, 1.0);
    return w_small + f * (*w_small_final - w_small);
}

void MoveSensorParams::validate() const
{
    if (!(w_small >= 0.0 && w_small <= 1.0))
        throw InvalidSpecError("w_small must be in [0, 1]");
    if (w_small_final && !(*w_small_final >= 0.0 && *w_small_final <= 1.0))
        throw InvalidSpecError("w_small_final must be in [0, 1]");
    if (!(sigma_small >= 0.0) || !(sigma_large >= sigma_small))
        throw InvalidSpecError("move sigmas must satisfy 0 <= sigma_small <= sigma_large");
}

MoveCounters& MoveCounters::operator+=(const MoveCounters& o)
{
    proposed += o.proposed;
    accepted += o.accepted;
    rejected_infeasible += o.rejected_infeasible;
    rejected_below_threshold += o.rejected_below_threshold;
    rejected_retry_exhausted += o.rejected_retry_exhausted;
    return *this;
}

MoveCounters MoveStats::total() const
{
    MoveCounters t;
    for (const auto& c : per_move)
        t += c;
    return t;
}

bool MoveStats::conserved() const
{
    return std::all_of(per_move.begin(), per_move.end(), [](const MoveCounters& c) { return c.conserved(); });
}

MoveStats& MoveStats::operator+=(const MoveStats& o)
{
    for (std::size_t k = 0; k < per_move.size(); ++k)
        per_move[k] += o.per_move[k];
    exhausted_updates += o.exhausted_updates;
    return *this;
}

std::optional<Solution> propose(MoveKind kind, const Solution& solution, const ConstraintSet& constraints,
                                const MoveOptions& options, Stream& rng, std::optional<std::size_t> target)
{
    const int P = solution.active_count();
    const int np_max = constraints.spec.max_activations;
    const double T = constraints.theater.horizon;

    switch (kind) {
    case MoveKind::AddSensor:
        return add_sensor(solution, constraints, rng);

    case MoveKind::AddActivation: {
        if (P < 1)
            return std::nullopt;
        Solution s = solution;
        Sensor& sensor = s.sensors[pick_active(s, rng, target)];
        if (sensor.activation_count() >= np_max)
            return std::nullopt;
        const double first = sensor.activations.front();
        sensor.activations.push_back(first <= T ? rng.uniform(first, T) : first);
        std::sort(sensor.activations.begin(), sensor.activations.end());
        return s;
    }

    case MoveKind::RemoveSensor: {
        auto removed = remove_sensor(solution, constraints, rng, target);
        if (!removed || !options.replace_on_remove)
            return removed;
        return add_sensor(std::move(*removed), constraints, rng);
    }

    case MoveKind::RemoveActivation: {
        if (P < 1)
            return std::nullopt;
        Solution s = solution;
        Sensor& sensor = s.sensors[pick_active(s, rng, target)];
        const auto np = static_cast<std::uint64_t>(sensor.activation_count());
        if (np <= 1)
            return std::nullopt;
        // The first activation is never removed.
        const std::uint64_t k = 1 + rng.index(np - 1);
        sensor.activations.erase(sensor.activations.begin() + static_cast<std::ptrdiff_t>(k));
        return s;
    }

    case MoveKind::MoveSensor: {
        if (P < 1)
            return std::nullopt;
        Solution s = solution;
        Sensor& sensor = s.sensors[pick_active(s, rng, target)];
        const double w_small = options.w_small_override.value_or(options.move_sensor.w_small);
        const double sigma =
            rng.uniform() < w_small ? options.move_sensor.sigma_small : options.move_sensor.sigma_large;
        const double dx = rng.normal();
        const double dy = rng.normal();
        sensor.position += Vec2{sigma * dx, sigma * dy};
        return compute_setup_times(std::move(s), constraints);
    }

    case MoveKind::SwapSensors: {
        if (P < 2)
            return std::nullopt;
        Solution s = solution;
        const auto active = s.active_indices();
        const std::size_t a = rng.index(active.size());
        std::size_t b = rng.index(active.size() - 1);
        if (b >= a)
            ++b;
        Sensor& k = s.sensors[active[a]];
        Sensor& r = s.sensors[active[b]];
        k.activations.resize(1);
        r.activations.resize(1);
        std::swap(k.activations.front(), r.activations.front());
        return s;
    }
    }
    return std::nullopt;
}

SweepResult gibbs_sweep(const Solution& solution, const SweepSettings& settings, const Scorer& scorer,
                        std::uint64_t eval_seed, Stream& rng, MoveStats& stats)
{
    SweepResult result{solution, std::nullopt, 0};
    const ConstraintSet& constraints = scorer.constraints();

    const int updates = settings.scan == ScanMode::systematic ? constraints.max_sensors : settings.updates;
    for (int u = 0; u < updates; ++u) {
        std::optional<std::size_t> target;
        if (settings.scan == ScanMode::systematic) {
            const auto active = result.solution.active_indices();
            if (static_cast<std::size_t>(u) < active.size())
                target = active[static_cast<std::size_t>(u)];
        }

        // Draw a kind whose precondition holds; only its random values are redrawn on retries.
        MoveKind kind{};
        std::optional<Solution> candidate;
        for (int redraw = 0; redraw < max_kind_redraws && !candidate; ++redraw) {
            kind = settings.weights.draw(rng);
            const auto pin = single_sensor_move(kind) ? target : std::nullopt;
            candidate = propose(kind, result.solution, constraints, settings.options, rng, pin);
        }
        if (!candidate) {
            ++stats.exhausted_updates;
            continue;
        }

        bool accepted = false;
        MoveCounters& counters = stats[kind];
        for (int attempt = 0; attempt < settings.max_retries; ++attempt) {
            if (attempt > 0) {
                const auto pin = single_sensor_move(kind) ? target : std::nullopt;
                candidate = propose(kind, result.solution, constraints, settings.options, rng, pin);
            }
            ++counters.proposed;
            if (!candidate) {
                ++counters.rejected_retry_exhausted;
                continue;
            }
            if (!is_feasible(*candidate, constraints)) {
                ++counters.rejected_infeasible;
                continue;
            }
            const auto score = scorer.score_at_least(*candidate, eval_seed, settings.threshold);
            if (!score) {
                ++counters.rejected_below_threshold;
                continue;
            }
            ++counters.accepted;
            result.solution = std::move(*candidate);
            result.score = score;
            ++result.accepted_updates;
            accepted = true;
            break;
        }
        if (!accepted)
            ++stats.exhausted_updates;
    }
    return result;
}

} // namespace gsres
