#include <gsres/parallel.hpp>
#include <gsres/splitting.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace gsres {

namespace {

enum Tag : std::uint64_t { tag_init = 1, tag_eval = 2, tag_repop = 3, tag_sweep = 4 };

std::vector<std::size_t> ranking(const std::vector<ScoredSolution>& members)
{
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return members[a].score > members[b].score; });
    return order;
}

void score_moments(const std::vector<ScoredSolution>& members, double& mean, double& std)
{
    mean = 0.0;
    for (const auto& m : members)
        mean += m.score;
    mean /= static_cast<double>(members.size());
    double var = 0.0;
    for (const auto& m : members)
        var += (m.score - mean) * (m.score - mean);
    std = std::sqrt(var / static_cast<double>(members.size()));
}

/// Threshold and best-of-population after (re)scoring.
void rank_population(PopulationState& state)
{
    const auto order = ranking(state.members);
    state.gamma = state.members[order[static_cast<std::size_t>(state.elite_count) - 1]].score;
    state.best_current = state.members[order.front()];
}

IterationRecord make_record(const PopulationState& state, const MoveStats& stats, int burn_in)
{
    IterationRecord r;
    r.iteration = state.iteration;
    r.gamma = state.gamma;
    r.gamma_next = state.gamma;
    r.best_current = state.best_current.score;
    r.best_ever = state.best_ever.score;
    score_moments(state.members, r.mean_score, r.std_score);
    if (state.iteration > 0 && !state.c_hats.empty()) {
        r.c_hat = state.c_hats.back();
        r.rare_event_probability = rare_event_probability(state);
    }
    r.burn_in = burn_in;
    r.elite_count = state.elite_count;
    r.population = static_cast<int>(state.members.size());
    r.moves = stats;
    return r;
}

} // namespace

void Scenario::validate() const
{
    constraints.validate();
    dynamics.validate();
    criteria.validate();
    if (trajectory_bank < 0)
        throw InvalidSpecError("trajectory_bank must be >= 0");
    if (trajectory_bank > 0 && dynamics.reactive)
        throw InvalidSpecError("trajectory_bank requires a myopic target (dynamics.reactive = false)");
}

int SplittingConfig::elite_count() const { return static_cast<int>(std::floor(rho * population)); }

int SplittingConfig::burn_in(int iteration) const
{
    return static_cast<int>(std::lround(b0 + alpha * iteration));
}

void SplittingConfig::validate() const
{
    if (population < 1)
        throw ConfigError("population must be >= 1");
    if (!(rho > 0.0 && rho < 1.0))
        throw ConfigError("rho must be in (0,1)");
    if (elite_count() < 1)
        throw ConfigError("floor(rho * population) must be >= 1");
    if (max_iterations < 0)
        throw ConfigError("max_iterations must be >= 0");
    if (!(b0 >= 0.0))
        throw ConfigError("b0 must be >= 0");
    if (!(alpha >= 0.0))
        throw ConfigError("alpha must be >= 0");
    if (stagnation_patience < 1)
        throw ConfigError("stagnation_patience must be >= 1");
    if (!(stagnation_decrease > 0.0 && stagnation_decrease < 1.0))
        throw ConfigError("stagnation_decrease must be in (0,1)");
    if (n_trajectories < 1)
        throw ConfigError("n_trajectories must be >= 1");
    if (max_retries < 1)
        throw ConfigError("max_retries must be >= 1");
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
    if (sensor_count < 0)
        throw ConfigError("sensor_count must be >= 0");
    if (!(carrier_step > 0.0))
        throw ConfigError("carrier_step must be > 0");
    if (!(time_budget_s >= 0.0))
        throw ConfigError("time_budget_s must be >= 0");
    try {
        weights.validate();
        moves.move_sensor.validate();
    }
    catch (const InvalidSpecError& e) {
        throw ConfigError(e.what());
    }
}

Scorer make_scorer(const Scenario& scenario, std::int64_t n)
{
    Scorer scorer(scenario.constraints, scenario.dynamics, scenario.criteria, n);
    if (scenario.trajectory_bank > 0)
        scorer.use_fixed_bank(scenario.trajectory_bank, scenario.bank_seed);
    return scorer;
}

Solution sample_initial_solution(const SplittingConfig& config, const ConstraintSet& constraints, Stream& rng)
{
    const int count = config.sensor_count > 0
                          ? std::min(config.sensor_count, constraints.max_sensors)
                          : 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(constraints.max_sensors)));
    Solution s;
    Vec2 at = constraints.entry();
    for (int k = 0; k < count; ++k) {
        const Vec2 step{rng.normal(0.0, config.carrier_step), rng.normal(0.0, config.carrier_step)};
        at = constraints.theater.area.travel(at, step);
        Sensor sensor;
        sensor.position = at;
        s.sensors.push_back(sensor);
    }
    s = compute_setup_times(std::move(s), constraints);

    const double T = constraints.theater.horizon;
    for (auto& sensor : s.sensors) {
        const auto np = 1 + rng.index(static_cast<std::uint64_t>(constraints.spec.max_activations));
        if (sensor.setup_time > T) {
            sensor.activations = {sensor.setup_time};
            continue;
        }
        for (std::uint64_t k = 0; k < np; ++k)
            sensor.activations.push_back(rng.uniform(sensor.setup_time, T));
        std::sort(sensor.activations.begin(), sensor.activations.end());
    }
    return s;
}

PopulationState initialize(const SplittingConfig& config, const Scorer& scorer)
{
    config.validate();
    const auto C = static_cast<std::size_t>(config.population);
    const ConstraintSet& constraints = scorer.constraints();

    PopulationState state;
    state.elite_count = config.elite_count();
    state.members.resize(C);

    std::vector<std::string> failures(C);
    parallel_for(C, config.threads, [&](std::size_t i) {
        Stream rng(derive_seed(config.seed, {tag_init, i}));
        std::optional<std::string> violation;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Solution candidate = sample_initial_solution(config, constraints, rng);
            violation = feasibility_violation(candidate, constraints);
            if (!violation) {
                state.members[i].solution = std::move(candidate);
                state.members[i].score = scorer.score(state.members[i].solution, derive_seed(config.seed, {tag_eval, 0, i})).value;
                return;
            }
        }
        failures[i] = *violation;
    });
    for (const auto& f : failures)
        if (!f.empty())
            throw ConfigError("cannot sample a feasible initial solution: " + f);

    rank_population(state);
    state.best_ever = state.best_current;
    return state;
}

std::vector<ScoredSolution> select_elites(PopulationState& state)
{
    const auto order = ranking(state.members);
    const auto C = state.members.size();
    const auto above = std::count_if(state.members.begin(), state.members.end(),
                                     [&](const ScoredSolution& m) { return m.score >= state.gamma; });
    state.c_hats.push_back(static_cast<double>(above) / static_cast<double>(C));

    std::vector<ScoredSolution> elites;
    elites.reserve(static_cast<std::size_t>(state.elite_count));
    for (int k = 0; k < state.elite_count; ++k)
        elites.push_back(state.members[order[static_cast<std::size_t>(k)]]);
    return elites;
}

std::vector<ScoredSolution> repopulate_bootstrap(const std::vector<ScoredSolution>& elites, std::size_t count, Stream& rng)
{
    std::vector<ScoredSolution> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(elites[rng.index(elites.size())]);
    return out;
}

std::vector<std::size_t> adam_multiplicities(std::size_t elites, std::size_t count, Stream& rng)
{
    std::vector<std::size_t> copies(elites, count / elites);
    const std::size_t r = count % elites;
    // Uniform r-subset by partial Fisher-Yates: every binary vector with r ones is equally likely.
    std::vector<std::size_t> idx(elites);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t k = 0; k < r; ++k) {
        const std::size_t j = k + rng.index(elites - k);
        std::swap(idx[k], idx[j]);
        ++copies[idx[k]];
    }
    return copies;
}

std::vector<ScoredSolution> repopulate_adam(const std::vector<ScoredSolution>& elites, std::size_t count, Stream& rng)
{
    const auto copies = adam_multiplicities(elites.size(), count, rng);
    std::vector<ScoredSolution> out;
    out.reserve(count);
    for (std::size_t i = 0; i < elites.size(); ++i)
        for (std::size_t c = 0; c < copies[i]; ++c)
            out.push_back(elites[i]);
    return out;
}

PopulationState iterate(PopulationState state, const SplittingConfig& config, const Scorer& scorer, MoveStats* stats)
{
    const int l = state.iteration + 1;
    const auto C = state.members.size();
    const double threshold = state.gamma;
    const double previous_best = state.best_ever.score;

    const auto elites = select_elites(state);
    state.last_elite_floor = elites.back().score;
    Stream repop_rng(derive_seed(config.seed, {tag_repop, static_cast<std::uint64_t>(l)}));
    auto clones = config.repopulation == Repopulation::bootstrap ? repopulate_bootstrap(elites, C, repop_rng)
                                                                  : repopulate_adam(elites, C, repop_rng);

    SweepSettings settings;
    settings.threshold = threshold;
    settings.updates = config.burn_in(l);
    settings.weights = config.weights;
    settings.options = config.moves;
    settings.options.w_small_override = config.moves.move_sensor.weight_at(l, config.max_iterations);
    settings.max_retries = config.max_retries;
    settings.scan = config.scan;

    std::vector<MoveStats> per_member(C);
    parallel_for(C, config.threads, [&](std::size_t i) {
        Stream rng(derive_seed(config.seed, {tag_sweep, static_cast<std::uint64_t>(l), i}));
        const std::uint64_t eval_seed = derive_seed(config.seed, {tag_eval, static_cast<std::uint64_t>(l), i});
        SweepResult res = gibbs_sweep(clones[i].solution, settings, scorer, eval_seed, rng, per_member[i]);
        if (res.score)
            clones[i].score = *res.score;
        else if (config.rescore_all)
            clones[i].score = scorer.score(res.solution, eval_seed).value;
        clones[i].solution = std::move(res.solution);
    });

    MoveStats merged;
    for (const auto& s : per_member)
        merged += s;
    if (stats)
        *stats = merged;

    state.members = std::move(clones);
    state.iteration = l;
    rank_population(state);
    state.improved_gamma = state.gamma > threshold;
    state.improved_best = state.best_current.score > previous_best;
    if (state.improved_best)
        state.best_ever = state.best_current;
    state.unchanged_best_iterations = state.improved_best ? 0 : state.unchanged_best_iterations + 1;
    state.threshold_decreased = false;
    return state;
}

PopulationState check_stagnation_and_decrease(PopulationState state, const SplittingConfig& config)
{
    state.threshold_decreased = false;
    if (state.improved_best || state.improved_gamma) {
        state.stalled_iterations = 0;
        return state;
    }
    if (++state.stalled_iterations >= config.stagnation_patience) {
        state.gamma *= config.stagnation_decrease;
        state.stalled_iterations = 0;
        state.threshold_decreased = true;
    }
    return state;
}

double rare_event_probability(const PopulationState& state)
{
    if (state.c_hats.empty())
        throw std::logic_error("rare_event_probability needs at least one completed iteration");
    double p = 1.0;
    for (double c : state.c_hats)
        p *= c;
    return p;
}

RunResult run(const SplittingConfig& config, const Scenario& scenario, const RunOptions& options)
{
    config.validate();
    scenario.validate();
    const auto started = std::chrono::steady_clock::now();
    const Scorer scorer = make_scorer(scenario, config.n_trajectories);

    RunResult result;
    RunTrace& trace = result.trace;
    trace.seed = config.seed;

    auto snapshot = [&](const PopulationState& s) {
        trace.histograms.push_back(score_histogram(s.members, s.iteration));
        trace.densities.push_back(density_summary(s.members, scenario.constraints, s.iteration));
    };
    auto wants_snapshot = [&](int l) {
        return std::find(options.snapshot_iterations.begin(), options.snapshot_iterations.end(), l) !=
               options.snapshot_iterations.end();
    };
    auto publish = [&](IterationRecord record) {
        trace.records.push_back(record);
        if (options.on_record)
            options.on_record(trace.records.back());
    };

    PopulationState state = initialize(config, scorer);
    for (const auto& m : state.members)
        trace.initial_scores.push_back(m.score);
    publish(make_record(state, MoveStats{}, 0));
    if (wants_snapshot(0))
        snapshot(state);

    while (state.iteration < config.max_iterations) {
        if (config.time_budget_s > 0.0) {
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
            if (elapsed.count() >= config.time_budget_s)
                break;
        }
        const double selection_threshold = state.gamma;
        MoveStats stats;
        state = iterate(std::move(state), config, scorer, &stats);
        IterationRecord record = make_record(state, stats, config.burn_in(state.iteration));
        record.selection_threshold = selection_threshold;
        record.min_elite_score = state.last_elite_floor;
        state = check_stagnation_and_decrease(std::move(state), config);
        record.stagnation_event = state.threshold_decreased;
        record.gamma_next = state.gamma;
        publish(record);
        if (wants_snapshot(state.iteration))
            snapshot(state);
        if (state.unchanged_best_iterations >= 3 * config.stagnation_patience)
            break;
    }

    if (trace.densities.empty() || trace.densities.back().iteration != state.iteration)
        snapshot(state);
    for (const auto& m : state.members)
        trace.final_scores.push_back(m.score);
    trace.best = state.best_ever;
    result.best = state.best_ever;
    result.final_state = std::move(state);
    return result;
}

DensitySummary density_summary(const std::vector<ScoredSolution>& population, const ConstraintSet& constraints,
                               int iteration, int grid, int time_bins)
{
    DensitySummary d;
    d.iteration = iteration;
    d.grid_x = grid;
    d.grid_y = grid;
    d.time_bins = time_bins;
    const Box box = constraints.theater.area.bounding_box();
    const double T = constraints.theater.horizon;

    auto bin = [](double v, double lo, double hi, int n) {
        const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * n));
        return std::clamp(b, 0, n - 1);
    };
    for (const auto& member : population) {
        const auto active = member.solution.active_indices();
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (d.spatial.size() <= k) {
                d.spatial.emplace_back(static_cast<std::size_t>(grid * grid), 0);
                d.temporal.emplace_back(static_cast<std::size_t>(time_bins), 0);
            }
            const Sensor& s = member.solution.sensors[active[k]];
            const int ix = bin(s.position.x, box.lo.x, box.hi.x, grid);
            const int iy = bin(s.position.y, box.lo.y, box.hi.y, grid);
            ++d.spatial[k][static_cast<std::size_t>(iy * grid + ix)];
            ++d.temporal[k][static_cast<std::size_t>(bin(s.first_activation(), 0.0, T, time_bins))];
        }
    }
    return d;
}

ScoreHistogram score_histogram(const std::vector<ScoredSolution>& population, int iteration, int bins)
{
    ScoreHistogram h;
    h.iteration = iteration;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (const auto& m : population) {
        const int b = std::clamp(static_cast<int>(std::floor(m.score * bins)), 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

} // namespace gsres
