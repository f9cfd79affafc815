#pragma once

#include <gsres/moves.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gsres {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything that defines the search problem, independent of the optimiser.
struct Scenario {
    ConstraintSet constraints;
    DynamicsParams dynamics;
    DetectionCriteria criteria;
    /// Myopic targets only: score every solution on one fixed set of trajectories.
    std::int64_t trajectory_bank = 0;
    std::uint64_t bank_seed = 1;

    void validate() const;
    /// Centre the spiral analysis winds around: the target's a priori start.
    Vec2 datum() const { return dynamics.start_center.value_or(constraints.theater.area.centroid()); }
};

enum class Repopulation { bootstrap, adam_cloning };

struct SplittingConfig {
    int population = 100; // C
    double rho = 0.1;
    int max_iterations = 20; // L_max
    double b0 = 2.0;
    double alpha = 0.2;
    Repopulation repopulation = Repopulation::adam_cloning;
    int stagnation_patience = 5;
    double stagnation_decrease = 0.9;
    std::int64_t n_trajectories = 2000; // N
    std::uint64_t seed = 1;
    int max_retries = 10;
    MoveWeights weights = MoveWeights::fixed_count();
    MoveOptions moves{MoveSensorParams{}, true, std::nullopt};
    ScanMode scan = ScanMode::random;
    /// Re-estimate unmodified clones at every iteration instead of keeping their cached score.
    bool rescore_all = false;
    double time_budget_s = 0.0; // 0 disables the wall-clock stop
    int threads = 1;

    // Initial population sampler.
    int sensor_count = 0;        // 0 draws the count uniformly in [1, max_sensors]
    double carrier_step = 2000.0; // std of each carrier displacement between drops, metres

    int elite_count() const;     // floor(rho * C)
    int burn_in(int iteration) const; // round(b0 + alpha * l)
    void validate() const;
};

struct ScoredSolution {
    Solution solution;
    double score = 0.0;
};

struct PopulationState {
    std::vector<ScoredSolution> members;
    double gamma = 0.0; // current threshold
    int elite_count = 0;
    ScoredSolution best_current;
    ScoredSolution best_ever;
    int iteration = 0;
    std::vector<double> c_hats;

    // Stagnation bookkeeping.
    bool improved_gamma = false;
    bool improved_best = false;
    int stalled_iterations = 0;
    int unchanged_best_iterations = 0;
    bool threshold_decreased = false;
    double last_elite_floor = 0.0; // lowest score among the last selected elites
};

Scorer make_scorer(const Scenario& scenario, std::int64_t n);

/// One draw from the initial proposal: sensors dropped along a random carrier
/// path bouncing inside the theater, activations uniform in each valid window.
Solution sample_initial_solution(const SplittingConfig& config, const ConstraintSet& constraints, Stream& rng);

PopulationState initialize(const SplittingConfig& config, const Scorer& scorer);

/// Top elite_count members by (score desc, index asc). Appends c_hat =
/// |{score >= gamma}| / C to state.c_hats.
std::vector<ScoredSolution> select_elites(PopulationState& state);

std::vector<ScoredSolution> repopulate_bootstrap(const std::vector<ScoredSolution>& elites, std::size_t count, Stream& rng);
/// Copies per elite: floor(C / C_l) + B_i with exactly C mod C_l of the B_i equal to one.
std::vector<std::size_t> adam_multiplicities(std::size_t elites, std::size_t count, Stream& rng);
std::vector<ScoredSolution> repopulate_adam(const std::vector<ScoredSolution>& elites, std::size_t count, Stream& rng);

/// Selection, repopulation, Gibbs refresh against the previous threshold, new threshold.
PopulationState iterate(PopulationState state, const SplittingConfig& config, const Scorer& scorer,
                        MoveStats* stats = nullptr);

/// Lowers the threshold by stagnation_decrease once neither the running best nor
/// the threshold has strictly increased for stagnation_patience iterations.
PopulationState check_stagnation_and_decrease(PopulationState state, const SplittingConfig& config);

/// Product of the recorded c_hat factors.
double rare_event_probability(const PopulationState& state);

// ----- run trace -----

struct IterationRecord {
    int iteration = 0;
    double gamma = 0.0;        // threshold produced by this iteration, before any decrease
    double gamma_next = 0.0;   // threshold handed to the next iteration
    double best_current = 0.0;
    double best_ever = 0.0;
    double mean_score = 0.0;
    double std_score = 0.0;
    std::optional<double> c_hat; // factor recorded when selecting from the previous population
    double rare_event_probability = 1.0;
    int burn_in = 0;
    int elite_count = 0;
    int population = 0;
    bool stagnation_event = false;
    double min_elite_score = 0.0; // lowest score among the elites selected this iteration
    double selection_threshold = 0.0;
    MoveStats moves;
};

struct ScoreHistogram {
    int iteration = 0;
    std::vector<std::int64_t> counts; // equal bins on [0, 1]
};

/// Per-sensor spatial and first-activation histograms over a population.
struct DensitySummary {
    int iteration = 0;
    int grid_x = 50;
    int grid_y = 50;
    int time_bins = 100;
    /// spatial[k][cell] for the k-th active sensor in deployment order, cell = iy * grid_x + ix.
    std::vector<std::vector<std::int64_t>> spatial;
    std::vector<std::vector<std::int64_t>> temporal;
};

DensitySummary density_summary(const std::vector<ScoredSolution>& population, const ConstraintSet& constraints,
                               int iteration, int grid = 50, int time_bins = 100);
ScoreHistogram score_histogram(const std::vector<ScoredSolution>& population, int iteration, int bins = 20);

struct RunTrace {
    std::uint64_t seed = 0;
    std::vector<IterationRecord> records; // initialisation row first
    std::vector<ScoreHistogram> histograms;
    std::vector<DensitySummary> densities;
    ScoredSolution best;
    std::vector<double> initial_scores;
    std::vector<double> final_scores;
};

struct RunOptions {
    std::vector<int> snapshot_iterations{0, 5, 10};
    /// Called once per completed iteration, in order, including the initialisation row.
    std::function<void(const IterationRecord&)> on_record;
};

struct RunResult {
    ScoredSolution best;
    RunTrace trace;
    PopulationState final_state;
};

RunResult run(const SplittingConfig& config, const Scenario& scenario, const RunOptions& options = {});

} // namespace gsres
