#pragma once

#include <gsres/dynamics.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace gsres {

/// Crude Monte Carlo estimate of the detection probability.
struct ScoreEstimate {
    double value = 0.0;
    std::int64_t n_trajectories = 0;
    /// sqrt(1 - S) / sqrt(N S); undefined (nullopt) when S = 0.
    std::optional<double> relative_error;
};

std::optional<double> relative_error(double value, std::int64_t n);

struct DetectionCriteria {
    int min_detections = 1;
    std::optional<int> max_avoidances; // counter-detections allowed

    void validate() const;
};

/// Cookie-cutter test for one ping.
Contact ping_outcome(const Sensor& sensor, const SensorSpec& spec, const Vec2& target_position);

/// True when the events satisfy the criteria (feasibility is not checked here).
bool criteria_met(const std::vector<ContactEvent>& events, const DetectionCriteria& criteria);

/// 1 when the trajectory is detected per `criteria` and the solution is feasible, else 0.
int cost_f(const Trajectory& trajectory, const Solution& solution, const ConstraintSet& constraints,
           const DetectionCriteria& criteria);

/// Contact events a non-reacting trajectory would have met under `solution`.
std::vector<ContactEvent> replay_events(const Trajectory& trajectory, const Solution& solution, const SensorSpec& spec);

/// N trajectories, trajectory i drawn from sub-stream derive_seed(root, {i}).
/// The result does not depend on `threads`.
ScoreEstimate estimate_score(const Solution& solution, const ConstraintSet& constraints, const DynamicsParams& params,
                             const DetectionCriteria& criteria, std::int64_t n, std::uint64_t root, int threads = 1);

/// Scores solutions for the optimiser. Holds either the generative trajectory law
/// or, for myopic targets, a fixed bank of trajectories shared by every solution.
class Scorer {
public:
    Scorer(ConstraintSet constraints, DynamicsParams params, DetectionCriteria criteria, std::int64_t n);

    /// Replaces the generator by `bank_size` trajectories drawn once from `bank_seed`.
    /// Only valid for myopic targets; throws InvalidSpecError otherwise.
    void use_fixed_bank(std::int64_t bank_size, std::uint64_t bank_seed);
    bool has_bank() const { return !_bank.empty(); }
    const std::vector<Trajectory>& bank() const { return _bank; }

    ScoreEstimate score(const Solution& solution, std::uint64_t seed) const;

    /// Score if it reaches `threshold`, nullopt otherwise. Gives up as soon as
    /// the remaining trajectories cannot lift the estimate to the threshold, so the
    /// accept decision is identical to comparing the full estimate.
    std::optional<double> score_at_least(const Solution& solution, std::uint64_t seed, double threshold) const;

    /// Index of the sensor holding the first detection of trajectory i, or nullopt.
    std::vector<std::optional<std::size_t>> first_detections(const Solution& solution, std::uint64_t seed) const;

    const ConstraintSet& constraints() const { return _constraints; }
    const DynamicsParams& params() const { return _params; }
    const DetectionCriteria& criteria() const { return _criteria; }
    std::int64_t n() const { return _n; }

private:
    bool detected(const Solution& solution, std::uint64_t seed, std::int64_t i) const;
    std::vector<ContactEvent> events_for(const Solution& solution, std::uint64_t seed, std::int64_t i, bool full) const;

    ConstraintSet _constraints;
    DynamicsParams _params;
    DetectionCriteria _criteria;
    std::int64_t _n;
    std::vector<Trajectory> _bank;
};

} // namespace gsres
