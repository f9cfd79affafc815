#pragma once

#include <gsres/detection.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace gsres {

enum class MoveKind : int { AddSensor = 0, AddActivation, RemoveSensor, RemoveActivation, MoveSensor, SwapSensors };

inline constexpr int move_kind_count = 6;
std::string_view to_string(MoveKind kind);

/// Probability of drawing each move kind; must sum to one.
struct MoveWeights {
    std::array<double, move_kind_count> lambda{};

    double operator[](MoveKind k) const { return lambda[static_cast<std::size_t>(k)]; }
    double& operator[](MoveKind k) { return lambda[static_cast<std::size_t>(k)]; }
    void validate() const;
    MoveKind draw(Stream& rng) const;

    static MoveWeights uniform();
    /// Move-a-sensor and replace-a-sensor, 0.5 each.
    static MoveWeights fixed_count();
};

/// Two-component isotropic Gaussian mixture for the move-a-sensor kernel.
struct MoveSensorParams {
    double w_small = 0.5;
    double sigma_small = 200.0; // metres, std of the small move
    double sigma_large = 2000.0;
    /// When set, w_small moves linearly from its start value to this one over the run.
    std::optional<double> w_small_final;

    double weight_at(int iteration, int last_iteration) const;
    void validate() const;
};

struct MoveOptions {
    MoveSensorParams move_sensor;
    /// Remove-sensor is immediately followed by add-sensor (fixed sensor count).
    bool replace_on_remove = false;
    /// Weight of the small component for the current iteration (annealed copy of move_sensor.w_small).
    std::optional<double> w_small_override;
};

/// Counters per move kind. A retry that cannot build a candidate because the
/// move's structural precondition failed is counted in rejected_retry_exhausted.
struct MoveCounters {
    std::int64_t proposed = 0;
    std::int64_t accepted = 0;
    std::int64_t rejected_infeasible = 0;
    std::int64_t rejected_below_threshold = 0;
    std::int64_t rejected_retry_exhausted = 0;

    bool conserved() const
    {
        return proposed == accepted + rejected_infeasible + rejected_below_threshold + rejected_retry_exhausted;
    }
    MoveCounters& operator+=(const MoveCounters& o);
};

struct MoveStats {
    std::array<MoveCounters, move_kind_count> per_move{};
    std::int64_t exhausted_updates = 0; // updates that kept the incumbent after max_retries

    MoveCounters& operator[](MoveKind k) { return per_move[static_cast<std::size_t>(k)]; }
    const MoveCounters& operator[](MoveKind k) const { return per_move[static_cast<std::size_t>(k)]; }
    MoveCounters total() const;
    bool conserved() const;
    MoveStats& operator+=(const MoveStats& o);
};

/// Builds a candidate for `kind`, or nullopt when the move's precondition does
/// not hold. Setup times are recomputed; the candidate may be infeasible.
/// `target` pins the sensor for single-sensor moves (systematic scan); it must
/// index an active sensor.
std::optional<Solution> propose(MoveKind kind, const Solution& solution, const ConstraintSet& constraints,
                                const MoveOptions& options, Stream& rng, std::optional<std::size_t> target = std::nullopt);

enum class ScanMode { random, systematic };

struct SweepSettings {
    double threshold = 0.0;
    int updates = 1; // b_l; ignored by systematic scan which visits every active sensor
    MoveWeights weights = MoveWeights::uniform();
    MoveOptions options;
    int max_retries = 10;
    ScanMode scan = ScanMode::random;
};

struct SweepResult {
    Solution solution;
    std::optional<double> score; // set when at least one update was accepted
    int accepted_updates = 0;
};

/// Gibbs sweep with accept/reject against feasibility and the threshold.
/// Every candidate is scored with the same `eval_seed`.
SweepResult gibbs_sweep(const Solution& solution, const SweepSettings& settings, const Scorer& scorer,
                        std::uint64_t eval_seed, Stream& rng, MoveStats& stats);

} // namespace gsres
