#pragma once

#include <gsres/analysis.hpp>
#include <gsres/splitting.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsres {

/// Malformed or semantically invalid configuration. `line` is 0 for semantic errors.
struct ConfigParseError : ConfigError {
    ConfigParseError(const std::string& what, std::size_t line = 0) : ConfigError(what), line(line) {}
    std::size_t line;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    SplittingConfig splitting;
    Scenario scenario;
};

enum class Profile { desk, paper };

/// Built-in parameter sets: `paper` is the full-scale run (C = 800, N = 70000,
/// 50 iterations), `desk` the same scenario at laptop scale.
RunConfig profile_config(Profile profile);
Profile parse_profile(const std::string& name);

/// Parses a JSON config. Keys override `base`; unknown keys are rejected.
/// The result is fully validated.
RunConfig parse_config(const std::string& text, const RunConfig& base);
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base);
RunConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const RunConfig& config);

std::string solution_to_json(const Solution& solution, double score, std::uint64_t seed);
Solution parse_solution(const std::string& text);
Solution load_solution(const std::filesystem::path& path);

/// Writes series.csv, moves.csv, best_solution.json, histograms.csv,
/// density_spatial.csv, density_temporal.csv and, when `attribution` is
/// non-empty, detection_rate.csv. Returns the written paths.
std::vector<std::filesystem::path> emit_trace(const RunTrace& trace, const std::filesystem::path& out_dir,
                                              const std::vector<std::int64_t>& attribution = {});

std::string series_header();
std::string series_row(const IterationRecord& record);

std::string trajectories_to_csv(const std::vector<Trajectory>& trajectories, std::uint64_t seed);

} // namespace gsres
