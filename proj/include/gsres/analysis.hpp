#pragma once

#include <gsres/splitting.hpp>

#include <span>
#include <stdexcept>
#include <vector>

namespace gsres {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SpiralKind { archimedean, logarithmic };
enum class CenterMode { given, centroid, grid_search };

/// r(theta) = a + b theta (archimedean) or r(theta) = a exp(b theta) (logarithmic),
/// theta unwrapped monotonically along the point order.
struct SpiralFit {
    SpiralKind kind = SpiralKind::archimedean;
    Vec2 center;
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0; // RMS radial error
    bool clockwise = false;
};

/// Polar angles of `points` about `center`, unwrapped so that they are monotone
/// in the winding direction. Returned increasing; `clockwise` reports the sense.
std::vector<double> unwrap_angles(std::span<const Vec2> points, const Vec2& center, bool& clockwise);

/// Least squares fit of r against theta. Throws FitError on fewer than 4 points
/// or when the unwrapped angles do not advance.
SpiralFit fit_spiral(std::span<const Vec2> points, SpiralKind kind, CenterMode mode, const Vec2& given_center = {});

/// Active sensor positions ordered by first activation, ties by deployment index.
std::vector<Vec2> activation_ordered_positions(const Solution& solution);

struct TrackSpacingInputs {
    double detection_radius = 0.0;
    double ts_ray = 0.0;  // random-tour spacing
    double ts_star = 0.0; // furthest-on-disk spacing
    double alpha = 0.0;
    double beta = 0.0;
};

/// max{2R, min{alpha TS_ray, TS* + beta}}
double track_spacing(const TrackSpacingInputs& in);

/// Number of detected trajectories whose first detection came from each sensor slot.
std::vector<std::int64_t> detection_attribution(const Solution& solution, const Scorer& scorer, std::uint64_t seed);

struct GridSearchResult {
    ScoredSolution best;
    std::int64_t evaluated = 0; // feasible grid points scored
};

/// Exhaustive search over one sensor with one activation: `points` evenly spaced
/// values of x and y across the theater's bounding box and of t across [0, T].
/// Points outside the theater or before setup are skipped; ties keep the first
/// point in (x, y, t) order.
GridSearchResult grid_search_single(const Scorer& scorer, std::uint64_t seed, int points = 50, int threads = 1);

} // namespace gsres
