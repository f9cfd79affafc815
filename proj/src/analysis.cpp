#include <gsres/analysis.hpp>
#include <gsres/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gsres {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Polar {
    std::vector<double> theta;
    std::vector<double> r;
    bool clockwise = false;
};

Polar to_polar(std::span<const Vec2> points, const Vec2& center)
{
    Polar p;
    p.theta = unwrap_angles(points, center, p.clockwise);
    for (const auto& q : points)
        p.r.push_back(distance(q, center));
    return p;
}

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& a, double& b)
{
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw FitError("spiral fit: angles do not advance");
    b = sxy / sxx;
    a = my - b * mx;
}

double rms(const Polar& p, SpiralKind kind, double a, double b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        const double model = kind == SpiralKind::archimedean ? a + b * p.theta[i] : a * std::exp(b * p.theta[i]);
        s += (p.r[i] - model) * (p.r[i] - model);
    }
    return std::sqrt(s / static_cast<double>(p.r.size()));
}

/// Levenberg-Marquardt on r = a exp(b theta), started from the log-linear fit.
void log_fit(const Polar& p, double& a, double& b)
{
    std::vector<double> log_r;
    for (double r : p.r) {
        if (!(r > 0.0))
            throw FitError("logarithmic spiral fit needs all radii > 0");
        log_r.push_back(std::log(r));
    }
    double log_a = 0.0;
    linear_fit(p.theta, log_r, log_a, b);
    a = std::exp(log_a);

    double cost = rms(p, SpiralKind::logarithmic, a, b);
    double damping = 1e-3;
    for (int it = 0; it < 200; ++it) {
        double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < p.r.size(); ++i) {
            const double e = std::exp(b * p.theta[i]);
            const double res = p.r[i] - a * e;
            const double da = e;
            const double db = a * p.theta[i] * e;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * res;
            gb += db * res;
        }
        const double m00 = jaa * (1.0 + damping);
        const double m11 = jbb * (1.0 + damping);
        const double det = m00 * m11 - jab * jab;
        if (!(std::abs(det) > 0.0))
            break;
        const double step_a = (m11 * ga - jab * gb) / det;
        const double step_b = (m00 * gb - jab * ga) / det;
        const double trial = rms(p, SpiralKind::logarithmic, a + step_a, b + step_b);
        if (trial <= cost) {
            a += step_a;
            b += step_b;
            const bool converged = cost - trial <= 1e-15 * std::max(cost, 1e-300);
            cost = trial;
            damping = std::max(damping * 0.3, 1e-12);
            if (converged)
                break;
        }
        else {
            damping *= 10.0;
            if (damping > 1e12)
                break;
        }
    }
}

SpiralFit fit_at(std::span<const Vec2> points, SpiralKind kind, const Vec2& center)
{
    const Polar p = to_polar(points, center);
    SpiralFit fit;
    fit.kind = kind;
    fit.center = center;
    fit.clockwise = p.clockwise;
    if (kind == SpiralKind::archimedean)
        linear_fit(p.theta, p.r, fit.a, fit.b);
    else
        log_fit(p, fit.a, fit.b);
    fit.residual = rms(p, kind, fit.a, fit.b);
    return fit;
}

} // namespace

std::vector<double> unwrap_angles(std::span<const Vec2> points, const Vec2& center, bool& clockwise)
{
    std::vector<double> raw;
    for (const auto& q : points) {
        if (distance(q, center) < 1e-12)
            throw FitError("spiral fit: point coincides with the center");
        raw.push_back(heading(q - center));
    }
    double net = 0.0;
    for (std::size_t i = 1; i < raw.size(); ++i)
        net += wrap_angle(raw[i] - raw[i - 1]);
    clockwise = net < 0.0;

    const double sense = clockwise ? -1.0 : 1.0;
    std::vector<double> theta(raw.size());
    theta[0] = sense * raw[0];
    for (std::size_t i = 1; i < raw.size(); ++i) {
        double inc = std::fmod(sense * (raw[i] - raw[i - 1]), two_pi);
        if (inc < 0.0)
            inc += two_pi;
        theta[i] = theta[i - 1] + inc;
    }
    if (!(theta.back() > theta.front()))
        throw FitError("spiral fit: unwrapped angles do not advance");
    return theta;
}

SpiralFit fit_spiral(std::span<const Vec2> points, SpiralKind kind, CenterMode mode, const Vec2& given_center)
{
    if (points.size() < 4)
        throw FitError("spiral fit needs at least 4 points");

    switch (mode) {
    case CenterMode::given:
        return fit_at(points, kind, given_center);
    case CenterMode::centroid: {
        Vec2 c;
        for (const auto& q : points)
            c += q;
        return fit_at(points, kind, (1.0 / static_cast<double>(points.size())) * c);
    }
    case CenterMode::grid_search: {
        Box box{points[0], points[0]};
        for (const auto& q : points) {
            box.lo.x = std::min(box.lo.x, q.x);
            box.lo.y = std::min(box.lo.y, q.y);
            box.hi.x = std::max(box.hi.x, q.x);
            box.hi.y = std::max(box.hi.y, q.y);
        }
        constexpr int n = 21;
        std::optional<SpiralFit> best;
        Vec2 lo = box.lo;
        Vec2 span = box.hi - box.lo;
        // Coarse pass over the bounding box, then one refinement around the winner.
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const Vec2 c{lo.x + span.x * i / (n - 1), lo.y + span.y * j / (n - 1)};
                    try {
                        SpiralFit f = fit_at(points, kind, c);
                        if (!best || f.residual < best->residual)
                            best = f;
                    }
                    catch (const FitError&) {
                    }
                }
            }
            if (!best)
                break;
            span = (2.0 / (n - 1)) * span;
            lo = best->center - 0.5 * span;
        }
        if (!best)
            throw FitError("spiral fit: no admissible center found");
        return *best;
    }
    }
    throw FitError("spiral fit: unknown center mode");
}

std::vector<Vec2> activation_ordered_positions(const Solution& solution)
{
    auto active = solution.active_indices();
    std::stable_sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
        return solution.sensors[a].first_activation() < solution.sensors[b].first_activation();
    });
    std::vector<Vec2> out;
    for (std::size_t i : active)
        out.push_back(solution.sensors[i].position);
    return out;
}

double track_spacing(const TrackSpacingInputs& in)
{
    return std::max(2.0 * in.detection_radius, std::min(in.alpha * in.ts_ray, in.ts_star + in.beta));
}

std::vector<std::int64_t> detection_attribution(const Solution& solution, const Scorer& scorer, std::uint64_t seed)
{
    std::vector<std::int64_t> counts(solution.sensors.size(), 0);
    if (!is_feasible(solution, scorer.constraints()))
        return counts;
    for (const auto& first : scorer.first_detections(solution, seed))
        if (first)
            ++counts[*first];
    return counts;
}

GridSearchResult grid_search_single(const Scorer& scorer, std::uint64_t seed, int points, int threads)
{
    if (points < 2)
        throw std::invalid_argument("grid search needs at least 2 points per axis");
    const ConstraintSet& cs = scorer.constraints();
    const Box box = cs.theater.area.bounding_box();
    const double T = cs.theater.horizon;
    const auto n = static_cast<std::size_t>(points);
    auto at = [&](double lo, double hi, std::size_t i) { return lo + (hi - lo) * static_cast<double>(i) / (points - 1); };

    struct Cell {
        double score = -1.0;
        std::size_t t = 0;
        std::int64_t evaluated = 0;
    };
    // One task per (x, y) column; each keeps its best t.
    std::vector<Cell> cells(n * n);
    parallel_for(n * n, threads, [&](std::size_t c) {
        Solution s;
        Sensor sensor;
        sensor.position = {at(box.lo.x, box.hi.x, c / n), at(box.lo.y, box.hi.y, c % n)};
        if (!contains(cs.theater, sensor.position))
            return;
        s.sensors.push_back(sensor);
        s = compute_setup_times(std::move(s), cs);
        Cell& best = cells[c];
        for (std::size_t k = 0; k < n; ++k) {
            const double t = at(0.0, T, k);
            if (t < s.sensors[0].setup_time)
                continue;
            s.sensors[0].activations = {t};
            const double v = scorer.score(s, seed).value;
            ++best.evaluated;
            if (v > best.score) {
                best.score = v;
                best.t = k;
            }
        }
    });

    GridSearchResult out;
    out.best.score = -1.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        out.evaluated += cells[c].evaluated;
        if (cells[c].evaluated > 0 && cells[c].score > out.best.score) {
            Sensor sensor;
            sensor.position = {at(box.lo.x, box.hi.x, c / n), at(box.lo.y, box.hi.y, c % n)};
            sensor.activations = {at(0.0, T, cells[c].t)};
            out.best.solution.sensors = {sensor};
            out.best.score = cells[c].score;
        }
    }
    if (out.evaluated == 0)
        throw std::runtime_error("grid search: no feasible grid point");
    out.best.solution = compute_setup_times(std::move(out.best.solution), cs);
    return out;
}

} // namespace gsres
