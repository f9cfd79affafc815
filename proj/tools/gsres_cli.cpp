#include <gsres/analysis.hpp>
#include <gsres/io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace gsres;

constexpr const char* out_dir_env = "GSRES_OUT_DIR";

struct Common {
    std::string config;
    std::string profile = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "JSON config file (overrides the profile)");
    cmd->add_option("--profile", c.profile, "built-in parameter set")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", c.seed, "root seed");
    cmd->add_option("--threads", c.threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, std::string("output path (default from ") + out_dir_env + ")");
}

RunConfig resolve(const Common& c)
{
    RunConfig cfg = profile_config(parse_profile(c.profile));
    if (!c.config.empty())
        cfg = load_config(c.config, cfg);
    if (c.seed)
        cfg.splitting.seed = *c.seed;
    if (c.threads)
        cfg.splitting.threads = *c.threads;
    return cfg;
}

std::string out_path(const Common& c, const std::string& fallback)
{
    if (!c.out.empty())
        return c.out;
    if (const char* env = std::getenv(out_dir_env); env && *env)
        return env;
    return fallback;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int cmd_optimize(const Common& c)
{
    const RunConfig cfg = resolve(c);
    const std::filesystem::path dir = out_path(c, "gsres_out");
    std::filesystem::create_directories(dir);

    // Rows are flushed as iterations complete so an interrupted run keeps them.
    const auto series_path = dir / "series.csv";
    std::ofstream series(series_path, std::ios::binary);
    if (!series)
        throw IoError("cannot write " + series_path.string());
    series << "# seed=" << cfg.splitting.seed << '\n' << series_header() << std::flush;

    RunOptions options;
    options.on_record = [&](const IterationRecord& r) {
        series << series_row(r) << std::flush;
        std::cerr << "iteration " << r.iteration << "  gamma " << fmt(r.gamma) << "  best " << fmt(r.best_ever)
                  << "  mean " << fmt(r.mean_score) << '\n';
    };
    const RunResult result = run(cfg.splitting, cfg.scenario, options);
    series.close();

    const Scorer scorer = make_scorer(cfg.scenario, cfg.splitting.n_trajectories);
    const auto attribution = detection_attribution(result.best.solution, scorer, derive_seed(cfg.splitting.seed, {5}));
    for (const auto& p : emit_trace(result.trace, dir, attribution))
        std::cout << "wrote " << p.string() << '\n';
    std::cout << "best_score " << fmt(result.best.score) << '\n';
    std::cout << "rare_event_probability " << fmt(rare_event_probability(result.final_state)) << '\n';
    return 0;
}

int cmd_score(const Common& c, const std::string& solution_path, std::optional<std::int64_t> n)
{
    const RunConfig cfg = resolve(c);
    const Solution solution = compute_setup_times(load_solution(solution_path), cfg.scenario.constraints);
    const std::int64_t count = n.value_or(cfg.splitting.n_trajectories);
    ScoreEstimate est;
    if (cfg.scenario.trajectory_bank > 0)
        est = make_scorer(cfg.scenario, count).score(solution, cfg.splitting.seed);
    else
        est = estimate_score(solution, cfg.scenario.constraints, cfg.scenario.dynamics, cfg.scenario.criteria, count,
                             cfg.splitting.seed, cfg.splitting.threads);
    if (auto why = feasibility_violation(solution, cfg.scenario.constraints))
        std::cout << "infeasible " << *why << '\n';
    std::cout << "score " << fmt(est.value) << '\n';
    std::cout << "trajectories " << est.n_trajectories << '\n';
    std::cout << "relative_error " << (est.relative_error ? fmt(*est.relative_error) : "undefined") << '\n';
    return 0;
}

int cmd_simulate(const Common& c, const std::string& solution_path, int count)
{
    const RunConfig cfg = resolve(c);
    const Solution solution = compute_setup_times(load_solution(solution_path), cfg.scenario.constraints);
    std::vector<Trajectory> trajectories;
    for (int i = 0; i < count; ++i) {
        Stream rng(derive_seed(cfg.splitting.seed, {static_cast<std::uint64_t>(i)}));
        trajectories.push_back(generate_trajectory(solution, cfg.scenario.constraints, cfg.scenario.dynamics, rng));
    }
    const std::string csv = trajectories_to_csv(trajectories, cfg.splitting.seed);
    const std::string out = out_path(c, "");
    if (out.empty()) {
        std::cout << csv;
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    f << csv;
    f.close();
    if (!f)
        throw IoError("cannot write " + out);
    std::cout << "wrote " << out << '\n';
    return 0;
}

struct AnalyzeArgs {
    std::string center = "datum";
    std::optional<double> ts_ray, ts_star, alpha_son, beta_son;
    std::optional<std::int64_t> n;
};

int cmd_analyze(const Common& c, const std::string& solution_path, const AnalyzeArgs& a)
{
    const RunConfig cfg = resolve(c);
    const Solution solution = compute_setup_times(load_solution(solution_path), cfg.scenario.constraints);
    const auto points = activation_ordered_positions(solution);

    CenterMode mode = CenterMode::given;
    if (a.center == "centroid")
        mode = CenterMode::centroid;
    else if (a.center == "grid")
        mode = CenterMode::grid_search;

    std::cout << "kind,center_x,center_y,a,b,residual,clockwise\n";
    for (SpiralKind kind : {SpiralKind::archimedean, SpiralKind::logarithmic}) {
        const char* name = kind == SpiralKind::archimedean ? "archimedean" : "logarithmic";
        try {
            const SpiralFit f = fit_spiral(points, kind, mode, cfg.scenario.datum());
            std::cout << name << ',' << fmt(f.center.x) << ',' << fmt(f.center.y) << ',' << fmt(f.a) << ','
                      << fmt(f.b) << ',' << fmt(f.residual) << ',' << (f.clockwise ? 1 : 0) << '\n';
        }
        catch (const FitError& e) {
            std::cout << name << ",,,,,,\n";
            std::cerr << name << " fit unavailable: " << e.what() << '\n';
        }
    }

    if (a.ts_ray && a.ts_star && a.alpha_son && a.beta_son) {
        TrackSpacingInputs in{cfg.scenario.constraints.spec.detection_radius, *a.ts_ray, *a.ts_star, *a.alpha_son,
                              *a.beta_son};
        std::cout << "\ntrack_spacing\n" << fmt(track_spacing(in)) << '\n';
    }

    const Scorer scorer = make_scorer(cfg.scenario, a.n.value_or(cfg.splitting.n_trajectories));
    const auto counts = detection_attribution(solution, scorer, cfg.splitting.seed);
    std::int64_t total = 0;
    for (auto v : counts)
        total += v;
    std::cout << "\nsensor,detections,share\n";
    for (std::size_t k = 0; k < counts.size(); ++k)
        std::cout << k + 1 << ',' << counts[k] << ','
                  << fmt(total > 0 ? static_cast<double>(counts[k]) / static_cast<double>(total) : 0.0) << '\n';
    return 0;
}

int cmd_config(const Common& c)
{
    std::cout << config_to_json(resolve(c));
    return 0;
}

int cmd_gridsearch(const Common& c, int points)
{
    const RunConfig cfg = resolve(c);
    const Scorer scorer = make_scorer(cfg.scenario, cfg.splitting.n_trajectories);
    const GridSearchResult r = grid_search_single(scorer, cfg.splitting.seed, points, cfg.splitting.threads);
    const std::string out = out_path(c, "gridsearch_optimum.json");
    std::ofstream f(out, std::ios::binary);
    f << solution_to_json(r.best.solution, r.best.score, cfg.splitting.seed);
    f.close();
    if (!f)
        throw IoError("cannot write " + out);
    std::cout << "evaluated " << r.evaluated << '\n';
    std::cout << "best_score " << fmt(r.best.score) << '\n';
    std::cout << "wrote " << out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sensor deployment optimisation by generalized splitting"};
    app.require_subcommand(1);

    Common optimize_opts, score_opts, simulate_opts, analyze_opts, grid_opts;

    auto* optimize = app.add_subcommand("optimize", "run the splitting optimiser and write trace files");
    add_common(optimize, optimize_opts);

    std::string score_solution;
    std::optional<std::int64_t> score_n;
    auto* score = app.add_subcommand("score", "estimate the detection probability of a solution file");
    add_common(score, score_opts);
    score->add_option("solution", score_solution, "solution JSON")->required();
    score->add_option("--trajectories", score_n, "number of trajectories")->check(CLI::PositiveNumber);

    std::string sim_solution;
    int sim_count = 10;
    auto* simulate = app.add_subcommand("simulate", "write sample target trajectories for a solution");
    add_common(simulate, simulate_opts);
    simulate->add_option("solution", sim_solution, "solution JSON")->required();
    simulate->add_option("--count", sim_count, "number of trajectories")->check(CLI::PositiveNumber);

    std::string analyze_solution;
    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "spiral fits, track spacing and detection attribution");
    add_common(analyze, analyze_opts);
    analyze->add_option("solution", analyze_solution, "solution JSON")->required();
    analyze->add_option("--center", analyze_args.center, "spiral centre")
        ->check(CLI::IsMember({"datum", "centroid", "grid"}));
    analyze->add_option("--ts-ray", analyze_args.ts_ray, "random-tour track spacing");
    analyze->add_option("--ts-star", analyze_args.ts_star, "furthest-on-disk track spacing");
    analyze->add_option("--alpha-son", analyze_args.alpha_son, "track spacing calibration alpha");
    analyze->add_option("--beta-son", analyze_args.beta_son, "track spacing calibration beta");
    analyze->add_option("--trajectories", analyze_args.n, "trajectories for attribution")->check(CLI::PositiveNumber);

    int grid_points = 50;
    auto* grid = app.add_subcommand("gridsearch", "exhaustive single-sensor search");
    add_common(grid, grid_opts);
    grid->add_option("--points", grid_points, "grid points per axis")->check(CLI::Range(2, 1000));

    Common config_opts;
    auto* config = app.add_subcommand("config", "print the resolved configuration as JSON");
    add_common(config, config_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (optimize->parsed())
            return cmd_optimize(optimize_opts);
        if (score->parsed())
            return cmd_score(score_opts, score_solution, score_n);
        if (simulate->parsed())
            return cmd_simulate(simulate_opts, sim_solution, sim_count);
        if (analyze->parsed())
            return cmd_analyze(analyze_opts, analyze_solution, analyze_args);
        if (config->parsed())
            return cmd_config(config_opts);
        if (grid->parsed())
            return cmd_gridsearch(grid_opts, grid_points);
    }
    catch (const ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
