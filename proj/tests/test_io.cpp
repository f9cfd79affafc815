#include "support.hpp"

#include <gsres/io.hpp>

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace gsres;
using namespace gsres::test;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("gsres_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("profiles")
{
    const auto paper = profile_config(Profile::paper);
    CHECK(paper.splitting.population == 800);
    CHECK(paper.splitting.n_trajectories == 70000);
    CHECK(paper.splitting.max_iterations == 50);
    CHECK(paper.splitting.rho == 0.1);
    const auto desk = profile_config(Profile::desk);
    CHECK(desk.splitting.population == 100);
    CHECK(desk.splitting.n_trajectories == 2000);
    CHECK_NOTHROW(desk.scenario.validate());
    CHECK_NOTHROW(desk.splitting.validate());
    CHECK_THROWS_AS(parse_profile("laptop"), ConfigParseError);
}

TEST_CASE("config errors")
{
    const auto base = profile_config(Profile::desk);
    CHECK_THROWS_WITH_AS(parse_config(R"({"optimizer": {"rho": 1.5}})", base), "rho must be in (0,1)",
                         ConfigParseError);

    try {
        parse_config("{\n  \"optimizer\": {\n    \"rho\": ,\n  }\n}", base);
        FAIL("expected a parse error");
    }
    catch (const ConfigParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config(R"({"optimizer": {"roh": 0.2}})", base), ConfigParseError);
    CHECK_THROWS_AS(parse_config(R"({"optimiser": {}})", base), ConfigParseError);
    CHECK_THROWS_AS(parse_config(R"({"optimizer": {"rho": "high"}})", base), ConfigParseError);
    CHECK_THROWS_AS(parse_config("[1, 2]", base), ConfigParseError);
}

TEST_CASE("config overrides and round trip")
{
    const auto base = profile_config(Profile::desk);
    const auto c = parse_config(R"({"optimizer": {"population": 50, "repopulation": "bootstrap"},
                                   "dynamics": {"reactive": false, "start_mode": "uniform"},
                                   "scenario": {"trajectory_bank": 100}})",
                                base);
    CHECK(c.splitting.population == 50);
    CHECK(c.splitting.repopulation == Repopulation::bootstrap);
    CHECK(c.splitting.n_trajectories == base.splitting.n_trajectories);
    CHECK_FALSE(c.scenario.dynamics.reactive);
    CHECK(c.scenario.dynamics.start_mode == StartMode::uniform);
    CHECK(c.scenario.trajectory_bank == 100);

    const auto again = parse_config(config_to_json(c), profile_config(Profile::paper));
    CHECK(config_to_json(again) == config_to_json(c));

    const auto from_profile = parse_config(R"({"profile": "paper"})", base);
    CHECK(from_profile.splitting.population == 800);
}

TEST_CASE("solution round trip")
{
    Solution s;
    s.sensors = {sensor_at({1.25, 2.5}, {10.0, 20.0}), sensor_at({3, 4}, {}), sensor_at({0.1, 1e-7}, {33.3})};
    s.sensors[1].active = false;
    const auto text = solution_to_json(s, 0.375, 9);
    const auto back = parse_solution(text);
    REQUIRE(back.sensors.size() == 3);
    CHECK(back.sensors[0].position.x == 1.25);
    CHECK(back.sensors[0].activations == std::vector<double>{10.0, 20.0});
    CHECK_FALSE(back.sensors[1].active);
    CHECK(back.sensors[1].activations.empty());
    CHECK(back.sensors[2].position.y == 1e-7);
    CHECK(back.sensors[2].activations[0] == 33.3);
    CHECK(solution_to_json(back, 0.375, 9) == text);

    CHECK_THROWS(parse_solution(R"({"sensors": [{"x": 1}]})"));
}

TEST_CASE("trace files")
{
    Scenario sc;
    sc.constraints = square_constraints(1000, 100, 100, 2, 1);
    sc.constraints.spec.carrier_speed = 100;
    sc.dynamics.reactive = false;
    sc.dynamics.start_sigma = 100;
    sc.dynamics.speed_mean = 5;
    sc.dynamics.speed_std = 1;
    sc.dynamics.speed_half_width = 3;
    sc.dynamics.leg_mean = 30;
    sc.dynamics.leg_std = 10;
    sc.dynamics.leg_half_width = 20;
    sc.trajectory_bank = 50;
    SplittingConfig cfg;
    cfg.population = 10;
    cfg.rho = 0.2;
    cfg.max_iterations = 3;
    cfg.n_trajectories = 50;
    cfg.seed = 42;
    cfg.carrier_step = 200;
    cfg.moves.move_sensor = {0.5, 20.0, 200.0, std::nullopt};
    const auto r = run(cfg, sc);

    const auto dir = scratch("trace");
    const auto scorer = make_scorer(sc, cfg.n_trajectories);
    const auto paths = emit_trace(r.trace, dir, detection_attribution(r.best.solution, scorer, 5));
    CHECK(paths.size() == 7);
    for (const auto& p : paths) {
        if (p.extension() == ".csv")
            CHECK(slurp(p).rfind("# seed=42\n", 0) == 0);
    }

    std::istringstream series(slurp(dir / "series.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(series, line))
        if (!line.empty() && line[0] != '#')
            ++rows;
    CHECK(rows == static_cast<int>(r.trace.records.size()) + 1); // header plus one row per record

    // Re-scoring the saved solution reproduces the optimiser's number on the same bank.
    const auto saved = compute_setup_times(load_solution(dir / "best_solution.json"), sc.constraints);
    CHECK(is_feasible(saved, sc.constraints));
    CHECK(scorer.score(saved, 0).value == r.best.score);
}

TEST_CASE("trajectory csv")
{
    const auto cs = square_constraints(100, 50, 5);
    Stream rng(1);
    const auto traj = generate_trajectory({}, cs, straight_line({10, 50}, 0.0, 1.0), rng);
    const auto csv = trajectories_to_csv({traj, traj}, 3);
    CHECK(csv.rfind("# seed=3\n", 0) == 0);
    CHECK(csv.find("\n1,") != std::string::npos);
}
