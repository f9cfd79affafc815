#include <gsres/io.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace gsres {

using nlohmann::json;

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json vec_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j, const char* field)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigParseError(std::string(field) + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <typename E>
struct EnumName {
    E value;
    const char* name;
};

constexpr EnumName<StartMode> start_modes[] = {{StartMode::uniform, "uniform"}, {StartMode::gaussian, "gaussian"}};
constexpr EnumName<CourseMemory> course_memories[] = {{CourseMemory::initial_course, "initial_course"},
                                                      {CourseMemory::last_course, "last_course"}};
constexpr EnumName<Repopulation> repopulations[] = {{Repopulation::bootstrap, "bootstrap"},
                                                    {Repopulation::adam_cloning, "adam_cloning"}};
constexpr EnumName<ScanMode> scans[] = {{ScanMode::random, "random"}, {ScanMode::systematic, "systematic"}};

template <typename E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v)
{
    for (const auto& e : table)
        if (e.value == v)
            return e.name;
    return "?";
}

template <typename E, std::size_t N>
E enum_from(const EnumName<E> (&table)[N], const json& j, const char* field)
{
    const auto s = j.get<std::string>();
    for (const auto& e : table)
        if (s == e.name)
            return e.value;
    throw ConfigParseError(std::string(field) + ": unknown value '" + s + "'");
}

json config_json(const RunConfig& c)
{
    const Scenario& sc = c.scenario;
    const ConstraintSet& cs = sc.constraints;
    json vertices = json::array();
    for (const auto& v : cs.theater.area.vertices())
        vertices.push_back(vec_json(v));

    json scenario = {
        {"theater", {{"vertices", vertices}, {"horizon", cs.theater.horizon}, {"hunter_delay", cs.theater.hunter_delay}}},
        {"sensor",
         {{"detection_radius", cs.spec.detection_radius},
          {"counter_detection_radius", cs.spec.counter_detection_radius},
          {"max_activations", cs.spec.max_activations},
          {"carrier_speed", cs.spec.carrier_speed}}},
        {"max_sensors", cs.max_sensors},
        {"carrier_entry", cs.carrier_entry ? vec_json(*cs.carrier_entry) : json(nullptr)},
        {"trajectory_bank", sc.trajectory_bank},
        {"bank_seed", sc.bank_seed},
    };

    const DynamicsParams& d = sc.dynamics;
    json dynamics = {
        {"leg_mean", d.leg_mean},
        {"leg_std", d.leg_std},
        {"leg_half_width", d.leg_half_width},
        {"course_std", d.course_std},
        {"course_half_width", d.course_half_width},
        {"escape_half_width", d.escape_half_width},
        {"course_memory", enum_name(course_memories, d.course_memory)},
        {"initial_course", d.initial_course ? json(*d.initial_course) : json(nullptr)},
        {"start_mode", enum_name(start_modes, d.start_mode)},
        {"start_center", d.start_center ? vec_json(*d.start_center) : json(nullptr)},
        {"start_sigma", d.start_sigma},
        {"speed_mean", d.speed_mean},
        {"speed_std", d.speed_std},
        {"speed_half_width", d.speed_half_width},
        {"speed_per_leg", d.speed_per_leg},
        {"reactive", d.reactive},
    };

    json criteria = {
        {"min_detections", sc.criteria.min_detections},
        {"max_avoidances", sc.criteria.max_avoidances ? json(*sc.criteria.max_avoidances) : json(nullptr)},
    };

    const SplittingConfig& o = c.splitting;
    json weights = json::object();
    for (int k = 0; k < move_kind_count; ++k)
        weights[std::string(to_string(static_cast<MoveKind>(k)))] = o.weights.lambda[static_cast<std::size_t>(k)];
    const MoveSensorParams& ms = o.moves.move_sensor;
    json optimizer = {
        {"population", o.population},
        {"rho", o.rho},
        {"max_iterations", o.max_iterations},
        {"b0", o.b0},
        {"alpha", o.alpha},
        {"repopulation", enum_name(repopulations, o.repopulation)},
        {"stagnation_patience", o.stagnation_patience},
        {"stagnation_decrease", o.stagnation_decrease},
        {"n_trajectories", o.n_trajectories},
        {"seed", o.seed},
        {"max_retries", o.max_retries},
        {"move_weights", weights},
        {"replace_on_remove", o.moves.replace_on_remove},
        {"move_sensor",
         {{"w_small", ms.w_small},
          {"sigma_small", ms.sigma_small},
          {"sigma_large", ms.sigma_large},
          {"w_small_final", ms.w_small_final ? json(*ms.w_small_final) : json(nullptr)}}},
        {"scan", enum_name(scans, o.scan)},
        {"rescore_all", o.rescore_all},
        {"time_budget_s", o.time_budget_s},
        {"threads", o.threads},
        {"sensor_count", o.sensor_count},
        {"carrier_step", o.carrier_step},
    };

    return {{"scenario", scenario}, {"dynamics", dynamics}, {"criteria", criteria}, {"optimizer", optimizer}};
}

/// Every key of `user` must exist in `schema` (the serialised defaults).
void check_keys(const json& user, const json& schema, const std::string& path)
{
    if (!user.is_object())
        return;
    for (const auto& [key, value] : user.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!schema.contains(key))
            throw ConfigParseError("unknown config key '" + here + "'");
        if (schema[key].is_object())
            check_keys(value, schema[key], here);
    }
}

template <typename T>
T field(const json& j, const char* key)
{
    try {
        return j.at(key).get<T>();
    }
    catch (const json::exception&) {
        throw ConfigParseError(std::string("config field '") + key + "' is missing or has the wrong type");
    }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return field<T>(j, key);
}

RunConfig config_from_json(const json& root)
{
    RunConfig c;
    const json& s = root.at("scenario");
    const json& th = s.at("theater");
    std::vector<Vec2> vertices;
    for (const auto& v : th.at("vertices"))
        vertices.push_back(vec_from(v, "scenario.theater.vertices"));
    try {
        c.scenario.constraints.theater.area = ConvexPolygon(std::move(vertices));
    }
    catch (const std::invalid_argument& e) {
        throw ConfigParseError(std::string("scenario.theater.vertices: ") + e.what());
    }
    c.scenario.constraints.theater.horizon = field<double>(th, "horizon");
    c.scenario.constraints.theater.hunter_delay = field<double>(th, "hunter_delay");
    const json& sp = s.at("sensor");
    SensorSpec& spec = c.scenario.constraints.spec;
    spec.detection_radius = field<double>(sp, "detection_radius");
    spec.counter_detection_radius = field<double>(sp, "counter_detection_radius");
    spec.max_activations = field<int>(sp, "max_activations");
    spec.carrier_speed = field<double>(sp, "carrier_speed");
    c.scenario.constraints.max_sensors = field<int>(s, "max_sensors");
    if (s.contains("carrier_entry") && !s["carrier_entry"].is_null())
        c.scenario.constraints.carrier_entry = vec_from(s["carrier_entry"], "scenario.carrier_entry");
    c.scenario.trajectory_bank = field<std::int64_t>(s, "trajectory_bank");
    c.scenario.bank_seed = field<std::uint64_t>(s, "bank_seed");

    const json& d = root.at("dynamics");
    DynamicsParams& p = c.scenario.dynamics;
    p.leg_mean = field<double>(d, "leg_mean");
    p.leg_std = field<double>(d, "leg_std");
    p.leg_half_width = field<double>(d, "leg_half_width");
    p.course_std = field<double>(d, "course_std");
    p.course_half_width = field<double>(d, "course_half_width");
    p.escape_half_width = field<double>(d, "escape_half_width");
    p.course_memory = enum_from(course_memories, d.at("course_memory"), "dynamics.course_memory");
    p.initial_course = optional_field<double>(d, "initial_course");
    p.start_mode = enum_from(start_modes, d.at("start_mode"), "dynamics.start_mode");
    if (d.contains("start_center") && !d["start_center"].is_null())
        p.start_center = vec_from(d["start_center"], "dynamics.start_center");
    p.start_sigma = field<double>(d, "start_sigma");
    p.speed_mean = field<double>(d, "speed_mean");
    p.speed_std = field<double>(d, "speed_std");
    p.speed_half_width = field<double>(d, "speed_half_width");
    p.speed_per_leg = field<bool>(d, "speed_per_leg");
    p.reactive = field<bool>(d, "reactive");

    const json& cr = root.at("criteria");
    c.scenario.criteria.min_detections = field<int>(cr, "min_detections");
    c.scenario.criteria.max_avoidances = optional_field<int>(cr, "max_avoidances");

    const json& o = root.at("optimizer");
    SplittingConfig& g = c.splitting;
    g.population = field<int>(o, "population");
    g.rho = field<double>(o, "rho");
    g.max_iterations = field<int>(o, "max_iterations");
    g.b0 = field<double>(o, "b0");
    g.alpha = field<double>(o, "alpha");
    g.repopulation = enum_from(repopulations, o.at("repopulation"), "optimizer.repopulation");
    g.stagnation_patience = field<int>(o, "stagnation_patience");
    g.stagnation_decrease = field<double>(o, "stagnation_decrease");
    g.n_trajectories = field<std::int64_t>(o, "n_trajectories");
    g.seed = field<std::uint64_t>(o, "seed");
    g.max_retries = field<int>(o, "max_retries");
    for (int k = 0; k < move_kind_count; ++k)
        g.weights.lambda[static_cast<std::size_t>(k)] =
            field<double>(o.at("move_weights"), std::string(to_string(static_cast<MoveKind>(k))).c_str());
    g.moves.replace_on_remove = field<bool>(o, "replace_on_remove");
    const json& ms = o.at("move_sensor");
    g.moves.move_sensor.w_small = field<double>(ms, "w_small");
    g.moves.move_sensor.sigma_small = field<double>(ms, "sigma_small");
    g.moves.move_sensor.sigma_large = field<double>(ms, "sigma_large");
    g.moves.move_sensor.w_small_final = optional_field<double>(ms, "w_small_final");
    g.scan = enum_from(scans, o.at("scan"), "optimizer.scan");
    g.rescore_all = field<bool>(o, "rescore_all");
    g.time_budget_s = field<double>(o, "time_budget_s");
    g.threads = field<int>(o, "threads");
    g.sensor_count = field<int>(o, "sensor_count");
    g.carrier_step = field<double>(o, "carrier_step");
    return c;
}

void validate(const RunConfig& c)
{
    try {
        c.scenario.validate();
        c.splitting.validate();
    }
    catch (const ConfigParseError&) {
        throw;
    }
    catch (const std::exception& e) {
        throw ConfigParseError(e.what());
    }
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path)
{
    out.close();
    if (!out)
        throw IoError("write failed for " + path.string());
}

std::string seed_line(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

} // namespace

RunConfig profile_config(Profile profile)
{
    RunConfig c;
    ConstraintSet& cs = c.scenario.constraints;
    cs.theater.area = ConvexPolygon::rectangle({0.0, 0.0}, {30000.0, 30000.0});
    cs.theater.horizon = 3600.0;
    cs.theater.hunter_delay = 600.0;
    cs.spec.detection_radius = 1000.0;
    cs.spec.counter_detection_radius = 2000.0;
    cs.spec.max_activations = 1;
    cs.spec.carrier_speed = 50.0;
    cs.max_sensors = 10;
    cs.carrier_entry = Vec2{15000.0, 2000.0}; // the hunter arrives from the south

    c.scenario.dynamics = DynamicsParams{};

    SplittingConfig& o = c.splitting;
    o.weights = MoveWeights::fixed_count();
    o.moves.replace_on_remove = true;
    o.moves.move_sensor.w_small = 0.5;
    o.moves.move_sensor.sigma_small = 300.0;
    o.moves.move_sensor.sigma_large = 3000.0;
    o.sensor_count = 10;
    o.carrier_step = 2000.0;
    o.rho = 0.1;
    o.b0 = 2.0;
    o.alpha = 0.2;
    if (profile == Profile::paper) {
        o.population = 800;
        o.n_trajectories = 70000;
        o.max_iterations = 50;
    }
    else {
        o.population = 100;
        o.n_trajectories = 2000;
        o.max_iterations = 20;
    }
    return c;
}

Profile parse_profile(const std::string& name)
{
    if (name == "desk")
        return Profile::desk;
    if (name == "paper")
        return Profile::paper;
    throw ConfigParseError("unknown profile '" + name + "' (expected desk or paper)");
}

RunConfig parse_config(const std::string& text, const RunConfig& base)
{
    json user;
    try {
        user = json::parse(text);
    }
    catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw ConfigParseError("config parse error at line " + std::to_string(line) + ": " + e.what(), line);
    }
    if (!user.is_object())
        throw ConfigParseError("config root must be an object", 1);

    RunConfig start = base;
    if (user.contains("profile")) {
        start = profile_config(parse_profile(user["profile"].get<std::string>()));
        user.erase("profile");
    }
    json merged = config_json(start);
    check_keys(user, merged, "");
    merged.merge_patch(user);
    RunConfig out;
    try {
        out = config_from_json(merged);
    }
    catch (const json::exception& e) {
        throw ConfigParseError(std::string("config: ") + e.what());
    }
    validate(out);
    return out;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

RunConfig load_config(const std::filesystem::path& path) { return load_config(path, profile_config(Profile::desk)); }

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2) + "\n"; }

std::string solution_to_json(const Solution& solution, double score, std::uint64_t seed)
{
    json sensors = json::array();
    for (const auto& s : solution.sensors) {
        json acts = json::array();
        if (s.active)
            for (double t : s.activations)
                acts.push_back(t);
        else
            acts.push_back(-1.0); // disabled sensors carry negative instants
        sensors.push_back({{"x", s.position.x},
                           {"y", s.position.y},
                           {"active", s.active},
                           {"setup_time", s.setup_time},
                           {"activations", acts}});
    }
    json j = {{"seed", seed}, {"score", score}, {"sensors", sensors}};
    return j.dump(2) + "\n";
}

Solution parse_solution(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    }
    catch (const json::parse_error& e) {
        throw IoError(std::string("solution parse error: ") + e.what());
    }
    Solution s;
    try {
        for (const auto& js : j.at("sensors")) {
            Sensor sensor;
            sensor.position = {js.at("x").get<double>(), js.at("y").get<double>()};
            sensor.active = js.value("active", true);
            sensor.setup_time = js.value("setup_time", 0.0);
            for (const auto& t : js.at("activations")) {
                const double v = t.get<double>();
                if (v < 0.0)
                    sensor.active = false;
                sensor.activations.push_back(v);
            }
            if (!sensor.active)
                sensor.activations.clear();
            s.sensors.push_back(std::move(sensor));
        }
    }
    catch (const json::exception& e) {
        throw IoError(std::string("solution: ") + e.what());
    }
    return s;
}

Solution load_solution(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_solution(ss.str());
}

std::string series_header()
{
    return "iteration,gamma,gamma_next,best_current,best_ever,mean_score,std_score,c_hat,rare_event_probability,"
           "burn_in,elite_count,population,stagnation_event,min_elite_score,acceptance_rate,proposed,accepted,"
           "rejected_infeasible,rejected_below_threshold,rejected_retry_exhausted\n";
}

std::string series_row(const IterationRecord& r)
{
    const MoveCounters t = r.moves.total();
    const double rate = t.proposed > 0 ? static_cast<double>(t.accepted) / static_cast<double>(t.proposed) : 0.0;
    std::ostringstream os;
    os << r.iteration << ',' << num(r.gamma) << ',' << num(r.gamma_next) << ',' << num(r.best_current) << ','
       << num(r.best_ever) << ',' << num(r.mean_score) << ',' << num(r.std_score) << ','
       << (r.c_hat ? num(*r.c_hat) : std::string()) << ',' << num(r.rare_event_probability) << ',' << r.burn_in << ','
       << r.elite_count << ',' << r.population << ',' << (r.stagnation_event ? 1 : 0) << ',' << num(r.min_elite_score)
       << ',' << num(rate) << ',' << t.proposed << ',' << t.accepted << ',' << t.rejected_infeasible << ','
       << t.rejected_below_threshold << ',' << t.rejected_retry_exhausted << '\n';
    return os.str();
}

std::vector<std::filesystem::path> emit_trace(const RunTrace& trace, const std::filesystem::path& out_dir,
                                              const std::vector<std::int64_t>& attribution)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    const std::string meta = seed_line(trace.seed);

    {
        const auto path = out_dir / "series.csv";
        auto out = open_out(path);
        out << meta << series_header();
        for (const auto& r : trace.records)
            out << series_row(r);
        close_checked(out, path);
        written.push_back(path);
    }
    {
        const auto path = out_dir / "moves.csv";
        auto out = open_out(path);
        out << meta
            << "iteration,move,proposed,accepted,rejected_infeasible,rejected_below_threshold,"
               "rejected_retry_exhausted,acceptance_rate,infeasible_rate,below_threshold_rate\n";
        for (const auto& r : trace.records) {
            for (int k = 0; k < move_kind_count; ++k) {
                const MoveCounters& c = r.moves.per_move[static_cast<std::size_t>(k)];
                const auto p = static_cast<double>(c.proposed);
                const auto feasible = static_cast<double>(c.proposed - c.rejected_infeasible - c.rejected_retry_exhausted);
                out << r.iteration << ',' << to_string(static_cast<MoveKind>(k)) << ',' << c.proposed << ','
                    << c.accepted << ',' << c.rejected_infeasible << ',' << c.rejected_below_threshold << ','
                    << c.rejected_retry_exhausted << ',' << num(p > 0 ? c.accepted / p : 0.0) << ','
                    << num(p > 0 ? c.rejected_infeasible / p : 0.0) << ','
                    << num(feasible > 0 ? c.rejected_below_threshold / feasible : 0.0) << '\n';
            }
        }
        close_checked(out, path);
        written.push_back(path);
    }
    {
        const auto path = out_dir / "best_solution.json";
        auto out = open_out(path);
        out << solution_to_json(trace.best.solution, trace.best.score, trace.seed);
        close_checked(out, path);
        written.push_back(path);
    }
    {
        const auto path = out_dir / "histograms.csv";
        auto out = open_out(path);
        out << meta << "iteration,bin_lo,bin_hi,count\n";
        for (const auto& h : trace.histograms) {
            const auto bins = static_cast<double>(h.counts.size());
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                out << h.iteration << ',' << num(b / bins) << ',' << num((b + 1) / bins) << ',' << h.counts[b] << '\n';
        }
        close_checked(out, path);
        written.push_back(path);
    }
    auto write_density = [&](const char* name, bool spatial) {
        const auto path = out_dir / name;
        auto out = open_out(path);
        out << meta;
        if (!trace.densities.empty()) {
            const auto& d0 = trace.densities.front();
            out << "iteration,sensor";
            const int cells = spatial ? d0.grid_x * d0.grid_y : d0.time_bins;
            for (int c = 0; c < cells; ++c)
                out << ",bin_" << c;
            out << '\n';
        }
        for (const auto& d : trace.densities) {
            const auto& rows = spatial ? d.spatial : d.temporal;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                out << d.iteration << ',' << k + 1;
                for (auto v : rows[k])
                    out << ',' << v;
                out << '\n';
            }
        }
        close_checked(out, path);
        written.push_back(path);
    };
    write_density("density_spatial.csv", true);
    write_density("density_temporal.csv", false);

    if (!attribution.empty()) {
        const auto path = out_dir / "detection_rate.csv";
        auto out = open_out(path);
        std::int64_t total = 0;
        for (auto v : attribution)
            total += v;
        out << meta << "sensor,detections,share\n";
        for (std::size_t k = 0; k < attribution.size(); ++k)
            out << k + 1 << ',' << attribution[k] << ','
                << num(total > 0 ? static_cast<double>(attribution[k]) / static_cast<double>(total) : 0.0) << '\n';
        close_checked(out, path);
        written.push_back(path);
    }
    return written;
}

std::string trajectories_to_csv(const std::vector<Trajectory>& trajectories, std::uint64_t seed)
{
    std::ostringstream os;
    os << seed_line(seed) << "trajectory,kind,index,time,x,y,vx,vy,sensor,contact\n";
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& tr = trajectories[i];
        for (std::size_t k = 0; k < tr.waypoints.size(); ++k) {
            const auto& w = tr.waypoints[k];
            os << i << ",waypoint," << k << ',' << num(w.time) << ',' << num(w.position.x) << ','
               << num(w.position.y) << ',' << num(w.velocity.x) << ',' << num(w.velocity.y) << ",,\n";
        }
        for (std::size_t k = 0; k < tr.events.size(); ++k) {
            const auto& e = tr.events[k];
            const Vec2 p = tr.position_at(e.time);
            os << i << ",event," << k << ',' << num(e.time) << ',' << num(p.x) << ',' << num(p.y) << ",,,"
               << e.sensor + 1 << ',' << (e.kind == Contact::detection ? "detection" : "counter_detection") << '\n';
        }
    }
    return os.str();
}

} // namespace gsres
