// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "testkit.hpp"
#include "vrtravel/avatar.hpp"
#include "vrtravel/geometry.hpp"
#include "vrtravel/harness.hpp"
#include "vrtravel/metrics.hpp"
#include "vrtravel/rng.hpp"

using namespace vrtravel;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

const RigConfig kRig{};

RigState nm_rig(const Vec3& feet, double yaw) { return first_person_rig(make_pose(feet, yaw, 0.0), kRig); }

Outcome transition_geometry() {
    const TransitionParams params;
    const Vec3 feet{3, 2, 5};
    const RigState nm = nm_rig(feet, 0.7);
    const RigState tm = tm_pose_from_nm(nm, feet, params, kRig);
    const double up = tm.eye.position.y - feet.y;
    const double back = horizontal_distance(tm.eye.position, feet);
    const double depression = rad_to_deg(std::atan2(up, back));
    const bool ok = std::abs(up - 17.0) < 1e-9 && std::abs(back - 17.0) < 1e-9 && std::abs(depression - 45.0) <= 0.1 &&
                    std::abs(rad_to_deg(tm.eye.pitch) - 45.0) <= 0.1 && tm.scale == 10.0;
    return {ok, fmt("height %.6f m, offset %.6f m, depression %.4f deg", up, back, depression)};
}

Outcome eye_separation() {
    const TransitionParams params;
    const RigState nm = nm_rig({0, 0, 0}, 0.0);
    const RigState tm = tm_pose_from_nm(nm, {0, 0, 0}, params, kRig);
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < 64; ++i) {
        const double t = i / 63.0;
        for (const auto& [a, b] : {std::pair{nm, tm}, std::pair{tm, nm}}) {
            const RigState r = transition_sample(a, b, t, params, kRig);
            const double err = std::abs(r.eye_separation - 0.064 * r.scale);
            worst = std::max(worst, err / r.eye_separation);
            if (err > 1e-9 * r.eye_separation) ok = false;
        }
    }
    return {ok, fmt("64 samples each way, worst relative error %.3g", worst)};
}

Outcome transition_timing() {
    const auto w = testkit::line_world(100, {50});
    Session s(w, EngineConfig{});
    const InputEvent sw = InputEvent::of(0, InputKind::switch_button);
    s.step(std::span<const InputEvent>(&sw, 1));
    int ticks = 1;
    while (s.phase() == Phase::transition_up && ticks < 100) {
        s.step({});
        ++ticks;
    }
    const bool timing_ok = ticks == 15 && s.phase() == Phase::tm && s.rig().scale == 10.0;

    const TransitionParams params;
    const RigState nm = nm_rig({0, 0, 0}, 0.0);
    const RigState tm = tm_pose_from_nm(nm, {0, 0, 0}, params, kRig);
    int violations = 0;
    for (int i = 0; i <= 1024; ++i) {
        const double t = i / 1024.0;
        const CurveProgress p = transition_progress(t, params.horizontal_share, true);
        if (p.horizontal < p.vertical) ++violations;
        if (i == 0 || i == 1024) continue;
        const Vec3 e = transition_sample(nm, tm, t, params, kRig).eye.position;
        const double h = horizontal_distance(nm.eye.position, e) / horizontal_distance(nm.eye.position, tm.eye.position);
        const double v = (e.y - nm.eye.position.y) / (tm.eye.position.y - nm.eye.position.y);
        if (h < v) ++violations;
    }
    return {timing_ok && violations == 0,
            fmt("TM after %.0f ticks (%.4f s), lead-order violations %.0f", ticks, ticks / 30.0, violations)};
}

double seconds_to_arrive(const WorldModel& w, SpeedMode mode) {
    AvatarState a;
    a.pose = make_pose(w.course().front(), 0.0, 0.0);
    a.path = w.course();
    a.next_waypoint = 1;
    a.speed_mode = mode;
    const AvatarConfig cfg;
    const double dt = 1.0 / 30.0;
    for (std::uint64_t ticks = 1; ticks < 10'000'000; ++ticks) {
        auto r = advance(a, dt, w, cfg);
        if (r.arrived) return static_cast<double>(ticks) * dt;
        a = std::move(r.avatar);
    }
    return -1.0;
}

Outcome travel_timing() {
    const auto t0 = Clock::now();
    const WorldModel w = generate_world(1, WorldSpec{});
    const double walk = seconds_to_arrive(w, SpeedMode::walk);
    const double run = seconds_to_arrive(w, SpeedMode::run);
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool ok = std::abs(walk - 540.0) <= 1.0 && std::abs(run - 240.0) <= 1.0 && wall < 5.0;
    return {ok, fmt("walk %.3f s, run %.3f s, wall %.3f s", walk, run, wall)};
}

AgentRun agent(std::shared_ptr<const WorldModel> w, TechniqueId t, std::uint64_t seed = 7) {
    EngineConfig cfg;
    cfg.technique = t;
    return run_agent_session(std::move(w), cfg, PolicyParams{}, seed);
}

Outcome aiming_arithmetic() {
    const auto w = testkit::line_world(400, {300});
    const AgentRun t = agent(w, TechniqueId::teleport);
    const AgentRun o = agent(w, TechniqueId::outstanding);
    const auto expected = static_cast<std::uint64_t>(std::ceil(300.0 / (20.0 * 20.0 / 9.81)));
    const bool ok = t.ok && o.ok && t.report.aims == expected && expected == 8 && o.report.aims == 1 &&
                    o.report.mode_switches == 2;
    return {ok, fmt("teleport %.0f aims (expected %.0f), outstanding %.0f aim + %.0f switches",
                    static_cast<double>(t.report.aims), static_cast<double>(expected),
                    static_cast<double>(o.report.aims), static_cast<double>(o.report.mode_switches))};
}

Outcome histogram_shape() {
    const auto w = std::make_shared<const WorldModel>(generate_world(1, WorldSpec{}));
    const AgentRun o = agent(w, TechniqueId::outstanding, policy_seed(1, TechniqueId::outstanding, 0));
    const AgentRun t = agent(w, TechniqueId::teleport, policy_seed(1, TechniqueId::teleport, 0));
    const auto near_course = testkit::line_world(60, {1.5, 3.0, 4.5, 6.0});
    const AgentRun on = agent(near_course, TechniqueId::outstanding);
    const AgentRun tn = agent(near_course, TechniqueId::teleport);
    const bool ok = o.ok && t.ok && on.ok && tn.ok && o.report.aims_medium < t.report.aims_medium &&
                    o.report.aims_far >= 7 && on.report.aims == tn.report.aims &&
                    on.report.aims_near == tn.report.aims_near;
    return {ok, fmt("medium %.0f vs %.0f, outstanding long %.0f, near-course aims %.0f",
                    static_cast<double>(o.report.aims_medium), static_cast<double>(t.report.aims_medium),
                    static_cast<double>(o.report.aims_far), static_cast<double>(on.report.aims)) +
                    fmt(" vs %.0f", static_cast<double>(tn.report.aims))};
}

Outcome direction() {
    ExperimentConfig cfg;
    cfg.seeds.clear();
    for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
    cfg.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    cfg.write_sessions = false;
    const ExperimentResult r = run_experiment(cfg);
    int holds = 0;
    double aims_o = 0, aims_t = 0, play_o = 0, play_t = 0;
    for (std::size_t i = 0; i + 1 < r.sessions.size(); i += 2) {
        const SessionResult& o = r.sessions[i];
        const SessionResult& t = r.sessions[i + 1];
        if (o.technique != TechniqueId::outstanding || t.technique != TechniqueId::teleport || o.seed != t.seed)
            return {false, "unexpected session order"};
        if (o.ok && t.ok && o.report.aims < t.report.aims && o.report.playtime > t.report.playtime) ++holds;
        aims_o += static_cast<double>(o.report.aims);
        aims_t += static_cast<double>(t.report.aims);
        play_o += o.report.playtime;
        play_t += t.report.playtime;
    }
    const bool ok = r.sessions.size() == 40 && holds == 20;
    return {ok, fmt("%.0f/20 seeds; mean aims %.1f vs %.1f", holds, aims_o / 20, aims_t / 20) +
                    fmt(", mean playtime %.1f s vs %.1f s", play_o / 20, play_t / 20)};
}

Outcome flow_invariance() {
    double worst = 0.0;
    for (double v : {1.0, 4.0, 9.0}) {
        const double ref = normalized_flow(v, 1.0, 1.7);
        for (double s : {1.0, 5.0, 10.0, 20.0}) worst = std::max(worst, std::abs(normalized_flow(v * s, s, 1.7) - ref));
    }
    return {worst <= 1e-12, fmt("max deviation %.3g", worst)};
}

Outcome pathfinding_oracle() {
    const testkit::OracleTally t = testkit::astar_vs_dijkstra(1000, 1);
    return {t.trials == 1000 && t.mismatches == 0,
            fmt("%.0f grids, %.0f mismatches, %.0f unreachable pairs agreed", t.trials, t.mismatches, t.unreachable)};
}

std::string tree_digest(const std::filesystem::path& dir, std::size_t& files) {
    std::vector<std::filesystem::path> paths;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file()) paths.push_back(std::filesystem::relative(e.path(), dir));
    std::sort(paths.begin(), paths.end());
    files = paths.size();
    std::string all;
    for (const auto& p : paths) {
        std::ifstream in(dir / p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        all += p.string() + '\0' + ss.str() + '\0';
    }
    return all;
}

Outcome determinism() {
    const auto base = std::filesystem::temp_directory_path() / "vrtravel_acceptance_determinism";
    std::filesystem::remove_all(base);
    ExperimentConfig cfg;
    cfg.seeds = {3, 4};
    cfg.repetitions = 2;
    cfg.output_dir = base / "a";
    cfg.jobs = 1;
    run_experiment(cfg);
    cfg.output_dir = base / "b";
    cfg.jobs = 4;
    run_experiment(cfg);
    std::size_t fa = 0, fb = 0;
    const bool same = tree_digest(base / "a", fa) == tree_digest(base / "b", fb);
    std::filesystem::remove_all(base);
    return {same && fa == fb && fa > 3, fmt("%.0f files compared, identical: ", static_cast<double>(fa)) +
                                            (same ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"transition geometry", transition_geometry},
        {"eye separation proportionality", eye_separation},
        {"transition timing and lead order", transition_timing},
        {"travel timing", travel_timing},
        {"aiming arithmetic", aiming_arithmetic},
        {"histogram shape", histogram_shape},
        {"direction properties", direction},
        {"comfort proxy invariance", flow_invariance},
        {"pathfinding oracle", pathfinding_oracle},
        {"determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
