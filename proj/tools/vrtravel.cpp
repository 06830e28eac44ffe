// Command line front end: world generation, scripted experiments, replay and the live service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vrtravel/config.hpp"
#include "vrtravel/errors.hpp"
#include "vrtravel/session_service.hpp"
#include "vrtravel/world_io.hpp"

using namespace vrtravel;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string world_file;
    std::vector<std::string> techniques;
    std::string out_dir;
    int reps = 0;
    int jobs = 0;
    double tick_rate = 0.0;
    int targets = 0;
    double path_length = 0.0;
    double extent = 0.0;
    bool use_run = false;
    bool no_sessions = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config_path, "JSON config file");
    cmd->add_option("-s,--seed", c.seeds, "World seed(s)");
    cmd->add_option("-w,--world", c.world_file, "World file (overrides seeds)");
    cmd->add_option("-t,--technique", c.techniques, "outstanding and/or teleport")
        ->check(CLI::IsMember({"outstanding", "teleport"}));
    cmd->add_option("-o,--out", c.out_dir, "Output directory");
    cmd->add_option("-r,--repetitions", c.reps, "Repetitions per seed and technique");
    cmd->add_option("-j,--jobs", c.jobs, "Worker threads");
    cmd->add_option("--tick-rate", c.tick_rate, "Simulation tick rate in Hz");
    cmd->add_option("--targets", c.targets, "Targets on the generated course");
    cmd->add_option("--course-length", c.path_length, "Generated course length in meters");
    cmd->add_option("--extent", c.extent, "Generated world side length in meters");
    cmd->add_flag("--run", c.use_run, "Outstanding agent toggles the avatar run speed");
    cmd->add_flag("--no-sessions", c.no_sessions, "Skip per-session event logs and scripts");
}

RunConfig base_config(const Common& c) {
    RunConfig rc = c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path);
    if (c.tick_rate > 0) rc.engine.tick_rate = c.tick_rate;
    WorldSpec& spec = rc.world.spec;
    if (c.targets > 0) spec.targets = c.targets;
    if (c.path_length > 0) spec.path_length = c.path_length;
    if (c.extent > 0) spec.extent_x = spec.extent_z = c.extent;
    if (!c.world_file.empty()) rc.world.file = c.world_file;
    if (!c.seeds.empty()) rc.world.seed = c.seeds.front();
    if (c.use_run) rc.policy.use_run = true;
    rc.engine.validate();

    ExperimentConfig& ex = rc.experiment;
    ex.engine = rc.engine;
    ex.policy = rc.policy;
    ex.world = spec;
    if (!c.seeds.empty()) ex.seeds = c.seeds;
    if (!c.techniques.empty()) {
        ex.techniques.clear();
        for (const auto& t : c.techniques) ex.techniques.push_back(technique_from_string(t));
    }
    if (c.reps > 0) ex.repetitions = c.reps;
    if (c.jobs > 0) ex.jobs = c.jobs;
    if (!c.out_dir.empty()) ex.output_dir = c.out_dir;
    if (c.no_sessions) ex.write_sessions = false;
    return rc;
}

int report_failures(const ExperimentResult& res) {
    for (const auto& r : res.sessions)
        if (!r.ok)
            std::cerr << "session failed: seed " << r.seed << ' ' << to_string(r.technique) << " rep " << r.repetition
                      << ": " << r.failure << '\n';
    return res.all_ok() ? 0 : 1;
}

/// Experiments over a fixed world file run every session on that world.
ExperimentResult run_on_world_file(const RunConfig& rc) {
    const auto world = resolve_world(rc.world);
    ExperimentResult res;
    const ExperimentConfig& ex = rc.experiment;
    for (TechniqueId t : ex.techniques) {
        for (int rep = 0; rep < ex.repetitions; ++rep) {
            SessionResult r;
            r.technique = t;
            r.repetition = rep;
            EngineConfig ec = ex.engine;
            ec.technique = t;
            const AgentRun run = run_agent_session(world, ec, ex.policy, policy_seed(0, t, rep));
            r.ok = run.ok;
            r.failure = run.failure;
            r.report = run.report;
            r.events_jsonl = run.log.to_jsonl();
            r.script_jsonl = run.script.to_jsonl();
            res.sessions.push_back(std::move(r));
        }
    }
    return res;
}

void print_summary(const ExperimentResult& res) {
    for (const auto& r : res.sessions)
        std::printf("seed %llu %-11s rep %d  %s  playtime %8.1f s  aims %3llu (near %llu, medium %llu, long %llu)  "
                    "switches %llu\n",
                    static_cast<unsigned long long>(r.seed), std::string(to_string(r.technique)).c_str(),
                    r.repetition, r.ok ? "ok    " : "FAILED", r.report.playtime,
                    static_cast<unsigned long long>(r.report.aims),
                    static_cast<unsigned long long>(r.report.aims_near),
                    static_cast<unsigned long long>(r.report.aims_medium),
                    static_cast<unsigned long long>(r.report.aims_far),
                    static_cast<unsigned long long>(r.report.mode_switches));
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perspective-switching travel vs arc teleport: simulation and experiment harness"};
    app.require_subcommand(1);

    // gen-world
    auto* gen = app.add_subcommand("gen-world", "Generate a world and write it as JSON");
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    bool gen_recipe = false;
    Common gen_c;
    gen->add_option("-s,--seed", gen_seed, "World seed");
    gen->add_option("-o,--out", gen_out, "Output file")->required();
    gen->add_flag("--recipe", gen_recipe, "Write only seed + spec; loaders regenerate the terrain");
    gen->add_option("--targets", gen_c.targets, "Targets on the course");
    gen->add_option("--course-length", gen_c.path_length, "Course length in meters");
    gen->add_option("--extent", gen_c.extent, "World side length in meters");
    gen->add_option("-c,--config", gen_c.config_path, "JSON config file (world.spec)");

    // run / compare
    Common run_c;
    auto* run = app.add_subcommand("run", "Run scripted-agent sessions and write CSV tables");
    add_common(run, run_c);
    Common cmp_c;
    auto* cmp = app.add_subcommand("compare", "Run both techniques and print the comparison table");
    add_common(cmp, cmp_c);

    // replay
    auto* rep = app.add_subcommand("replay", "Replay an input script headlessly and print its event log");
    Common rep_c;
    std::string script_path, expect_path, rep_out;
    rep->add_option("script", script_path, "Input script (JSONL)")->required();
    rep->add_option("-c,--config", rep_c.config_path, "JSON config file");
    rep->add_option("-s,--seed", rep_c.seeds, "World seed");
    rep->add_option("-w,--world", rep_c.world_file, "World file");
    rep->add_option("-t,--technique", rep_c.techniques, "Technique")->check(CLI::IsMember({"outstanding", "teleport"}));
    rep->add_option("--tick-rate", rep_c.tick_rate, "Tick rate in Hz");
    rep->add_option("-o,--out", rep_out, "Write the event log here instead of stdout");
    rep->add_option("--expect", expect_path, "Event log the replay must reproduce byte for byte");

    // serve
    auto* srv = app.add_subcommand("serve", "Serve live sessions over WebSocket");
    std::string bind = "127.0.0.1:8080";
    Common srv_c;
    std::string record_dir;
    srv->add_option("--bind", bind, "host:port");
    srv->add_option("--tick-rate", srv_c.tick_rate, "Simulation tick rate in Hz");
    srv->add_option("--world", srv_c.world_file, "World file for new sessions");
    srv->add_option("-s,--seed", srv_c.seeds, "World seed when no world file is given");
    srv->add_option("-c,--config", srv_c.config_path, "JSON config file with session defaults");
    srv->add_option("--record-dir", record_dir, "Save finished sessions' scripts and logs here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            RunConfig rc = base_config(gen_c);
            if (gen_recipe) {
                std::ofstream out(gen_out);
                out << world_recipe_json(gen_seed, rc.world.spec).dump(2) << '\n';
                if (!out) throw ConfigError("cannot write " + gen_out);
            } else {
                save_world(generate_world(gen_seed, rc.world.spec), gen_out);
            }
            return 0;
        }
        if (*run || *cmp) {
            Common& c = *run ? run_c : cmp_c;
            RunConfig rc = base_config(c);
            if (*cmp && c.techniques.empty())
                rc.experiment.techniques = {TechniqueId::outstanding, TechniqueId::teleport};
            ExperimentResult res;
            if (rc.world.file) {
                res = run_on_world_file(rc);
            } else {
                res = run_experiment(rc.experiment);
            }
            print_summary(res);
            if (*cmp) std::cout << '\n' << res.comparison_csv;
            if (rc.world.file && !rc.experiment.output_dir.empty())
                std::cerr << "note: --out is only written for seeded experiments\n";
            return report_failures(res);
        }
        if (*rep) {
            RunConfig rc = base_config(rep_c);
            if (!rep_c.techniques.empty()) rc.engine.technique = technique_from_string(rep_c.techniques.front());
            const auto world = resolve_world(rc.world);
            const InputScript script = InputScript::from_jsonl(read_text(script_path));
            Session session(world, rc.engine);
            const std::string log = run_script(session, script).to_jsonl();
            if (rep_out.empty()) {
                std::cout << log;
            } else {
                std::ofstream(rep_out, std::ios::binary) << log;
            }
            if (!expect_path.empty() && read_text(expect_path) != log) {
                std::cerr << "replay does not match " << expect_path << '\n';
                return 1;
            }
            return 0;
        }
        if (*srv) {
            RunConfig rc = base_config(srv_c);
            ServiceOptions opts;
            std::tie(opts.address, opts.port) = parse_bind(bind);
            opts.engine = rc.engine;
            opts.world = resolve_world(rc.world);
            if (!record_dir.empty()) opts.record_dir = record_dir;
            serve(std::move(opts));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
