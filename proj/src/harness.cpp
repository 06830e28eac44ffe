#include "vrtravel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "vrtravel/errors.hpp"

namespace vrtravel {

namespace {

bool aim_logged_at(const Session& s, std::uint64_t tick) {
    const auto& recs = s.log().records();
    for (auto it = recs.rbegin(); it != recs.rend() && it->tick >= tick; ++it)
        if (it->tick == tick && it->kind == EventKind::aim) return true;
    return false;
}

Vec3 flat_direction(const Vec3& from, const Vec3& to) {
    const double dx = to.x - from.x;
    const double dz = to.z - from.z;
    const double d = std::sqrt(dx * dx + dz * dz);
    return d > 0.0 ? Vec3{dx / d, 0.0, dz / d} : Vec3{};
}

constexpr int kMaxFailedCommits = 4;

}  // namespace

void AgentPolicy::advance_reached(const Vec3& body) {
    while (next_target_ < targets_.size() && horizontal_distance(body, targets_[next_target_]) <= params_.arrive_radius)
        ++next_target_;
}

int AgentPolicy::draw_hold_ticks() {
    return static_cast<int>(rng_.uniform_int(std::max(1, params_.hold_ticks_min),
                                             std::max(params_.hold_ticks_min, params_.hold_ticks_max)));
}

InputEvent AgentPolicy::walk_toward(const Session& s, const Vec3& from, const Vec3& to, double gain) const {
    const double d = horizontal_distance(from, to);
    const double step = std::min(params_.physical_speed * s.config().dt(), d / gain);
    const Vec3 dir = flat_direction(from, to);
    return InputEvent::move(s.tick(), dir.x * step, dir.z * step);
}

InputEvent AgentPolicy::look_at(const Session& s, const Vec3& dir) {
    const Pose& eye = s.rig().eye;
    const double yaw = std::atan2(dir.x, dir.z);
    const double pitch = -std::asin(std::clamp(dir.y, -1.0, 1.0));
    return InputEvent::look(s.tick(), normalize_yaw(yaw - eye.yaw), pitch - eye.pitch);
}

std::optional<TeleportChainPolicy::Landing> TeleportChainPolicy::choose_landing(const Session& s,
                                                                                const Vec3& target) const {
    const WorldModel& world = s.world();
    const TeleportConfig& tc = s.config().teleport;
    const Vec3 body = s.avatar().pose.position;
    const Vec3 origin{body.x, body.y + tc.controller_height, body.z};
    const double d = horizontal_distance(body, target);
    const double limit = params_.max_hop - params_.hop_margin;
    const double hop0 = std::min(d, limit);
    const double base_yaw = std::atan2(target.x - body.x, target.z - body.z);

    std::optional<Landing> best;
    double best_score = d - 0.25;
    for (int k = 0; k <= 18; ++k) {
        const double offset = k == 0 ? 0.0 : deg_to_rad(10.0 * ((k + 1) / 2)) * (k % 2 ? 1.0 : -1.0);
        const double yaw = base_yaw + offset;
        const Vec3 heading{std::sin(yaw), 0.0, std::cos(yaw)};
        for (double h = hop0; h >= 1.0; h *= 0.85) {
            double px = body.x + heading.x * h;
            double pz = body.z + heading.z * h;
            if (!world.contains(px, pz)) continue;
            Vec3 p = world.ground(px, pz);
            // logged hop length is 3D, so pull slope landings back inside the limit
            for (int fit = 0; fit < 4 && distance(body, p) > limit; ++fit) {
                h *= limit / distance(body, p) * (1.0 - 1e-6);
                px = body.x + heading.x * h;
                pz = body.z + heading.z * h;
                p = world.ground(px, pz);
            }
            const auto dir = launch_direction(origin, p, tc.v0, tc.g);
            if (!dir) continue;
            const ArcResult arc = parabolic_arc(world, origin, *dir, tc.v0, tc.g);
            if (!arc.hit || arc.hit->surface != Surface::terrain || !arc.hit->navigable) continue;
            if (horizontal_distance(arc.hit->point, p) > params_.landing_tolerance) continue;
            if (distance(body, arc.hit->point) > limit) continue;
            const double score = horizontal_distance(arc.hit->point, target);
            if (score < best_score) {
                best_score = score;
                best = Landing{*dir, p};
            }
            if (k == 0 && h == hop0) return best;
            break;
        }
    }
    return best;
}

std::vector<InputEvent> TeleportChainPolicy::decide(const Session& s) {
    if (failure_ || done()) return {};
    const std::uint64_t now = s.tick();
    if (release_at_) {
        if (now < *release_at_) return {};
        aims_before_ = now;
        release_at_.reset();
        check_commit_ = true;
        return {InputEvent::of(now, InputKind::trigger_release)};
    }
    if (check_commit_) {
        check_commit_ = false;
        failed_commits_ = aim_logged_at(s, aims_before_) ? 0 : failed_commits_ + 1;
    }
    if (failed_commits_ > kMaxFailedCommits) {
        fail("teleport commits keep failing");
        return {};
    }

    const Vec3 body = s.avatar().pose.position;
    advance_reached(body);
    const Vec3* target = current_target();
    if (!target) return {};

    if (horizontal_distance(body, *target) <= params_.walk_radius) return {walk_toward(s, body, *target, 1.0)};

    const auto landing = choose_landing(s, *target);
    if (!landing) {
        fail("stuck: no valid landing toward target " + std::to_string(next_target_));
        return {};
    }
    release_at_ = now + static_cast<std::uint64_t>(draw_hold_ticks());
    return {look_at(s, landing->dir), InputEvent::of(now, InputKind::trigger_press)};
}

std::vector<InputEvent> OutstandingTravelerPolicy::decide(const Session& s) {
    if (failure_ || done()) return {};
    const std::uint64_t now = s.tick();
    const Vec3 body = s.avatar().pose.position;
    const Phase phase = s.phase();

    switch (stage_) {
        case Stage::idle: {
            if (phase != Phase::nm) return {};
            advance_reached(body);
            const Vec3* target = current_target();
            if (!target) return {};
            if (horizontal_distance(body, *target) <= params_.switch_threshold)
                return {walk_toward(s, body, *target, 1.0)};
            stage_ = Stage::ascending;
            return {InputEvent::of(now, InputKind::switch_button)};
        }
        case Stage::ascending:
            if (phase != Phase::tm) return {};
            stage_ = Stage::scouting;
            [[fallthrough]];
        case Stage::scouting: {
            const Vec3& target = *current_target();
            const Vec3 eye = s.rig().eye.position;
            const Vec3 dir = normalized(target - eye);
            const auto hit = s.world().ray_ground_intersect(eye, dir);
            if (hit && hit->surface == Surface::terrain && hit->navigable &&
                distance(hit->point, target) <= params_.aim_tolerance) {
                stage_ = Stage::holding;
                release_at_ = now + static_cast<std::uint64_t>(draw_hold_ticks());
                return {look_at(s, dir), InputEvent::of(now, InputKind::trigger_press)};
            }
            if (horizontal_distance(eye, target) < 1.0) {
                fail("target " + std::to_string(next_target_) + " not visible from travel mode");
                return {};
            }
            // no line of sight yet: walk the miniature world toward the target
            return {walk_toward(s, eye, target, s.rig().scale)};
        }
        case Stage::holding:
            if (now < release_at_) return {};
            stage_ = Stage::travelling;
            return {InputEvent::of(now, InputKind::trigger_release)};
        case Stage::travelling: {
            if (now == release_at_ + 1 && !aim_logged_at(s, release_at_)) {
                if (++failed_commits_ > kMaxFailedCommits) {
                    fail("unreachable target " + std::to_string(next_target_));
                    return {};
                }
                stage_ = Stage::scouting;
                return {};
            }
            std::vector<InputEvent> ev;
            if (params_.use_run && !s.outstanding().run) ev.push_back(InputEvent::of(now, InputKind::run_toggle));
            if (!s.avatar().has_path()) {
                failed_commits_ = 0;
                stage_ = Stage::descending;
                ev.push_back(InputEvent::of(now, InputKind::switch_button));
            }
            return ev;
        }
        case Stage::descending:
            if (phase != Phase::nm) return {};
            stage_ = Stage::idle;
            return decide(s);
    }
    return {};
}

std::unique_ptr<AgentPolicy> make_policy(TechniqueId technique, std::vector<Vec3> targets, const PolicyParams& params,
                                         std::uint64_t seed) {
    if (technique == TechniqueId::teleport)
        return std::make_unique<TeleportChainPolicy>(std::move(targets), params, seed);
    return std::make_unique<OutstandingTravelerPolicy>(std::move(targets), params, seed);
}

AgentRun run_agent(Session& session, AgentPolicy& policy, double time_limit) {
    AgentRun run;
    while (!policy.done() && !policy.failure()) {
        if (session.sim_time() >= time_limit) break;
        std::vector<InputEvent> events = policy.decide(session);
        if (policy.done() || policy.failure()) break;
        run.script.events.insert(run.script.events.end(), events.begin(), events.end());
        session.step(events);
    }
    session.finish();
    run.script.end_tick = session.tick();
    run.log = session.log();
    run.report = summarize(run.log, session.config().tick_rate);
    run.targets_reached = policy.targets_reached();
    if (policy.failure()) {
        run.ok = false;
        run.failure = *policy.failure();
    } else if (!policy.done()) {
        run.ok = false;
        run.failure = "time limit reached";
    }
    return run;
}

AgentRun run_agent_session(std::shared_ptr<const WorldModel> world, const EngineConfig& cfg,
                           const PolicyParams& params, std::uint64_t seed) {
    Session session(world, cfg);
    auto policy = make_policy(cfg.technique, world->targets(), params, seed);
    return run_agent(session, *policy, params.time_limit);
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (techniques.empty()) throw ConfigError("experiment needs at least one technique");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    engine.validate();
}

bool ExperimentResult::all_ok() const {
    return std::all_of(sessions.begin(), sessions.end(), [](const SessionResult& r) { return r.ok; });
}

std::uint64_t policy_seed(std::uint64_t world_seed, TechniqueId technique, int repetition) {
    return mix64(mix64(world_seed) ^ (static_cast<std::uint64_t>(technique) << 32) ^
                 static_cast<std::uint64_t>(repetition));
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string session_stem(const SessionResult& r) {
    return "seed-" + std::to_string(r.seed) + "_" + std::string(to_string(r.technique)) + "_rep-" +
           std::to_string(r.repetition);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << text;
}

void build_tables(const ExperimentConfig& cfg, ExperimentResult& res) {
    std::ostringstream sessions;
    sessions << "v,seed,technique,repetition,status,failure," << report_csv_header() << '\n';
    for (const auto& r : res.sessions)
        sessions << kCsvSchemaVersion << ',' << r.seed << ',' << to_string(r.technique) << ',' << r.repetition << ','
                 << (r.ok ? "ok" : "failed") << ',' << csv_quote(r.failure) << ',' << report_csv_fields(r.report)
                 << '\n';
    res.sessions_csv = sessions.str();

    std::ostringstream cmp;
    std::ostringstream hist;
    cmp << "v,technique,sessions,failures,mean_playtime_s,mean_tm_time_s,total_aims,mean_aims,aims_near,aims_medium,"
           "aims_long,total_mode_switches,mean_real_walk_nm_m,mean_real_walk_tm_m,mean_avatar_virtual_m,"
           "mean_peak_flow\n";
    hist << "v,technique,bucket,count\n";
    for (TechniqueId t : cfg.techniques) {
        std::uint64_t n = 0, failures = 0, aims = 0, near = 0, medium = 0, far = 0, switches = 0;
        double playtime = 0, tm = 0, walk_nm = 0, walk_tm = 0, virt = 0, flow = 0;
        for (const auto& r : res.sessions) {
            if (r.technique != t) continue;
            if (!r.ok) {
                ++failures;
                continue;
            }
            ++n;
            const SessionReport& p = r.report;
            playtime += p.playtime;
            tm += p.tm_time;
            aims += p.aims;
            near += p.aims_near;
            medium += p.aims_medium;
            far += p.aims_far;
            switches += p.mode_switches;
            walk_nm += p.real_walk_nm;
            walk_tm += p.real_walk_tm;
            virt += p.avatar_virtual;
            flow += p.peak_flow;
        }
        const double div = n ? static_cast<double>(n) : 1.0;
        cmp << kCsvSchemaVersion << ',' << to_string(t) << ',' << n << ',' << failures << ','
            << format_number(playtime / div) << ',' << format_number(tm / div) << ',' << aims << ','
            << format_number(static_cast<double>(aims) / div) << ',' << near << ',' << medium << ',' << far << ','
            << switches << ',' << format_number(walk_nm / div) << ',' << format_number(walk_tm / div) << ','
            << format_number(virt / div) << ',' << format_number(flow / div) << '\n';
        hist << kCsvSchemaVersion << ',' << to_string(t) << ",near," << near << '\n'
             << kCsvSchemaVersion << ',' << to_string(t) << ",medium," << medium << '\n'
             << kCsvSchemaVersion << ',' << to_string(t) << ",long," << far << '\n';
    }
    res.comparison_csv = cmp.str();
    res.histogram_csv = hist.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;

    for (std::uint64_t seed : cfg.seeds) {
        std::shared_ptr<const WorldModel> world;
        std::string world_error;
        try {
            world = std::make_shared<const WorldModel>(generate_world(seed, cfg.world));
        } catch (const std::exception& e) {
            world_error = e.what();
        }

        std::vector<SessionResult> batch;
        for (TechniqueId t : cfg.techniques)
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
                SessionResult r;
                r.seed = seed;
                r.technique = t;
                r.repetition = rep;
                batch.push_back(std::move(r));
            }

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < batch.size(); i = next++) {
                SessionResult& r = batch[i];
                if (!world) {
                    r.ok = false;
                    r.failure = "world generation failed: " + world_error;
                    continue;
                }
                try {
                    EngineConfig ec = cfg.engine;
                    ec.technique = r.technique;
                    AgentRun run = run_agent_session(world, ec, cfg.policy, policy_seed(seed, r.technique, r.repetition));
                    r.ok = run.ok;
                    r.failure = run.failure;
                    r.report = run.report;
                    r.events_jsonl = run.log.to_jsonl();
                    r.script_jsonl = run.script.to_jsonl();
                } catch (const std::exception& e) {
                    r.ok = false;
                    r.failure = e.what();
                }
            }
        };
        const int threads = std::min<int>(cfg.jobs, static_cast<int>(batch.size()));
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        }
        for (auto& r : batch) res.sessions.push_back(std::move(r));
    }

    build_tables(cfg, res);

    if (!cfg.output_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.output_dir);
        write_text(cfg.output_dir / "sessions.csv", res.sessions_csv);
        write_text(cfg.output_dir / "comparison.csv", res.comparison_csv);
        write_text(cfg.output_dir / "histogram.csv", res.histogram_csv);
        if (cfg.write_sessions) {
            fs::create_directories(cfg.output_dir / "events");
            fs::create_directories(cfg.output_dir / "scripts");
            for (const auto& r : res.sessions) {
                if (r.events_jsonl.empty()) continue;
                write_text(cfg.output_dir / "events" / (session_stem(r) + ".jsonl"), r.events_jsonl);
                write_text(cfg.output_dir / "scripts" / (session_stem(r) + ".jsonl"), r.script_jsonl);
            }
        }
    }
    return res;
}

}  // namespace vrtravel
