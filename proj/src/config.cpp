#include "vrtravel/config.hpp"

#include <fstream>

#include "vrtravel/errors.hpp"
#include "vrtravel/world_io.hpp"

namespace vrtravel {

namespace {

using nlohmann::json;

template <typename T>
void take(const json& doc, const char* key, T& out) {
    if (!doc.contains(key)) return;
    try {
        out = doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

void take_deg(const json& doc, const char* key, double& out_rad) {
    double deg = rad_to_deg(out_rad);
    take(doc, key, deg);
    out_rad = deg_to_rad(deg);
}

void require_object(const json& doc, const char* what) {
    if (!doc.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

RigConfig rig_from_json(const json& doc, RigConfig rig) {
    require_object(doc, "rig");
    take(doc, "ipd_base", rig.ipd_base);
    take(doc, "eye_height_base", rig.eye_height_base);
    return rig;
}

}  // namespace

EngineConfig engine_config_from_json(const json& doc, EngineConfig cfg) {
    require_object(doc, "config");
    if (doc.contains("technique")) {
        if (!doc["technique"].is_string()) throw ConfigError("technique must be a string");
        cfg.technique = technique_from_string(doc["technique"].get<std::string>());
    }
    take(doc, "tick_rate", cfg.tick_rate);
    if (doc.contains("transition")) {
        const json& t = doc["transition"];
        require_object(t, "transition");
        TransitionParams& p = cfg.outstanding.transition;
        take(t, "duration", p.duration);
        take(t, "tm_scale", p.tm_scale);
        take_deg(t, "view_angle_deg", p.view_angle);
        take(t, "horizontal_share", p.horizontal_share);
    }
    if (doc.contains("rig")) {
        cfg.outstanding.rig = rig_from_json(doc["rig"], cfg.outstanding.rig);
        cfg.teleport.rig = cfg.outstanding.rig;
    }
    if (doc.contains("teleport")) {
        const json& t = doc["teleport"];
        require_object(t, "teleport");
        take(t, "v0", cfg.teleport.v0);
        take(t, "g", cfg.teleport.g);
        take(t, "controller_height", cfg.teleport.controller_height);
    }
    if (doc.contains("avatar")) {
        const json& a = doc["avatar"];
        require_object(a, "avatar");
        take(a, "walk_speed", cfg.avatar.walk_speed);
        take(a, "run_speed", cfg.avatar.run_speed);
    }
    take(doc, "catch_up", cfg.outstanding.catch_up_enabled);
    take(doc, "room_clamp", cfg.room_clamp);
    take(doc, "room_half_extent", cfg.room_half_extent);
    cfg.validate();
    return cfg;
}

json engine_config_to_json(const EngineConfig& cfg) {
    const TransitionParams& t = cfg.outstanding.transition;
    return json{
        {"technique", to_string(cfg.technique)},
        {"tick_rate", cfg.tick_rate},
        {"transition",
         {{"duration", t.duration},
          {"tm_scale", t.tm_scale},
          {"view_angle_deg", rad_to_deg(t.view_angle)},
          {"horizontal_share", t.horizontal_share}}},
        {"rig", {{"ipd_base", cfg.rig().ipd_base}, {"eye_height_base", cfg.rig().eye_height_base}}},
        {"teleport",
         {{"v0", cfg.teleport.v0}, {"g", cfg.teleport.g}, {"controller_height", cfg.teleport.controller_height}}},
        {"avatar", {{"walk_speed", cfg.avatar.walk_speed}, {"run_speed", cfg.avatar.run_speed}}},
        {"catch_up", cfg.outstanding.catch_up_enabled},
        {"room_clamp", cfg.room_clamp},
        {"room_half_extent", cfg.room_half_extent},
    };
}

PolicyParams policy_from_json(const json& doc, PolicyParams p) {
    require_object(doc, "policy");
    take(doc, "arrive_radius", p.arrive_radius);
    take(doc, "walk_radius", p.walk_radius);
    take(doc, "physical_speed", p.physical_speed);
    take(doc, "hold_ticks_min", p.hold_ticks_min);
    take(doc, "hold_ticks_max", p.hold_ticks_max);
    take(doc, "switch_threshold", p.switch_threshold);
    take(doc, "use_run", p.use_run);
    take(doc, "aim_tolerance", p.aim_tolerance);
    take(doc, "max_hop", p.max_hop);
    take(doc, "hop_margin", p.hop_margin);
    take(doc, "landing_tolerance", p.landing_tolerance);
    take(doc, "time_limit", p.time_limit);
    if (p.hold_ticks_min < 1 || p.hold_ticks_max < p.hold_ticks_min)
        throw ConfigError("hold ticks need 1 <= min <= max");
    if (!(p.physical_speed > 0.0) || !(p.max_hop > 0.0) || !(p.time_limit > 0.0))
        throw ConfigError("policy speeds, hop and time limit must be positive");
    return p;
}

RunConfig run_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    require_object(doc, "config");
    RunConfig rc;
    rc.engine = engine_config_from_json(doc);
    if (doc.contains("world")) {
        const json& w = doc["world"];
        require_object(w, "world");
        if (w.contains("file")) {
            std::filesystem::path p = w["file"].get<std::string>();
            rc.world.file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
        take(w, "seed", rc.world.seed);
        if (w.contains("spec")) rc.world.spec = spec_from_json(w["spec"]);
    }
    if (doc.contains("policy")) rc.policy = policy_from_json(doc["policy"]);

    ExperimentConfig& ex = rc.experiment;
    ex.seeds = {rc.world.seed};
    ex.world = rc.world.spec;
    ex.engine = rc.engine;
    ex.policy = rc.policy;
    if (doc.contains("experiment")) {
        const json& e = doc["experiment"];
        require_object(e, "experiment");
        take(e, "seeds", ex.seeds);
        take(e, "repetitions", ex.repetitions);
        take(e, "jobs", ex.jobs);
        take(e, "write_sessions", ex.write_sessions);
        if (e.contains("techniques")) {
            ex.techniques.clear();
            for (const auto& t : e["techniques"]) {
                if (!t.is_string()) throw ConfigError("techniques must be strings");
                ex.techniques.push_back(technique_from_string(t.get<std::string>()));
            }
        }
        if (e.contains("output_dir")) ex.output_dir = e["output_dir"].get<std::string>();
    }
    ex.validate();
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return run_config_from_json(doc, path.parent_path());
}

std::shared_ptr<const WorldModel> resolve_world(const WorldRef& ref) {
    if (ref.file) return std::make_shared<const WorldModel>(load_world(*ref.file));
    return std::make_shared<const WorldModel>(generate_world(ref.seed, ref.spec));
}

}  // namespace vrtravel
