#include "vrtravel/engine.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "vrtravel/errors.hpp"

namespace vrtravel {

using nlohmann::json;

std::string_view to_string(InputKind k) {
    switch (k) {
        case InputKind::move: return "move";
        case InputKind::look: return "look";
        case InputKind::trigger_press: return "trigger_press";
        case InputKind::trigger_release: return "trigger_release";
        case InputKind::switch_button: return "switch_button";
        case InputKind::run_toggle: return "run_toggle";
        case InputKind::catch_up: return "catch_up";
    }
    return "?";
}

namespace {

InputKind input_kind_from_string(std::string_view s) {
    for (auto k : {InputKind::move, InputKind::look, InputKind::trigger_press, InputKind::trigger_release,
                   InputKind::switch_button, InputKind::run_toggle, InputKind::catch_up})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown input kind '" + std::string(s) + "'");
}

}  // namespace

std::string input_to_json_line(const InputEvent& e) {
    json j = {{"v", kScriptSchemaVersion}, {"tick", e.tick}, {"kind", to_string(e.kind)}};
    if (e.kind == InputKind::move) {
        j["dx"] = e.a;
        j["dz"] = e.b;
    } else if (e.kind == InputKind::look) {
        j["dyaw"] = e.a;
        j["dpitch"] = e.b;
    }
    return j.dump();
}

InputEvent input_from_json(std::string_view line, std::size_t index) {
    try {
        const json j = json::parse(line);
        if (j.value("v", kScriptSchemaVersion) != kScriptSchemaVersion)
            throw std::invalid_argument("unsupported schema version");
        InputEvent e;
        e.tick = j.at("tick").get<std::uint64_t>();
        e.kind = input_kind_from_string(j.at("kind").get<std::string>());
        if (e.kind == InputKind::move) {
            e.a = j.at("dx").get<double>();
            e.b = j.at("dz").get<double>();
        } else if (e.kind == InputKind::look) {
            e.a = j.at("dyaw").get<double>();
            e.b = j.at("dpitch").get<double>();
        }
        if (!std::isfinite(e.a) || !std::isfinite(e.b)) throw std::invalid_argument("non-finite input value");
        return e;
    } catch (const std::exception& ex) {
        throw ParseError(index, ex.what());
    }
}

std::string InputScript::to_jsonl() const {
    std::string out;
    for (const auto& e : events) {
        out += input_to_json_line(e);
        out += '\n';
    }
    if (end_tick > 0) {
        out += json{{"v", kScriptSchemaVersion}, {"tick", end_tick}, {"kind", "end"}}.dump();
        out += '\n';
    }
    return out;
}

InputScript InputScript::from_jsonl(std::string_view text) {
    InputScript script;
    std::size_t index = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        if (script.end_tick > 0) throw ParseError(index, "events after the end marker");
        bool is_end = false;
        try {
            const json j = json::parse(line);
            if (j.value("kind", "") == "end") {
                script.end_tick = j.at("tick").get<std::uint64_t>();
                is_end = true;
            }
        } catch (const std::exception& ex) {
            throw ParseError(index, ex.what());
        }
        if (!is_end) {
            InputEvent e = input_from_json(line, index);
            if (!script.events.empty() && e.tick < script.events.back().tick)
                throw ParseError(index, "event ticks must be nondecreasing");
            script.events.push_back(e);
        }
        ++index;
    }
    return script;
}

void EngineConfig::validate() const {
    if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) throw ConfigError("tick_rate must be > 0");
    outstanding.transition.validate();
    if (!(outstanding.rig.ipd_base > 0.0)) throw ConfigError("ipd_base must be > 0");
    if (!(outstanding.rig.eye_height_base > 0.0)) throw ConfigError("eye_height_base must be > 0");
    if (!(teleport.v0 > 0.0) || !(teleport.g > 0.0)) throw ConfigError("teleport v0 and g must be > 0");
    if (!(teleport.controller_height >= 0.0)) throw ConfigError("controller_height must be >= 0");
    if (!(avatar.walk_speed > 0.0) || !(avatar.run_speed > 0.0)) throw ConfigError("avatar speeds must be > 0");
    if (room_clamp && !(room_half_extent > 0.0)) throw ConfigError("room_half_extent must be > 0");
}

AvatarState initial_avatar(const WorldModel& world) {
    AvatarState a;
    Vec3 start = world.start();
    start.y = world.height_at(start.x, start.z);
    a.pose.position = start;
    const auto& course = world.course();
    std::optional<Vec3> ahead;
    if (course.size() > 1)
        ahead = course[1];
    else if (!world.targets().empty())
        ahead = world.targets().front();
    if (ahead && horizontal_distance(start, *ahead) > 0.0)
        a.pose.yaw = normalize_yaw(std::atan2(ahead->x - start.x, ahead->z - start.z));
    return a;
}

Session::Session(std::shared_ptr<const WorldModel> world, EngineConfig cfg)
    : world_(std::move(world)), cfg_(std::move(cfg)) {
    if (!world_) throw ConfigError("session needs a world");
    cfg_.validate();
    cfg_.teleport.rig = cfg_.outstanding.rig;
    avatar_ = initial_avatar(*world_);
    outstanding_ = make_outstanding_state(avatar_, cfg_.outstanding);
    teleport_ = make_teleport_state(avatar_, cfg_.teleport);
}

const RigState& Session::rig() const {
    return cfg_.technique == TechniqueId::outstanding ? outstanding_.rig : teleport_.rig;
}

Phase Session::phase() const {
    return cfg_.technique == TechniqueId::outstanding ? outstanding_.mode.phase : Phase::nm;
}

LoggedMode Session::logged_mode() const {
    const Phase p = phase();
    return (p == Phase::tm || p == Phase::transition_up) ? LoggedMode::tm : LoggedMode::nm;
}

std::optional<GroundHit> Session::preview_hit() const {
    if (cfg_.technique == TechniqueId::outstanding) {
        if (outstanding_.aiming && outstanding_.preview) return outstanding_.preview->hit;
        return std::nullopt;
    }
    if (teleport_.aiming && teleport_.preview) return teleport_.preview->arc.hit;
    return std::nullopt;
}

bool Session::preview_valid() const {
    if (cfg_.technique == TechniqueId::outstanding)
        return outstanding_.aiming && outstanding_.preview && outstanding_.preview->valid;
    return teleport_.aiming && teleport_.preview && teleport_.preview->valid;
}

bool Session::avatar_occluded() const {
    Vec3 chest = avatar_.pose.position;
    chest.y += cfg_.rig().eye_height_base * 0.6;
    return world_->occlusion_test(rig().eye.position, chest);
}

void Session::log_event(EventKind kind, std::optional<double> dist) {
    EventRecord r;
    r.tick = tick_;
    r.sim_time = sim_time();
    r.kind = kind;
    r.distance = dist;
    r.mode = logged_mode();
    r.technique = cfg_.technique;
    log_.append(r);
}

void Session::step(std::span<const InputEvent> events) {
    if (finished_) throw ScriptError(tick_, "session already finished");
    for (const auto& e : events)
        if (e.tick != tick_)
            throw ScriptError(tick_, "event for tick " + std::to_string(e.tick) + " delivered out of order");

    const Vec3 eye_before = rig().eye.position;
    relocated_ = false;
    for (const auto& e : events) {
        try {
            apply(e);
        } catch (const StateError& err) {
            diagnostics_.push_back({tick_, err.what()});
        }
    }
    refresh_preview();

    const double dt = cfg_.dt();
    if (cfg_.technique == TechniqueId::outstanding) {
        avatar_.speed_mode = outstanding_.run ? SpeedMode::run : SpeedMode::walk;
        if (avatar_.has_path()) {
            AdvanceResult r = advance(avatar_, dt, *world_, cfg_.avatar);
            avatar_ = std::move(r.avatar);
            if (r.arrived) log_event(EventKind::arrival, avatar_.distance_walked_virtual - command_start_walked_);
        }
        const Phase before = outstanding_.mode.phase;
        outstanding_ = tick_technique(outstanding_, dt, avatar_, cfg_.outstanding);
        // re-embodiment hands body control back to the player
        if (before == Phase::transition_down && outstanding_.mode.phase == Phase::nm && avatar_.has_path())
            avatar_.clear_path();
    }

    if (!relocated_) {
        const double speed = distance(eye_before, rig().eye.position) / dt;
        last_flow_ = normalized_flow(speed, rig().scale, cfg_.rig().eye_height_base);
        peak_flow_ = std::max(peak_flow_, last_flow_);
    } else {
        last_flow_ = 0.0;
    }
    ++tick_;
}

void Session::finish() {
    if (finished_) return;
    EventRecord r;
    r.tick = tick_;
    r.sim_time = sim_time();
    r.kind = EventKind::session_end;
    r.distance = avatar_.distance_walked_virtual;
    r.mode = logged_mode();
    r.technique = cfg_.technique;
    r.peak_flow = peak_flow_;
    log_.append(r);
    finished_ = true;
}

void Session::apply(const InputEvent& e) {
    switch (e.kind) {
        case InputKind::move: apply_move(e.a, e.b); break;
        case InputKind::look: apply_look(e.a, e.b); break;
        case InputKind::trigger_press: press(); break;
        case InputKind::trigger_release: release(); break;
        case InputKind::switch_button: switch_perspective(); break;
        case InputKind::run_toggle:
            if (cfg_.technique == TechniqueId::outstanding)
                outstanding_ = set_speed_mode(outstanding_, !outstanding_.run);
            else
                avatar_.speed_mode = avatar_.speed_mode == SpeedMode::run ? SpeedMode::walk : SpeedMode::run;
            break;
        case InputKind::catch_up: {
            if (cfg_.technique != TechniqueId::outstanding) throw StateError("catch_up: teleport has no travel mode");
            CatchUp c = catch_up(outstanding_, avatar_, cfg_.outstanding);
            outstanding_ = std::move(c.state);
            relocated_ = true;
            preview_dirty_ = true;
            log_event(EventKind::relocation, c.jump);
            break;
        }
    }
}

void Session::walk_avatar(double dx, double dz) {
    const Heightmap& t = world_->terrain();
    Vec3& p = avatar_.pose.position;
    const double nx = std::clamp(p.x + dx, 0.0, t.width());
    const double nz = std::clamp(p.z + dz, 0.0, t.depth());
    avatar_.distance_walked_virtual += std::hypot(nx - p.x, nz - p.z);
    p = world_->ground(nx, nz);
}

void Session::apply_move(double dx, double dz) {
    if (cfg_.room_clamp) {
        const double h = cfg_.room_half_extent;
        const double nx = std::clamp(room_x_ + dx, -h, h);
        const double nz = std::clamp(room_z_ + dz, -h, h);
        dx = nx - room_x_;
        dz = nz - room_z_;
        room_x_ = nx;
        room_z_ = nz;
    }
    log_event(EventKind::move, std::hypot(dx, dz));

    if (cfg_.technique == TechniqueId::teleport) {
        walk_avatar(dx, dz);
        teleport_.rig = first_person_rig(avatar_.pose, cfg_.rig());
        preview_dirty_ = true;
        return;
    }
    switch (outstanding_.mode.phase) {
        case Phase::nm:
            walk_avatar(dx, dz);
            outstanding_.rig = first_person_rig(avatar_.pose, cfg_.rig());
            break;
        case Phase::tm:
            outstanding_ = move_in_travel_mode(outstanding_, *world_, dx, dz);
            preview_dirty_ = true;
            break;
        default:
            // the rig is driven by the transition curve
            break;
    }
}

void Session::apply_look(double dyaw, double dpitch) {
    if (cfg_.technique == TechniqueId::teleport) {
        teleport_.rig = look(teleport_.rig, dyaw, dpitch);
        avatar_.pose.yaw = teleport_.rig.eye.yaw;
        avatar_.pose.pitch = teleport_.rig.eye.pitch;
        preview_dirty_ = true;
        return;
    }
    switch (outstanding_.mode.phase) {
        case Phase::nm:
            outstanding_.rig = look(outstanding_.rig, dyaw, dpitch);
            avatar_.pose.yaw = outstanding_.rig.eye.yaw;
            avatar_.pose.pitch = outstanding_.rig.eye.pitch;
            break;
        case Phase::tm:
            outstanding_.rig = look(outstanding_.rig, dyaw, dpitch);
            preview_dirty_ = true;
            break;
        default:
            break;
    }
}

void Session::press() {
    if (cfg_.technique == TechniqueId::teleport) {
        teleport_.aiming = true;
        preview_dirty_ = true;
        return;
    }
    if (outstanding_.mode.phase != Phase::tm) throw StateError("trigger: travel targets can only be set in TM");
    outstanding_.aiming = true;
    preview_dirty_ = true;
}

void Session::release() {
    refresh_preview();
    if (cfg_.technique == TechniqueId::teleport) {
        if (!teleport_.aiming) throw StateError("trigger_release: not aiming");
        try {
            TeleportCommit c = commit_teleport(teleport_, avatar_, cfg_.teleport);
            teleport_ = std::move(c.state);
            avatar_ = std::move(c.avatar);
            relocated_ = true;
            log_event(EventKind::aim, c.distance);
            log_event(EventKind::relocation, c.distance);
        } catch (const StateError&) {
            teleport_.aiming = false;
            teleport_.preview.reset();
            throw;
        }
        return;
    }
    if (!outstanding_.aiming) throw StateError("trigger_release: not aiming");
    try {
        TravelCommand cmd = commit_travel_target(outstanding_, avatar_);
        outstanding_ = std::move(cmd.state);
        avatar_.path = std::move(cmd.path.waypoints);
        avatar_.next_waypoint = 0;
        command_start_walked_ = avatar_.distance_walked_virtual;
        log_event(EventKind::aim, cmd.distance);
    } catch (const StateError&) {
        outstanding_.aiming = false;
        outstanding_.preview.reset();
        throw;
    }
}

void Session::switch_perspective() {
    if (cfg_.technique == TechniqueId::teleport) throw StateError("switch_button: teleport has a single perspective");
    switch (outstanding_.mode.phase) {
        case Phase::nm:
            outstanding_ = begin_switch_up(outstanding_, avatar_, cfg_.outstanding);
            break;
        case Phase::tm:
            outstanding_ = begin_switch_down(outstanding_, avatar_);
            break;
        default:
            throw StateError("switch_button: transition in progress");
    }
    log_event(EventKind::mode_switch);
}

void Session::refresh_preview() {
    if (!preview_dirty_) return;
    preview_dirty_ = false;
    if (cfg_.technique == TechniqueId::teleport) {
        if (teleport_.aiming)
            teleport_ = aim_arc(teleport_, *world_, controller_ray(teleport_, avatar_, cfg_.teleport), cfg_.teleport);
        return;
    }
    if (outstanding_.aiming && outstanding_.mode.phase == Phase::tm)
        outstanding_.preview =
            aim_travel_target(outstanding_, *world_, outstanding_.rig.eye.position, outstanding_.rig.eye.forward(), avatar_);
}

const EventLog& run_script(Session& session, const InputScript& script) {
    const auto& ev = script.events;
    for (std::size_t i = 1; i < ev.size(); ++i)
        if (ev[i].tick < ev[i - 1].tick) throw ScriptError(ev[i].tick, "script events are not sorted by tick");
    if (!ev.empty() && ev.front().tick < session.tick())
        throw ScriptError(ev.front().tick, "script starts before the session's current tick");

    std::uint64_t end = script.end_tick;
    if (end == 0 && !ev.empty()) end = ev.back().tick + 1;
    if (!ev.empty() && ev.back().tick >= end) throw ScriptError(ev.back().tick, "event after the script end tick");

    std::size_t i = 0;
    while (session.tick() < end) {
        std::size_t j = i;
        while (j < ev.size() && ev[j].tick == session.tick()) ++j;
        session.step(std::span<const InputEvent>(ev.data() + i, j - i));
        i = j;
    }
    session.finish();
    return session.log();
}

}  // namespace vrtravel
