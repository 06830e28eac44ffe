#include "vrtravel/technique_outstanding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrtravel/errors.hpp"

namespace vrtravel {

namespace {

// absorbs accumulated rounding in elapsed time so 15 ticks of 1/30 s complete 0.5 s
constexpr double kTimeEpsilon = 1e-9;

void require_phase(const OutstandingState& s, Phase p, const char* op) {
    if (s.mode.phase != p)
        throw StateError(std::string(op) + ": not allowed in " + std::string(to_string(s.mode.phase)));
}

}  // namespace

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::nm: return "NM";
        case Phase::transition_up: return "TransitionUp";
        case Phase::tm: return "TM";
        case Phase::transition_down: return "TransitionDown";
    }
    return "?";
}

OutstandingState make_outstanding_state(const AvatarState& avatar, const OutstandingConfig& cfg) {
    OutstandingState s;
    s.rig = first_person_rig(avatar.pose, cfg.rig);
    s.nm_anchor = s.rig.eye;
    s.tm_anchor = s.rig;
    s.transition_from = s.rig;
    return s;
}

OutstandingState begin_switch_up(const OutstandingState& s, const AvatarState& avatar, const OutstandingConfig& cfg) {
    require_phase(s, Phase::nm, "begin_switch_up");
    OutstandingState out = s;
    out.mode = {Phase::transition_up, 0.0};
    out.nm_anchor = s.rig.eye;
    out.transition_from = s.rig;
    out.tm_anchor = tm_pose_from_nm(s.rig, avatar.pose.position, cfg.transition, cfg.rig);
    out.aiming = false;
    out.preview.reset();
    return out;
}

OutstandingState begin_switch_down(const OutstandingState& s, const AvatarState&) {
    require_phase(s, Phase::tm, "begin_switch_down");
    OutstandingState out = s;
    out.mode = {Phase::transition_down, 0.0};
    out.transition_from = s.rig;
    out.aiming = false;
    out.preview.reset();
    return out;
}

OutstandingState tick_technique(const OutstandingState& s, double dt, const AvatarState& avatar,
                                const OutstandingConfig& cfg) {
    if (!(dt > 0.0)) throw DomainError("tick_technique: dt must be > 0");
    OutstandingState out = s;
    const double duration = cfg.transition.duration;
    switch (s.mode.phase) {
        case Phase::nm:
            out.rig = first_person_rig(avatar.pose, cfg.rig);
            break;
        case Phase::tm:
            break;
        case Phase::transition_up:
        case Phase::transition_down: {
            const bool up = s.mode.phase == Phase::transition_up;
            const RigState to = up ? s.tm_anchor : first_person_rig(avatar.pose, cfg.rig);
            const double elapsed = s.mode.elapsed + dt;
            if (elapsed >= duration - kTimeEpsilon) {
                out.mode = {up ? Phase::tm : Phase::nm, 0.0};
                out.rig = to;
            } else {
                out.mode.elapsed = elapsed;
                out.rig = transition_sample(s.transition_from, to, elapsed / duration, cfg.transition, cfg.rig);
            }
            break;
        }
    }
    return out;
}

std::optional<TravelPreview> aim_travel_target(const OutstandingState& s, const WorldModel& world, const Vec3& origin,
                                               const Vec3& dir, const AvatarState& avatar) {
    require_phase(s, Phase::tm, "aim_travel_target");
    const auto hit = world.ray_ground_intersect(origin, dir);
    if (!hit) return std::nullopt;
    TravelPreview p;
    p.hit = *hit;
    if (hit->navigable && hit->surface == Surface::terrain) {
        p.path = plan_path(world, avatar.pose.position, hit->point);
        p.valid = p.path.has_value();
    }
    return p;
}

TravelCommand commit_travel_target(const OutstandingState& s, const AvatarState& avatar) {
    require_phase(s, Phase::tm, "commit_travel_target");
    if (!s.preview || !s.preview->valid || !s.preview->path)
        throw StateError("commit_travel_target: no valid travel target");
    TravelCommand cmd;
    cmd.state = s;
    cmd.path = *s.preview->path;
    cmd.distance = distance(avatar.pose.position, s.preview->hit.point);
    cmd.state.preview.reset();
    cmd.state.aiming = false;
    return cmd;
}

OutstandingState set_speed_mode(const OutstandingState& s, bool run) {
    OutstandingState out = s;
    out.run = run;
    return out;
}

OutstandingState move_in_travel_mode(const OutstandingState& s, const WorldModel& world, double dx, double dz) {
    require_phase(s, Phase::tm, "move_in_travel_mode");
    OutstandingState out = s;
    Vec3& p = out.rig.eye.position;
    const Heightmap& t = world.terrain();
    const double nx = std::clamp(p.x + dx * s.rig.scale, 0.0, t.width());
    const double nz = std::clamp(p.z + dz * s.rig.scale, 0.0, t.depth());
    const double ox = std::clamp(p.x, 0.0, t.width());
    const double oz = std::clamp(p.z, 0.0, t.depth());
    p.y += world.height_at(nx, nz) - world.height_at(ox, oz);
    p.x = nx;
    p.z = nz;
    return out;
}

CatchUp catch_up(const OutstandingState& s, const AvatarState& avatar, const OutstandingConfig& cfg) {
    if (!cfg.catch_up_enabled) throw StateError("catch_up: feature disabled");
    require_phase(s, Phase::tm, "catch_up");
    CatchUp out{s, 0.0};
    const RigState body = first_person_rig(avatar.pose, cfg.rig);
    RigState target = tm_pose_from_nm(body, avatar.pose.position, cfg.transition, cfg.rig);
    out.jump = distance(s.rig.eye.position, target.eye.position);
    out.state.rig = target;
    return out;
}

RigState look(const RigState& rig, double dyaw, double dpitch) {
    RigState out = rig;
    out.eye = make_pose(rig.eye.position, rig.eye.yaw + dyaw, rig.eye.pitch + dpitch);
    return out;
}

}  // namespace vrtravel
