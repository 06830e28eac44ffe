#include "vrtravel/technique_teleport.hpp"

#include <cmath>

#include "vrtravel/errors.hpp"

namespace vrtravel {

TeleportState make_teleport_state(const AvatarState& avatar, const TeleportConfig& cfg) {
    TeleportState s;
    s.rig = first_person_rig(avatar.pose, cfg.rig);
    return s;
}

ControllerRay controller_ray(const TeleportState& s, const AvatarState& avatar, const TeleportConfig& cfg) {
    const Vec3& feet = avatar.pose.position;
    return {{feet.x, feet.y + cfg.controller_height, feet.z}, s.rig.eye.forward()};
}

TeleportState aim_arc(const TeleportState& s, const WorldModel& world, const ControllerRay& controller,
                      const TeleportConfig& cfg) {
    if (!s.aiming) throw StateError("aim_arc: not aiming");
    TeleportState out = s;
    TeleportPreview p;
    p.arc = parabolic_arc(world, controller.origin, controller.dir, cfg.v0, cfg.g);
    p.valid = p.arc.hit && p.arc.hit->surface == Surface::terrain && p.arc.hit->navigable;
    out.preview = std::move(p);
    return out;
}

TeleportCommit commit_teleport(const TeleportState& s, const AvatarState& avatar, const TeleportConfig& cfg) {
    if (!s.preview || !s.preview->valid) throw StateError("commit_teleport: no valid landing");
    TeleportCommit c{s, avatar, 0.0};
    const Vec3 landing = s.preview->arc.hit->point;
    c.distance = distance(avatar.pose.position, landing);
    c.avatar.pose.position = landing;
    c.avatar.clear_path();
    c.state.rig = first_person_rig(c.avatar.pose, cfg.rig);
    // the head orientation survives the jump
    c.state.rig.eye.yaw = s.rig.eye.yaw;
    c.state.rig.eye.pitch = s.rig.eye.pitch;
    c.state.aiming = false;
    c.state.preview.reset();
    return c;
}

std::optional<Vec3> launch_direction(const Vec3& origin, const Vec3& landing, double v0, double g) {
    const double dx = landing.x - origin.x;
    const double dz = landing.z - origin.z;
    const double d = std::sqrt(dx * dx + dz * dz);
    const double dy = landing.y - origin.y;
    if (d == 0.0) {
        if (dy <= 0.0) return Vec3{0.0, -1.0, 0.0};
        return std::nullopt;
    }
    const double v2 = v0 * v0;
    const double disc = v2 * v2 - g * (g * d * d + 2.0 * dy * v2);
    if (disc < 0.0) return std::nullopt;
    const double tan_theta = (v2 - std::sqrt(disc)) / (g * d);
    const double c = 1.0 / std::sqrt(1.0 + tan_theta * tan_theta);
    const double s = tan_theta * c;
    return Vec3{dx / d * c, s, dz / d * c};
}

}  // namespace vrtravel
