#include "vrtravel/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "vrtravel/errors.hpp"

namespace vrtravel {

double normalize_yaw(double yaw) {
    const double two_pi = 2.0 * kPi;
    double y = yaw - two_pi * std::floor((yaw + kPi) / two_pi);
    // floor rounding can land exactly on +pi
    if (y >= kPi) y -= two_pi;
    if (y < -kPi) y = -kPi;
    return y;
}

Vec3 Pose::facing() const { return {std::sin(yaw), 0.0, std::cos(yaw)}; }

Vec3 Pose::forward() const {
    const double c = std::cos(pitch);
    return {std::sin(yaw) * c, -std::sin(pitch), std::cos(yaw) * c};
}

Pose make_pose(const Vec3& position, double yaw, double pitch) {
    return Pose{position, normalize_yaw(yaw), std::clamp(pitch, -kPi / 2.0, kPi / 2.0)};
}

RigState make_rig(const Pose& eye, double scale, const RigConfig& cfg) {
    return RigState{eye, scale, cfg.ipd_base * scale};
}

void TransitionParams::validate() const {
    if (!(duration > 0.0)) throw ConfigError("transition duration must be > 0");
    if (!(tm_scale > 1.0)) throw ConfigError("tm_scale must be > 1");
    if (!(view_angle > 0.0 && view_angle <= kPi / 2.0))
        throw ConfigError("view_angle must lie in (0, pi/2]");
    if (!(horizontal_share > 0.0 && horizontal_share < 1.0))
        throw ConfigError("horizontal_share must lie in (0, 1)");
}

double ease(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("ease: t outside [0, 1]");
    return t * t * (3.0 - 2.0 * t);
}

double depression_offset(double eye_height, double view_angle) {
    if (!(eye_height > 0.0)) throw DomainError("depression_offset: eye height must be > 0");
    if (!(view_angle > 0.0 && view_angle <= kPi / 2.0))
        throw DomainError("depression_offset: view angle must lie in (0, pi/2]");
    if (view_angle == kPi / 2.0) return 0.0;
    return eye_height / std::tan(view_angle);
}

RigState first_person_rig(const Pose& avatar, const RigConfig& cfg) {
    Pose eye = avatar;
    eye.position.y += cfg.eye_height_base;
    return make_rig(eye, 1.0, cfg);
}

RigState tm_pose_from_nm(const RigState& nm, const Vec3& avatar_pos, const TransitionParams& params,
                         const RigConfig& cfg) {
    if (nm.scale != 1.0) throw DomainError("tm_pose_from_nm: source rig must be at scale 1");
    if (!(params.tm_scale >= 1.0)) throw DomainError("tm_pose_from_nm: tm_scale must be >= 1");

    const double height = cfg.eye_height_base * params.tm_scale;
    const double back = depression_offset(height, params.view_angle);
    const Vec3 facing = nm.eye.facing();

    Pose eye;
    eye.yaw = nm.eye.yaw;
    eye.position = {avatar_pos.x - facing.x * back, avatar_pos.y + height, avatar_pos.z - facing.z * back};
    eye.pitch = std::atan2(height, back);
    return make_rig(eye, params.tm_scale, cfg);
}

CurveProgress transition_progress(double t, double horizontal_share, bool ascending) {
    auto up = [horizontal_share](double u) {
        const double e = ease(u);
        return CurveProgress{ease(std::min(1.0, u / horizontal_share)), e * e};
    };
    if (ascending) return up(t);
    const CurveProgress m = up(1.0 - t);
    return {1.0 - m.horizontal, 1.0 - m.vertical};
}

RigState transition_sample(const RigState& from, const RigState& to, double t,
                           const TransitionParams& params, const RigConfig& cfg) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("transition_sample: t outside [0, 1]");
    if (t == 0.0) return from;
    if (t == 1.0) return to;

    const bool ascending = to.scale >= from.scale;
    const CurveProgress p = transition_progress(t, params.horizontal_share, ascending);
    const double e = ease(t);

    const Vec3& a = from.eye.position;
    const Vec3& b = to.eye.position;
    Pose eye;
    eye.position = {a.x + (b.x - a.x) * p.horizontal, a.y + (b.y - a.y) * p.vertical,
                    a.z + (b.z - a.z) * p.horizontal};
    eye.yaw = normalize_yaw(from.eye.yaw + normalize_yaw(to.eye.yaw - from.eye.yaw) * e);
    eye.pitch = from.eye.pitch + (to.eye.pitch - from.eye.pitch) * e;

    const double log_a = std::log(from.scale);
    const double log_b = std::log(to.scale);
    const double scale = std::exp(log_a + (log_b - log_a) * e);
    return make_rig(eye, scale, cfg);
}

}  // namespace vrtravel
