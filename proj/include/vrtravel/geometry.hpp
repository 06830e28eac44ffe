#pragma once

#include <numbers>

#include "vrtravel/vec3.hpp"

namespace vrtravel {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [-pi, pi).
double normalize_yaw(double yaw);

/// Eye (or body) placement. Positive pitch looks down.
struct Pose {
    Vec3 position;
    double yaw = 0.0;
    double pitch = 0.0;

    bool operator==(const Pose&) const = default;

    /// Horizontal facing; yaw 0 faces +z (north), yaw pi/2 faces +x (east).
    Vec3 facing() const;
    /// Unit view axis including pitch.
    Vec3 forward() const;
};

/// Builds a pose with yaw normalized and pitch clamped to [-pi/2, pi/2].
Pose make_pose(const Vec3& position, double yaw, double pitch);

/// Body-size constants the rig scales from.
struct RigConfig {
    double ipd_base = 0.064;
    double eye_height_base = 1.70;
};

/// Disembodied camera rig: the player's viewpoint, body scale and stereo base.
struct RigState {
    Pose eye;
    double scale = 1.0;
    double eye_separation = 0.064;

    bool operator==(const RigState&) const = default;
};

/// Rig with eye_separation derived from the scale.
RigState make_rig(const Pose& eye, double scale, const RigConfig& cfg);

struct TransitionParams {
    double duration = 0.5;
    double tm_scale = 10.0;
    double view_angle = kPi / 4.0;
    double horizontal_share = 0.5;

    /// Throws ConfigError when any invariant is violated.
    void validate() const;
};

/// Smoothstep 3t^2 - 2t^3. Throws DomainError outside [0, 1].
double ease(double t);

/// Horizontal ground distance seen under `view_angle` from `eye_height`.
double depression_offset(double eye_height, double view_angle);

/// First-person rig standing at `avatar` (feet position), looking along the avatar pose.
RigState first_person_rig(const Pose& avatar, const RigConfig& cfg);

/// Travel-mode rig for an avatar at `avatar_pos`: raised to eye_height_base * tm_scale,
/// pulled back along the current facing so the avatar is seen under `view_angle`.
/// Yaw is preserved; only pitch is re-aimed.
RigState tm_pose_from_nm(const RigState& nm, const Vec3& avatar_pos, const TransitionParams& params,
                         const RigConfig& cfg);

/// Progress of the horizontal and vertical components of an ascending transition.
struct CurveProgress {
    double horizontal = 0.0;
    double vertical = 0.0;
};

/// Curve progress for a rig that grows (ascending=true) or shrinks. The descending
/// curve is the time mirror of the ascending one.
CurveProgress transition_progress(double t, double horizontal_share, bool ascending);

/// Rig at normalized time t along the curved transition from `from` to `to`.
/// Endpoints are returned exactly. Scale interpolates in log space.
RigState transition_sample(const RigState& from, const RigState& to, double t,
                           const TransitionParams& params, const RigConfig& cfg);

}  // namespace vrtravel
