#pragma once

#include <optional>

#include "vrtravel/avatar.hpp"
#include "vrtravel/geometry.hpp"
#include "vrtravel/world.hpp"

namespace vrtravel {

struct TeleportConfig {
    double v0 = 20.0;
    double g = 9.81;
    /// Launch point height above the avatar's feet.
    double controller_height = 1.0;
    RigConfig rig;
};

struct TeleportPreview {
    ArcResult arc;
    bool valid = false;
};

struct TeleportState {
    RigState rig;
    bool aiming = false;
    std::optional<TeleportPreview> preview;
};

TeleportState make_teleport_state(const AvatarState& avatar, const TeleportConfig& cfg);

struct ControllerRay {
    Vec3 origin;
    Vec3 dir;
};

/// The controller sits controller_height above the feet and points along the view axis.
ControllerRay controller_ray(const TeleportState& s, const AvatarState& avatar, const TeleportConfig& cfg);

/// Arc preview; valid iff it lands on navigable terrain. Throws StateError unless aiming.
TeleportState aim_arc(const TeleportState& s, const WorldModel& world, const ControllerRay& controller,
                      const TeleportConfig& cfg);

struct TeleportCommit {
    TeleportState state;
    AvatarState avatar;
    /// Straight-line distance from the old feet position to the landing point.
    double distance = 0.0;
};

/// Instant relocation of body and rig to the previewed landing. Throws StateError
/// without a valid preview.
TeleportCommit commit_teleport(const TeleportState& s, const AvatarState& avatar, const TeleportConfig& cfg);

/// Low-arc launch direction from `origin` that lands on `landing`, or nullopt when the
/// point is out of ballistic reach.
std::optional<Vec3> launch_direction(const Vec3& origin, const Vec3& landing, double v0, double g);

}  // namespace vrtravel
