#pragma once

#include <optional>
#include <string_view>

#include "vrtravel/avatar.hpp"
#include "vrtravel/geometry.hpp"
#include "vrtravel/world.hpp"

namespace vrtravel {

enum class Phase { nm, transition_up, tm, transition_down };

std::string_view to_string(Phase p);

/// Current phase plus elapsed seconds inside a transition.
struct Mode {
    Phase phase = Phase::nm;
    double elapsed = 0.0;

    bool operator==(const Mode&) const = default;
};

struct OutstandingConfig {
    TransitionParams transition;
    RigConfig rig;
    bool catch_up_enabled = false;
};

struct TravelPreview {
    GroundHit hit;
    bool valid = false;
    std::optional<PlannedPath> path;
};

struct OutstandingState {
    Mode mode;
    RigState rig;
    /// Eye pose when the last ascent began.
    Pose nm_anchor;
    /// Travel-mode destination of the last ascent.
    RigState tm_anchor;
    /// Rig at the start of the running transition.
    RigState transition_from;
    bool aiming = false;
    std::optional<TravelPreview> preview;
    bool run = false;
};

/// Normal mode, co-located with the avatar's head.
OutstandingState make_outstanding_state(const AvatarState& avatar, const OutstandingConfig& cfg);

/// NM -> TransitionUp. Throws StateError in any other mode.
OutstandingState begin_switch_up(const OutstandingState& s, const AvatarState& avatar, const OutstandingConfig& cfg);

/// TM -> TransitionDown toward the avatar's live pose. Throws StateError in any other mode.
OutstandingState begin_switch_down(const OutstandingState& s, const AvatarState& avatar);

/// Advances transitions (snapping to the exact endpoint at the duration) and keeps
/// the NM rig on the avatar's head.
OutstandingState tick_technique(const OutstandingState& s, double dt, const AvatarState& avatar,
                                const OutstandingConfig& cfg);

/// Straight-ray travel target. Valid iff the hit is navigable terrain with a path from
/// the avatar. Throws StateError outside TM.
std::optional<TravelPreview> aim_travel_target(const OutstandingState& s, const WorldModel& world, const Vec3& origin,
                                               const Vec3& dir, const AvatarState& avatar);

struct TravelCommand {
    OutstandingState state;
    PlannedPath path;
    /// Straight-line distance from the avatar to the target.
    double distance = 0.0;
};

/// Hands the previewed path to the avatar. The rig is not moved. Throws StateError
/// outside TM or without a valid preview.
TravelCommand commit_travel_target(const OutstandingState& s, const AvatarState& avatar);

OutstandingState set_speed_mode(const OutstandingState& s, bool run);

/// Room-scale displacement in TM, amplified by the TM scale. Height follows the terrain
/// difference under the rig; the rig stays inside the world.
OutstandingState move_in_travel_mode(const OutstandingState& s, const WorldModel& world, double dx, double dz);

struct CatchUp {
    OutstandingState state;
    double jump = 0.0;
};

/// Instant TM viewpoint jump back behind the avatar. Throws StateError unless enabled
/// and in TM.
CatchUp catch_up(const OutstandingState& s, const AvatarState& avatar, const OutstandingConfig& cfg);

/// Applies a head rotation; pitch is clamped.
RigState look(const RigState& rig, double dyaw, double dpitch);

}  // namespace vrtravel
