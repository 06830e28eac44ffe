#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vrtravel/geometry.hpp"
#include "vrtravel/world.hpp"

namespace vrtravel {

enum class SpeedMode { walk, run };

struct AvatarConfig {
    double walk_speed = 4.0;
    double run_speed = 9.0;

    double speed(SpeedMode m) const { return m == SpeedMode::run ? run_speed : walk_speed; }
};

/// The first-person body. `pose.position` is the feet on the terrain; pitch is the head pitch.
struct AvatarState {
    Pose pose;
    std::vector<Vec3> path;
    std::size_t next_waypoint = 0;
    SpeedMode speed_mode = SpeedMode::walk;
    double distance_walked_virtual = 0.0;

    bool has_path() const { return next_waypoint < path.size(); }
    void clear_path() {
        path.clear();
        next_waypoint = 0;
    }
    /// Horizontal length still to walk.
    double remaining_path_length() const;
};

struct PlannedPath {
    std::vector<Vec3> waypoints;
    /// Sum of grid edge lengths between the snapped start and goal vertices.
    double grid_cost = 0.0;
};

/// 8-connected A* over grid vertices with a Euclidean heuristic. Edges join navigable
/// vertices whose slope stays within the world limit; diagonals may not cut a blocked
/// corner. Equal priorities resolve by lexicographic (x, z). Returns nullopt when the
/// goal is disconnected or either endpoint has no navigable vertex nearby.
std::optional<PlannedPath> plan_path(const WorldModel& world, const Vec3& start, const Vec3& goal);

struct AdvanceResult {
    AvatarState avatar;
    bool arrived = false;
};

/// Moves along the path at the current speed for dt seconds, consuming waypoints and
/// snapping to the terrain. Arrival is declared within 1 cm of the final waypoint.
AdvanceResult advance(const AvatarState& avatar, double dt, const WorldModel& world, const AvatarConfig& cfg);

}  // namespace vrtravel
