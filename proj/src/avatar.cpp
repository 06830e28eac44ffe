#include "vrtravel/avatar.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>

#include "vrtravel/errors.hpp"

namespace vrtravel {

namespace {

constexpr double kArrivalTolerance = 0.01;
constexpr std::int32_t kNoParent = -1;

struct Vertex {
    std::size_t col;
    std::size_t row;
};

/// Nearest navigable vertex among the cell corners around p.
std::optional<Vertex> snap_to_vertex(const WorldModel& world, const Vec3& p) {
    const Heightmap& t = world.terrain();
    if (!t.contains(p.x, p.z)) return std::nullopt;
    const double gx = p.x / t.cell_size();
    const double gz = p.z / t.cell_size();
    std::optional<Vertex> best;
    double best_d = std::numeric_limits<double>::infinity();
    const auto c0 = static_cast<std::size_t>(std::floor(gx));
    const auto r0 = static_cast<std::size_t>(std::floor(gz));
    for (std::size_t r = r0; r <= r0 + 1 && r < t.rows(); ++r)
        for (std::size_t c = c0; c <= c0 + 1 && c < t.cols(); ++c) {
            if (!world.vertex_navigable(c, r)) continue;
            const double d = std::hypot(gx - static_cast<double>(c), gz - static_cast<double>(r));
            if (d < best_d) {
                best_d = d;
                best = Vertex{c, r};
            }
        }
    return best;
}

}  // namespace

double AvatarState::remaining_path_length() const {
    double total = 0.0;
    Vec3 p = pose.position;
    for (std::size_t i = next_waypoint; i < path.size(); ++i) {
        total += horizontal_distance(p, path[i]);
        p = path[i];
    }
    return total;
}

std::optional<PlannedPath> plan_path(const WorldModel& world, const Vec3& start, const Vec3& goal) {
    const auto s = snap_to_vertex(world, start);
    const auto g = snap_to_vertex(world, goal);
    if (!s || !g) return std::nullopt;

    const Heightmap& t = world.terrain();
    const std::size_t cols = t.cols();
    const std::size_t rows = t.rows();
    const double cell = t.cell_size();
    const double max_grade = std::tan(world.max_slope());
    const std::size_t start_id = s->row * cols + s->col;
    const std::size_t goal_id = g->row * cols + g->col;

    std::vector<double> cost(cols * rows, std::numeric_limits<double>::infinity());
    std::vector<std::int32_t> parent(cols * rows, kNoParent);
    std::vector<std::uint8_t> closed(cols * rows, 0);

    auto heuristic = [&](std::size_t c, std::size_t r) {
        return std::hypot(static_cast<double>(c) - static_cast<double>(g->col),
                          static_cast<double>(r) - static_cast<double>(g->row)) *
               cell;
    };

    // (f, x, z) ordering; smallest first
    using Entry = std::tuple<double, std::size_t, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    cost[start_id] = 0.0;
    open.emplace(heuristic(s->col, s->row), s->col, s->row);

    static constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
    static constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
    const double diag = cell * std::sqrt(2.0);

    while (!open.empty()) {
        const auto [f, c, r] = open.top();
        open.pop();
        const std::size_t id = r * cols + c;
        if (closed[id]) continue;
        closed[id] = 1;
        if (id == goal_id) break;

        const double h_here = t.sample(c, r);
        for (int k = 0; k < 8; ++k) {
            const auto nc = static_cast<std::ptrdiff_t>(c) + kDc[k];
            const auto nr = static_cast<std::ptrdiff_t>(r) + kDr[k];
            if (nc < 0 || nr < 0 || nc >= static_cast<std::ptrdiff_t>(cols) || nr >= static_cast<std::ptrdiff_t>(rows))
                continue;
            const auto ucol = static_cast<std::size_t>(nc);
            const auto urow = static_cast<std::size_t>(nr);
            const std::size_t nid = urow * cols + ucol;
            if (closed[nid] || !world.vertex_navigable(ucol, urow)) continue;
            const bool diagonal = kDc[k] != 0 && kDr[k] != 0;
            if (diagonal && (!world.vertex_navigable(ucol, r) || !world.vertex_navigable(c, urow))) continue;
            const double step = diagonal ? diag : cell;
            if (std::abs(t.sample(ucol, urow) - h_here) > max_grade * step) continue;
            const double candidate = cost[id] + step;
            if (candidate < cost[nid]) {
                cost[nid] = candidate;
                parent[nid] = static_cast<std::int32_t>(id);
                open.emplace(candidate + heuristic(ucol, urow), ucol, urow);
            }
        }
    }
    if (!closed[goal_id]) return std::nullopt;

    std::vector<std::size_t> chain;
    for (std::int64_t id = static_cast<std::int64_t>(goal_id); id != kNoParent; id = parent[id])
        chain.push_back(static_cast<std::size_t>(id));

    PlannedPath out;
    out.grid_cost = cost[goal_id];
    out.waypoints.push_back(start);
    auto vertex_point = [&](std::size_t id) {
        const std::size_t c = id % cols;
        const std::size_t r = id / cols;
        return Vec3{static_cast<double>(c) * cell, t.sample(c, r), static_cast<double>(r) * cell};
    };
    // walk from start to goal, dropping vertices interior to straight runs
    for (std::size_t i = chain.size(); i-- > 0;) {
        const bool interior = i + 1 < chain.size() && i > 0;
        if (interior) {
            const auto a = static_cast<std::int64_t>(chain[i + 1]);
            const auto b = static_cast<std::int64_t>(chain[i]);
            const auto n = static_cast<std::int64_t>(chain[i - 1]);
            if (b - a == n - b) continue;
        }
        const Vec3 v = vertex_point(chain[i]);
        if (v != out.waypoints.back() && v != goal) out.waypoints.push_back(v);
    }
    if (goal != out.waypoints.back() || out.waypoints.size() == 1) out.waypoints.push_back(goal);
    return out;
}

AdvanceResult advance(const AvatarState& avatar, double dt, const WorldModel& world, const AvatarConfig& cfg) {
    if (!(dt > 0.0)) throw DomainError("advance: dt must be > 0");
    AdvanceResult out{avatar, false};
    AvatarState& a = out.avatar;
    if (!a.has_path()) return out;

    double budget = cfg.speed(a.speed_mode) * dt;
    Vec3 pos = a.pose.position;
    while (budget > 0.0 && a.has_path()) {
        const Vec3& target = a.path[a.next_waypoint];
        const double dx = target.x - pos.x;
        const double dz = target.z - pos.z;
        const double d = std::sqrt(dx * dx + dz * dz);
        if (d > 0.0) a.pose.yaw = normalize_yaw(std::atan2(dx, dz));
        if (d <= budget) {
            pos = target;
            budget -= d;
            a.distance_walked_virtual += d;
            ++a.next_waypoint;
        } else {
            pos.x += dx / d * budget;
            pos.z += dz / d * budget;
            a.distance_walked_virtual += budget;
            budget = 0.0;
        }
    }
    if (a.next_waypoint + 1 == a.path.size()) {
        const double d = horizontal_distance(pos, a.path.back());
        if (d <= kArrivalTolerance) {
            a.distance_walked_virtual += d;
            pos = a.path.back();
            a.next_waypoint = a.path.size();
        }
    }
    pos.y = world.height_at(pos.x, pos.z);
    a.pose.position = pos;
    if (!a.has_path()) {
        a.clear_path();
        out.arrived = true;
    }
    return out;
}

}  // namespace vrtravel
