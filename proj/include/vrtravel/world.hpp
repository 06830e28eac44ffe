#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "vrtravel/vec3.hpp"

namespace vrtravel {

/// Regular elevation grid. Sample (col, row) sits at x = col * cell_size, z = row * cell_size.
class Heightmap {
public:
    Heightmap() = default;
    /// `samples` is row-major with rows along z. Throws ConfigError on bad dimensions
    /// or non-finite elevations.
    Heightmap(std::size_t cols, std::size_t rows, double cell_size, std::vector<double> samples);

    std::size_t cols() const { return cols_; }
    std::size_t rows() const { return rows_; }
    double cell_size() const { return cell_size_; }
    double width() const { return static_cast<double>(cols_ - 1) * cell_size_; }
    double depth() const { return static_cast<double>(rows_ - 1) * cell_size_; }
    double sample(std::size_t col, std::size_t row) const { return samples_[row * cols_ + col]; }
    const std::vector<double>& samples() const { return samples_; }

    bool contains(double x, double z) const {
        return x >= 0.0 && z >= 0.0 && x <= width() && z <= depth();
    }

    /// Bilinear interpolation. Throws RangeError outside the grid.
    double height_at(double x, double z) const;

    bool operator==(const Heightmap&) const = default;

private:
    std::size_t cols_ = 0;
    std::size_t rows_ = 0;
    double cell_size_ = 1.0;
    std::vector<double> samples_;
};

struct Box {
    Vec3 min;
    Vec3 max;
    bool operator==(const Box&) const = default;
};

/// Vertical cylinder standing on `base`.
struct Cylinder {
    double x = 0.0;
    double z = 0.0;
    double base = 0.0;
    double radius = 1.0;
    double height = 1.0;
    bool operator==(const Cylinder&) const = default;
};

using Obstacle = std::variant<Box, Cylinder>;

bool footprint_contains(const Obstacle& o, double x, double z);
bool volume_contains(const Obstacle& o, const Vec3& p);
double obstacle_top(const Obstacle& o);

enum class Surface { terrain, obstacle };

struct GroundHit {
    Vec3 point;
    Vec3 surface_normal;
    bool navigable = false;
    Surface surface = Surface::terrain;
};

/// Procedural generation parameters.
struct WorldSpec {
    double extent_x = 1024.0;
    double extent_z = 1024.0;
    double cell_size = 1.0;
    double path_length = 2160.0;
    int targets = 7;
    int obstacles = 120;
    /// Upper bound on path length relative to the world diagonal.
    double winding_cap = 2.0;
    /// Minimum straight-line spacing between consecutive targets.
    double min_target_spacing = 100.0;

    bool operator==(const WorldSpec&) const = default;
};

inline constexpr double kDefaultMaxSlope = 0.5235987755982988;  // 30 degrees

/// Terrain, obstacles and the course laid out on it. Immutable after construction.
class WorldModel {
public:
    struct Layout {
        std::vector<Obstacle> obstacles;
        std::vector<Vec3> targets;
        Vec3 start;
        /// Reference walking route through all targets (may be empty).
        std::vector<Vec3> course;
        double max_slope = kDefaultMaxSlope;
        std::optional<std::uint64_t> seed;
        std::optional<WorldSpec> spec;
    };

    WorldModel(Heightmap terrain, Layout layout);

    const Heightmap& terrain() const { return terrain_; }
    const std::vector<Obstacle>& obstacles() const { return layout_.obstacles; }
    const std::vector<Vec3>& targets() const { return layout_.targets; }
    const std::vector<Vec3>& course() const { return layout_.course; }
    const Vec3& start() const { return layout_.start; }
    double max_slope() const { return layout_.max_slope; }
    const std::optional<std::uint64_t>& seed() const { return layout_.seed; }
    const std::optional<WorldSpec>& spec() const { return layout_.spec; }
    double cell_size() const { return terrain_.cell_size(); }

    bool contains(double x, double z) const { return terrain_.contains(x, z); }
    double height_at(double x, double z) const { return terrain_.height_at(x, z); }

    /// Terrain point at (x, z).
    Vec3 ground(double x, double z) const { return {x, height_at(x, z), z}; }

    /// Slope angle from central finite differences of the interpolated terrain.
    double slope_at(double x, double z) const;
    Vec3 terrain_normal(double x, double z) const;

    /// True iff inside the grid, slope <= max_slope and outside every obstacle footprint.
    bool is_navigable(const Vec3& point) const;

    /// Navigability of grid vertex (col, row); same predicate as is_navigable.
    bool vertex_navigable(std::size_t col, std::size_t row) const {
        return navigable_[row * terrain_.cols() + col] != 0;
    }

    /// Inside terrain or an obstacle volume. Out-of-grid points are never solid.
    bool is_solid(const Vec3& p) const;

    /// First terrain or obstacle crossing of a straight ray.
    std::optional<GroundHit> ray_ground_intersect(const Vec3& origin, const Vec3& dir) const;

    /// True iff the segment between a and b passes through terrain or an obstacle.
    /// The 5 cm nearest each endpoint are ignored so surface points can be tested.
    bool occlusion_test(const Vec3& a, const Vec3& b) const;

    /// Builds a hit record at a point known to lie just outside the solid at `inside`.
    GroundHit make_hit(const Vec3& outside, const Vec3& inside) const;

    bool operator==(const WorldModel& o) const {
        return terrain_ == o.terrain_ && layout_.obstacles == o.layout_.obstacles &&
               layout_.targets == o.layout_.targets && layout_.start == o.layout_.start &&
               layout_.course == o.layout_.course && layout_.max_slope == o.layout_.max_slope &&
               layout_.seed == o.layout_.seed && layout_.spec == o.layout_.spec;
    }

private:
    void index_obstacles();
    void build_navigability();
    template <typename Fn>
    void for_obstacles_near(double x, double z, Fn&& fn) const;
    const Obstacle* obstacle_containing(const Vec3& p) const;

    Heightmap terrain_;
    Layout layout_;
    double max_top_ = 0.0;
    double bucket_size_ = 16.0;
    std::size_t bucket_cols_ = 1;
    std::size_t bucket_rows_ = 1;
    std::vector<std::vector<std::uint32_t>> buckets_;
    std::vector<std::uint8_t> navigable_;
};

struct ArcResult {
    std::vector<Vec3> samples;
    std::optional<GroundHit> hit;
};

inline constexpr double kArcTimeStep = 0.01;
inline constexpr double kRefineTolerance = 0.001;

/// Ballistic trajectory origin + v0*dir*tau - g*tau^2/2 * y, sampled every 10 ms.
ArcResult parabolic_arc(const WorldModel& world, const Vec3& origin, const Vec3& dir, double v0, double g);

/// Farthest horizontal landing distance for a launch `height` above flat ground.
double ballistic_max_range(double v0, double g, double height);

/// Generates terrain, a winding course of spec.path_length meters and spec.targets
/// points along it. Throws ConfigError when the spec is infeasible.
WorldModel generate_world(std::uint64_t seed, const WorldSpec& spec);

/// Flat world helper used by tests and tooling.
WorldModel make_flat_world(std::size_t cols, std::size_t rows, double cell_size, double height,
                           WorldModel::Layout layout = {});

}  // namespace vrtravel
