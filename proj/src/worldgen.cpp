#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vrtravel/errors.hpp"
#include "vrtravel/geometry.hpp"
#include "vrtravel/rng.hpp"
#include "vrtravel/world.hpp"

namespace vrtravel {

namespace {

struct Octave {
    double wavelength;
    double amplitude;
};

// Max slope of this stack stays near 16 degrees, well under the walkable limit.
constexpr Octave kOctaves[] = {{256.0, 10.0}, {96.0, 3.0}, {24.0, 0.6}};

constexpr double kSegment = 20.0;
constexpr double kMargin = 60.0;
constexpr double kMaxTurn = deg_to_rad(15.0);
constexpr double kWander = deg_to_rad(10.0);
constexpr double kCorridor = 12.0;
constexpr int kAttempts = 64;

double lattice(std::uint64_t seed, std::uint64_t octave, std::int64_t ix, std::int64_t iz) {
    std::uint64_t h = mix64(seed ^ mix64(octave));
    h = mix64(h ^ static_cast<std::uint64_t>(ix));
    h = mix64(h ^ static_cast<std::uint64_t>(iz));
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, std::uint64_t octave, double x, double z) {
    const double fx = std::floor(x);
    const double fz = std::floor(z);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iz = static_cast<std::int64_t>(fz);
    const double tx = smooth(x - fx);
    const double tz = smooth(z - fz);
    const double a = lattice(seed, octave, ix, iz);
    const double b = lattice(seed, octave, ix + 1, iz);
    const double c = lattice(seed, octave, ix, iz + 1);
    const double d = lattice(seed, octave, ix + 1, iz + 1);
    const double ab = a + (b - a) * tx;
    const double cd = c + (d - c) * tx;
    return ab + (cd - ab) * tz;
}

double terrain_height(std::uint64_t seed, double x, double z) {
    double h = 0.0;
    std::uint64_t k = 0;
    for (const Octave& o : kOctaves) h += o.amplitude * value_noise(seed, k++, x / o.wavelength, z / o.wavelength);
    return h;
}

double segment_distance_xz(const Vec3& p, const Vec3& a, const Vec3& b) {
    const double abx = b.x - a.x;
    const double abz = b.z - a.z;
    const double len2 = abx * abx + abz * abz;
    double t = len2 > 0.0 ? ((p.x - a.x) * abx + (p.z - a.z) * abz) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + abx * t);
    const double dz = p.z - (a.z + abz * t);
    return std::sqrt(dx * dx + dz * dz);
}

double polyline_distance_xz(const Vec3& p, const std::vector<Vec3>& line) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < line.size(); ++i) best = std::min(best, segment_distance_xz(p, line[i - 1], line[i]));
    return best;
}

/// Point at horizontal arc length `s` along the polyline.
Vec3 point_along(const std::vector<Vec3>& line, double s) {
    for (std::size_t i = 1; i < line.size(); ++i) {
        const double seg = horizontal_distance(line[i - 1], line[i]);
        if (s <= seg || i + 1 == line.size()) {
            const double t = seg > 0.0 ? std::min(1.0, s / seg) : 0.0;
            return line[i - 1] + (line[i] - line[i - 1]) * t;
        }
        s -= seg;
    }
    return line.back();
}

/// Winding 2-D route of exactly `length` meters (horizontal), steering away from the edges.
std::vector<Vec3> wind_path(Rng& rng, const WorldSpec& spec, double length) {
    const double lo_x = kMargin;
    const double hi_x = spec.extent_x - kMargin;
    const double lo_z = kMargin;
    const double hi_z = spec.extent_z - kMargin;
    const double cx = spec.extent_x * 0.5;
    const double cz = spec.extent_z * 0.5;

    Vec3 p{rng.uniform(lo_x, lo_x + 0.25 * (hi_x - lo_x)), 0.0, rng.uniform(lo_z, lo_z + 0.25 * (hi_z - lo_z))};
    double heading = std::atan2(cx - p.x, cz - p.z) + rng.uniform(-0.5, 0.5);
    std::vector<Vec3> pts{p};
    double remaining = length;
    while (remaining > 1e-9) {
        const double step = std::min(kSegment, remaining);
        const double look = 2.0 * kMargin;
        const double ax = p.x + std::sin(heading) * look;
        const double az = p.z + std::cos(heading) * look;
        double turn;
        if (ax < lo_x || ax > hi_x || az < lo_z || az > hi_z) {
            const double to_center = normalize_yaw(std::atan2(cx - p.x, cz - p.z) - heading);
            turn = std::clamp(to_center, -kMaxTurn, kMaxTurn);
        } else {
            turn = rng.uniform(-kWander, kWander);
        }
        heading = normalize_yaw(heading + turn);
        p = Vec3{p.x + std::sin(heading) * step, 0.0, p.z + std::cos(heading) * step};
        pts.push_back(p);
        remaining -= step;
    }
    return pts;
}

}  // namespace

WorldModel generate_world(std::uint64_t seed, const WorldSpec& spec) {
    if (!(spec.cell_size > 0.0)) throw ConfigError("cell_size must be > 0");
    if (spec.extent_x < 4.0 * kMargin || spec.extent_z < 4.0 * kMargin)
        throw ConfigError("world extents must be at least " + std::to_string(4.0 * kMargin) + " m");
    if (spec.targets < 1) throw ConfigError("at least one target is required");
    if (!(spec.path_length > 0.0)) throw ConfigError("path_length must be > 0");
    if (spec.obstacles < 0) throw ConfigError("obstacle count must be >= 0");
    const double diagonal = std::hypot(spec.extent_x, spec.extent_z);
    if (spec.path_length > diagonal * spec.winding_cap)
        throw ConfigError("path_length " + std::to_string(spec.path_length) + " m exceeds diagonal x winding cap (" +
                          std::to_string(diagonal * spec.winding_cap) + " m)");

    const auto cols = static_cast<std::size_t>(std::round(spec.extent_x / spec.cell_size)) + 1;
    const auto rows = static_cast<std::size_t>(std::round(spec.extent_z / spec.cell_size)) + 1;
    std::vector<double> samples(cols * rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            samples[r * cols + c] =
                terrain_height(seed, static_cast<double>(c) * spec.cell_size, static_cast<double>(r) * spec.cell_size);
    Heightmap terrain(cols, rows, spec.cell_size, std::move(samples));

    Rng rng(mix64(seed ^ 0x70617468ULL));
    std::vector<Vec3> route;
    std::vector<Vec3> targets;
    bool ok = false;
    for (int attempt = 0; attempt < kAttempts && !ok; ++attempt) {
        route = wind_path(rng, spec, spec.path_length);
        targets.clear();
        for (int k = 1; k <= spec.targets; ++k)
            targets.push_back(point_along(route, spec.path_length * k / spec.targets));
        ok = std::all_of(route.begin(), route.end(), [&](const Vec3& p) {
            return p.x >= 10.0 && p.z >= 10.0 && p.x <= spec.extent_x - 10.0 && p.z <= spec.extent_z - 10.0;
        });
        Vec3 prev = route.front();
        for (const Vec3& t : targets) {
            ok = ok && horizontal_distance(prev, t) >= spec.min_target_spacing;
            prev = t;
        }
    }
    if (!ok) throw ConfigError("could not lay out a course satisfying the spec");

    for (Vec3& p : route) p.y = terrain.height_at(p.x, p.z);
    for (Vec3& t : targets) t.y = terrain.height_at(t.x, t.z);
    // the last route point and the last target coincide up to rounding; pin them
    route.back() = targets.back();

    std::vector<Obstacle> obstacles;
    const int max_tries = spec.obstacles * 20;
    for (int tries = 0; tries < max_tries && static_cast<int>(obstacles.size()) < spec.obstacles; ++tries) {
        const double x = rng.uniform(20.0, spec.extent_x - 20.0);
        const double z = rng.uniform(20.0, spec.extent_z - 20.0);
        const bool tree = rng.uniform01() < 0.7;
        const double half = tree ? rng.uniform(0.4, 1.2) : rng.uniform(3.0, 6.0);
        const double height = tree ? rng.uniform(6.0, 14.0) : rng.uniform(4.0, 8.0);
        const Vec3 centre{x, 0.0, z};
        if (polyline_distance_xz(centre, route) < kCorridor + half * 1.5) continue;
        double base = terrain.height_at(x, z);
        for (double dx : {-half, half})
            for (double dz : {-half, half}) base = std::min(base, terrain.height_at(x + dx, z + dz));
        base -= 0.5;
        if (tree)
            obstacles.emplace_back(Cylinder{x, z, base, half, height});
        else
            obstacles.emplace_back(Box{{x - half, base, z - half}, {x + half, base + height, z + half}});
    }

    WorldModel::Layout layout;
    layout.obstacles = std::move(obstacles);
    layout.targets = std::move(targets);
    layout.start = route.front();
    layout.course = std::move(route);
    layout.seed = seed;
    layout.spec = spec;
    return WorldModel(std::move(terrain), std::move(layout));
}

}  // namespace vrtravel
