#include "vrtravel/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vrtravel/errors.hpp"

namespace vrtravel {

Heightmap::Heightmap(std::size_t cols, std::size_t rows, double cell_size, std::vector<double> samples)
    : cols_(cols), rows_(rows), cell_size_(cell_size), samples_(std::move(samples)) {
    if (cols_ < 2 || rows_ < 2) throw ConfigError("heightmap must be at least 2x2");
    if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) throw ConfigError("cell_size must be > 0");
    if (samples_.size() != cols_ * rows_)
        throw ConfigError("heightmap has " + std::to_string(samples_.size()) + " samples, expected " +
                          std::to_string(cols_ * rows_));
    for (double h : samples_)
        if (!std::isfinite(h)) throw ConfigError("heightmap contains a non-finite elevation");
}

double Heightmap::height_at(double x, double z) const {
    if (!contains(x, z)) throw RangeError("height_at: point outside the grid");

    const double gx = x / cell_size_;
    const double gz = z / cell_size_;
    auto col = static_cast<std::size_t>(gx);
    auto row = static_cast<std::size_t>(gz);
    if (col >= cols_ - 1) col = cols_ - 2;
    if (row >= rows_ - 1) row = rows_ - 2;
    const double fx = gx - static_cast<double>(col);
    const double fz = gz - static_cast<double>(row);

    const double h00 = sample(col, row);
    const double h10 = sample(col + 1, row);
    const double h01 = sample(col, row + 1);
    const double h11 = sample(col + 1, row + 1);
    const double h0 = h00 + (h10 - h00) * fx;
    const double h1 = h01 + (h11 - h01) * fx;
    return h0 + (h1 - h0) * fz;
}

bool footprint_contains(const Obstacle& o, double x, double z) {
    if (const auto* b = std::get_if<Box>(&o))
        return x >= b->min.x && x <= b->max.x && z >= b->min.z && z <= b->max.z;
    const auto& c = std::get<Cylinder>(o);
    const double dx = x - c.x;
    const double dz = z - c.z;
    return dx * dx + dz * dz <= c.radius * c.radius;
}

bool volume_contains(const Obstacle& o, const Vec3& p) {
    if (const auto* b = std::get_if<Box>(&o))
        return p.x >= b->min.x && p.x <= b->max.x && p.y >= b->min.y && p.y <= b->max.y &&
               p.z >= b->min.z && p.z <= b->max.z;
    const auto& c = std::get<Cylinder>(o);
    return p.y >= c.base && p.y <= c.base + c.height && footprint_contains(o, p.x, p.z);
}

double obstacle_top(const Obstacle& o) {
    if (const auto* b = std::get_if<Box>(&o)) return b->max.y;
    const auto& c = std::get<Cylinder>(o);
    return c.base + c.height;
}

namespace {

struct Extent {
    double x0, z0, x1, z1;
};

Extent footprint_extent(const Obstacle& o) {
    if (const auto* b = std::get_if<Box>(&o)) return {b->min.x, b->min.z, b->max.x, b->max.z};
    const auto& c = std::get<Cylinder>(o);
    return {c.x - c.radius, c.z - c.radius, c.x + c.radius, c.z + c.radius};
}

Vec3 obstacle_normal(const Obstacle& o, const Vec3& p) {
    if (const auto* b = std::get_if<Box>(&o)) {
        // nearest face
        const double d[6] = {std::abs(p.x - b->min.x), std::abs(p.x - b->max.x), std::abs(p.y - b->min.y),
                             std::abs(p.y - b->max.y), std::abs(p.z - b->min.z), std::abs(p.z - b->max.z)};
        static const Vec3 n[6] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
        return n[std::min_element(d, d + 6) - d];
    }
    const auto& c = std::get<Cylinder>(o);
    const double top = c.base + c.height;
    const double radial = std::hypot(p.x - c.x, p.z - c.z);
    if (std::abs(p.y - top) <= std::abs(c.radius - radial)) return {0, 1, 0};
    if (radial == 0.0) return {0, 1, 0};
    return {(p.x - c.x) / radial, 0.0, (p.z - c.z) / radial};
}

}  // namespace

WorldModel::WorldModel(Heightmap terrain, Layout layout) : terrain_(std::move(terrain)), layout_(std::move(layout)) {
    if (!(layout_.max_slope > 0.0 && layout_.max_slope <= 1.5707963267948966))
        throw ConfigError("max_slope must lie in (0, pi/2]");
    max_top_ = *std::max_element(terrain_.samples().begin(), terrain_.samples().end());
    for (const auto& o : layout_.obstacles) max_top_ = std::max(max_top_, obstacle_top(o));
    index_obstacles();
    build_navigability();
    for (std::size_t i = 0; i < layout_.targets.size(); ++i)
        if (!is_navigable(layout_.targets[i]))
            throw ConfigError("target " + std::to_string(i) + " is not on navigable ground");
}

void WorldModel::index_obstacles() {
    bucket_cols_ = static_cast<std::size_t>(terrain_.width() / bucket_size_) + 1;
    bucket_rows_ = static_cast<std::size_t>(terrain_.depth() / bucket_size_) + 1;
    buckets_.assign(bucket_cols_ * bucket_rows_, {});
    auto clamp_index = [this](double v, std::size_t n) {
        const double b = std::floor(v / bucket_size_);
        if (b < 0.0) return std::size_t{0};
        return std::min(static_cast<std::size_t>(b), n - 1);
    };
    for (std::uint32_t i = 0; i < layout_.obstacles.size(); ++i) {
        const Extent e = footprint_extent(layout_.obstacles[i]);
        for (std::size_t r = clamp_index(e.z0, bucket_rows_); r <= clamp_index(e.z1, bucket_rows_); ++r)
            for (std::size_t c = clamp_index(e.x0, bucket_cols_); c <= clamp_index(e.x1, bucket_cols_); ++c)
                buckets_[r * bucket_cols_ + c].push_back(i);
    }
}

template <typename Fn>
void WorldModel::for_obstacles_near(double x, double z, Fn&& fn) const {
    if (buckets_.empty()) return;
    const double bx = std::floor(x / bucket_size_);
    const double bz = std::floor(z / bucket_size_);
    if (bx < 0.0 || bz < 0.0) return;
    const auto c = static_cast<std::size_t>(bx);
    const auto r = static_cast<std::size_t>(bz);
    if (c >= bucket_cols_ || r >= bucket_rows_) return;
    for (std::uint32_t i : buckets_[r * bucket_cols_ + c])
        if (fn(layout_.obstacles[i])) return;
}

const Obstacle* WorldModel::obstacle_containing(const Vec3& p) const {
    const Obstacle* found = nullptr;
    for_obstacles_near(p.x, p.z, [&](const Obstacle& o) {
        if (volume_contains(o, p)) {
            found = &o;
            return true;
        }
        return false;
    });
    return found;
}

void WorldModel::build_navigability() {
    const std::size_t cols = terrain_.cols();
    const std::size_t rows = terrain_.rows();
    const double cell = terrain_.cell_size();
    navigable_.assign(cols * rows, 0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            navigable_[r * cols + c] =
                slope_at(static_cast<double>(c) * cell, static_cast<double>(r) * cell) <= layout_.max_slope;

    auto to_index = [cell](double v, std::size_t n, bool upper) {
        const double g = upper ? std::floor(v / cell) : std::ceil(v / cell);
        return static_cast<std::size_t>(std::clamp(g, 0.0, static_cast<double>(n - 1)));
    };
    for (const auto& o : layout_.obstacles) {
        const Extent e = footprint_extent(o);
        for (std::size_t r = to_index(e.z0, rows, false); r <= to_index(e.z1, rows, true); ++r)
            for (std::size_t c = to_index(e.x0, cols, false); c <= to_index(e.x1, cols, true); ++c)
                if (footprint_contains(o, static_cast<double>(c) * cell, static_cast<double>(r) * cell))
                    navigable_[r * cols + c] = 0;
    }
}

double WorldModel::slope_at(double x, double z) const {
    const Vec3 n = terrain_normal(x, z);
    return std::acos(std::clamp(n.y, -1.0, 1.0));
}

Vec3 WorldModel::terrain_normal(double x, double z) const {
    const double h = terrain_.cell_size() * 0.5;
    const double x0 = std::max(0.0, x - h);
    const double x1 = std::min(terrain_.width(), x + h);
    const double z0 = std::max(0.0, z - h);
    const double z1 = std::min(terrain_.depth(), z + h);
    const double dhdx = (height_at(x1, z) - height_at(x0, z)) / (x1 - x0);
    const double dhdz = (height_at(x, z1) - height_at(x, z0)) / (z1 - z0);
    return normalized(Vec3{-dhdx, 1.0, -dhdz});
}

bool WorldModel::is_navigable(const Vec3& point) const {
    if (!contains(point.x, point.z)) return false;
    if (slope_at(point.x, point.z) > layout_.max_slope) return false;
    bool blocked = false;
    for_obstacles_near(point.x, point.z, [&](const Obstacle& o) {
        blocked = footprint_contains(o, point.x, point.z);
        return blocked;
    });
    return !blocked;
}

bool WorldModel::is_solid(const Vec3& p) const {
    if (!contains(p.x, p.z)) return false;
    if (p.y < height_at(p.x, p.z)) return true;
    return obstacle_containing(p) != nullptr;
}

GroundHit WorldModel::make_hit(const Vec3& outside, const Vec3& inside) const {
    GroundHit hit;
    if (const Obstacle* o = obstacle_containing(inside)) {
        hit.surface = Surface::obstacle;
        hit.point = outside;
        hit.surface_normal = obstacle_normal(*o, outside);
        hit.navigable = false;
        return hit;
    }
    hit.surface = Surface::terrain;
    hit.point = ground(outside.x, outside.z);
    hit.surface_normal = terrain_normal(outside.x, outside.z);
    hit.navigable = is_navigable(hit.point);
    return hit;
}

std::optional<GroundHit> WorldModel::ray_ground_intersect(const Vec3& origin, const Vec3& dir_in) const {
    const Vec3 dir = normalized(dir_in);
    if (length(dir) == 0.0) return std::nullopt;

    // clip to the grid footprint
    double t_enter = 0.0;
    double t_exit = std::numeric_limits<double>::infinity();
    auto clip = [&](double o, double d, double hi) {
        if (d == 0.0) return o >= 0.0 && o <= hi;
        double a = (0.0 - o) / d;
        double b = (hi - o) / d;
        if (a > b) std::swap(a, b);
        t_enter = std::max(t_enter, a);
        t_exit = std::min(t_exit, b);
        return t_enter <= t_exit;
    };
    if (!clip(origin.x, dir.x, terrain_.width()) || !clip(origin.z, dir.z, terrain_.depth()))
        return std::nullopt;

    auto at = [&](double t) {
        Vec3 p = origin + dir * t;
        p.x = std::clamp(p.x, 0.0, terrain_.width());
        p.z = std::clamp(p.z, 0.0, terrain_.depth());
        return p;
    };

    double t = t_enter;
    Vec3 p = at(t);
    if (is_solid(p)) return make_hit(p, p);

    const double step = terrain_.cell_size() * 0.25;
    while (t < t_exit) {
        double next = t + step;
        if (p.y > max_top_) {
            if (dir.y >= 0.0) return std::nullopt;
            next = std::max(next, t + (p.y - max_top_) / -dir.y);
        }
        next = std::min(next, t_exit);
        const Vec3 pn = at(next);
        if (is_solid(pn)) {
            double lo = t;
            double hi = next;
            while (hi - lo > kRefineTolerance) {
                const double mid = 0.5 * (lo + hi);
                if (is_solid(at(mid)))
                    hi = mid;
                else
                    lo = mid;
            }
            return make_hit(at(lo), at(hi));
        }
        t = next;
        p = pn;
    }
    return std::nullopt;
}

bool WorldModel::occlusion_test(const Vec3& a, const Vec3& b) const {
    constexpr double kEndClearance = 0.05;
    const double len = distance(a, b);
    if (len <= 2.0 * kEndClearance) return false;
    const auto n = static_cast<std::size_t>(std::ceil(len / (terrain_.cell_size() * 0.25)));
    const double dn = static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) {
        // a*s + b*t with s, t computed independently keeps the sample set symmetric
        const double t = static_cast<double>(i) / dn;
        const double s = static_cast<double>(n - i) / dn;
        if (t * len < kEndClearance || s * len < kEndClearance) continue;
        const Vec3 p{a.x * s + b.x * t, a.y * s + b.y * t, a.z * s + b.z * t};
        if (is_solid(p)) return true;
    }
    return false;
}

double ballistic_max_range(double v0, double g, double height) {
    return v0 / g * std::sqrt(v0 * v0 + 2.0 * g * std::max(0.0, height));
}

ArcResult parabolic_arc(const WorldModel& world, const Vec3& origin, const Vec3& dir_in, double v0, double g) {
    if (!(v0 > 0.0) || !(g > 0.0)) throw DomainError("parabolic_arc: v0 and g must be > 0");
    const Vec3 dir = normalized(dir_in);
    auto at = [&](double tau) {
        return Vec3{origin.x + v0 * dir.x * tau, origin.y + v0 * dir.y * tau - 0.5 * g * tau * tau,
                    origin.z + v0 * dir.z * tau};
    };

    ArcResult out;
    out.samples.push_back(origin);
    if (!world.contains(origin.x, origin.z)) return out;
    if (world.is_solid(origin)) {
        out.hit = world.make_hit(origin, origin);
        return out;
    }

    constexpr int kMaxSteps = 100000;
    double tau = 0.0;
    for (int i = 1; i <= kMaxSteps; ++i) {
        const double next = static_cast<double>(i) * kArcTimeStep;
        const Vec3 p = at(next);
        if (!world.contains(p.x, p.z)) return out;
        if (world.is_solid(p)) {
            double lo = tau;
            double hi = next;
            while (distance(at(lo), at(hi)) > kRefineTolerance) {
                const double mid = 0.5 * (lo + hi);
                if (world.is_solid(at(mid)))
                    hi = mid;
                else
                    lo = mid;
            }
            out.hit = world.make_hit(at(lo), at(hi));
            out.samples.push_back(out.hit->point);
            return out;
        }
        out.samples.push_back(p);
        tau = next;
    }
    return out;
}

WorldModel make_flat_world(std::size_t cols, std::size_t rows, double cell_size, double height,
                           WorldModel::Layout layout) {
    return WorldModel(Heightmap(cols, rows, cell_size, std::vector<double>(cols * rows, height)),
                      std::move(layout));
}

}  // namespace vrtravel
