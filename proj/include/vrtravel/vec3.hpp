#pragma once

#include <cmath>

namespace vrtravel {

/// World-space vector in meters: x east, y up, z north.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double horizontal_length(const Vec3& v) { return std::sqrt(v.x * v.x + v.z * v.z); }

inline double distance(const Vec3& a, const Vec3& b) { return length(b - a); }

inline double horizontal_distance(const Vec3& a, const Vec3& b) { return horizontal_length(b - a); }

inline Vec3 normalized(const Vec3& v) {
    const double n = length(v);
    return n > 0.0 ? v * (1.0 / n) : Vec3{};
}

inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

}  // namespace vrtravel
