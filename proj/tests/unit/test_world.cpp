#include <gtest/gtest.h>

#include <cmath>

#include "testkit.hpp"
#include "vrtravel/errors.hpp"
#include "vrtravel/geometry.hpp"
#include "vrtravel/rng.hpp"
#include "vrtravel/world.hpp"

using namespace vrtravel;

namespace {

WorldModel slope_world(double slope_deg, std::size_t n = 41) {
    std::vector<double> h(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) h[r * n + c] = std::tan(deg_to_rad(slope_deg)) * static_cast<double>(c);
    return WorldModel(Heightmap(n, n, 1.0, std::move(h)), {});
}

// Rolling hills a few cells wide, so every feature is resolvable at the ray-march step.
WorldModel bumpy_world(std::uint64_t seed, std::size_t n = 65) {
    Rng rng(seed);
    const double px = rng.uniform(0, 2 * kPi);
    const double pz = rng.uniform(0, 2 * kPi);
    const double fx = rng.uniform(0.3, 0.6);
    const double fz = rng.uniform(0.3, 0.6);
    std::vector<double> h(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            h[r * n + c] = 1.5 + 1.5 * std::sin(fx * static_cast<double>(c) + px) *
                                     std::cos(fz * static_cast<double>(r) + pz);
    WorldModel::Layout layout;
    for (int i = 0; i < 6; ++i) {
        const double x = rng.uniform(5, 55);
        const double z = rng.uniform(5, 55);
        if (i % 2)
            layout.obstacles.push_back(Box{{x, -1, z}, {x + 3, 8, z + 2}});
        else
            layout.obstacles.push_back(Cylinder{x, z, -1, 1.0, 9});
    }
    return WorldModel(Heightmap(n, n, 1.0, std::move(h)), std::move(layout));
}

}  // namespace

TEST(Heightmap, SampleValuesAtGridPoints) {
    Heightmap hm(3, 2, 2.0, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(hm.height_at(0, 0), 1);
    EXPECT_EQ(hm.height_at(4, 0), 3);
    EXPECT_EQ(hm.height_at(2, 2), 5);
    EXPECT_EQ(hm.height_at(4, 2), 6);
}

TEST(Heightmap, BilinearCellCenter) {
    Heightmap hm(2, 2, 1.0, {0, 0, 4, 4});
    EXPECT_DOUBLE_EQ(hm.height_at(0.5, 0.5), 2.0);
}

TEST(Heightmap, BilinearMatchesFormula) {
    Heightmap hm(2, 2, 1.0, {1, 3, 7, 2});
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double u = rng.uniform01();
        const double v = rng.uniform01();
        const double expect = 1 * (1 - u) * (1 - v) + 3 * u * (1 - v) + 7 * (1 - u) * v + 2 * u * v;
        EXPECT_NEAR(hm.height_at(u, v), expect, 1e-12);
    }
}

TEST(Heightmap, FlatEverywhere) {
    const WorldModel w = make_flat_world(20, 20, 1.0, 3.5);
    Rng rng(9);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(w.height_at(rng.uniform(0, 19), rng.uniform(0, 19)), 3.5);
}

TEST(Heightmap, OutOfBoundsThrows) {
    Heightmap hm(2, 2, 1.0, {0, 0, 0, 0});
    EXPECT_THROW(hm.height_at(-0.01, 0.5), RangeError);
    EXPECT_THROW(hm.height_at(0.5, 1.01), RangeError);
}

TEST(Heightmap, RejectsBadGrids) {
    EXPECT_THROW(Heightmap(1, 2, 1.0, {0, 0}), ConfigError);
    EXPECT_THROW(Heightmap(2, 2, 0.0, {0, 0, 0, 0}), ConfigError);
    EXPECT_THROW(Heightmap(2, 2, 1.0, {0, 0, 0}), ConfigError);
    EXPECT_THROW(Heightmap(2, 2, 1.0, {0, 0, 0, std::nan("")}), ConfigError);
}

TEST(WorldModel, RejectsTargetsOffNavigableGround) {
    WorldModel::Layout layout;
    layout.obstacles.push_back(Box{{4, -1, 4}, {6, 3, 6}});
    layout.targets.push_back({5, 0, 5});
    EXPECT_THROW(make_flat_world(10, 10, 1.0, 0.0, layout), ConfigError);
}

TEST(Ray, StraightDownHitsBelow) {
    const WorldModel w = make_flat_world(50, 50, 1.0, 0.0);
    const auto hit = w.ray_ground_intersect({0, 17, 0}, {0, -1, 0});
    ASSERT_TRUE(hit);
    EXPECT_NEAR(distance(hit->point, {0, 0, 0}), 0.0, 1e-3);
    EXPECT_EQ(hit->point.y, 0.0);
    EXPECT_TRUE(hit->navigable);
}

TEST(Ray, StraightUpMisses) {
    const WorldModel w = make_flat_world(50, 50, 1.0, 0.0);
    EXPECT_FALSE(w.ray_ground_intersect({10, 17, 10}, {0, 1, 0}));
}

TEST(Ray, FortyFiveDegreesLandsSeventeenOut) {
    const WorldModel w = make_flat_world(50, 50, 1.0, 0.0);
    const double c = std::sqrt(0.5);
    const auto hit = w.ray_ground_intersect({0, 17, 0}, {c, -c, 0});
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->point.x, 17.0, 1e-3);
}

TEST(Ray, LeavingTheGridMisses) {
    const WorldModel w = make_flat_world(50, 50, 1.0, 0.0);
    EXPECT_FALSE(w.ray_ground_intersect({10, 5, 10}, normalized(Vec3{1, -0.01, 0})));
}

TEST(Ray, HitsObstacleAsNonNavigable) {
    WorldModel::Layout layout;
    layout.obstacles.push_back(Box{{20, -1, 0}, {22, 10, 50}});
    const WorldModel w = make_flat_world(50, 50, 1.0, 0.0, layout);
    const auto hit = w.ray_ground_intersect({0, 5, 25}, {1, 0, 0});
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->surface, Surface::obstacle);
    EXPECT_FALSE(hit->navigable);
    EXPECT_NEAR(hit->point.x, 20.0, 1e-3);
    EXPECT_LE(hit->point.x, 20.0);
}

TEST(Ray, AgreesWithFineMarchOracle) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const WorldModel w = bumpy_world(seed);
        Rng rng(seed * 7);
        for (int i = 0; i < 60; ++i) {
            const Vec3 o{rng.uniform(2, 62), rng.uniform(6, 20), rng.uniform(2, 62)};
            const Vec3 d = normalized(Vec3{rng.uniform(-1, 1), rng.uniform(-1, -0.2), rng.uniform(-1, 1)});
            const auto hit = w.ray_ground_intersect(o, d);
            const auto oracle = testkit::march_oracle(w, o, d, 0.0005, 200);
            ASSERT_EQ(hit.has_value(), oracle.has_value());
            if (!hit) continue;
            EXPECT_NEAR(distance(hit->point, *oracle), 0.0, 0.01)
                << "o=" << o.x << "," << o.y << "," << o.z << " d=" << d.x << "," << d.y << "," << d.z << " hit="
                << hit->point.x << "," << hit->point.y << "," << hit->point.z << " surf=" << int(hit->surface)
                << " oracle=" << oracle->x << "," << oracle->y << "," << oracle->z;
            EXPECT_FALSE(w.is_solid(hit->point));
            if (hit->surface == Surface::terrain) {
                EXPECT_EQ(hit->point.y, w.height_at(hit->point.x, hit->point.z));
                EXPECT_GT(hit->surface_normal.y, 0.0);
                EXPECT_NEAR(length(hit->surface_normal), 1.0, 1e-12);
            }
        }
    }
}

TEST(Arc, FortyFiveDegreeRangeOnFlatGround) {
    const WorldModel w = make_flat_world(80, 20, 1.0, 0.0);
    const double c = std::sqrt(0.5);
    const ArcResult arc = parabolic_arc(w, {1, 0.0, 10}, {c, c, 0}, 20.0, 9.81);
    ASSERT_TRUE(arc.hit);
    EXPECT_NEAR(arc.hit->point.x - 1.0, 40.77471967380224, 2e-3);
    EXPECT_TRUE(arc.hit->navigable);
}

TEST(Arc, StraightDownLandsBelow) {
    const WorldModel w = make_flat_world(20, 20, 1.0, 0.0);
    const ArcResult arc = parabolic_arc(w, {5, 1, 5}, {0, -1, 0}, 20.0, 9.81);
    ASSERT_TRUE(arc.hit);
    EXPECT_NEAR(horizontal_distance(arc.hit->point, {5, 0, 5}), 0.0, 1e-12);
    EXPECT_NEAR(arc.hit->point.y, 0.0, 1e-12);
}

TEST(Arc, HorizontalShotHitsWallFace) {
    WorldModel::Layout layout;
    layout.obstacles.push_back(Box{{5, -1, 0}, {6, 10, 20}});
    const WorldModel w = make_flat_world(20, 20, 1.0, 0.0, layout);
    const Vec3 origin{0, 1.5, 10};
    const ArcResult arc = parabolic_arc(w, origin, {1, 0, 0}, 20.0, 9.81);
    ASSERT_TRUE(arc.hit);
    EXPECT_EQ(arc.hit->surface, Surface::obstacle);
    EXPECT_FALSE(arc.hit->navigable);
    EXPECT_NEAR(arc.hit->point.x, 5.0, 1e-3);
    // oracle: fine march along the same parabola
    double tau = 0.0;
    Vec3 p = origin;
    while (!w.is_solid(p)) {
        tau += 1e-6;
        p = origin + Vec3{20.0 * tau, -0.5 * 9.81 * tau * tau, 0};
    }
    EXPECT_NEAR(distance(arc.hit->point, p), 0.0, 1e-3);
}

TEST(Arc, SamplesEndAtHitAndStepTenMs) {
    const WorldModel w = make_flat_world(80, 20, 1.0, 0.0);
    const Vec3 origin{1, 1, 10};
    const Vec3 dir = normalized(Vec3{1, 1, 0});
    const ArcResult arc = parabolic_arc(w, origin, dir, 20.0, 9.81);
    ASSERT_TRUE(arc.hit);
    ASSERT_GE(arc.samples.size(), 3u);
    EXPECT_EQ(arc.samples.front(), origin);
    EXPECT_EQ(arc.samples.back(), arc.hit->point);
    const Vec3 second = origin + dir * (20.0 * kArcTimeStep) - Vec3{0, 0.5 * 9.81 * kArcTimeStep * kArcTimeStep, 0};
    EXPECT_NEAR(distance(arc.samples[1], second), 0.0, 1e-12);
}

TEST(Arc, LeavingBoundsHasNoHit) {
    const WorldModel w = make_flat_world(20, 20, 1.0, 0.0);
    const ArcResult arc = parabolic_arc(w, {10, 1, 10}, normalized(Vec3{1, 1, 0}), 20.0, 9.81);
    EXPECT_FALSE(arc.hit);
}

TEST(Arc, LandingNeverExceedsBallisticBound) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const WorldModel w = bumpy_world(seed, 129);
        Rng rng(seed);
        for (int i = 0; i < 200; ++i) {
            const Vec3 feet = w.ground(rng.uniform(40, 88), rng.uniform(40, 88));
            const Vec3 origin = feet + Vec3{0, 1.0, 0};
            const double yaw = rng.uniform(-kPi, kPi);
            const double pitch = rng.uniform(-kPi / 2, kPi / 2);
            const Vec3 dir = make_pose({}, yaw, pitch).forward();
            const ArcResult arc = parabolic_arc(w, origin, dir, 20.0, 9.81);
            if (!arc.hit) continue;
            // lowest possible landing is the lowest terrain sample
            const double drop = origin.y - 0.0;
            EXPECT_LE(horizontal_distance(origin, arc.hit->point), ballistic_max_range(20.0, 9.81, drop) + 1e-3);
        }
    }
}

TEST(BallisticRange, FlatAndRaised) {
    EXPECT_DOUBLE_EQ(ballistic_max_range(20.0, 9.81, 0.0), 400.0 / 9.81);
    EXPECT_GT(ballistic_max_range(20.0, 9.81, 1.0), 400.0 / 9.81);
}

TEST(Navigable, FlatOpenGround) {
    const WorldModel w = make_flat_world(20, 20, 1.0, 0.0);
    EXPECT_TRUE(w.is_navigable({10, 0, 10}));
}

TEST(Navigable, InsideObstacleFootprint) {
    WorldModel::Layout layout;
    layout.obstacles.push_back(Box{{4, -1, 4}, {6, 3, 6}});
    layout.obstacles.push_back(Cylinder{15, 15, -1, 1.5, 4});
    const WorldModel w = make_flat_world(20, 20, 1.0, 0.0, layout);
    EXPECT_FALSE(w.is_navigable({5, 0, 5}));
    EXPECT_FALSE(w.is_navigable({15.5, 0, 15.5}));
    EXPECT_TRUE(w.is_navigable({10, 0, 10}));
}

TEST(Navigable, SlopeLimit) {
    EXPECT_FALSE(slope_world(35.0).is_navigable({20, 0, 20}));
    EXPECT_TRUE(slope_world(25.0).is_navigable({20, 0, 20}));
    EXPECT_NEAR(slope_world(35.0).slope_at(20, 20), deg_to_rad(35.0), 1e-9);
}

TEST(Navigable, OutsideGrid) {
    const WorldModel w = make_flat_world(20, 20, 1.0, 0.0);
    EXPECT_FALSE(w.is_navigable({-1, 0, 5}));
}

TEST(Navigable, VertexMaskMatchesPointPredicate) {
    const WorldModel w = bumpy_world(4);
    for (std::size_t r = 0; r < w.terrain().rows(); ++r)
        for (std::size_t c = 0; c < w.terrain().cols(); ++c) {
            const double x = static_cast<double>(c);
            const double z = static_cast<double>(r);
            EXPECT_EQ(w.vertex_navigable(c, r), w.is_navigable(w.ground(x, z)));
        }
}

TEST(Occlusion, FlatWorldElevatedEye) {
    const WorldModel w = make_flat_world(50, 50, 1.0, 0.0);
    EXPECT_FALSE(w.occlusion_test({0, 17, 0}, {17, 0.9, 17}));
}

TEST(Occlusion, BoxBetween) {
    WorldModel::Layout layout;
    layout.obstacles.push_back(Box{{9, -1, 0}, {11, 5, 20}});
    const WorldModel w = make_flat_world(20, 20, 1.0, 0.0, layout);
    EXPECT_TRUE(w.occlusion_test({2, 1.7, 10}, {18, 1.7, 10}));
}

TEST(Occlusion, RidgeBetween) {
    const auto w = testkit::ridge_world(100, 80, 50, 20, 25);
    EXPECT_TRUE(w->occlusion_test({20, 1.7, 30}, {80, 1.7, 30}));
    // oracle: any sample below the terrain
    bool blocked = false;
    for (int i = 1; i < 1000; ++i) {
        const double x = 20 + 60 * i / 1000.0;
        blocked |= 1.7 < w->height_at(x, 30);
    }
    EXPECT_TRUE(blocked);
}

TEST(Occlusion, Symmetric) {
    const WorldModel w = bumpy_world(8);
    Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        const Vec3 a = w.ground(rng.uniform(0, 64), rng.uniform(0, 64)) + Vec3{0, rng.uniform(0.5, 10), 0};
        const Vec3 b = w.ground(rng.uniform(0, 64), rng.uniform(0, 64)) + Vec3{0, rng.uniform(0.5, 10), 0};
        EXPECT_EQ(w.occlusion_test(a, b), w.occlusion_test(b, a));
    }
}
