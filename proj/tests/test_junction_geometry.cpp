#include <gtest/gtest.h>

#include <random>

#include "tjunction/junction_geometry.hpp"

using namespace tj;

namespace {

SurfaceTensions random_tensions(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.2, 2.0);
    for (;;) {
        const double a = U(rng), b = U(rng), c = U(rng);
        if (a < b + c && b < a + c && c < a + b && std::min({b + c - a, a + c - b, a + b - c}) > 1e-3) return {a, b, c};
    }
}

}  // namespace

TEST(YoungsLaw, EqualTensionsGiveEqualAngles) {
    const auto a = solve_angles({1.0, 1.0, 1.0});
    EXPECT_NEAR(a.alpha1, 2 * kPi / 3, 1e-12);
    EXPECT_NEAR(a.alpha2, 2 * kPi / 3, 1e-12);
    EXPECT_NEAR(a.alpha3, 2 * kPi / 3, 1e-12);
    EXPECT_FALSE(a.relabeled_12);
}

TEST(YoungsLaw, RandomTensionsSatisfySineLaw) {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        const auto s = random_tensions(rng);
        const auto a = solve_angles(s);
        EXPECT_LT(sine_law_residual(a, s), 1e-10);
        EXPECT_NEAR(a.sum(), kTwoPi, 1e-12);
        EXPECT_TRUE(a.valid());
        EXPECT_GE(a.alpha2, a.alpha1);
    }
}

TEST(YoungsLaw, LargerOppositeTensionGivesSmallerAngle) {
    // alpha_1 faces sigma_23: sigma_23 > sigma_13 keeps the labels
    const auto a = solve_angles({1.0, 1.0, 1.3});
    EXPECT_FALSE(a.relabeled_12);
    EXPECT_LT(a.alpha1, a.alpha2);
    const auto b = solve_angles({1.0, 1.3, 1.0});
    EXPECT_TRUE(b.relabeled_12);
    EXPECT_NEAR(b.alpha1, a.alpha1, 1e-14);
    EXPECT_NEAR(b.alpha2, a.alpha2, 1e-14);
}

TEST(YoungsLaw, IsocelesTensionsAreNotRelabelled) {
    const auto a = solve_angles({3.77, 4.75, 4.75});
    EXPECT_FALSE(a.relabeled_12);
    EXPECT_EQ(a.alpha1, a.alpha2);
}

TEST(YoungsLaw, RejectsTriangleViolation) {
    EXPECT_THROW(solve_angles({1.0, 1.0, 2.0}), InvalidConfiguration);
    EXPECT_THROW(solve_angles({0.0, 1.0, 1.0}), InvalidConfiguration);
}

TEST(YoungsLaw, RoundTripThroughTensions) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 100; ++k) {
        const auto a = solve_angles(random_tensions(rng));
        const auto b = solve_angles(tensions_from_angles(a));
        EXPECT_NEAR(a.alpha1, b.alpha1, 1e-10);
        EXPECT_NEAR(a.alpha2, b.alpha2, 1e-10);
        EXPECT_NEAR(a.alpha3, b.alpha3, 1e-10);
    }
}

TEST(Triod, RaysBoundSectorsOfTheRightWidth) {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 50; ++k) {
        const auto a = solve_angles(random_tensions(rng));
        const TriodPartition t(a);
        for (int p = 1; p <= 3; ++p) {
            const auto arc = t.arc(p);
            EXPECT_NEAR(arc[1] - arc[0], a.as_array()[p - 1], 1e-12);
        }
        // rays 13 and 23 mirror each other about the downward axis
        EXPECT_NEAR(t.ray13() + t.ray23(), 3 * kPi, 1e-12);
    }
}

TEST(Triod, ClassifiesSectorInteriorsAndRays) {
    const auto a = solve_angles({1.0, 1.1, 1.3});
    const TriodPartition t(a);
    for (int p = 1; p <= 3; ++p) {
        const auto arc = t.arc(p);
        const double mid = 0.5 * (arc[0] + arc[1]);
        const auto hit = t.classify({0.5 * std::cos(mid), 0.5 * std::sin(mid)});
        EXPECT_EQ(hit.phase, p);
        EXPECT_FALSE(hit.on_boundary);
    }
    for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
        const double r = t.ray(i, j);
        const auto hit = t.classify({0.7 * std::cos(r), 0.7 * std::sin(r)}, 1e-12);
        EXPECT_EQ(hit.phase, i);
        EXPECT_TRUE(hit.on_boundary);
    }
    const auto origin = t.classify({0.0, 0.0});
    EXPECT_EQ(origin.phase, 1);
    EXPECT_TRUE(origin.on_boundary);
}

TEST(Triod, PhaseOneIsCounterClockwiseOfRay12) {
    const auto a = solve_angles({1.0, 1.0, 1.0});
    const TriodPartition t(a);
    EXPECT_NEAR(t.ray12(), kPi / 2, 1e-12);
    EXPECT_EQ(t.classify({-0.5, 0.1}).phase, 1);
    EXPECT_EQ(t.classify({0.5, 0.1}).phase, 2);
    EXPECT_EQ(t.classify({0.0, -0.5}).phase, 3);
}

TEST(Triod, SharpMapTakesMinimaValues) {
    const auto a = solve_angles({1.0, 1.0, 1.0});
    const TriodPartition t(a);
    const std::array<Vec2, 3> m{Vec2{-1, 0}, Vec2{1, 0}, Vec2{0, 2}};
    EXPECT_EQ(u0_map(t, m, {-0.5, 0.1}).value.x, -1.0);
    EXPECT_EQ(u0_map(t, m, {0.0, -0.5}).value.y, 2.0);
}
