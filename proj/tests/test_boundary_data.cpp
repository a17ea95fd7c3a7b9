#include <gtest/gtest.h>

#include "tjunction/boundary_data.hpp"

using namespace tj;

namespace {

const std::array<Vec2, 3> kMinima{Vec2{-1, 0}, Vec2{1, 0}, Vec2{0, 2}};

}  // namespace

TEST(BoundaryTrace, FlatArcsTakeTheMinima) {
    const auto a = solve_angles({1.0, 1.1, 1.25});
    const BoundaryTrace g(a, kMinima, 0.05, 1.0);
    const TriodPartition t(a);
    for (int p = 1; p <= 3; ++p) {
        const auto arc = t.arc(p);
        const Vec2 v = g.evaluate(0.5 * (arc[0] + arc[1]));
        EXPECT_EQ(v.x, kMinima[p - 1].x);
        EXPECT_EQ(v.y, kMinima[p - 1].y);
    }
}

TEST(BoundaryTrace, TransitionsAreCentredOnRays) {
    const auto a = solve_angles({1.0, 1.0, 1.0});
    const BoundaryTrace g(a, kMinima, 0.1, 1.0);
    const TriodPartition t(a);
    for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
        const Vec2 mid = 0.5 * (kMinima[i - 1] + kMinima[j - 1]);
        const Vec2 v = g.evaluate(t.ray(i, j));
        EXPECT_NEAR(v.x, mid.x, 1e-12);
        EXPECT_NEAR(v.y, mid.y, 1e-12);
    }
}

TEST(BoundaryTrace, LipschitzBoundHoldsOnFineSamples) {
    const auto a = solve_angles({1.0, 1.2, 1.3});
    const BoundaryTrace g(a, kMinima, 0.05, 1.0);
    const int m = 200000;
    double worst = 0.0;
    Vec2 prev = g.evaluate(0.0);
    for (int k = 1; k <= m; ++k) {
        const Vec2 v = g.evaluate(kTwoPi * k / m);
        worst = std::max(worst, dist(v, prev) / (kTwoPi / m));
        prev = v;
    }
    EXPECT_LE(worst, g.lipschitz() * (1 + 1e-9));
    EXPECT_GT(worst, 0.5 * g.lipschitz());
}

TEST(BoundaryTrace, ContinuousAcrossArcEndpoints) {
    const auto a = solve_angles({1.0, 1.2, 1.3});
    const BoundaryTrace g(a, kMinima, 0.05, 1.0);
    for (double e : g.arc_endpoints()) {
        const double d = 1e-9;
        EXPECT_LT(dist(g.evaluate(e - d), g.evaluate(e + d)), 1e-6);
    }
}

TEST(BoundaryTrace, RejectsOverlappingArcs) {
    const auto a = solve_angles({1.0, 1.0, 1.0});
    EXPECT_THROW(BoundaryTrace(a, kMinima, 2.0, 1.0), InvalidConfiguration);
    EXPECT_THROW(BoundaryTrace(a, kMinima, -0.1, 1.0), InvalidConfiguration);
}

TEST(BoundaryTrace, SupBoundIsEpsIndependent) {
    const auto a = solve_angles({1.0, 1.0, 1.0});
    for (double eps : {0.2, 0.1, 0.05}) {
        const BoundaryTrace g(a, kMinima, eps, 1.0);
        EXPECT_DOUBLE_EQ(g.sup_bound(), 2.0);
        for (const auto& s : trace_samples(g, 1000)) EXPECT_LE(norm(s.value), g.sup_bound() + 1e-12);
    }
}

TEST(BoundaryTrace, LinearProfileIsAccepted) {
    const auto a = solve_angles({1.0, 1.0, 1.0});
    const BoundaryTrace g(a, kMinima, 0.1, 1.0, TransitionProfile::by_name("linear"));
    EXPECT_EQ(g.g0().name, "linear");
    EXPECT_THROW(TransitionProfile::by_name("cubic"), InvalidConfiguration);
}

TEST(TraceSamples, ContainsArcEndpointsInOrder) {
    const auto a = solve_angles({1.0, 1.1, 1.2});
    const BoundaryTrace g(a, kMinima, 0.1, 1.0);
    const auto s = trace_samples(g, 64);
    ASSERT_EQ(s.size(), 64u);
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(s[k - 1].theta, s[k].theta);
    for (double e : g.arc_endpoints()) {
        bool found = false;
        for (const auto& x : s) found = found || x.theta == e;
        EXPECT_TRUE(found);
    }
    EXPECT_THROW(trace_samples(g, 5), std::invalid_argument);
}
