#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tjunction/potential.hpp"

using namespace tj;
using tjtest::equilateral;

TEST(ProductPotential, VanishesWithZeroGradientAtMinima) {
    const auto p = equilateral();
    for (const Vec2& a : p.minima()) {
        EXPECT_EQ(p.value(a), 0.0);
        EXPECT_EQ(norm(p.gradient(a)), 0.0);
    }
}

TEST(ProductPotential, HessianAtMinimumIsIsotropic) {
    // 2 * prod_{j != i} |a_i - a_j|^2 = 2 * 4 * 4 for side 2
    const auto p = equilateral();
    for (const Vec2& a : p.minima()) {
        const auto ev = p.hessian(a).eigenvalues();
        EXPECT_NEAR(ev[0], 32.0, 1e-10);
        EXPECT_NEAR(ev[1], 32.0, 1e-10);
    }
}

TEST(ProductPotential, GradientAndHessianMatchFiniteDifferences) {
    const auto p = equilateral();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-2.5, 2.5);
    const double d = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const Vec2 u{U(rng), U(rng)};
        const Vec2 g = p.gradient(u);
        const double gx = (p.value(u + Vec2{d, 0}) - p.value(u - Vec2{d, 0})) * (0.5 / d);
        const double gy = (p.value(u + Vec2{0, d}) - p.value(u - Vec2{0, d})) * (0.5 / d);
        const double scale = std::max(1.0, norm(g));
        EXPECT_NEAR(g.x, gx, 1e-6 * scale);
        EXPECT_NEAR(g.y, gy, 1e-6 * scale);

        const Sym2 H = p.hessian(u);
        const Vec2 hx = (p.gradient(u + Vec2{d, 0}) - p.gradient(u - Vec2{d, 0})) * (0.5 / d);
        const Vec2 hy = (p.gradient(u + Vec2{0, d}) - p.gradient(u - Vec2{0, d})) * (0.5 / d);
        const double hs = std::max({1.0, std::abs(H.xx), std::abs(H.yy), std::abs(H.xy)});
        EXPECT_NEAR(H.xx, hx.x, 1e-6 * hs);
        EXPECT_NEAR(H.xy, hx.y, 1e-6 * hs);
        EXPECT_NEAR(H.yy, hy.y, 1e-6 * hs);
    }
}

TEST(ProductPotential, RejectsDegenerateMinima) {
    EXPECT_THROW(make_product_potential({0, 0}, {0, 0}, {1, 1}), InvalidConfiguration);
    EXPECT_THROW(make_product_potential({0, 0}, {1, 0}, {2, 0}), InvalidConfiguration);
}

TEST(PolynomialPotential, ExpansionMatchesProduct) {
    const auto p = equilateral();
    const auto q = PolynomialPotential::from_product({tjtest::kA1, tjtest::kA2, tjtest::kApex});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const Vec2 u{U(rng), U(rng)};
        EXPECT_NEAR(q.value(u), p.value(u), 1e-10 * std::max(1.0, p.value(u)));
        EXPECT_NEAR(norm(q.gradient(u) - p.gradient(u)), 0.0, 1e-9 * std::max(1.0, norm(p.gradient(u))));
    }
}

TEST(PolynomialPotential, RejectsNegativeExponents) {
    EXPECT_THROW(PolynomialPotential({{-1, 0, 1.0}}, {{0, 0}}, 1.0), InvalidConfiguration);
}

TEST(Potential, RelabelSwapsMinimaOnly) {
    const Potential p(equilateral(), "eq");
    const Potential q = p.relabeled(0, 1);
    EXPECT_EQ(q.minima()[0].x, p.minima()[1].x);
    EXPECT_EQ(q.minima()[1].x, p.minima()[0].x);
    EXPECT_EQ(q.value({0.3, 0.4}), p.value({0.3, 0.4}));
    EXPECT_EQ(q.tag(), "eq");
}

TEST(CertifyH1, AcceptsProductPotential) {
    const auto rep = certify_h1(equilateral());
    EXPECT_TRUE(rep.passed);
    for (const auto& c : rep.clauses) EXPECT_TRUE(c.passed) << c.clause;
    EXPECT_GT(rep.bounds.c1, 0.0);
    EXPECT_LE(rep.bounds.c1, rep.bounds.c2);
}

TEST(CertifyH1, FlagsMisdeclaredMinima) {
    const auto q = PolynomialPotential::from_product({tjtest::kA1, tjtest::kA2, tjtest::kApex});
    const PolynomialPotential wrong(q.terms(), {tjtest::kA1, tjtest::kA2, {0.0, 1.5}}, 3.0);
    const auto rep = certify_h1(wrong);
    EXPECT_FALSE(rep.passed);
    ASSERT_NE(rep.find("zero_at_minima"), nullptr);
    EXPECT_FALSE(rep.find("zero_at_minima")->passed);
}

TEST(CertifyH1, FlagsTwoWellPotential) {
    const auto rep = certify_h1(TwoWellSlice{});
    EXPECT_FALSE(rep.passed);
    EXPECT_FALSE(rep.find("three_minima")->passed);
}

TEST(LocalConstants, BracketHessianSpectrum) {
    const auto p = equilateral();
    std::vector<double> deltas;
    for (int k = 1; k <= 20; ++k) deltas.push_back(0.02 * k);
    const auto c = estimate_local_constants(p, deltas);
    EXPECT_GT(c.delta_W, 0.0);
    EXPECT_LE(c.c_W, 32.0);
    EXPECT_GE(c.C_W, 32.0);
}

TEST(LocalConstants, SlicePotentialBracketsDiagonalHessian) {
    // Hessian at (+-1, 0) is diag(2, 1)
    const auto c = estimate_local_constants(TwoWellSlice{}, {0.05, 0.1, 0.2});
    EXPECT_LE(c.c_W, 1.0);
    EXPECT_GE(c.C_W, 2.0);
}

TEST(LocalConstants, RejectsBadDeltaGrid) {
    const auto p = equilateral();
    EXPECT_THROW(estimate_local_constants(p, {}), std::invalid_argument);
    EXPECT_THROW(estimate_local_constants(p, {1.0}), std::invalid_argument);
}

TEST(LocalConstants, PropertyQuadraticSandwichOnCircles) {
    // sampled estimate: exact on the sampled angles, within 1% between them
    const auto p = equilateral();
    const std::vector<double> deltas{0.05, 0.1, 0.2, 0.3};
    const auto c = estimate_local_constants(p, deltas);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> T(0.0, kTwoPi);
    for (int k = 0; k < 500; ++k) {
        const Vec2 a = p.minima()[k % 3];
        const double r = deltas[k % deltas.size()];
        if (r > c.delta_W) continue;
        const double t = T(rng);
        const double w = p.value(a + r * Vec2{std::cos(t), std::sin(t)});
        EXPECT_GE(w, 0.5 * c.c_W * r * r * 0.99);
        EXPECT_LE(w, 0.5 * c.C_W * r * r * 1.01);
    }
}
