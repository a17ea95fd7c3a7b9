#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tjunction/disk_solver.hpp"

using namespace tj;

namespace {

struct Fixture {
    ProductPotential p = tjtest::equilateral();
    std::vector<HeteroclinicProfile> profiles;
    SurfaceTensions sigma;
    JunctionAngles angles;

    Fixture() {
        for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) profiles.push_back(compute_connection(p, i, j, 12.0, 401));
        sigma = assemble_tensions(profiles);
        angles = solve_angles(sigma);
    }
    BoundaryTrace trace(double eps) const { return make_trace(angles, p.minima(), eps, 1.0); }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

}  // namespace

TEST(DiskGrid, RejectsCoarseGrids) { EXPECT_THROW(DiskGrid(32), InvalidConfiguration); }

TEST(DiskGrid, CellWeightsApproximateDiskArea) {
    const DiskGrid g(257);
    double area = 0.0;
    for (int j = 0; j + 1 < g.n(); ++j)
        for (int i = 0; i + 1 < g.n(); ++i) area += g.cell_weight(i, j);
    EXPECT_NEAR(area, kPi, 2e-2);
}

TEST(DiskGrid, NodeKindsPartitionTheSquare) {
    const DiskGrid g(129);
    for (std::size_t k : g.interior()) EXPECT_LT(norm(g.position(k)), 1.0);
    for (std::size_t k : g.band()) EXPECT_GE(norm(g.position(k)), 1.0);
    EXPECT_EQ(g.coord(0), -1.0);
    EXPECT_EQ(g.coord(g.n() - 1), 1.0);
    EXPECT_EQ(g.coord(64), 0.0);
    EXPECT_EQ(g.nearest(0.0), 64);
}

TEST(DiskEnergy, ConstantMinimumHasZeroEnergy) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto g = BoundaryTrace::constant(fx.angles, {fx.p.minima()[0], fx.p.minima()[1], fx.p.minima()[2]}, 0.1,
                                           1.0, 1);
    const DiskField f = make_field(grid, g, [&](const Vec2&) { return fx.p.minima()[0]; });
    EXPECT_EQ(energy(fx.p, f).total, 0.0);
}

TEST(DiskEnergy, BandNodesFollowTheTrace) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.1);
    const DiskField f = make_field(grid, tr, [](const Vec2&) { return Vec2{0, 0}; });
    for (std::size_t k : grid->band()) {
        const Vec2 v = tr.evaluate(grid->boundary_angle(k));
        EXPECT_EQ(f.values[k].x, v.x);
        EXPECT_EQ(f.values[k].y, v.y);
    }
}

TEST(DiskEnergy, GradientMatchesFiniteDifferences) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.1);
    DiskField f = competitor(fx.p, 0.1, grid, TriodPartition(fx.angles), tr, fx.profiles);
    std::mt19937_64 rng(31);
    std::normal_distribution<double> N(0.0, 0.05);
    for (std::size_t k : grid->interior()) f.values[k] = f.values[k] + Vec2{N(rng), N(rng)};
    const auto g = energy_gradient(fx.p, f);
    const auto& in = grid->interior();
    for (int t = 0; t < 50; ++t) {
        std::vector<Vec2> d(grid->size(), Vec2{0, 0});
        double dir = 0.0;
        for (std::size_t k : in) {
            d[k] = {N(rng), N(rng)};
            dir += dot(g[k], d[k]);
        }
        const double s = 1e-5;
        DiskField fp = f, fm = f;
        for (std::size_t k : in) {
            fp.values[k] = f.values[k] + s * d[k];
            fm.values[k] = f.values[k] - s * d[k];
        }
        const double fd = (energy(fx.p, fp).total - energy(fx.p, fm).total) / (2 * s);
        EXPECT_LT(std::abs(fd - dir) / std::abs(dir), 1e-6) << "direction " << t;
    }
}

TEST(DiskEnergy, BreakdownAddsUp) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.2);
    const DiskField f = competitor(fx.p, 0.2, grid, TriodPartition(fx.angles), tr, fx.profiles);
    const auto e = energy(fx.p, f);
    EXPECT_NEAR(e.total, e.dirichlet + e.potential, 1e-12 * e.total);
    EXPECT_NEAR(e.dirichlet, e.dirichlet_x + e.dirichlet_y, 1e-12 * e.total);
}

TEST(Competitor, RejectsOversizedJunctionBall) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.2);
    EXPECT_THROW(competitor(fx.p, 0.2, grid, TriodPartition(fx.angles), tr, fx.profiles, {5.0, 1.0}),
                 InvalidConfiguration);
}

TEST(Minimize, DecreasesEnergyBelowCompetitor) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.2);
    DiskField comp = competitor(fx.p, 0.2, grid, TriodPartition(fx.angles), tr, fx.profiles);
    const double ec = energy(fx.p, comp).total;
    MinimizeOptions o;
    o.init = Initializer::Competitor;
    o.start = comp;
    const auto r = minimize(fx.p, 0.2, grid, tr, o);
    EXPECT_TRUE(r.descent.converged());
    EXPECT_LE(r.energy.total, ec);
    for (std::size_t k = 1; k < r.descent.log.size(); ++k)
        EXPECT_LE(r.descent.log[k].energy, r.descent.log[k - 1].energy);
    EXPECT_EQ(r.descent.log.front().iteration, 0);
}

TEST(Minimize, InitializersAgree) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.2);
    MinimizeOptions a;
    a.init = Initializer::Competitor;
    a.start = competitor(fx.p, 0.2, grid, TriodPartition(fx.angles), tr, fx.profiles);
    MinimizeOptions b;
    b.init = Initializer::SharpU0;
    const double ea = minimize(fx.p, 0.2, grid, tr, a).energy.total;
    const double eb = minimize(fx.p, 0.2, grid, tr, b).energy.total;
    EXPECT_NEAR(ea, eb, 1e-4);
}

TEST(Minimize, ReportsBudgetExhaustion) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.2);
    MinimizeOptions o;
    o.max_iter = 3;
    try {
        minimize(fx.p, 0.2, grid, tr, o);
        FAIL() << "expected SolverFailure";
    } catch (const SolverFailure& e) {
        EXPECT_EQ(e.result().descent.status, DescentStatus::BudgetExhausted);
        EXPECT_EQ(e.result().field.values.size(), grid->size());
    }
}

TEST(Minimize, CompetitorInitializerNeedsStartField) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    MinimizeOptions o;
    o.init = Initializer::Competitor;
    EXPECT_THROW(minimize(fx.p, 0.2, grid, fx.trace(0.2), o), std::invalid_argument);
    EXPECT_THROW(initializer_from_string("zero"), InvalidConfiguration);
}

TEST(Apriori, MinimizerStaysBounded) {
    const auto& fx = fixture();
    const auto grid = build_grid(97);
    const auto tr = fx.trace(0.2);
    MinimizeOptions o;
    o.init = Initializer::Random;
    o.seed = 4;
    const auto r = minimize(fx.p, 0.2, grid, tr, o);
    const auto ap = check_apriori(r.field);
    EXPECT_LE(ap.max_abs_u, tr.sup_bound() + 1e-6);
    EXPECT_GT(ap.eps_max_grad, 0.0);
}
