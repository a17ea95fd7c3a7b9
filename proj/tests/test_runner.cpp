#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tjunction/runner.hpp"

using namespace tj;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tjunction_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig config(const std::string& file) { return load_config(fs::path(TJ_CONFIG_DIR) / file); }

RunConfig small(RunConfig c, const fs::path& out) {
    c.n = 97;
    c.epsilons = {0.2};
    c.connection_nodes = 401;
    c.out = out.string();
    return c;
}

int run(const std::function<int()>& fn) {
    std::ostringstream err;
    return run_guarded(fn, err);
}

}  // namespace

TEST(Config, DefaultsValidate) { EXPECT_NO_THROW(RunConfig{}.validate()); }

TEST(Config, ParsesShippedConfigs) {
    for (const char* f : {"equilateral.json", "isoceles.json", "scalene.json", "polynomial.json",
                          "degenerate_sigma.json", "single_phase.json", "corrupted_angles.json",
                          "equal_tensions.json"})
        EXPECT_NO_THROW(config(f).validate()) << f;
}

TEST(Config, RejectsNonDecreasingEps) {
    RunConfig c;
    c.epsilons = {0.1, 0.2};
    EXPECT_THROW(c.validate(), InvalidConfiguration);
    c.epsilons = {0.1, 0.1};
    EXPECT_THROW(c.validate(), InvalidConfiguration);
}

TEST(Config, RejectsUnknownFamilyAndMalformedJson) {
    EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"potential": {"family": "spline"}})")).validate(),
                 InvalidConfiguration);
    EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"potential": {"minima": [[0, 0], [1]]}})")),
                 InvalidConfiguration);
    EXPECT_THROW(load_config("/nonexistent/config.json"), InvalidConfiguration);
}

TEST(Config, PolynomialFamilyMatchesProduct) {
    const Potential q = make_potential(config("polynomial.json").potential);
    const Potential p = make_potential(config("equilateral.json").potential);
    for (double x : {-0.7, 0.1, 0.9})
        for (double y : {-0.3, 0.5, 1.2}) EXPECT_NEAR(q.value({x, y}), p.value({x, y}), 1e-9);
}

TEST(Sigma, EquilateralGivesEqualTensions) {
    const fs::path out = scratch("sigma_eq");
    EXPECT_EQ(run([&] { return cmd_sigma(small(config("equilateral.json"), out), std::cout); }), kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "tensions.json"));
    EXPECT_NEAR(j["sigma12"].get<double>(), j["sigma13"].get<double>(), 1e-6);
    EXPECT_NEAR(j["sigma12"].get<double>(), j["sigma23"].get<double>(), 1e-6);
    EXPECT_TRUE(fs::exists(out / "profile_12.csv"));
}

TEST(Sigma, IsocelesGivesSymmetricTensions) {
    const fs::path out = scratch("sigma_iso");
    EXPECT_EQ(run([&] { return cmd_sigma(small(config("isoceles.json"), out), std::cout); }), kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "tensions.json"));
    EXPECT_NEAR(j["sigma13"].get<double>(), j["sigma23"].get<double>(), 1e-8);
}

TEST(Sigma, DegenerateTensionsExitWithHypothesisCode) {
    const fs::path out = scratch("sigma_deg");
    RunConfig c = config("degenerate_sigma.json");
    c.out = out.string();
    EXPECT_EQ(run([&] { return cmd_sigma(c, std::cout); }), kExitHypothesis);
}

TEST(Angles, RelabelledWhenNeeded) {
    const fs::path out = scratch("angles_relabel");
    RunConfig c;
    c.tensions_override = std::array<double, 3>{1.0, 1.3, 1.0};
    c.out = out.string();
    EXPECT_EQ(run([&] { return cmd_angles(c, std::cout); }), kExitOk);
    const auto j = nlohmann::json::parse(slurp(out / "angles.json"));
    EXPECT_GE(j["alpha2"].get<double>(), j["alpha1"].get<double>());
    EXPECT_DOUBLE_EQ(j["sigma13"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(j["sigma23"].get<double>(), 1.3);
}

TEST(Solve, WritesArtifactsAndCreatesOutputDir) {
    const fs::path out = scratch("solve") / "nested";
    RunConfig c = small(config("equilateral.json"), out);
    EXPECT_EQ(run([&] { return cmd_solve(c, std::cout); }), kExitOk);
    for (const char* f : {"field_eps0.2.bin", "convergence_eps0.2.csv", "stats_eps0.2.csv", "lambda_eps0.2.csv",
                          "bound_eps0.2.csv", "tensions.json", "angles.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    for (const auto& e : fs::directory_iterator(out))
        if (e.path().extension() == ".csv") EXPECT_EQ(slurp(e.path()).rfind("# schema_version=1", 0), 0u);
    const std::string log = slurp(out / "convergence_eps0.2.csv");
    EXPECT_NE(log.find("iteration,energy,step,gradnorm"), std::string::npos);
}

TEST(Solve, EnergyBelowCompetitor) {
    const fs::path out = scratch("solve_bound");
    const RunConfig c = small(config("equilateral.json"), out);
    const RunContext s = prepare(c, std::cout);
    const SolveOutcome o = solve_eps(s, c, 0.2, build_grid(c.n), nullptr, std::cout);
    EXPECT_LE(o.point.J, o.point.competitor_energy);
}

TEST(Solve, FieldDumpRoundTrips) {
    const fs::path out = scratch("dump");
    RunConfig c = small(config("equilateral.json"), out);
    ASSERT_EQ(run([&] { return cmd_solve(c, std::cout); }), kExitOk);
    const FieldDump d = read_field_dump(out / "field_eps0.2.bin");
    EXPECT_EQ(d.n, 97);
    EXPECT_DOUBLE_EQ(d.eps, 0.2);
    EXPECT_EQ(d.potential, "equilateral");
    EXPECT_NEAR(d.angles[0], 2 * kPi / 3, 1e-6);
    EXPECT_TRUE(std::isnan(d.data[0]));  // corner node (-1, -1)
    const std::size_t centre = (std::size_t(48) * 97 + 48) * 2;
    EXPECT_TRUE(std::isfinite(d.data[centre]));
}

TEST(Solve, FixedSeedGivesIdenticalCsv) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    RunConfig ca = small(config("equilateral.json"), a);
    ca.init = "random";
    RunConfig cb = ca;
    cb.out = b.string();
    ASSERT_EQ(run([&] { return cmd_solve(ca, std::cout); }), kExitOk);
    ASSERT_EQ(run([&] { return cmd_solve(cb, std::cout); }), kExitOk);
    for (const char* f : {"convergence_eps0.2.csv", "stats_eps0.2.csv", "lambda_eps0.2.csv", "bound_eps0.2.csv",
                          "field_eps0.2.bin"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Solve, SinglePhaseBoundaryGivesZeroEnergy) {
    const fs::path out = scratch("single");
    RunConfig c = config("single_phase.json");
    c.out = out.string();
    const RunContext s = prepare(c, std::cout);
    const SolveOutcome o = solve_eps(s, c, 0.1, build_grid(c.n), nullptr, std::cout);
    EXPECT_EQ(o.point.J, 0.0);
}

TEST(Solve, NonconvergenceExitsWithCodeThreeAndFlagsArtifacts) {
    const fs::path out = scratch("nonconv");
    RunConfig c = small(config("equilateral.json"), out);
    c.max_iter = 3;
    EXPECT_EQ(run([&] { return cmd_solve(c, std::cout); }), kExitNonconvergence);
    const std::string b = slurp(out / "bound_eps0.2.csv");
    EXPECT_NE(b.find("converged=false"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "field_eps0.2.bin"));
}

TEST(Sweep, RequiresThreeEps) {
    const fs::path out = scratch("sweep_short");
    RunConfig c = small(config("equilateral.json"), out);
    EXPECT_EQ(run([&] { return cmd_sweep(c, std::cout); }), kExitError);
}

TEST(Sweep, WritesSummaryAndConstants) {
    const fs::path out = scratch("sweep");
    RunConfig c = small(config("equilateral.json"), out);
    c.epsilons = {0.3, 0.25, 0.2};
    ASSERT_EQ(run([&] { return cmd_sweep(c, std::cout); }), kExitOk);
    const std::string s = slurp(out / "sweep_summary.csv");
    EXPECT_EQ(s.rfind("# schema_version=1 kind=sweep_summary", 0), 0u);
    EXPECT_NE(slurp(out / "sweep_constants.csv").find("C_loc,"), std::string::npos);
}

TEST(Verify, DefaultConfigPasses) {
    RunConfig c;
    c.out = scratch("verify_default").string();
    c.connection_nodes = 401;
    EXPECT_EQ(run([&] { return cmd_verify(c, std::cout); }), kExitOk);
}

TEST(Verify, CorruptedAnglesFail) {
    RunConfig c = config("corrupted_angles.json");
    c.out = scratch("verify_corrupt").string();
    EXPECT_EQ(run([&] { return cmd_verify(c, std::cout); }), kExitVerification);
}

TEST(Verify, EqualTensionsGiveEqualAngles) {
    RunConfig c = config("equal_tensions.json");
    c.out = scratch("verify_equal").string();
    EXPECT_EQ(run([&] { return cmd_verify(c, std::cout); }), kExitOk);
    const RunContext s = prepare(c, std::cout);
    EXPECT_NEAR(s.angles.alpha1, 2 * kPi / 3, 1e-12);
    EXPECT_NEAR(s.angles.alpha3, 2 * kPi / 3, 1e-12);
}
