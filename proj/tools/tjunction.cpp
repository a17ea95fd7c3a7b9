// Command-line driver: sigma | angles | solve | sweep | verify.

#include <iostream>

#include <CLI11.hpp>

#include "tjunction/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Vector Allen-Cahn triple junction on the unit disk"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<double> eps;
    int n = 0;
    long long seed = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--eps", eps, "comma separated eps list, strictly decreasing")->delimiter(',');
        sub->add_option("--n", n, "grid nodes per axis");
        sub->add_option("--seed", seed, "random seed");
    };
    auto* sigma = app.add_subcommand("sigma", "surface tensions and connection profiles");
    auto* angles = app.add_subcommand("angles", "junction angles from the tensions");
    auto* solve = app.add_subcommand("solve", "minimize on the disk for each eps");
    auto* sweep = app.add_subcommand("sweep", "eps sweep with fitted constants");
    auto* verify = app.add_subcommand("verify", "appendix identities and geometry self-checks");
    for (auto* s : {sigma, angles, solve, sweep, verify}) add_common(s);

    CLI11_PARSE(app, argc, argv);

    return tj::run_guarded(
        [&]() -> int {
            tj::RunConfig cfg = config_path.empty() ? tj::RunConfig{} : tj::load_config(config_path);
            if (!out_dir.empty()) cfg.out = out_dir;
            if (!eps.empty()) cfg.epsilons = eps;
            if (n > 0) cfg.n = n;
            if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
            if (sigma->parsed()) return tj::cmd_sigma(cfg, std::cout);
            if (angles->parsed()) return tj::cmd_angles(cfg, std::cout);
            if (solve->parsed()) return tj::cmd_solve(cfg, std::cout);
            if (sweep->parsed()) return tj::cmd_sweep(cfg, std::cout);
            return tj::cmd_verify(cfg, std::cout);
        },
        std::cerr);
}
