#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "tjunction/io.hpp"

namespace tj {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitHypothesis = 2,
    kExitNonconvergence = 3,
    kExitVerification = 4,
};

/// Everything that depends on the potential but not on eps.
struct RunContext {
    Potential potential;
    std::vector<HeteroclinicProfile> profiles;  ///< pairs 12, 13, 23
    SurfaceTensions tensions;
    JunctionAngles angles;
    H1Report h1;
    LocalQuadraticConstants local;
};

namespace detail {

template <PotentialLike P>
std::vector<HeteroclinicProfile> all_connections(const P& p, const RunConfig& c) {
    ConnectionOptions o;
    o.restarts = c.connection_restarts;
    o.seed = c.seed;
    std::vector<HeteroclinicProfile> out;
    for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}})
        out.push_back(compute_connection(p, i, j, c.connection_L, c.connection_nodes, o));
    return out;
}

inline LocalQuadraticConstants local_constants(const Potential& p) {
    const auto m = p.minima();
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) sep = std::min(sep, dist(m[i], m[j]));
    std::vector<double> deltas;
    for (int k = 1; k < 100; ++k) deltas.push_back(0.005 * k * sep);
    return estimate_local_constants(p, deltas);
}

}  // namespace detail

/// Certifies the potential, computes the connections, tensions and angles. When
/// Young's law puts the larger angle first, phases 1 and 2 are relabelled and
/// everything is recomputed in the new labels.
inline RunContext prepare(const RunConfig& c, std::ostream& log) {
    c.validate();
    RunContext s{make_potential(c.potential), {}, {}, {}, {}, {}};
    s.h1 = certify_h1(s.potential);
    if (!s.h1.passed) {
        std::string failed;
        for (const auto& cl : s.h1.clauses)
            if (!cl.passed) failed += (failed.empty() ? "" : ",") + cl.clause;
        throw HypothesisViolation("potential fails certification: " + failed, failed);
    }
    s.local = detail::local_constants(s.potential);
    for (int pass = 0; pass < 2; ++pass) {
        if (c.tensions_override) {
            const auto& t = *c.tensions_override;
            s.tensions = SurfaceTensions::validated(t[0], t[1], t[2]);
        } else {
            s.profiles = detail::all_connections(s.potential, c);
            s.tensions = assemble_tensions(s.profiles);
        }
        s.angles = solve_angles(s.tensions);
        if (!s.angles.relabeled_12) break;
        log << "relabelling phases 1 and 2 so that alpha2 >= alpha1\n";
        s.potential = s.potential.relabeled(0, 1);
        if (c.tensions_override) {
            auto t = *c.tensions_override;
            std::swap(t[1], t[2]);
            s.tensions = SurfaceTensions::validated(t[0], t[1], t[2]);
            s.angles = solve_angles(s.tensions);
            break;
        }
    }
    return s;
}

inline BoundaryTrace trace_for(const RunContext& s, const RunConfig& c, double eps) {
    const auto m = s.potential.minima();
    const std::array<Vec2, 3> mins{m[0], m[1], m[2]};
    if (c.single_phase > 0) return BoundaryTrace::constant(s.angles, mins, eps, c.c0, c.single_phase);
    return BoundaryTrace(s.angles, mins, eps, c.c0, TransitionProfile::by_name(c.g0));
}

struct SolveOutcome {
    MinimizeResult result;
    SweepPoint point;
    InterfaceStats weak;
    AprioriReport apriori;
    BoundReport bound;
};

namespace detail {

inline void write_solve_artifacts(const std::filesystem::path& dir, const RunConfig& c, const RunContext& s,
                                  const MinimizeResult& r, double comp_energy, bool converged, SolveOutcome* out) {
    const std::string e = eps_label(r.field.eps);
    const std::string tag = c.tag();
    write_field_dump(dir / ("field_eps" + e + ".bin"), r.field, tag);
    write_convergence_csv(dir / ("convergence_eps" + e + ".csv"), r.descent);
    if (!out) {
        BoundReport b;
        b.eps = r.field.eps;
        b.J = r.energy.total;
        b.competitor_energy = comp_energy;
        b.sum_sigma = s.tensions.sum();
        write_bound_csv(dir / ("bound_eps" + e + ".csv"), b, c.n, tag, converged);
        return;
    }
    write_bound_csv(dir / ("bound_eps" + e + ".csv"), out->bound, c.n, tag, converged);
    write_lambda_csv(dir / ("lambda_eps" + e + ".csv"), out->point.stats, r.field.eps, c.n, tag);
    auto os = open_out(dir / ("stats_eps" + e + ".csv"));
    stats_csv_header(os);
    stats_csv_row(os, r.field.eps, c.n, tag, "refined", out->point.stats);
    stats_csv_row(os, r.field.eps, c.n, tag, "weak", out->weak);
}

}  // namespace detail

/// Solves at one eps and measures everything. Throws SolverFailure after writing
/// the partial artifacts (flagged converged=false) when `dir` is given.
inline SolveOutcome solve_eps(const RunContext& s, const RunConfig& c, double eps, std::shared_ptr<const DiskGrid> grid,
                              const std::filesystem::path* dir, std::ostream& log) {
    const BoundaryTrace tr = trace_for(s, c, eps);
    MinimizeOptions o;
    o.max_iter = c.max_iter;
    o.tol = c.tol;
    o.stall_window = c.stall_window;
    o.stall_rtol = c.stall_rtol;
    o.seed = c.seed;
    o.init = initializer_from_string(c.init);

    double comp_energy = kNaN;
    if (c.single_phase == 0 && !s.profiles.empty()) {
        DiskField comp = competitor(s.potential, eps, grid, TriodPartition(s.angles), tr, s.profiles, c.competitor);
        comp_energy = energy(s.potential, comp).total;
        if (o.init == Initializer::Competitor) o.start = std::move(comp);
    }
    if (o.init == Initializer::Competitor && !o.start) o.init = Initializer::SharpU0;

    SolveOutcome out;
    try {
        out.result = minimize(s.potential, eps, grid, tr, o);
    } catch (const SolverFailure& f) {
        if (dir) detail::write_solve_artifacts(*dir, c, s, f.result(), comp_energy, false, nullptr);
        throw;
    }
    const DiskField& f = out.result.field;
    const double dW = s.local.delta_W;
    out.point.eps = eps;
    out.point.h = grid->h();
    out.point.J = out.result.energy.total;
    out.point.competitor_energy = comp_energy;
    out.point.sum_sigma = s.tensions.sum();
    out.point.stats = interface_stats(f, DiagnosticVariant::refined(eps, c.alpha), dW);
    out.weak = interface_stats(f, DiagnosticVariant::weak(eps), dW);
    if (!out.point.stats.ystar.case2) out.point.E_measured = E_at_stats(out.point.stats, s.tensions, s.angles);
    out.apriori = check_apriori(f);
    out.bound = bound_report(s.potential, f, out.point.stats, s.tensions, s.angles, comp_energy);
    log << "eps " << eps << ": J " << fmt(out.point.J) << "  competitor " << fmt(comp_energy) << "  sum sigma "
        << fmt(out.point.sum_sigma) << "  y* " << out.point.stats.ystar.y << "  iterations "
        << out.result.descent.iterations << '\n';
    if (dir) detail::write_solve_artifacts(*dir, c, s, out.result, comp_energy, true, &out);
    return out;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int cmd_sigma(const RunConfig& c, std::ostream& log) {
    const RunContext s = prepare(c, log);
    const std::filesystem::path dir = c.out;
    std::filesystem::create_directories(dir);
    for (const auto& p : s.profiles)
        write_profile_csv(dir / ("profile_" + std::to_string(p.i) + std::to_string(p.j) + ".csv"), p);
    write_json(dir / "tensions.json", tensions_json(s.tensions, c.tag()));
    log << "sigma12 " << fmt(s.tensions.s12) << "\nsigma13 " << fmt(s.tensions.s13) << "\nsigma23 "
        << fmt(s.tensions.s23) << '\n';
    return kExitOk;
}

inline int cmd_angles(const RunConfig& c, std::ostream& log) {
    const RunContext s = prepare(c, log);
    std::filesystem::create_directories(c.out);
    write_json(std::filesystem::path(c.out) / "angles.json", angles_json(s.angles, s.tensions));
    log << "alpha1 " << fmt(s.angles.alpha1) << "\nalpha2 " << fmt(s.angles.alpha2) << "\nalpha3 "
        << fmt(s.angles.alpha3) << '\n';
    return kExitOk;
}

inline int cmd_solve(const RunConfig& c, std::ostream& log) {
    const RunContext s = prepare(c, log);
    const std::filesystem::path dir = c.out;
    std::filesystem::create_directories(dir);
    write_json(dir / "tensions.json", tensions_json(s.tensions, c.tag()));
    write_json(dir / "angles.json", angles_json(s.angles, s.tensions));
    const auto grid = build_grid(c.n);
    for (double eps : c.epsilons) solve_eps(s, c, eps, grid, &dir, log);
    return kExitOk;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& log) {
    if (c.epsilons.size() < 3) throw InvalidConfiguration("sweep needs at least three eps values");
    const RunContext s = prepare(c, log);
    const std::filesystem::path dir = c.out;
    std::filesystem::create_directories(dir);
    write_json(dir / "tensions.json", tensions_json(s.tensions, c.tag()));
    write_json(dir / "angles.json", angles_json(s.angles, s.tensions));
    const auto grid = build_grid(c.n);
    std::vector<SweepPoint> pts;
    std::vector<AprioriReport> ap;
    for (double eps : c.epsilons) {
        SolveOutcome o = solve_eps(s, c, eps, grid, &dir, log);
        pts.push_back(o.point);
        ap.push_back(o.apriori);
    }
    const SweepFit fit = fit_sweep(pts);
    write_sweep_csv(dir / "sweep_summary.csv", pts, c.n, c.tag(), ap);
    write_sweep_fit_csv(dir / "sweep_constants.csv", fit);
    log << "fitted C_upper " << fmt(fit.constants.C_upper) << "  C1 " << fmt(fit.constants.C1_lower) << "  C "
        << fmt(fit.constants.C_lower) << "  C_loc " << fmt(fit.constants.C_loc) << '\n';
    return kExitOk;
}

struct CheckLine {
    std::string name;
    bool passed = false;
    double value = 0.0;
};

/// Appendix identities, geometry round trips and potential certification.
inline std::vector<CheckLine> verify_checks(const RunConfig& c, std::ostream& log) {
    std::vector<CheckLine> out;
    auto add = [&](std::string name, bool ok, double v) {
        log << (ok ? "PASS " : "FAIL ") << name << " (" << fmt(v) << ")\n";
        out.push_back({std::move(name), ok, v});
    };

    if (c.angles_override) {
        const auto& a = *c.angles_override;
        const JunctionAngles ja{a[0], a[1], a[2], false};
        add("angles_override_valid", ja.valid(1e-12), ja.sum() - kTwoPi);
        if (ja.valid(1e-12)) {
            const JunctionAngles back = solve_angles(tensions_from_angles(ja));
            add("angles_override_round_trip",
                std::abs(back.alpha1 - ja.alpha1) + std::abs(back.alpha2 - ja.alpha2) + std::abs(back.alpha3 - ja.alpha3) <
                    1e-10,
                back.alpha3 - ja.alpha3);
        }
    }

    const RunContext s = prepare(c, log);
    add("potential_certified", s.h1.passed, 0.0);
    add("angle_sum", std::abs(s.angles.sum() - kTwoPi) < 1e-12, s.angles.sum() - kTwoPi);
    add("sine_law", sine_law_residual(s.angles, s.tensions) < 1e-10, sine_law_residual(s.angles, s.tensions));
    {
        const JunctionAngles back = solve_angles(tensions_from_angles(s.angles));
        const double d = std::abs(back.alpha1 - s.angles.alpha1) + std::abs(back.alpha2 - s.angles.alpha2) +
                         std::abs(back.alpha3 - s.angles.alpha3);
        add("angles_round_trip", d < 1e-10, d);
    }
    {
        const TriodPartition t(s.angles);
        bool ok = true;
        for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
            const double r = t.ray(i, j);
            const Vec2 on{0.5 * std::cos(r), 0.5 * std::sin(r)};
            const SectorHit h = t.classify(on, 1e-12);
            ok = ok && h.phase == std::min(i, j) && h.on_boundary;
        }
        add("triod_rays_labelled", ok, 0.0);
    }
    {
        const Case2Bound b = case2_bound(s.tensions, s.angles);
        add("case2_exceeds_sum", b.exceeds, b.radical - b.sum_sigma);
    }

    std::mt19937_64 rng(c.seed);
    std::vector<EtildeScan> scans{scan_etilde(s.angles)};
    for (int k = 0; k < 10; ++k) scans.push_back(scan_etilde(sample_angles(rng)));
    double worst_gap = 0.0;
    bool scan_ok = true;
    for (const EtildeScan& sc : scans) {
        worst_gap = std::max(worst_gap, std::abs(sc.gap));
        scan_ok = scan_ok && std::abs(sc.mu_star) <= sc.cell_mu && std::abs(sc.y_star) <= sc.cell_y &&
                  std::abs(sc.gap) <= 1e-9;
    }
    add("etilde_scan_minimum", scan_ok, worst_gap);

    double worst_b = 0.0;
    bool positive = true;
    for (int k = 0; k < 1000; ++k) {
        const JunctionAngles a = sample_angles(rng);
        const AppendixBResidual r = appendixB_residual(a);
        worst_b = std::max(worst_b, std::abs(r.direct - r.closed_form));
        positive = positive && r.closed_form > 0.0;
    }
    add("strict_inequality_identity", worst_b < 1e-12, worst_b);
    add("strict_inequality_positive", positive, 0.0);

    const std::filesystem::path dir = c.out;
    write_scan_csv(dir / "etilde_scans.csv", scans);
    auto os = open_out(dir / "verify.csv");
    csv_schema_line(os, "verify");
    os << "check,passed,value\n";
    for (const CheckLine& l : out) os << l.name << ',' << l.passed << ',' << fmt(l.value) << '\n';
    return out;
}

inline int cmd_verify(const RunConfig& c, std::ostream& log) {
    const auto lines = verify_checks(c, log);
    for (const auto& l : lines)
        if (!l.passed) throw VerificationFailure("verification failed: " + l.name);
    return kExitOk;
}

/// Maps the library's exception types onto the documented exit codes.
inline int run_guarded(const std::function<int()>& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violation [" << e.offending() << "]: " << e.what() << '\n';
        return kExitHypothesis;
    } catch (const SolverFailure& e) {
        err << "solver did not converge: " << e.what() << '\n';
        return kExitNonconvergence;
    } catch (const ConnectionFailure& e) {
        err << "connection did not converge: " << e.what() << '\n';
        return kExitNonconvergence;
    } catch (const VerificationFailure& e) {
        err << e.what() << '\n';
        return kExitVerification;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace tj
