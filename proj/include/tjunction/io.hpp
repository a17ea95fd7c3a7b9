#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tjunction/appendix_checks.hpp"
#include "tjunction/interface_diagnostics.hpp"

namespace tj {

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct PotentialSpec {
    std::string family = "product";  ///< "product" or "polynomial"
    std::string tag;
    std::vector<Vec2> minima{{-1.0, 0.0}, {1.0, 0.0}, {0.0, 1.7320508075688772}};
    double scale = 1.0;
    std::vector<PolynomialPotential::Term> terms;  ///< polynomial family only
    double outer_radius = 0.0;                     ///< polynomial family only; 0 derives it from the minima
};

struct RunConfig {
    PotentialSpec potential;
    std::vector<double> epsilons{0.2, 0.1, 0.05};
    int n = 257;
    double c0 = 1.0;
    unsigned seed = 1;
    std::string out = "out";
    std::string g0 = "smoothstep";

    double connection_L = 12.0;
    int connection_nodes = 801;
    int connection_restarts = 0;

    int max_iter = 200000;
    double tol = 1e-7;
    int stall_window = 500;
    double stall_rtol = 1e-14;
    std::string init = "competitor";
    CompetitorOptions competitor;

    double alpha = 1.0;  ///< slack coefficient of the refined y*

    int single_phase = 0;  ///< 1..3 pins the whole boundary to that minimum
    std::optional<std::array<double, 3>> tensions_override;  ///< sigma12, sigma13, sigma23
    std::optional<std::array<double, 3>> angles_override;    ///< checked by verify

    /// Throws InvalidConfiguration on inconsistent fields.
    void validate() const {
        if (potential.family != "product" && potential.family != "polynomial")
            throw InvalidConfiguration("potential.family must be \"product\" or \"polynomial\"");
        if (potential.minima.size() != 3) throw InvalidConfiguration("potential.minima must list three points");
        if (potential.family == "polynomial" && potential.terms.empty())
            throw InvalidConfiguration("polynomial potential needs coefficients");
        if (epsilons.empty()) throw InvalidConfiguration("epsilons must not be empty");
        for (std::size_t k = 0; k < epsilons.size(); ++k) {
            if (!(epsilons[k] > 0.0)) throw InvalidConfiguration("epsilons must be positive");
            if (k > 0 && !(epsilons[k] < epsilons[k - 1]))
                throw InvalidConfiguration("epsilons must be strictly decreasing");
        }
        if (n < 64) throw InvalidConfiguration("n must be at least 64");
        if (!(c0 > 0.0)) throw InvalidConfiguration("c0 must be positive");
        if (!(connection_L > 0.0) || connection_nodes < 3) throw InvalidConfiguration("invalid connection settings");
        if (single_phase < 0 || single_phase > 3) throw InvalidConfiguration("single_phase must be 0..3");
        if (!(alpha > 0.0)) throw InvalidConfiguration("diagnostics.alpha must be positive");
        (void)initializer_from_string(init);
        (void)TransitionProfile::by_name(g0);
    }

    std::string tag() const { return potential.tag.empty() ? potential.family : potential.tag; }
};

namespace detail {

inline Vec2 point_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidConfiguration("expected a point [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::array<double, 3> triple_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw InvalidConfiguration(std::string(what) + " must have three entries");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("potential")) {
            const auto& p = j.at("potential");
            c.potential.family = p.value("family", c.potential.family);
            c.potential.tag = p.value("tag", std::string{});
            c.potential.scale = p.value("scale", c.potential.scale);
            c.potential.outer_radius = p.value("outer_radius", 0.0);
            if (p.contains("minima")) {
                c.potential.minima.clear();
                for (const auto& m : p.at("minima")) c.potential.minima.push_back(detail::point_from_json(m));
            }
            if (p.contains("coefficients"))
                for (const auto& t : p.at("coefficients")) {
                    if (!t.is_array() || t.size() != 3)
                        throw InvalidConfiguration("coefficients entries must be [px, py, c]");
                    c.potential.terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
                }
        }
        if (j.contains("epsilons")) c.epsilons = j.at("epsilons").get<std::vector<double>>();
        c.n = j.value("n", c.n);
        c.c0 = j.value("c0", c.c0);
        c.seed = j.value("seed", c.seed);
        c.out = j.value("out", c.out);
        c.g0 = j.value("g0", c.g0);
        if (j.contains("connection")) {
            const auto& k = j.at("connection");
            c.connection_L = k.value("L", c.connection_L);
            c.connection_nodes = k.value("nodes", c.connection_nodes);
            c.connection_restarts = k.value("restarts", c.connection_restarts);
        }
        if (j.contains("optimizer")) {
            const auto& o = j.at("optimizer");
            c.max_iter = o.value("max_iter", c.max_iter);
            c.tol = o.value("tol", c.tol);
            c.stall_window = o.value("stall_window", c.stall_window);
            c.stall_rtol = o.value("stall_rtol", c.stall_rtol);
            c.init = o.value("init", c.init);
        }
        if (j.contains("competitor")) {
            const auto& o = j.at("competitor");
            c.competitor.junction_radius = o.value("junction_radius", c.competitor.junction_radius);
            c.competitor.boundary_layer = o.value("boundary_layer", c.competitor.boundary_layer);
        }
        if (j.contains("diagnostics")) c.alpha = j.at("diagnostics").value("alpha", c.alpha);
        if (j.contains("boundary")) c.single_phase = j.at("boundary").value("single_phase", 0);
        if (j.contains("tensions_override"))
            c.tensions_override = detail::triple_from_json(j.at("tensions_override"), "tensions_override");
        if (j.contains("angles_override"))
            c.angles_override = detail::triple_from_json(j.at("angles_override"), "angles_override");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfiguration(std::string("config: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfiguration("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfiguration("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

inline Potential make_potential(const PotentialSpec& s) {
    const std::string tag = s.tag.empty() ? s.family : s.tag;
    if (s.minima.size() != 3) throw InvalidConfiguration("potential needs three minima");
    if (s.family == "product")
        return Potential(make_product_potential(s.minima[0], s.minima[1], s.minima[2], s.scale), tag);
    if (s.family == "polynomial") {
        double r = s.outer_radius;
        if (r <= 0.0) {
            for (const Vec2& a : s.minima) r = std::max(r, norm(a));
            r += 1.0;
        }
        return Potential(PolynomialPotential(s.terms, s.minima, r), tag);
    }
    throw InvalidConfiguration("unknown potential family: " + s.family);
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

/// Shortest round-trip representation.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Compact label for file names, e.g. 0.05 -> "0.05".
inline std::string eps_label(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", eps);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode = std::ios::out) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(p, mode);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

inline void csv_schema_line(std::ostream& os, const std::string& kind, const std::string& extra = {}) {
    os << "# schema_version=" << kSchemaVersion << " kind=" << kind;
    if (!extra.empty()) os << ' ' << extra;
    os << '\n';
}

inline void write_profile_csv(const std::filesystem::path& p, const HeteroclinicProfile& pr) {
    auto os = open_out(p);
    csv_schema_line(os, "profile",
                    "pair=" + std::to_string(pr.i) + std::to_string(pr.j) + " action=" + fmt(pr.action) +
                        " L=" + fmt(pr.L));
    os << "eta,u1,u2\n";
    for (std::size_t k = 0; k < pr.eta.size(); ++k)
        os << fmt(pr.eta[k]) << ',' << fmt(pr.values[k].x) << ',' << fmt(pr.values[k].y) << '\n';
}

inline nlohmann::ordered_json tensions_json(const SurfaceTensions& s, const std::string& tag) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["potential"] = tag;
    j["sigma12"] = s.s12;
    j["sigma13"] = s.s13;
    j["sigma23"] = s.s23;
    j["sum"] = s.sum();
    return j;
}

inline nlohmann::ordered_json angles_json(const JunctionAngles& a, const SurfaceTensions& s) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["alpha1"] = a.alpha1;
    j["alpha2"] = a.alpha2;
    j["alpha3"] = a.alpha3;
    j["sigma12"] = s.s12;
    j["sigma13"] = s.s13;
    j["sigma23"] = s.s23;
    j["relabeled_12"] = a.relabeled_12;
    return j;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::ordered_json& j) {
    auto os = open_out(p);
    os << j.dump(2) << '\n';
}

/// Text header terminated by a line "end", then n*n*2 little-endian float64
/// values, row-major (row j = y index), exterior nodes stored as NaN.
inline void write_field_dump(const std::filesystem::path& p, const DiskField& f, const std::string& tag) {
    auto os = open_out(p, std::ios::out | std::ios::binary);
    const auto& a = f.trace->angles();
    os << "tjfield " << kSchemaVersion << '\n'
       << "n " << f.grid->n() << '\n'
       << "eps " << fmt(f.eps) << '\n'
       << "potential " << tag << '\n'
       << "angles " << fmt(a.alpha1) << ' ' << fmt(a.alpha2) << ' ' << fmt(a.alpha3) << '\n'
       << "layout row-major float64-le components=2\n"
       << "end\n";
    const DiskGrid& g = *f.grid;
    std::vector<double> buf;
    buf.reserve(2 * g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const bool ext = g.kind(k) == NodeKind::Exterior;
        buf.push_back(ext ? kNaN : f.values[k].x);
        buf.push_back(ext ? kNaN : f.values[k].y);
    }
    if constexpr (std::endian::native == std::endian::big)
        for (double& v : buf) {
            std::uint64_t b;
            std::memcpy(&b, &v, 8);
            b = __builtin_bswap64(b);
            std::memcpy(&v, &b, 8);
        }
    os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
}

struct FieldDump {
    int n = 0;
    double eps = 0.0;
    std::string potential;
    std::array<double, 3> angles{};
    std::vector<double> data;
};

inline FieldDump read_field_dump(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    FieldDump d;
    std::string line;
    while (std::getline(in, line) && line != "end") {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "n") ls >> d.n;
        else if (key == "eps") ls >> d.eps;
        else if (key == "potential") ls >> d.potential;
        else if (key == "angles") ls >> d.angles[0] >> d.angles[1] >> d.angles[2];
    }
    d.data.resize(std::size_t(d.n) * d.n * 2);
    in.read(reinterpret_cast<char*>(d.data.data()), std::streamsize(d.data.size() * sizeof(double)));
    if (in.gcount() != std::streamsize(d.data.size() * sizeof(double)))
        throw std::runtime_error("field dump truncated: " + p.string());
    return d;
}

inline void write_convergence_csv(const std::filesystem::path& p, const DescentResult& r) {
    auto os = open_out(p);
    csv_schema_line(os, "convergence", std::string("status=") + to_string(r.status));
    os << "iteration,energy,step,gradnorm\n";
    for (const DescentRecord& rec : r.log)
        os << rec.iteration << ',' << fmt(rec.energy) << ',' << fmt(rec.step) << ',' << fmt(rec.gradnorm) << '\n';
}

inline void write_lambda_csv(const std::filesystem::path& p, const InterfaceStats& st, double eps, int n,
                             const std::string& tag) {
    auto os = open_out(p);
    csv_schema_line(os, "lambda", "eps=" + fmt(eps) + " n=" + std::to_string(n) + " potential=" + tag +
                                      " threshold=" + fmt(st.threshold));
    os << "y,length,lambda1,lambda2,lambda3\n";
    const auto& l = st.lambda;
    for (std::size_t r = 0; r < l.y.size(); ++r)
        os << fmt(l.y[r]) << ',' << fmt(l.length[r]) << ',' << fmt(l.lambda[0][r]) << ',' << fmt(l.lambda[1][r])
           << ',' << fmt(l.lambda[2][r]) << '\n';
}

inline void stats_csv_header(std::ostream& os) {
    csv_schema_line(os, "interface_stats");
    os << "eps,n,potential,variant,threshold,slack,alpha,y_star,case2,mu1,mu2,K,M,S,beta\n";
}

inline void stats_csv_row(std::ostream& os, double eps, int n, const std::string& tag, const std::string& variant,
                          const InterfaceStats& st) {
    os << fmt(eps) << ',' << n << ',' << tag << ',' << variant << ',' << fmt(st.threshold) << ',' << fmt(st.slack)
       << ',' << fmt(st.alpha_coef) << ',' << fmt(st.ystar.y) << ',' << (st.ystar.case2 ? 1 : 0) << ','
       << fmt(st.mu1) << ',' << fmt(st.mu2) << ',' << fmt(st.K_measure) << ',' << fmt(st.M_measure) << ','
       << fmt(st.S_measure) << ',' << fmt(st.beta) << '\n';
}

inline void write_bound_csv(const std::filesystem::path& p, const BoundReport& r, int n, const std::string& tag,
                            bool converged) {
    auto os = open_out(p);
    csv_schema_line(os, "bound_report", std::string("converged=") + (converged ? "true" : "false"));
    os << "eps,n,potential,J,competitor,sum_sigma,upper,lower_weak,lower_refined,E_measured,S,case\n";
    os << fmt(r.eps) << ',' << n << ',' << tag << ',' << fmt(r.J) << ',' << fmt(r.competitor_energy) << ','
       << fmt(r.sum_sigma) << ',' << fmt(r.upper) << ',' << fmt(r.lower_weak) << ',' << fmt(r.lower_refined) << ','
       << fmt(r.E_measured) << ',' << fmt(r.S_measure) << ',' << int(r.bound_case) << '\n';
}

inline void write_sweep_csv(const std::filesystem::path& p, const std::vector<SweepPoint>& pts, int n,
                            const std::string& tag, const std::vector<AprioriReport>& apriori) {
    auto os = open_out(p);
    csv_schema_line(os, "sweep_summary");
    os << "eps,n,potential,J,competitor,sum_sigma,gap_J,gap_competitor,y_star,case2,mu1,mu2,beta,S,E_measured,"
          "max_abs_u,eps_max_grad\n";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const SweepPoint& s = pts[k];
        os << fmt(s.eps) << ',' << n << ',' << tag << ',' << fmt(s.J) << ',' << fmt(s.competitor_energy) << ','
           << fmt(s.sum_sigma) << ',' << fmt(s.J - s.sum_sigma) << ',' << fmt(s.competitor_energy - s.sum_sigma)
           << ',' << fmt(s.stats.ystar.y) << ',' << (s.stats.ystar.case2 ? 1 : 0) << ',' << fmt(s.stats.mu1) << ','
           << fmt(s.stats.mu2) << ',' << fmt(s.stats.beta) << ',' << fmt(s.stats.S_measure) << ','
           << fmt(s.E_measured) << ',' << fmt(apriori[k].max_abs_u) << ',' << fmt(apriori[k].eps_max_grad) << '\n';
    }
}

inline void write_sweep_fit_csv(const std::filesystem::path& p, const SweepFit& f) {
    auto os = open_out(p);
    csv_schema_line(os, "sweep_constants");
    os << "name,value\n";
    const FittedConstants& c = f.constants;
    os << "C_upper," << fmt(c.C_upper) << '\n'
       << "C1_lower," << fmt(c.C1_lower) << '\n'
       << "C_lower," << fmt(c.C_lower) << '\n'
       << "C_E," << fmt(c.C_E) << '\n'
       << "C_S," << fmt(c.C_S) << '\n'
       << "C_loc," << fmt(c.C_loc) << '\n'
       << "slope_J," << fmt(f.slope_J) << '\n'
       << "slope_competitor," << fmt(f.slope_competitor) << '\n'
       << "J_gap_decreasing," << f.J_gap_decreasing << '\n'
       << "competitor_gap_decreasing," << f.competitor_gap_decreasing << '\n'
       << "J_below_competitor," << f.J_below_competitor << '\n'
       << "S_nonincreasing," << f.S_nonincreasing << '\n'
       << "localization_holds," << f.localization_holds << '\n';
}

inline void write_scan_csv(const std::filesystem::path& p, const std::vector<EtildeScan>& scans) {
    auto os = open_out(p);
    csv_schema_line(os, "etilde_scan");
    os << "alpha1,alpha2,alpha3,resolution,mu_star,y_star,cell_mu,cell_y,min_value,sum_sines,gap,on_boundary\n";
    for (const EtildeScan& s : scans)
        os << fmt(s.angles.alpha1) << ',' << fmt(s.angles.alpha2) << ',' << fmt(s.angles.alpha3) << ','
           << s.resolution << ',' << fmt(s.mu_star) << ',' << fmt(s.y_star) << ',' << fmt(s.cell_mu) << ','
           << fmt(s.cell_y) << ',' << fmt(s.min_value) << ',' << fmt(s.sum_sines) << ',' << fmt(s.gap) << ','
           << s.on_boundary << '\n';
}

}  // namespace tj
