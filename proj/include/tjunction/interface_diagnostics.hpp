#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tjunction/disk_solver.hpp"

namespace tj {

/// Phase-closeness radius and row slack used to define y*.
struct DiagnosticVariant {
    double threshold = 0.0;  ///< eps^(1/6) or eps^(1/4)
    double slack = 0.0;      ///< eps^(1/3) or alpha * eps^(1/2)
    double alpha = 0.0;      ///< slack coefficient, 0 when the slack is eps^(1/3)

    /// Weak bound variant: threshold eps^(1/6), slack eps^(1/3).
    static DiagnosticVariant weak(double eps) { return {std::pow(eps, 1.0 / 6.0), std::cbrt(eps), 0.0}; }
    /// Refined variant: threshold eps^(1/4), slack alpha * eps^(1/2).
    static DiagnosticVariant refined(double eps, double alpha) {
        return {std::pow(eps, 0.25), alpha * std::sqrt(eps), alpha};
    }
};

namespace detail {

inline double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

inline double chord(double y) { return std::abs(y) < 1.0 ? 2.0 * std::sqrt(1.0 - y * y) : 0.0; }

inline void require_threshold(double threshold, double delta_W) {
    if (!(threshold > 0.0) || !(threshold < delta_W))
        throw std::invalid_argument("interface diagnostics: threshold must lie in (0, delta_W)");
}

}  // namespace detail

/// lambda_i(y) sampled on the grid rows crossing the disk.
struct LambdaProfile {
    std::vector<double> y;
    std::vector<double> length;                  ///< L^1(gamma_y)
    std::array<std::vector<double>, 3> lambda;   ///< per phase
};

/// For every grid row: measure of the nodes with |u - a_i| < threshold, each node
/// weighted by the part of the row segment it owns.
inline LambdaProfile lambda_profiles(const DiskField& f, double threshold, double delta_W) {
    detail::require_threshold(threshold, delta_W);
    const DiskGrid& g = *f.grid;
    const auto& m = f.trace->minima();
    const double h = g.h();
    LambdaProfile out;
    for (int j = 0; j < g.n(); ++j) {
        const double y = g.coord(j);
        const double len = detail::chord(y);
        if (len <= 0.0) continue;
        std::array<double, 3> lam{0.0, 0.0, 0.0};
        for (int i = 0; i < g.n(); ++i) {
            if (g.kind(i, j) == NodeKind::Exterior) continue;
            const double x = g.coord(i);
            const double w = detail::overlap(x - 0.5 * h, x + 0.5 * h, -0.5 * len, 0.5 * len);
            if (w == 0.0) continue;
            const Vec2& u = f.at(i, j);
            for (int p = 0; p < 3; ++p)
                if (dist(u, m[p]) < threshold) lam[p] += w;
        }
        out.y.push_back(y);
        out.length.push_back(len);
        for (int p = 0; p < 3; ++p) out.lambda[p].push_back(lam[p]);
    }
    return out;
}

/// lambda_i(y) for a single 1-based phase.
inline std::vector<double> lambda_profile(const DiskField& f, int phase, double threshold, double delta_W) {
    if (phase < 1 || phase > 3) throw std::invalid_argument("lambda_profile: phase must be 1, 2 or 3");
    return lambda_profiles(f, threshold, delta_W).lambda[phase - 1];
}

struct YStar {
    double y = 0.0;
    bool found = false;
    bool case2 = false;  ///< criterion never met or met only above cos((alpha2-alpha1)/2) - c0 eps
};

/// Lowest grid row y >= -cos(alpha3/2) + c0 eps with lambda1 + lambda2 >= L^1(gamma_y) - slack.
inline YStar locate_ystar(const DiskField& f, const DiagnosticVariant& v, double delta_W) {
    if (!(v.slack > 0.0)) throw std::invalid_argument("locate_ystar: slack must be positive");
    const LambdaProfile lp = lambda_profiles(f, v.threshold, delta_W);
    const auto& a = f.trace->angles();
    const double c0e = f.trace->half_width();
    const double y_lo = -std::cos(a.half3()) + c0e;
    YStar ys;
    for (std::size_t r = 0; r < lp.y.size(); ++r) {
        if (lp.y[r] < y_lo) continue;
        if (lp.lambda[0][r] + lp.lambda[1][r] >= lp.length[r] - v.slack) {
            ys.y = lp.y[r];
            ys.found = true;
            break;
        }
    }
    ys.case2 = !ys.found || ys.y > std::cos(a.half_gap()) - c0e;
    return ys;
}

struct MuStats {
    double mu1 = 0.0;        ///< L^1(K1+)
    double mu2 = 0.0;        ///< L^1(K2-)
    double K_measure = 0.0;  ///< L^1(K)
};

/// Measures of K1+, K2- and K along the curve x -> (x, min(y*, sqrt(1 - x^2))).
inline MuStats measure_mu(const DiskField& f, const YStar& ys, double threshold, double delta_W) {
    if (ys.case2) throw std::invalid_argument("measure_mu: y* is in the second case");
    detail::require_threshold(threshold, delta_W);
    const DiskGrid& g = *f.grid;
    const BoundaryTrace& tr = *f.trace;
    const auto& m = tr.minima();
    const auto& a = tr.angles();
    const double s3 = std::sin(a.half3()), sd = std::sin(a.half_gap());
    const double c0e = tr.half_width();
    const double h = g.h();
    const int row = g.nearest(ys.y);
    MuStats mu;
    for (int i = 0; i < g.n(); ++i) {
        const double x = g.coord(i);
        if (std::abs(x) >= 1.0) continue;
        const double top = std::sqrt(1.0 - x * x);
        Vec2 u;
        if (ys.y <= top && g.kind(i, row) != NodeKind::Exterior) {
            u = f.at(i, row);
        } else {
            u = tr.evaluate(polar_angle({x, top}));
        }
        const double lo = x - 0.5 * h, hi = x + 0.5 * h;
        const bool near1 = dist(u, m[0]) < threshold;
        const bool near2 = dist(u, m[1]) < threshold;
        if (near1) mu.mu1 += detail::overlap(lo, hi, -sd + c0e, s3 - c0e);
        if (near2) mu.mu2 += detail::overlap(lo, hi, -s3 + c0e, -sd - c0e);
        if (near1 || near2) mu.K_measure += detail::overlap(lo, hi, -s3 + c0e, s3 - c0e);
    }
    return mu;
}

struct InterfaceStats {
    LambdaProfile lambda;
    YStar ystar;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double K_measure = 0.0;
    double M_measure = 0.0;  ///< L^1 of rows in [-cos(alpha3/2) + c0 eps, y*] with lambda3 > 0
    double S_measure = 0.0;  ///< the complementary rows with lambda3 = 0
    double beta = 0.0;       ///< y* + cos(alpha3/2) - L^1(M)
    double threshold = 0.0;
    double slack = 0.0;
    double alpha_coef = 0.0;
};

inline InterfaceStats interface_stats(const DiskField& f, const DiagnosticVariant& v, double delta_W) {
    InterfaceStats st;
    st.threshold = v.threshold;
    st.slack = v.slack;
    st.alpha_coef = v.alpha;
    st.lambda = lambda_profiles(f, v.threshold, delta_W);
    st.ystar = locate_ystar(f, v, delta_W);
    const auto& a = f.trace->angles();
    const double c3 = std::cos(a.half3());
    if (!st.ystar.case2) {
        const MuStats mu = measure_mu(f, st.ystar, v.threshold, delta_W);
        st.mu1 = mu.mu1;
        st.mu2 = mu.mu2;
        st.K_measure = mu.K_measure;
        const double lo = -c3 + f.trace->half_width();
        const double h = f.grid->h();
        for (std::size_t r = 0; r < st.lambda.y.size(); ++r) {
            const double y = st.lambda.y[r];
            const double w = detail::overlap(y - 0.5 * h, y + 0.5 * h, lo, st.ystar.y);
            if (w == 0.0) continue;
            (st.lambda.lambda[2][r] > 0.0 ? st.M_measure : st.S_measure) += w;
        }
        st.beta = st.ystar.y + c3 - st.M_measure;
    }
    return st;
}

// ---------------------------------------------------------------------------
// Lower-bound functionals
// ---------------------------------------------------------------------------

/// Admissible box for (mu1, mu2, y*) in the eps -> 0 limit.
struct EBox {
    double mu1_max, mu2_max, y_min, y_max;
};

inline EBox e_box(const JunctionAngles& a) {
    const double s3 = std::sin(a.half3()), sd = std::sin(a.half_gap());
    return {s3 + sd, s3 - sd, -std::cos(a.half3()), std::cos(a.half_gap())};
}

/// E(mu1, mu2, y*): the sum of the lower bounds over the regions above and below y*.
inline double lower_bound_E(double mu1, double mu2, double ystar, const SurfaceTensions& s, const JunctionAngles& a) {
    const EBox b = e_box(a);
    constexpr double tol = 1e-12;
    if (mu1 < -tol || mu1 > b.mu1_max + tol || mu2 < -tol || mu2 > b.mu2_max + tol || ystar < b.y_min - tol ||
        ystar > b.y_max + tol)
        throw std::invalid_argument("lower_bound_E: arguments outside the admissible box");
    const double s3 = std::sin(a.half3()), c3 = std::cos(a.half3());
    const double sd = std::sin(a.half_gap()), cd = std::cos(a.half_gap());
    const double below_v = s3 * (s.s13 + s.s23) + (mu2 - mu1 + sd) * (s.s23 - s.s13);
    const double below_h = (ystar + c3) * (s.s13 + s.s23);
    const double above = s.s12 * std::hypot(mu1 + mu2, cd - ystar);
    return std::hypot(below_v, below_h) + above;
}

/// The region-above-y* term of E alone.
inline double lower_bound_E_upper_region(double mu1, double mu2, double ystar, const SurfaceTensions& s,
                                         const JunctionAngles& a) {
    return s.s12 * std::hypot(mu1 + mu2, std::cos(a.half_gap()) - ystar);
}

struct Case2Bound {
    double radical = 0.0;  ///< the lower bound when y* > cos((alpha2-alpha1)/2) - c0 eps
    double sum_sigma = 0.0;
    double gap_sq = 0.0;   ///< radical^2 - (sum sigma)^2
    bool exceeds = false;  ///< radical > sum sigma
};

inline Case2Bound case2_bound(const SurfaceTensions& s, const JunctionAngles& a) {
    const double s3 = std::sin(a.half3()), c3 = std::cos(a.half3());
    const double sd = std::sin(a.half_gap()), cd = std::cos(a.half_gap());
    const double v = (s3 - sd) * s.s13 + (s3 + sd) * s.s23;
    const double hz = (s.s13 + s.s23) * (c3 + cd);
    Case2Bound b;
    b.radical = std::hypot(v, hz);
    b.sum_sigma = s.sum();
    b.gap_sq = v * v + hz * hz - b.sum_sigma * b.sum_sigma;
    b.exceeds = b.radical > b.sum_sigma;
    return b;
}

// ---------------------------------------------------------------------------
// Energy in a rotated frame
// ---------------------------------------------------------------------------

/// Dirichlet energy split along x~ = cos(phi) x + sin(phi) y and the orthogonal
/// direction, restricted to cells whose centre satisfies y >= y_min. The x~ and y~
/// parts land in dirichlet_x and dirichlet_y of the returned breakdown.
template <PotentialLike P>
EnergyBreakdown rotated_energy_account(const P& p, const DiskField& f, double phi,
                                       double y_min = -std::numeric_limits<double>::infinity()) {
    const DiskGrid& g = *f.grid;
    const int n = g.n();
    const double h = g.h();
    const double c = std::cos(phi), s = std::sin(phi);
    const double eps = f.eps;
    EnergyBreakdown e;
    for (int j = 0; j + 1 < n; ++j) {
        if (g.coord(j) + 0.5 * h < y_min) continue;
        for (int i = 0; i + 1 < n; ++i) {
            const double wc = g.cell_weight(i, j);
            if (wc == 0.0) continue;
            const Vec2 &u00 = f.at(i, j), &u10 = f.at(i + 1, j), &u01 = f.at(i, j + 1), &u11 = f.at(i + 1, j + 1);
            const Vec2 db = u10 - u00, dt = u11 - u01, dl = u01 - u00, dr = u11 - u10;
            const double gx2 = (norm2(db) + norm2(dt)) / (2.0 * h * h);
            const double gy2 = (norm2(dl) + norm2(dr)) / (2.0 * h * h);
            const double gxy = dot(db + dt, dl + dr) / (4.0 * h * h);
            e.dirichlet_x += wc * 0.5 * eps * (c * c * gx2 + s * s * gy2 + 2.0 * c * s * gxy);
            e.dirichlet_y += wc * 0.5 * eps * (s * s * gx2 + c * c * gy2 - 2.0 * c * s * gxy);
            e.potential += wc * (p.value(u00) + p.value(u10) + p.value(u01) + p.value(u11)) / (4.0 * eps);
        }
    }
    e.dirichlet = e.dirichlet_x + e.dirichlet_y;
    e.total = e.dirichlet + e.potential;
    return e;
}

// ---------------------------------------------------------------------------
// Bound report
// ---------------------------------------------------------------------------

/// Constants fitted over an eps sweep; zero when not yet fitted.
struct FittedConstants {
    double C_upper = 0.0;    ///< J <= sum sigma + C_upper eps
    double C1_lower = 0.0;   ///< J >= sum sigma - C1 eps^(1/3)
    double C_lower = 0.0;    ///< J >= sum sigma - C eps^(1/2)
    double C_E = 0.0;        ///< E(measured) <= J + C_E eps^(1/3)
    double C_S = 0.0;        ///< L^1(S) <= C_S eps^(1/3)
    double C_loc = 0.0;      ///< |y*| <= C_loc eps^(1/4)
};

enum class BoundCase { One = 1, Two = 2 };

struct BoundReport {
    double eps = 0.0;
    double J = 0.0;
    double competitor_energy = 0.0;
    double sum_sigma = 0.0;
    double upper = 0.0;          ///< sum sigma + C_upper eps
    double lower_weak = 0.0;     ///< sum sigma - C1 eps^(1/3)
    double lower_refined = 0.0;  ///< sum sigma - C eps^(1/2)
    double E_measured = kNaN;    ///< E at the measured (mu1, mu2, y*), clamped to the box
    double S_measure = 0.0;
    BoundCase bound_case = BoundCase::One;
    bool within_sandwich = false;
};

/// Evaluates E at measured statistics after clamping into the admissible box.
inline double E_at_stats(const InterfaceStats& st, const SurfaceTensions& s, const JunctionAngles& a) {
    const EBox b = e_box(a);
    return lower_bound_E(std::clamp(st.mu1, 0.0, b.mu1_max), std::clamp(st.mu2, 0.0, b.mu2_max),
                         std::clamp(st.ystar.y, b.y_min, b.y_max), s, a);
}

template <PotentialLike P>
BoundReport bound_report(const P& p, const DiskField& f, const InterfaceStats& st, const SurfaceTensions& s,
                         const JunctionAngles& a, double competitor_energy, const FittedConstants& c = {}) {
    BoundReport r;
    r.eps = f.eps;
    r.J = energy(p, f).total;
    r.competitor_energy = competitor_energy;
    r.sum_sigma = s.sum();
    r.upper = r.sum_sigma + c.C_upper * f.eps;
    r.lower_weak = r.sum_sigma - c.C1_lower * std::cbrt(f.eps);
    r.lower_refined = r.sum_sigma - c.C_lower * std::sqrt(f.eps);
    r.S_measure = st.S_measure;
    r.bound_case = st.ystar.case2 ? BoundCase::Two : BoundCase::One;
    if (!st.ystar.case2) r.E_measured = E_at_stats(st, s, a);
    r.within_sandwich = r.J <= r.upper + 1e-12 && r.J >= std::min(r.lower_weak, r.lower_refined) - 1e-12;
    return r;
}

// ---------------------------------------------------------------------------
// Sweep fitting
// ---------------------------------------------------------------------------

struct SweepPoint {
    double eps = 0.0;
    double h = 0.0;
    double J = 0.0;
    double competitor_energy = 0.0;
    double sum_sigma = 0.0;
    InterfaceStats stats;  ///< refined variant
    double E_measured = kNaN;
};

/// Least-squares slope of log|y| against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    double mx = 0.0, my = 0.0;
    const double n = double(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += std::log(x[k]) / n;
        my += std::log(std::abs(y[k])) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = std::log(x[k]) - mx;
        sxy += dx * (std::log(std::abs(y[k])) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

struct SweepFit {
    FittedConstants constants;
    double slope_J = kNaN;           ///< log-log slope of |J - sum sigma|
    double slope_competitor = kNaN;  ///< log-log slope of competitor - sum sigma
    bool J_gap_decreasing = false;
    bool competitor_gap_decreasing = false;
    bool J_below_competitor = false;
    bool S_nonincreasing = false;
    bool localization_holds = false;  ///< |y*| <= C_loc eps^(1/4) at every eps
};

/// Fits the existential constants over a sweep ordered by decreasing eps. The
/// localization constant is fitted at the largest eps only.
inline SweepFit fit_sweep(const std::vector<SweepPoint>& pts) {
    if (pts.size() < 3) throw std::invalid_argument("fit_sweep: need at least three eps values");
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (!(pts[k].eps < pts[k - 1].eps)) throw std::invalid_argument("fit_sweep: eps must be strictly decreasing");
    SweepFit fit;
    FittedConstants& c = fit.constants;
    std::vector<double> eps, gJ, gC;
    fit.J_gap_decreasing = fit.competitor_gap_decreasing = fit.J_below_competitor = fit.S_nonincreasing = true;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const SweepPoint& p = pts[k];
        const double dJ = p.J - p.sum_sigma;
        c.C_upper = std::max(c.C_upper, dJ / p.eps);
        c.C1_lower = std::max(c.C1_lower, -dJ / std::cbrt(p.eps));
        c.C_lower = std::max(c.C_lower, -dJ / std::sqrt(p.eps));
        if (std::isfinite(p.E_measured)) c.C_E = std::max(c.C_E, (p.E_measured - p.J) / std::cbrt(p.eps));
        c.C_S = std::max(c.C_S, p.stats.S_measure / std::cbrt(p.eps));
        eps.push_back(p.eps);
        gJ.push_back(dJ);
        gC.push_back(p.competitor_energy - p.sum_sigma);
        fit.J_below_competitor = fit.J_below_competitor && p.J <= p.competitor_energy;
        if (k > 0) {
            fit.J_gap_decreasing = fit.J_gap_decreasing && std::abs(gJ[k]) < std::abs(gJ[k - 1]);
            fit.competitor_gap_decreasing = fit.competitor_gap_decreasing && gC[k] < gC[k - 1];
            fit.S_nonincreasing = fit.S_nonincreasing && p.stats.S_measure <= pts[k - 1].stats.S_measure;
        }
    }
    fit.slope_J = loglog_slope(eps, gJ);
    fit.slope_competitor = loglog_slope(eps, gC);
    c.C_loc = std::abs(pts.front().stats.ystar.y) / std::pow(pts.front().eps, 0.25);
    fit.localization_holds = true;
    for (const SweepPoint& p : pts)
        fit.localization_holds = fit.localization_holds && !p.stats.ystar.case2 &&
                                 std::abs(p.stats.ystar.y) <= c.C_loc * std::pow(p.eps, 0.25) + 1e-12;
    return fit;
}

}  // namespace tj
