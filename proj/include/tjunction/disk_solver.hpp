#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tjunction/boundary_data.hpp"
#include "tjunction/connections.hpp"
#include "tjunction/descent.hpp"
#include "tjunction/errors.hpp"
#include "tjunction/junction_geometry.hpp"
#include "tjunction/potential.hpp"

namespace tj {

enum class NodeKind : std::uint8_t { Exterior = 0, Interior = 1, Band = 2 };

/// Uniform n x n grid on [-1,1]^2 masked to the unit disk. Interior nodes satisfy
/// |z| < 1; band nodes lie on or outside the circle next to an interior node and
/// carry the angle of their radial projection; everything else is exterior.
/// Cells are weighted by their inside fraction (4x4 subsampling).
class DiskGrid {
public:
    explicit DiskGrid(int n) : n_(n) {
        if (n < 64) throw InvalidConfiguration("DiskGrid: need at least 64 nodes per axis");
        h_ = 2.0 / (n - 1);
        const std::size_t N = std::size_t(n) * n;
        kind_.assign(N, NodeKind::Exterior);
        theta_.assign(N, 0.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec2 z = position(i, j);
                if (norm2(z) < 1.0) kind_[index(i, j)] = NodeKind::Interior;
            }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const std::size_t k = index(i, j);
                if (kind_[k] == NodeKind::Interior) {
                    interior_.push_back(k);
                    continue;
                }
                bool touches = false;
                for (int dj = -1; dj <= 1 && !touches; ++dj)
                    for (int di = -1; di <= 1 && !touches; ++di) {
                        const int ii = i + di, jj = j + dj;
                        if (ii >= 0 && jj >= 0 && ii < n && jj < n && kind_[index(ii, jj)] == NodeKind::Interior)
                            touches = true;
                    }
                if (touches) {
                    kind_[k] = NodeKind::Band;
                    theta_[k] = polar_angle(position(i, j));
                    band_.push_back(k);
                }
            }
        weight_.assign(std::size_t(n - 1) * (n - 1), 0.0);
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i + 1 < n; ++i) {
                if (kind(i, j) == NodeKind::Exterior || kind(i + 1, j) == NodeKind::Exterior ||
                    kind(i, j + 1) == NodeKind::Exterior || kind(i + 1, j + 1) == NodeKind::Exterior)
                    continue;
                int inside = 0;
                const Vec2 z0 = position(i, j);
                for (int b = 0; b < 4; ++b)
                    for (int a = 0; a < 4; ++a) {
                        const Vec2 s{z0.x + (a + 0.5) * h_ / 4.0, z0.y + (b + 0.5) * h_ / 4.0};
                        if (norm2(s) < 1.0) ++inside;
                    }
                weight_[cell_index(i, j)] = h_ * h_ * inside / 16.0;
            }
    }

    int n() const { return n_; }
    double h() const { return h_; }
    std::size_t size() const { return std::size_t(n_) * n_; }
    std::size_t index(int i, int j) const { return std::size_t(j) * n_ + i; }
    std::size_t cell_index(int i, int j) const { return std::size_t(j) * (n_ - 1) + i; }
    double coord(int i) const { return double(2 * i - (n_ - 1)) / double(n_ - 1); }
    Vec2 position(int i, int j) const { return {coord(i), coord(j)}; }
    Vec2 position(std::size_t k) const { return position(int(k % n_), int(k / n_)); }
    NodeKind kind(int i, int j) const { return kind_[index(i, j)]; }
    NodeKind kind(std::size_t k) const { return kind_[k]; }
    double boundary_angle(std::size_t k) const { return theta_[k]; }
    double cell_weight(int i, int j) const { return weight_[cell_index(i, j)]; }
    const std::vector<std::size_t>& interior() const { return interior_; }
    const std::vector<std::size_t>& band() const { return band_; }

    /// Grid index of the node row/column nearest to coordinate c.
    int nearest(double c) const { return std::clamp(int(std::lround((c + 1.0) / h_)), 0, n_ - 1); }

private:
    int n_;
    double h_ = 0.0;
    std::vector<NodeKind> kind_;
    std::vector<double> theta_;
    std::vector<double> weight_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> band_;
};

inline std::shared_ptr<const DiskGrid> build_grid(int n) { return std::make_shared<const DiskGrid>(n); }

/// Discrete map u : B1 -> R^2 at a given eps. Exterior nodes hold NaN.
struct DiskField {
    std::shared_ptr<const DiskGrid> grid;
    double eps = 0.0;
    std::vector<Vec2> values;
    std::shared_ptr<const BoundaryTrace> trace;  ///< data the band nodes are pinned to

    const Vec2& at(int i, int j) const { return values[grid->index(i, j)]; }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Field with band nodes pinned to the trace and interior nodes from `interior(z)`.
template <class InteriorFn>
DiskField make_field(std::shared_ptr<const DiskGrid> grid, const BoundaryTrace& trace, InteriorFn&& interior) {
    DiskField f{grid, trace.epsilon(), std::vector<Vec2>(grid->size(), Vec2{kNaN, kNaN}),
                std::make_shared<const BoundaryTrace>(trace)};
    for (std::size_t k : grid->interior()) f.values[k] = interior(grid->position(k));
    for (std::size_t k : grid->band()) f.values[k] = trace.evaluate(grid->boundary_angle(k));
    return f;
}

struct EnergyBreakdown {
    double total = 0.0;
    double dirichlet = 0.0;    ///< int eps/2 |grad u|^2
    double potential = 0.0;    ///< int W(u)/eps
    double dirichlet_x = 0.0;  ///< int eps/2 |d_x u|^2
    double dirichlet_y = 0.0;  ///< int eps/2 |d_y u|^2
};

namespace detail {

/// Energy of the discrete field; when `grad` is given it receives dE/du at every node.
/// Cells use edge differences (bottom/top for d_x, left/right for d_y) and the corner
/// average of W. Summation runs cell by cell in row-major order.
template <PotentialLike P>
EnergyBreakdown disk_energy(const P& p, const DiskGrid& g, double eps, std::span<const Vec2> u,
                            std::vector<Vec2>* grad) {
    const int n = g.n();
    const double h = g.h();
    std::vector<double> w(g.size(), 0.0);
    std::vector<Vec2> wu;
    if (grad) {
        grad->assign(g.size(), Vec2{});
        wu.assign(g.size(), Vec2{});
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.kind(k) == NodeKind::Exterior) continue;
        w[k] = p.value(u[k]);
        if (grad) wu[k] = p.gradient(u[k]);
    }
    EnergyBreakdown e;
    const double cgrad = eps / (4.0 * h * h);
    const double cpot = 1.0 / (4.0 * eps);
    for (int j = 0; j + 1 < n; ++j) {
        double row_x = 0.0, row_y = 0.0, row_w = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            const double wc = g.cell_weight(i, j);
            if (wc == 0.0) continue;
            const std::size_t k00 = g.index(i, j), k10 = k00 + 1, k01 = k00 + n, k11 = k01 + 1;
            const Vec2 db = u[k10] - u[k00], dt = u[k11] - u[k01];
            const Vec2 dl = u[k01] - u[k00], dr = u[k11] - u[k10];
            row_x += wc * cgrad * (norm2(db) + norm2(dt));
            row_y += wc * cgrad * (norm2(dl) + norm2(dr));
            row_w += wc * cpot * (w[k00] + w[k10] + w[k01] + w[k11]);
            if (grad) {
                auto& G = *grad;
                const double k = 2.0 * wc * cgrad;
                G[k00] -= k * (db + dl);
                G[k10] += k * (db - dr);
                G[k01] += k * (dl - dt);
                G[k11] += k * (dt + dr);
                const double q = wc * cpot;
                G[k00] += q * wu[k00];
                G[k10] += q * wu[k10];
                G[k01] += q * wu[k01];
                G[k11] += q * wu[k11];
            }
        }
        e.dirichlet_x += row_x;
        e.dirichlet_y += row_y;
        e.potential += row_w;
    }
    e.dirichlet = e.dirichlet_x + e.dirichlet_y;
    e.total = e.dirichlet + e.potential;
    return e;
}

}  // namespace detail

template <PotentialLike P>
EnergyBreakdown energy(const P& p, const DiskField& f) {
    return detail::disk_energy(p, *f.grid, f.eps, f.values, nullptr);
}

/// dE/du at every node (zero on exterior nodes). Band nodes are included even
/// though the solver keeps them fixed.
template <PotentialLike P>
std::vector<Vec2> energy_gradient(const P& p, const DiskField& f) {
    std::vector<Vec2> g;
    detail::disk_energy(p, *f.grid, f.eps, f.values, &g);
    return g;
}

// ---------------------------------------------------------------------------
// Explicit competitor
// ---------------------------------------------------------------------------

struct CompetitorOptions {
    double junction_radius = 2.0;  ///< filler ball radius in units of eps
    double boundary_layer = 1.0;   ///< width of the blend to g_eps, in units of eps
};

/// Builds a field equal to a_i in the bulk of D_i, to the 1D profiles across the
/// triod rays, to a radial blend inside the junction ball and to g_eps on the circle.
template <PotentialLike P>
DiskField competitor(const P& p, double eps, std::shared_ptr<const DiskGrid> grid, const TriodPartition& triod,
                     const BoundaryTrace& trace, std::span<const HeteroclinicProfile> profiles,
                     const CompetitorOptions& opt = {}) {
    const auto minima = p.minima();
    const HeteroclinicProfile* prof[3] = {nullptr, nullptr, nullptr};  // 12, 13, 23
    for (const auto& pr : profiles) {
        const int lo = std::min(pr.i, pr.j), hi = std::max(pr.i, pr.j);
        const int slot = (lo == 1 && hi == 2) ? 0 : (lo == 1 && hi == 3) ? 1 : (lo == 2 && hi == 3) ? 2 : -1;
        if (slot >= 0) prof[slot] = &pr;
    }
    if (!prof[0] || !prof[1] || !prof[2]) throw std::invalid_argument("competitor: need profiles for 12, 13, 23");
    const double rj = opt.junction_radius * eps;
    const double bw = opt.boundary_layer * eps;
    if (!(rj + bw < 1.0)) throw InvalidConfiguration("competitor: eps too large for the junction ball and boundary layer");

    struct Ray {
        double angle;
        int cw, ccw;  // phase on the clockwise / counter-clockwise side
        const HeteroclinicProfile* pr;
    };
    const std::array<Ray, 3> rays{Ray{triod.ray12(), 2, 1, prof[0]}, Ray{triod.ray13(), 1, 3, prof[1]},
                                  Ray{triod.ray23(), 3, 2, prof[2]}};
    auto ray_value = [&](const Ray& r, const Vec2& z) {
        const Vec2 e{std::cos(r.angle), std::sin(r.angle)};
        const double d = cross(e, z);  // > 0 on the counter-clockwise side
        const double along = dot(e, z);
        const double s = along >= 0.0 ? d : std::copysign(norm(z), d);
        const double eta = s / eps;
        return r.pr->i == r.cw ? r.pr->at(eta) : r.pr->at(-eta);
    };
    auto layer = [&](const Vec2& z) {
        const int ph = triod.classify(z).phase;
        Vec2 v = minima[ph - 1];
        for (const Ray& r : rays)
            if (r.cw == ph || r.ccw == ph) v += ray_value(r, z) - minima[ph - 1];
        return v;
    };
    const Vec2 center = (1.0 / 3.0) * (minima[0] + minima[1] + minima[2]);
    auto value = [&](const Vec2& z) {
        const double r = norm(z);
        Vec2 v;
        if (r < rj) {
            const double s = r / rj;
            v = r > 0.0 ? s * layer((rj / r) * z) + (1.0 - s) * center : center;
        } else {
            v = layer(z);
        }
        const double t = std::clamp((r - (1.0 - bw)) / bw, 0.0, 1.0);
        if (t > 0.0) v = (1.0 - t) * v + t * trace.evaluate(polar_angle(z));
        return v;
    };
    return make_field(std::move(grid), trace, value);
}

// ---------------------------------------------------------------------------
// Minimization
// ---------------------------------------------------------------------------

enum class Initializer { Competitor, SharpU0, Random };

inline Initializer initializer_from_string(const std::string& s) {
    if (s == "competitor") return Initializer::Competitor;
    if (s == "u0") return Initializer::SharpU0;
    if (s == "random") return Initializer::Random;
    throw InvalidConfiguration("unknown initializer: " + s);
}

struct MinimizeOptions {
    int max_iter = 200000;
    double tol = 1e-7;  ///< stop when max |dE/du| < tol * h / eps
    int stall_window = 500;
    double stall_rtol = 1e-14;
    Initializer init = Initializer::SharpU0;
    std::optional<DiskField> start;  ///< required for Initializer::Competitor
    unsigned seed = 1;
};

struct MinimizeResult {
    DiskField field;
    DescentResult descent;
    EnergyBreakdown energy;
};

/// Raised on budget exhaustion; carries the best iterate and its log.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, MinimizeResult r) : std::runtime_error(what), result_(std::move(r)) {}
    const MinimizeResult& result() const noexcept { return result_; }

private:
    MinimizeResult result_;
};

template <PotentialLike P>
DiskField initial_field(const P&, std::shared_ptr<const DiskGrid> grid, const BoundaryTrace& trace,
                        const MinimizeOptions& opt) {
    switch (opt.init) {
        case Initializer::Competitor:
            if (!opt.start) throw std::invalid_argument("minimize: competitor initializer needs a start field");
            if (opt.start->grid->n() != grid->n()) throw std::invalid_argument("minimize: start field grid mismatch");
            return *opt.start;
        case Initializer::SharpU0: {
            const TriodPartition triod(trace.angles());
            const auto& m = trace.minima();
            if (trace.pinned_phase())
                return make_field(grid, trace, [&](const Vec2&) { return m[trace.pinned_phase() - 1]; });
            return make_field(grid, trace, [&](const Vec2& z) { return u0_map(triod, m, z).value; });
        }
        case Initializer::Random: {
            const auto& m = trace.minima();
            Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
            Vec2 hi = -lo;
            for (const Vec2& a : m) {
                lo = {std::min(lo.x, a.x), std::min(lo.y, a.y)};
                hi = {std::max(hi.x, a.x), std::max(hi.y, a.y)};
            }
            std::mt19937_64 rng(opt.seed);
            std::uniform_real_distribution<double> U(0.0, 1.0);
            return make_field(grid, trace, [&](const Vec2&) {
                const double s = U(rng);
                return Vec2{lo.x + s * (hi.x - lo.x), lo.y + U(rng) * (hi.y - lo.y)};
            });
        }
    }
    throw std::logic_error("unreachable");
}

template <PotentialLike P>
MinimizeResult minimize(const P& p, double eps, std::shared_ptr<const DiskGrid> grid, const BoundaryTrace& trace,
                        const MinimizeOptions& opt = {}) {
    if (std::abs(trace.epsilon() - eps) > 1e-15 * eps) throw std::invalid_argument("minimize: trace eps mismatch");
    DiskField f = initial_field(p, grid, trace, opt);
    f.eps = eps;
    const auto& interior = grid->interior();
    std::vector<double> x(2 * interior.size());
    for (std::size_t m = 0; m < interior.size(); ++m) {
        x[2 * m] = f.values[interior[m]].x;
        x[2 * m + 1] = f.values[interior[m]].y;
    }
    std::vector<Vec2> g;
    auto fg = [&](const std::vector<double>& xs, std::vector<double>& gs) {
        for (std::size_t m = 0; m < interior.size(); ++m) f.values[interior[m]] = {xs[2 * m], xs[2 * m + 1]};
        const double e = detail::disk_energy(p, *grid, eps, f.values, &g).total;
        for (std::size_t m = 0; m < interior.size(); ++m) {
            gs[2 * m] = g[interior[m]].x;
            gs[2 * m + 1] = g[interior[m]].y;
        }
        return e;
    };
    const auto bounds = hessian_bounds(p);
    DescentOptions d;
    d.max_iter = opt.max_iter;
    d.grad_tol = opt.tol * grid->h() / eps;
    d.stall_window = opt.stall_window;
    d.stall_rtol = opt.stall_rtol;
    d.initial_step = 1.0 / (8.0 * eps + grid->h() * grid->h() * std::max(bounds.c2, 1.0) / eps);
    MinimizeResult res;
    res.descent = bb_descent(x, fg, d);
    for (std::size_t m = 0; m < interior.size(); ++m) f.values[interior[m]] = {x[2 * m], x[2 * m + 1]};
    res.field = std::move(f);
    res.energy = energy(p, res.field);
    if (!res.descent.converged())
        throw SolverFailure(std::string("minimize: ") + to_string(res.descent.status), std::move(res));
    return res;
}

// ---------------------------------------------------------------------------
// A-priori bounds
// ---------------------------------------------------------------------------

struct AprioriReport {
    double max_abs_u = 0.0;
    double max_grad = 0.0;      ///< max over cells of the discrete |grad u|
    double eps_max_grad = 0.0;  ///< eps * max_grad
};

inline AprioriReport check_apriori(const DiskField& f) {
    const DiskGrid& g = *f.grid;
    AprioriReport r;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.kind(k) != NodeKind::Exterior) r.max_abs_u = std::max(r.max_abs_u, norm(f.values[k]));
    const int n = g.n();
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            if (g.cell_weight(i, j) == 0.0) continue;
            const Vec2 &u00 = f.at(i, j), &u10 = f.at(i + 1, j), &u01 = f.at(i, j + 1), &u11 = f.at(i + 1, j + 1);
            const double gx2 = 0.5 * (norm2(u10 - u00) + norm2(u11 - u01));
            const double gy2 = 0.5 * (norm2(u01 - u00) + norm2(u11 - u10));
            r.max_grad = std::max(r.max_grad, std::sqrt(gx2 + gy2) / g.h());
        }
    r.eps_max_grad = f.eps * r.max_grad;
    return r;
}

}  // namespace tj
