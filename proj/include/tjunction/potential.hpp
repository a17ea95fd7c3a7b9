#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tjunction/errors.hpp"
#include "tjunction/vec2.hpp"

namespace tj {

/// A smooth nonnegative multi-well potential W : R^2 -> [0, inf).
template <class P>
concept PotentialLike = requires(const P& p, const Vec2& u) {
    { p.value(u) } -> std::convertible_to<double>;
    { p.gradient(u) } -> std::convertible_to<Vec2>;
    { p.hessian(u) } -> std::convertible_to<Sym2>;
    { p.minima() } -> std::convertible_to<std::span<const Vec2>>;
    { p.outer_radius() } -> std::convertible_to<double>;
};

struct HessianBounds {
    double c1 = 0.0;  ///< smallest eigenvalue of W_uu over the minima
    double c2 = 0.0;  ///< largest eigenvalue of W_uu over the minima
};

template <PotentialLike P>
HessianBounds hessian_bounds(const P& p) {
    HessianBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Vec2& a : p.minima()) {
        const auto ev = p.hessian(a).eigenvalues();
        b.c1 = std::min(b.c1, ev[0]);
        b.c2 = std::max(b.c2, ev[1]);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Product family  W(u) = s * prod_i |u - a_i|^2
// ---------------------------------------------------------------------------

class ProductPotential {
public:
    ProductPotential(std::vector<Vec2> minima, double scale = 1.0)
        : minima_(std::move(minima)), scale_(scale) {
        double r = 0.0;
        for (const Vec2& a : minima_) r = std::max(r, norm(a));
        // every term of W_u(u).u is positive once |u| exceeds max|a_i|
        outer_radius_ = r + 1.0;
    }

    double value(const Vec2& u) const {
        double w = scale_;
        for (const Vec2& a : minima_) w *= norm2(u - a);
        return w;
    }

    Vec2 gradient(const Vec2& u) const {
        // d/du prod f_i = sum_i 2(u - a_i) prod_{j != i} f_j
        Vec2 g{};
        for (std::size_t i = 0; i < minima_.size(); ++i) {
            double rest = scale_;
            for (std::size_t j = 0; j < minima_.size(); ++j)
                if (j != i) rest *= norm2(u - minima_[j]);
            g += (2.0 * rest) * (u - minima_[i]);
        }
        return g;
    }

    Sym2 hessian(const Vec2& u) const {
        const std::size_t m = minima_.size();
        Sym2 h{};
        for (std::size_t i = 0; i < m; ++i) {
            double rest = scale_;
            for (std::size_t j = 0; j < m; ++j)
                if (j != i) rest *= norm2(u - minima_[j]);
            h += (2.0 * rest) * Sym2::identity();
            for (std::size_t j = i + 1; j < m; ++j) {
                double others = scale_;
                for (std::size_t k = 0; k < m; ++k)
                    if (k != i && k != j) others *= norm2(u - minima_[k]);
                // grad f_i grad f_j^T + grad f_j grad f_i^T with grad f = 2(u - a)
                h += (4.0 * others) * Sym2::sym_outer(u - minima_[i], u - minima_[j]);
            }
        }
        return h;
    }

    std::span<const Vec2> minima() const { return minima_; }
    double outer_radius() const { return outer_radius_; }
    double scale() const { return scale_; }

private:
    std::vector<Vec2> minima_;
    double scale_;
    double outer_radius_;
};

/// Reference instance W(u) = scale * prod |u - a_i|^2 with three minima.
/// Throws InvalidConfiguration for coincident or collinear minima.
inline ProductPotential make_product_potential(const Vec2& a1, const Vec2& a2, const Vec2& a3,
                                               double scale = 1.0) {
    const double span = std::max({dist(a1, a2), dist(a1, a3), dist(a2, a3)});
    if (!(scale > 0.0)) throw InvalidConfiguration("product potential: scale must be positive");
    if (!(span > 0.0) || std::min({dist(a1, a2), dist(a1, a3), dist(a2, a3)}) <= 1e-12 * span)
        throw InvalidConfiguration("product potential: coincident minima");
    if (std::abs(cross(a2 - a1, a3 - a1)) <= 1e-12 * span * span)
        throw InvalidConfiguration("product potential: collinear minima");
    return ProductPotential({a1, a2, a3}, scale);
}

// ---------------------------------------------------------------------------
// Polynomial family  W(x, y) = sum_{p,q} c_pq x^p y^q  with declared minima
// ---------------------------------------------------------------------------

class PolynomialPotential {
public:
    struct Term {
        int px = 0;
        int py = 0;
        double coef = 0.0;
    };

    PolynomialPotential(std::vector<Term> terms, std::vector<Vec2> minima, double outer_radius)
        : terms_(std::move(terms)), minima_(std::move(minima)), outer_radius_(outer_radius) {
        for (const Term& t : terms_)
            if (t.px < 0 || t.py < 0)
                throw InvalidConfiguration("polynomial potential: negative exponent");
        if (!(outer_radius_ > 0.0))
            throw InvalidConfiguration("polynomial potential: outer radius must be positive");
    }

    /// Expands scale * prod |u - a_i|^2 into monomials. Exact up to rounding.
    static PolynomialPotential from_product(std::vector<Vec2> minima, double scale = 1.0) {
        // coefficients stored densely as c[px][py]
        std::vector<std::vector<double>> c{{scale}};
        for (const Vec2& a : minima) {
            // |u - a|^2 = x^2 - 2 a.x x + y^2 - 2 a.y y + |a|^2
            const std::vector<Term> factor{{2, 0, 1.0}, {1, 0, -2.0 * a.x}, {0, 2, 1.0},
                                           {0, 1, -2.0 * a.y}, {0, 0, norm2(a)}};
            std::vector<std::vector<double>> next(c.size() + 2, std::vector<double>(c[0].size() + 2, 0.0));
            for (std::size_t p = 0; p < c.size(); ++p)
                for (std::size_t q = 0; q < c[p].size(); ++q)
                    for (const Term& f : factor) next[p + f.px][q + f.py] += c[p][q] * f.coef;
            c = std::move(next);
        }
        std::vector<Term> terms;
        for (std::size_t p = 0; p < c.size(); ++p)
            for (std::size_t q = 0; q < c[p].size(); ++q)
                if (c[p][q] != 0.0) terms.push_back({int(p), int(q), c[p][q]});
        double r = 0.0;
        for (const Vec2& a : minima) r = std::max(r, norm(a));
        return PolynomialPotential(std::move(terms), std::move(minima), r + 1.0);
    }

    double value(const Vec2& u) const {
        double w = 0.0;
        for (const Term& t : terms_) w += t.coef * ipow(u.x, t.px) * ipow(u.y, t.py);
        return w;
    }

    Vec2 gradient(const Vec2& u) const {
        Vec2 g{};
        for (const Term& t : terms_) {
            if (t.px > 0) g.x += t.coef * t.px * ipow(u.x, t.px - 1) * ipow(u.y, t.py);
            if (t.py > 0) g.y += t.coef * t.py * ipow(u.x, t.px) * ipow(u.y, t.py - 1);
        }
        return g;
    }

    Sym2 hessian(const Vec2& u) const {
        Sym2 h{};
        for (const Term& t : terms_) {
            if (t.px > 1) h.xx += t.coef * t.px * (t.px - 1) * ipow(u.x, t.px - 2) * ipow(u.y, t.py);
            if (t.py > 1) h.yy += t.coef * t.py * (t.py - 1) * ipow(u.x, t.px) * ipow(u.y, t.py - 2);
            if (t.px > 0 && t.py > 0)
                h.xy += t.coef * t.px * t.py * ipow(u.x, t.px - 1) * ipow(u.y, t.py - 1);
        }
        return h;
    }

    std::span<const Vec2> minima() const { return minima_; }
    double outer_radius() const { return outer_radius_; }
    const std::vector<Term>& terms() const { return terms_; }

private:
    static double ipow(double b, int e) {
        double r = 1.0;
        for (; e > 0; --e) r *= b;
        return r;
    }

    std::vector<Term> terms_;
    std::vector<Vec2> minima_;
    double outer_radius_;
};

/// Two-well slice W(x, y) = (1 - x^2)^2 / 4 + y^2 / 2 with minima (+-1, 0).
/// Its heteroclinic runs along the x-axis with action 2*sqrt(2)/3.
class TwoWellSlice {
public:
    double value(const Vec2& u) const {
        const double s = 1.0 - u.x * u.x;
        return 0.25 * s * s + 0.5 * u.y * u.y;
    }
    Vec2 gradient(const Vec2& u) const { return {u.x * (u.x * u.x - 1.0), u.y}; }
    Sym2 hessian(const Vec2& u) const { return {3.0 * u.x * u.x - 1.0, 0.0, 1.0}; }
    std::span<const Vec2> minima() const { return minima_; }
    double outer_radius() const { return 2.0; }

private:
    std::vector<Vec2> minima_{{-1.0, 0.0}, {1.0, 0.0}};
};

// ---------------------------------------------------------------------------
// Type-erased potential for runtime configuration
// ---------------------------------------------------------------------------

class Potential {
public:
    template <PotentialLike P>
        requires(!std::same_as<std::remove_cvref_t<P>, Potential>)
    Potential(P p, std::string tag)
        : impl_(std::make_shared<Model<P>>(std::move(p))), tag_(std::move(tag)) {}

    double value(const Vec2& u) const { return impl_->value(u); }
    Vec2 gradient(const Vec2& u) const { return impl_->gradient(u); }
    Sym2 hessian(const Vec2& u) const { return impl_->hessian(u); }
    std::span<const Vec2> minima() const { return impl_->minima(); }
    double outer_radius() const { return impl_->outer_radius(); }
    const std::string& tag() const { return tag_; }

    /// Same potential with minima i and j swapped (relabelling of phases).
    Potential relabeled(std::size_t i, std::size_t j) const {
        std::vector<Vec2> m(minima().begin(), minima().end());
        std::swap(m.at(i), m.at(j));
        return Potential(Relabeled{impl_, std::move(m)}, tag_);
    }

private:
    struct Concept {
        virtual ~Concept() = default;
        virtual double value(const Vec2&) const = 0;
        virtual Vec2 gradient(const Vec2&) const = 0;
        virtual Sym2 hessian(const Vec2&) const = 0;
        virtual std::span<const Vec2> minima() const = 0;
        virtual double outer_radius() const = 0;
    };

    template <class P>
    struct Model final : Concept {
        explicit Model(P p) : inner(std::move(p)) {}
        double value(const Vec2& u) const override { return inner.value(u); }
        Vec2 gradient(const Vec2& u) const override { return inner.gradient(u); }
        Sym2 hessian(const Vec2& u) const override { return inner.hessian(u); }
        std::span<const Vec2> minima() const override { return inner.minima(); }
        double outer_radius() const override { return inner.outer_radius(); }
        P inner;
    };

    struct Relabeled {
        std::shared_ptr<const Concept> base;
        std::vector<Vec2> order;
        double value(const Vec2& u) const { return base->value(u); }
        Vec2 gradient(const Vec2& u) const { return base->gradient(u); }
        Sym2 hessian(const Vec2& u) const { return base->hessian(u); }
        std::span<const Vec2> minima() const { return order; }
        double outer_radius() const { return base->outer_radius(); }
    };

    std::shared_ptr<const Concept> impl_;
    std::string tag_;
};

// ---------------------------------------------------------------------------
// (H1) certification
// ---------------------------------------------------------------------------

struct H1Sampling {
    int grid_per_axis = 201;     ///< regular samples per axis over |u| <= outer_radius + margin
    double margin = 1.0;
    int random_samples = 2000;   ///< extra jittered samples drawn from `seed`
    unsigned seed = 12345;
    double exclusion = 1e-3;     ///< radius around each minimum skipped by the positivity scan
    double ring_radius = 0.0;    ///< radius for the coercivity ring; 0 means outer_radius
    int ring_samples = 720;
    double critical_tol = 1e-10; ///< |W(a_i)| and |W_u(a_i)| tolerance
};

struct ClauseResult {
    std::string clause;
    bool passed = false;
    double worst_value = 0.0;
    Vec2 worst_sample{};
};

struct H1Report {
    bool passed = false;
    std::vector<ClauseResult> clauses;
    HessianBounds bounds;
    std::vector<std::array<double, 2>> eigenvalues;  ///< per minimum, ascending

    const ClauseResult* find(const std::string& name) const {
        for (const auto& c : clauses)
            if (c.clause == name) return &c;
        return nullptr;
    }
};

/// Sample-based check of the (H1) clauses. Failures are reported, never thrown.
template <PotentialLike P>
H1Report certify_h1(const P& p, const H1Sampling& s = {}) {
    H1Report rep;
    const auto minima = p.minima();

    ClauseResult count{"three_minima", minima.size() == 3, double(minima.size()), {}};
    rep.clauses.push_back(count);

    ClauseResult distinct{"minima_distinct", true, std::numeric_limits<double>::infinity(), {}};
    for (std::size_t i = 0; i < minima.size(); ++i)
        for (std::size_t j = i + 1; j < minima.size(); ++j) {
            const double d = dist(minima[i], minima[j]);
            if (d < distinct.worst_value) {
                distinct.worst_value = d;
                distinct.worst_sample = minima[j];
            }
        }
    distinct.passed = distinct.worst_value > 1e-8;
    rep.clauses.push_back(distinct);

    ClauseResult zero{"zero_at_minima", true, 0.0, {}};
    ClauseResult crit{"critical_at_minima", true, 0.0, {}};
    ClauseResult hess{"hessian_positive", true, std::numeric_limits<double>::infinity(), {}};
    for (const Vec2& a : minima) {
        const double w = std::abs(p.value(a));
        if (w >= zero.worst_value) zero = {"zero_at_minima", true, w, a};
        const double g = norm(p.gradient(a));
        if (g >= crit.worst_value) crit = {"critical_at_minima", true, g, a};
        const auto ev = p.hessian(a).eigenvalues();
        rep.eigenvalues.push_back(ev);
        if (ev[0] < hess.worst_value) hess = {"hessian_positive", true, ev[0], a};
    }
    zero.passed = zero.worst_value <= s.critical_tol;
    crit.passed = crit.worst_value <= s.critical_tol;
    hess.passed = hess.worst_value > 0.0;
    rep.clauses.push_back(zero);
    rep.clauses.push_back(crit);
    rep.clauses.push_back(hess);
    rep.bounds = hessian_bounds(p);

    // positivity away from the declared minima
    ClauseResult pos{"positive_elsewhere", true, std::numeric_limits<double>::infinity(), {}};
    const double R = p.outer_radius() + s.margin;
    auto visit = [&](const Vec2& u) {
        if (norm(u) > R) return;
        for (const Vec2& a : minima)
            if (dist(u, a) < s.exclusion) return;
        const double w = p.value(u);
        if (w < pos.worst_value) {
            pos.worst_value = w;
            pos.worst_sample = u;
        }
    };
    const int n = std::max(s.grid_per_axis, 2);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            visit({-R + 2.0 * R * i / (n - 1), -R + 2.0 * R * j / (n - 1)});
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> U(-R, R);
    for (int k = 0; k < s.random_samples; ++k) {
        const double x = U(rng);
        visit({x, U(rng)});
    }
    pos.passed = pos.worst_value > 0.0;
    rep.clauses.push_back(pos);

    ClauseResult ring{"radial_coercivity", true, std::numeric_limits<double>::infinity(), {}};
    const double rr = s.ring_radius > 0.0 ? s.ring_radius : p.outer_radius();
    for (int k = 0; k < s.ring_samples; ++k) {
        const double t = kTwoPi * k / s.ring_samples;
        const Vec2 u{rr * std::cos(t), rr * std::sin(t)};
        const double v = dot(p.gradient(u), u);
        if (v < ring.worst_value) {
            ring.worst_value = v;
            ring.worst_sample = u;
        }
    }
    ring.passed = ring.worst_value > 0.0;
    rep.clauses.push_back(ring);

    rep.passed = std::all_of(rep.clauses.begin(), rep.clauses.end(),
                             [](const ClauseResult& c) { return c.passed; });
    return rep;
}

// ---------------------------------------------------------------------------
// Local quadratic constants near the wells
// ---------------------------------------------------------------------------

/// Constants with  c_W d^2/2 <= W(u) <= C_W d^2/2  on |u - a_i| = d < delta_W,
/// and W(u) >= c_W d^2/2 whenever min_i |u - a_i| >= d.
struct LocalQuadraticConstants {
    double delta_W = 0.0;
    double c_W = 0.0;
    double C_W = 0.0;
};

struct LocalConstantSampling {
    int angular_samples = 256;
    int region_grid = 401;  ///< samples per axis for the far-field inequality
    double margin = 1.0;
};

template <PotentialLike P>
LocalQuadraticConstants estimate_local_constants(const P& p, std::vector<double> deltas,
                                                 const LocalConstantSampling& s = {}) {
    if (deltas.empty()) throw std::invalid_argument("estimate_local_constants: empty delta grid");
    const auto minima = p.minima();
    double min_pair = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < minima.size(); ++i)
        for (std::size_t j = i + 1; j < minima.size(); ++j)
            min_pair = std::min(min_pair, dist(minima[i], minima[j]));
    for (double d : deltas)
        if (!(d > 0.0) || !(d < 0.5 * min_pair))
            throw std::invalid_argument(
                "estimate_local_constants: delta must lie in (0, half the minimal well separation)");
    std::sort(deltas.begin(), deltas.end());

    // ratio W / (d^2/2) on each circle
    std::vector<double> lo(deltas.size()), hi(deltas.size());
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double d = deltas[k];
        lo[k] = std::numeric_limits<double>::infinity();
        hi[k] = 0.0;
        for (const Vec2& a : minima)
            for (int t = 0; t < s.angular_samples; ++t) {
                const double th = kTwoPi * t / s.angular_samples;
                const double r = p.value(a + Vec2{d * std::cos(th), d * std::sin(th)}) / (0.5 * d * d);
                lo[k] = std::min(lo[k], r);
                hi[k] = std::max(hi[k], r);
            }
    }

    // far-field minimum m(d) = min { W(u) : min_i |u - a_i| >= d } over a bounded box
    const double R = p.outer_radius() + s.margin;
    std::vector<double> far(deltas.size(), std::numeric_limits<double>::infinity());
    const int n = std::max(s.region_grid, 2);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 u{-R + 2.0 * R * i / (n - 1), -R + 2.0 * R * j / (n - 1)};
            double dmin = std::numeric_limits<double>::infinity();
            for (const Vec2& a : minima) dmin = std::min(dmin, dist(u, a));
            const double w = p.value(u);
            for (std::size_t k = 0; k < deltas.size(); ++k)
                if (dmin >= deltas[k]) far[k] = std::min(far[k], w);
        }
    // the circles themselves also belong to the far-field set
    for (std::size_t k = 0; k < deltas.size(); ++k) far[k] = std::min(far[k], lo[k] * 0.5 * deltas[k] * deltas[k]);

    LocalQuadraticConstants best;
    double cw = std::numeric_limits<double>::infinity();
    double Cw = 0.0;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double cw_k = std::min(cw, lo[k]);
        const double Cw_k = std::max(Cw, hi[k]);
        bool ok = cw_k > 0.0;
        for (std::size_t m = 0; m <= k && ok; ++m)
            ok = far[m] >= 0.5 * cw_k * deltas[m] * deltas[m] * (1.0 - 1e-12);
        if (!ok) break;
        cw = cw_k;
        Cw = Cw_k;
        best = {deltas[k], cw, Cw};
    }
    if (best.delta_W == 0.0)
        throw std::invalid_argument("estimate_local_constants: no tested delta satisfies the local bounds");
    return best;
}

}  // namespace tj
