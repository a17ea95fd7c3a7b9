#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tjunction/descent.hpp"
#include "tjunction/errors.hpp"
#include "tjunction/potential.hpp"

namespace tj {

/// Discrete 1D connection U_ij on the uniform grid eta_k = -L + k * spacing.
struct HeteroclinicProfile {
    int i = 0;  ///< 1-based phase at eta = -L
    int j = 0;  ///< 1-based phase at eta = +L
    double L = 0.0;
    std::vector<double> eta;
    std::vector<Vec2> values;
    double action = 0.0;          ///< Richardson-extrapolated action
    double action_coarse = 0.0;   ///< discrete action on n nodes
    double action_fine = 0.0;     ///< discrete action on 2n - 1 nodes
    double equipartition = 0.0;   ///< int (|U'|^2/2 - W(U)) on the returned grid
    int iterations = 0;
    std::vector<double> restart_actions;
    bool restarts_disagree = false;

    double spacing() const { return eta.size() > 1 ? eta[1] - eta[0] : 0.0; }

    /// Linear interpolation in eta, clamped to the end states outside [-L, L].
    Vec2 at(double e) const {
        if (e <= eta.front()) return values.front();
        if (e >= eta.back()) return values.back();
        const double t = (e - eta.front()) / spacing();
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), values.size() - 2);
        const double w = t - double(k);
        return (1.0 - w) * values[k] + w * values[k + 1];
    }
};

/// Raised when the descent exhausts its budget; carries the last iterate.
class ConnectionFailure : public std::runtime_error {
public:
    ConnectionFailure(const std::string& what, HeteroclinicProfile last)
        : std::runtime_error(what), last_(std::move(last)) {}
    const HeteroclinicProfile& last_iterate() const noexcept { return last_; }

private:
    HeteroclinicProfile last_;
};

struct ConnectionOptions {
    int max_iter = 400000;
    int restarts = 0;       ///< extra randomized starts; the best action is reported
    unsigned seed = 7;
    double stall_rtol = 1e-12;
    int stall_window = 50;
};

namespace detail {

struct ChainResult {
    std::vector<Vec2> values;
    double action = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<DescentRecord> log;
};

/// Trapezoid-discretized action with clamped end nodes.
template <PotentialLike P>
double chain_action(const P& p, std::span<const Vec2> u, double h, std::vector<Vec2>* grad) {
    const std::size_t n = u.size();
    double a = 0.0;
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = p.value(u[k]);
    for (std::size_t k = 0; k + 1 < n; ++k)
        a += 0.5 * norm2(u[k + 1] - u[k]) / h + 0.5 * h * (w[k] + w[k + 1]);
    if (grad) {
        grad->assign(n, Vec2{});
        for (std::size_t k = 1; k + 1 < n; ++k)
            (*grad)[k] = (1.0 / h) * (2.0 * u[k] - u[k - 1] - u[k + 1]) + h * p.gradient(u[k]);
    }
    return a;
}

template <PotentialLike P>
ChainResult minimize_chain(const P& p, std::vector<Vec2> init, double h, const ConnectionOptions& opt,
                           bool keep_log = false) {
    const std::size_t n = init.size();
    std::vector<double> x(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        x[2 * k] = init[k].x;
        x[2 * k + 1] = init[k].y;
    }
    std::vector<char> frozen(2 * n, 0);
    frozen[0] = frozen[1] = frozen[2 * n - 2] = frozen[2 * n - 1] = 1;
    std::vector<Vec2> u(n), g;
    auto fg = [&](const std::vector<double>& xs, std::vector<double>& gs) {
        for (std::size_t k = 0; k < n; ++k) u[k] = {xs[2 * k], xs[2 * k + 1]};
        const double a = chain_action(p, u, h, &g);
        for (std::size_t k = 0; k < n; ++k) {
            gs[2 * k] = g[k].x;
            gs[2 * k + 1] = g[k].y;
        }
        return a;
    };
    DescentOptions d;
    d.max_iter = opt.max_iter;
    d.stall_rtol = opt.stall_rtol;
    d.stall_window = opt.stall_window;
    d.initial_step = 0.25 * h;
    d.record_log = keep_log;
    const DescentResult r = bb_descent(x, fg, d, frozen);
    ChainResult out;
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.values[k] = {x[2 * k], x[2 * k + 1]};
    out.action = r.energy;
    out.iterations = r.iterations;
    out.converged = r.converged();
    out.log = r.log;
    return out;
}

inline std::vector<Vec2> linear_path(const Vec2& a, const Vec2& b, std::size_t n) {
    std::vector<Vec2> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = double(k) / double(n - 1);
        v[k] = (1.0 - t) * a + t * b;
    }
    return v;
}

/// Refines a uniform chain of n nodes to 2n - 1 nodes by midpoint insertion.
inline std::vector<Vec2> refine_chain(const std::vector<Vec2>& v) {
    std::vector<Vec2> out;
    out.reserve(2 * v.size() - 1);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        out.push_back(v[k]);
        out.push_back(0.5 * (v[k] + v[k + 1]));
    }
    out.push_back(v.back());
    return out;
}

template <PotentialLike P>
double equipartition_residual(const P& p, std::span<const Vec2> u, double h) {
    double r = 0.0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k)
        r += 0.5 * norm2(u[k + 1] - u[k]) / h - 0.5 * h * (p.value(u[k]) + p.value(u[k + 1]));
    return r;
}

}  // namespace detail

/// Minimizing connection from a_i to a_j (1-based indices) on [-L, L] with n nodes.
/// The reported action is Richardson-extrapolated from n and 2n - 1 nodes.
template <PotentialLike P>
HeteroclinicProfile compute_connection(const P& p, int i, int j, double L, int n,
                                       const ConnectionOptions& opt = {}) {
    const auto minima = p.minima();
    if (i == j || i < 1 || j < 1 || i > int(minima.size()) || j > int(minima.size()))
        throw std::invalid_argument("compute_connection: need two distinct valid phase indices");
    if (!(L > 0.0) || n < 3) throw std::invalid_argument("compute_connection: need L > 0 and n >= 3");
    const Vec2 a = minima[i - 1];
    const Vec2 b = minima[j - 1];
    const double h = 2.0 * L / (n - 1);

    HeteroclinicProfile prof;
    prof.i = i;
    prof.j = j;
    prof.L = L;
    prof.eta.resize(n);
    for (int k = 0; k < n; ++k) prof.eta[k] = -L + k * h;

    auto coarse = detail::minimize_chain(p, detail::linear_path(a, b, n), h, opt);

    if (opt.restarts > 0) {
        std::mt19937_64 rng(opt.seed);
        std::normal_distribution<double> N(0.0, 1.0);
        const Vec2 ab = b - a;
        const Vec2 normal{-ab.y, ab.x};
        prof.restart_actions.push_back(coarse.action);
        for (int r = 0; r < opt.restarts; ++r) {
            // smooth random bump transverse to the segment, random steepness along it
            const double amp = 0.5 * N(rng);
            const double steep = std::exp(0.5 * N(rng));
            std::vector<Vec2> init(n);
            for (int k = 0; k < n; ++k) {
                const double e = prof.eta[k] / L;
                const double t = 0.5 * (1.0 + std::tanh(3.0 * steep * e)) ;
                const double t0 = 0.5 * (1.0 + std::tanh(-3.0 * steep));
                const double t1 = 0.5 * (1.0 + std::tanh(3.0 * steep));
                const double s = (t - t0) / (t1 - t0);
                init[k] = a + s * ab + (amp * std::sin(kPi * s)) * normal;
            }
            auto trial = detail::minimize_chain(p, std::move(init), h, opt);
            prof.restart_actions.push_back(trial.action);
            if (trial.action < coarse.action) coarse = std::move(trial);
        }
        const auto [lo, hi] = std::minmax_element(prof.restart_actions.begin(), prof.restart_actions.end());
        prof.restarts_disagree = (*hi - *lo) > 1e-6;
    }

    auto fine = detail::minimize_chain(p, detail::refine_chain(coarse.values), 0.5 * h, opt);
    prof.values = coarse.values;
    prof.action_coarse = coarse.action;
    prof.action_fine = fine.action;
    prof.action = (4.0 * fine.action - coarse.action) / 3.0;
    prof.equipartition = detail::equipartition_residual(p, std::span<const Vec2>(prof.values), h);
    prof.iterations = coarse.iterations + fine.iterations;
    if (!coarse.converged || !fine.converged)
        throw ConnectionFailure("compute_connection: descent did not converge within the iteration budget",
                                std::move(prof));
    return prof;
}

/// The three actions sigma_12, sigma_13, sigma_23.
struct SurfaceTensions {
    double s12 = 0.0;
    double s13 = 0.0;
    double s23 = 0.0;

    double sum() const { return s12 + s13 + s23; }

    /// sigma_ij for 1-based i != j, symmetric.
    double get(int i, int j) const {
        if (i > j) std::swap(i, j);
        if (i == 1 && j == 2) return s12;
        if (i == 1 && j == 3) return s13;
        if (i == 2 && j == 3) return s23;
        throw std::invalid_argument("SurfaceTensions::get: invalid pair");
    }

    /// Throws HypothesisViolation naming the pair whose strict triangle inequality fails.
    static SurfaceTensions validated(double s12, double s13, double s23) {
        if (!(s12 > 0.0 && s13 > 0.0 && s23 > 0.0))
            throw HypothesisViolation("surface tensions must be positive", "all");
        if (!(s12 < s13 + s23))
            throw HypothesisViolation("triangle inequality violated: sigma_12 >= sigma_13 + sigma_23", "12");
        if (!(s13 < s12 + s23))
            throw HypothesisViolation("triangle inequality violated: sigma_13 >= sigma_12 + sigma_23", "13");
        if (!(s23 < s12 + s13))
            throw HypothesisViolation("triangle inequality violated: sigma_23 >= sigma_12 + sigma_13", "23");
        return {s12, s13, s23};
    }
};

inline SurfaceTensions assemble_tensions(std::span<const HeteroclinicProfile> profiles) {
    std::optional<double> s[3];
    for (const auto& pr : profiles) {
        const int lo = std::min(pr.i, pr.j), hi = std::max(pr.i, pr.j);
        const int slot = (lo == 1 && hi == 2) ? 0 : (lo == 1 && hi == 3) ? 1 : (lo == 2 && hi == 3) ? 2 : -1;
        if (slot < 0) throw std::invalid_argument("assemble_tensions: profile with invalid pair");
        s[slot] = pr.action;
    }
    if (!s[0] || !s[1] || !s[2])
        throw std::invalid_argument("assemble_tensions: profiles must cover the pairs 12, 13, 23");
    return SurfaceTensions::validated(*s[0], *s[1], *s[2]);
}

// ---------------------------------------------------------------------------
// Perturbed-endpoint lower bound
// ---------------------------------------------------------------------------

struct Lemma23Report {
    double sigma = 0.0;              ///< discrete action with endpoints at the minima
    std::vector<double> actions;     ///< constrained action per trial
    double min_scaled_gap = 0.0;     ///< min over trials of (action - sigma) / delta^2
    double fitted_C = 0.0;           ///< max(0, -min_scaled_gap)
};

/// Minimizes the discrete action on [-L, L] with endpoints pinned to random points
/// of the circles |v - a_i| = delta and |v - a_j| = delta.
template <PotentialLike P>
Lemma23Report verify_lemma_2_3(const P& p, int i, int j, double delta, int trials,
                               const LocalQuadraticConstants& consts, double L, int n,
                               unsigned seed = 11, const ConnectionOptions& opt = {}) {
    if (!(delta >= 0.0) || !(delta < consts.delta_W))
        throw std::invalid_argument("verify_lemma_2_3: delta must lie in [0, delta_W)");
    if (trials < 1) throw std::invalid_argument("verify_lemma_2_3: need at least one trial");
    const auto minima = p.minima();
    if (i < 1 || j < 1 || std::size_t(std::max(i, j)) > minima.size() || i == j)
        throw std::invalid_argument("verify_lemma_2_3: need two distinct valid phase indices");
    const Vec2 a = minima[i - 1], b = minima[j - 1];
    const double h = 2.0 * L / (n - 1);

    Lemma23Report rep;
    rep.sigma = detail::minimize_chain(p, detail::linear_path(a, b, n), h, opt).action;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, kTwoPi);
    rep.min_scaled_gap = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const double t0 = U(rng), t1 = U(rng);
        const Vec2 s = a + delta * Vec2{std::cos(t0), std::sin(t0)};
        const Vec2 e = b + delta * Vec2{std::cos(t1), std::sin(t1)};
        const double act = detail::minimize_chain(p, detail::linear_path(s, e, n), h, opt).action;
        rep.actions.push_back(act);
        const double gap = delta > 0.0 ? (act - rep.sigma) / (delta * delta) : 0.0;
        rep.min_scaled_gap = std::min(rep.min_scaled_gap, gap);
    }
    rep.fitted_C = std::max(0.0, -rep.min_scaled_gap);
    return rep;
}

}  // namespace tj
