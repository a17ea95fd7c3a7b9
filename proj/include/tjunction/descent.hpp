#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace tj {

struct DescentOptions {
    int max_iter = 200000;
    double grad_tol = 0.0;           ///< stop when max|grad| <= grad_tol
    int stall_window = 50;           ///< stop when the relative decrease over this many
    double stall_rtol = 1e-12;       ///< iterations falls below stall_rtol
    double initial_step = 1e-3;
    double armijo = 1e-4;
    int max_backtracks = 60;
    bool barzilai_borwein = true;    ///< false gives plain descent with adaptive step
    bool record_log = true;
};

struct DescentRecord {
    int iteration = 0;
    double energy = 0.0;
    double step = 0.0;
    double gradnorm = 0.0;  ///< max-norm of the gradient
};

enum class DescentStatus { GradientTolerance, Stalled, LineSearchFailed, BudgetExhausted };

inline const char* to_string(DescentStatus s) {
    switch (s) {
        case DescentStatus::GradientTolerance: return "gradient_tolerance";
        case DescentStatus::Stalled: return "stalled";
        case DescentStatus::LineSearchFailed: return "line_search_failed";
        case DescentStatus::BudgetExhausted: return "budget_exhausted";
    }
    return "unknown";
}

struct DescentResult {
    DescentStatus status = DescentStatus::BudgetExhausted;
    int iterations = 0;
    double energy = 0.0;
    double gradnorm = 0.0;
    std::vector<DescentRecord> log;

    bool converged() const {
        return status == DescentStatus::GradientTolerance || status == DescentStatus::Stalled;
    }
};

/// Monotone gradient descent with Barzilai-Borwein trial steps and Armijo
/// backtracking. `fg(x, grad)` returns the objective and fills `grad`.
/// Components with `frozen[i] != 0` are never moved (their gradient is ignored).
template <class ObjectiveGrad>
DescentResult bb_descent(std::vector<double>& x, ObjectiveGrad&& fg, const DescentOptions& opt,
                         std::span<const char> frozen = {}) {
    const std::size_t n = x.size();
    std::vector<double> g(n), g_new(n), x_new(n);
    auto mask = [&](std::vector<double>& v) {
        if (!frozen.empty())
            for (std::size_t i = 0; i < n; ++i)
                if (frozen[i]) v[i] = 0.0;
    };
    auto dotp = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };
    auto maxabs = [n](const std::vector<double>& a) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
        return m;
    };

    DescentResult res;
    double f = fg(x, g);
    mask(g);
    double alpha = opt.initial_step;
    std::vector<double> history{f};
    bool use_bb = opt.barzilai_borwein;
    int bb_flip = 0;

    for (int it = 0;; ++it) {
        const double gn = maxabs(g);
        res.iterations = it;
        res.energy = f;
        res.gradnorm = gn;
        if (opt.record_log) res.log.push_back({it, f, alpha, gn});
        if (gn <= opt.grad_tol) {
            res.status = DescentStatus::GradientTolerance;
            return res;
        }
        if (int(history.size()) > opt.stall_window) {
            const double old = history[history.size() - 1 - opt.stall_window];
            if (old - f <= opt.stall_rtol * std::abs(f)) {
                res.status = DescentStatus::Stalled;
                return res;
            }
        }
        if (it >= opt.max_iter) {
            res.status = DescentStatus::BudgetExhausted;
            return res;
        }

        const double gg = dotp(g, g);
        double f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] - alpha * g[i];
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f - opt.armijo * alpha * gg) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (use_bb) {
                // fall back to plain descent from the last good state
                use_bb = false;
                alpha = opt.initial_step;
                continue;
            }
            res.status = DescentStatus::LineSearchFailed;
            return res;
        }
        mask(g_new);

        // BB step from s = -alpha g, y = g_new - g
        double sy = 0.0, ss = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = -alpha * g[i];
            const double y = g_new[i] - g[i];
            sy += s * y;
            ss += s * s;
            yy += y * y;
        }
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        history.push_back(f);
        if (use_bb && sy > 0.0) {
            alpha = (bb_flip++ % 2 == 0) ? ss / sy : sy / yy;
        } else {
            alpha *= 2.0;
        }
    }
}

}  // namespace tj
