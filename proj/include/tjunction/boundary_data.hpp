#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tjunction/errors.hpp"
#include "tjunction/junction_geometry.hpp"

namespace tj {

/// Monotone transition profile g0 : [0,1] -> [0,1] with g0(0) = 0, g0(1) = 1.
struct TransitionProfile {
    std::string name = "smoothstep";
    std::function<double(double)> value = [](double t) { return t * t * (3.0 - 2.0 * t); };
    double max_slope = 1.5;  ///< sup |g0'|

    static TransitionProfile smoothstep() { return {}; }
    static TransitionProfile linear() {
        return {"linear", [](double t) { return t; }, 1.0};
    }
    static TransitionProfile by_name(const std::string& n) {
        if (n == "smoothstep") return smoothstep();
        if (n == "linear") return linear();
        throw InvalidConfiguration("unknown g0 profile: " + n);
    }
};

/// Dirichlet trace g_eps on the unit circle: three flat arcs at the minima joined by
/// transitions of angular width 2 c0 eps centred on the triod rays.
class BoundaryTrace {
public:
    BoundaryTrace(const JunctionAngles& angles, std::array<Vec2, 3> minima, double eps, double c0,
                  TransitionProfile g0 = {})
        : angles_(angles), minima_(minima), eps_(eps), c0_(c0), g0_(std::move(g0)) {
        if (!(eps > 0.0) || !(c0 > 0.0)) throw InvalidConfiguration("BoundaryTrace: eps and c0 must be positive");
        const double smallest = std::min({angles.alpha1, angles.alpha2, angles.alpha3});
        if (!(half_width() < 0.5 * smallest))
            throw InvalidConfiguration("BoundaryTrace: eps too large, boundary arcs overlap");
        const TriodPartition t(angles);
        // transitions in counter-clockwise order: a2 -> a1, a1 -> a3, a3 -> a2
        centers_ = {t.ray12(), t.ray13(), t.ray23()};
    }

    /// Trace pinned to a single minimum on the whole circle. The angles and the
    /// three minima are kept for the diagnostics.
    static BoundaryTrace constant(const JunctionAngles& angles, std::array<Vec2, 3> minima, double eps, double c0,
                                  int phase) {
        if (phase < 1 || phase > 3) throw InvalidConfiguration("BoundaryTrace::constant: phase must be 1, 2 or 3");
        BoundaryTrace t(angles, minima, eps, c0);
        t.pinned_ = phase;
        return t;
    }

    /// 1-based phase the trace is pinned to, 0 for the three-arc trace.
    int pinned_phase() const { return pinned_; }

    double epsilon() const { return eps_; }
    double c0() const { return c0_; }
    const JunctionAngles& angles() const { return angles_; }
    const std::array<Vec2, 3>& minima() const { return minima_; }
    const TransitionProfile& g0() const { return g0_; }
    double half_width() const { return c0_ * eps_; }

    /// Sup of |d g / d theta|.
    double lipschitz() const {
        if (pinned_) return 0.0;
        double jump = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) jump = std::max(jump, dist(minima_[i], minima_[j]));
        return g0_.max_slope * jump / (2.0 * half_width());
    }

    Vec2 operator()(double theta) const { return evaluate(theta); }

    Vec2 evaluate(double theta) const {
        if (pinned_) return minima_[pinned_ - 1];
        const double th = wrap_angle(theta);
        const double w = half_width();
        static constexpr std::array<std::array<int, 2>, 3> kFromTo{{{1, 0}, {0, 2}, {2, 1}}};
        for (int k = 0; k < 3; ++k) {
            const double off = std::remainder(th - centers_[k], kTwoPi);
            if (off >= -w && off < w) {
                const Vec2& from = minima_[kFromTo[k][0]];
                const Vec2& to = minima_[kFromTo[k][1]];
                return from + g0_.value((off + w) / (2.0 * w)) * (to - from);
            }
        }
        if (th >= centers_[0] && th < centers_[1]) return minima_[0];
        if (th >= centers_[1] && th < centers_[2]) return minima_[2];
        return minima_[1];
    }

    /// The six arc endpoints in ascending order within [0, 2*pi).
    std::array<double, 6> arc_endpoints() const {
        std::array<double, 6> e{};
        const double w = half_width();
        for (int k = 0; k < 3; ++k) {
            e[2 * k] = wrap_angle(centers_[k] - w);
            e[2 * k + 1] = wrap_angle(centers_[k] + w);
        }
        std::sort(e.begin(), e.end());
        return e;
    }

    /// Bound on |g_eps| that does not depend on eps.
    double sup_bound() const {
        double m = 0.0;
        for (const Vec2& a : minima_) m = std::max(m, norm(a));
        return m;
    }

private:
    JunctionAngles angles_;
    std::array<Vec2, 3> minima_;
    double eps_;
    double c0_;
    TransitionProfile g0_;
    std::array<double, 3> centers_{};
    int pinned_ = 0;
};

template <class MinimaRange>
BoundaryTrace make_trace(const JunctionAngles& angles, const MinimaRange& minima, double eps, double c0,
                         TransitionProfile g0 = {}) {
    if (std::size(minima) != 3) throw InvalidConfiguration("make_trace: need exactly three minima");
    return BoundaryTrace(angles, {minima[0], minima[1], minima[2]}, eps, c0, std::move(g0));
}

struct TraceSample {
    double theta = 0.0;
    Vec2 value;
};

/// n samples: the six arc endpoints plus n - 6 uniformly spaced angles, sorted.
inline std::vector<TraceSample> trace_samples(const BoundaryTrace& t, int n) {
    if (n < 6) throw std::invalid_argument("trace_samples: need n >= 6");
    std::vector<double> th;
    for (double e : t.arc_endpoints()) th.push_back(e);
    for (int k = 0; k < n - 6; ++k) th.push_back(kTwoPi * k / (n - 6));
    std::sort(th.begin(), th.end());
    std::vector<TraceSample> out;
    out.reserve(th.size());
    for (double a : th) out.push_back({a, t.evaluate(a)});
    return out;
}

}  // namespace tj
