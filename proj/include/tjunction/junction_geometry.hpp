#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "tjunction/connections.hpp"
#include "tjunction/errors.hpp"
#include "tjunction/vec2.hpp"

namespace tj {

/// Sector opening angles of the triod, in radians, with alpha2 >= alpha1.
struct JunctionAngles {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    /// True when phases 1 and 2 were swapped to reach alpha2 >= alpha1. Callers
    /// must apply the same swap to the minima and to sigma_13 <-> sigma_23.
    bool relabeled_12 = false;

    double sum() const { return alpha1 + alpha2 + alpha3; }
    double half_gap() const { return 0.5 * (alpha2 - alpha1); }  ///< (alpha2 - alpha1)/2
    double half3() const { return 0.5 * alpha3; }                ///< alpha3/2
    std::array<double, 3> as_array() const { return {alpha1, alpha2, alpha3}; }

    /// Checks the invariants that do not involve tensions.
    bool valid(double tol = 1e-12) const {
        auto in_range = [](double a) { return a > 0.0 && a < kPi; };
        return std::abs(sum() - kTwoPi) <= tol && in_range(alpha1) && in_range(alpha2) && in_range(alpha3) &&
               alpha2 >= alpha1;
    }
};

/// Sum of |sin a_i / s_jk - sin a_j / s_ik| over consecutive ratios, with the
/// tensions normalized to unit sum. Tensions are given in the original labels;
/// a relabelled triple swaps sigma_13 and sigma_23 before comparing.
inline double sine_law_residual(const JunctionAngles& a, const SurfaceTensions& s) {
    const double t = s.sum();
    const double s13 = a.relabeled_12 ? s.s23 : s.s13;
    const double s23 = a.relabeled_12 ? s.s13 : s.s23;
    const double r1 = std::sin(a.alpha1) / (s23 / t);
    const double r2 = std::sin(a.alpha2) / (s13 / t);
    const double r3 = std::sin(a.alpha3) / (s.s12 / t);
    return std::abs(r1 - r2) + std::abs(r2 - r3);
}

/// Young's law: alpha_i = pi - beta_i where beta_i are the interior angles of the
/// triangle with sides (sigma_23, sigma_13, sigma_12) opposite (beta_1, beta_2, beta_3).
inline JunctionAngles solve_angles(const SurfaceTensions& s) {
    const double a = s.s23, b = s.s13, c = s.s12;
    if (!(a > 0.0 && b > 0.0 && c > 0.0) || !(a < b + c) || !(b < a + c) || !(c < a + b))
        throw InvalidConfiguration("solve_angles: tensions violate a strict triangle inequality");
    auto angle = [](double opp, double s1, double s2) {
        const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0);
        return std::acos(cosv);
    };
    const double b1 = angle(a, b, c);
    const double b2 = angle(b, a, c);
    const double b3 = kPi - b1 - b2;  // keeps the sum exact
    JunctionAngles out{kPi - b1, kPi - b2, kPi - b3, false};
    if (!(out.alpha1 > 0.0 && out.alpha1 < kPi && out.alpha2 > 0.0 && out.alpha2 < kPi && out.alpha3 > 0.0 &&
          out.alpha3 < kPi))
        throw InvalidConfiguration("solve_angles: degenerate configuration");
    if (std::abs(out.alpha2 - out.alpha1) <= 1e-13) {
        // equal tensions sigma_13 = sigma_23 up to rounding
        const double m = 0.5 * (out.alpha1 + out.alpha2);
        out.alpha1 = out.alpha2 = m;
    } else if (out.alpha2 < out.alpha1) {
        std::swap(out.alpha1, out.alpha2);
        out.relabeled_12 = true;
    }
    return out;
}

/// Tensions (up to a common factor) reproducing given angles: sigma_jk proportional to sin alpha_i.
inline SurfaceTensions tensions_from_angles(const JunctionAngles& a) {
    return {std::sin(a.alpha3), std::sin(a.alpha2), std::sin(a.alpha1)};
}

struct SectorHit {
    int phase = 1;             ///< 1-based sector label
    bool on_boundary = false;  ///< z lies on a triod ray (or is the junction)
};

/// The partition {D1, D2, D3} of the plane by three rays from the origin. The
/// y-axis bisects D3, which opens downwards; D1 sits on the left, D2 on the right.
class TriodPartition {
public:
    explicit TriodPartition(const JunctionAngles& a) : angles_(a) {
        if (!a.valid(1e-10)) throw InvalidConfiguration("TriodPartition: invalid junction angles");
        ray12_ = 0.5 * kPi + a.half_gap();
        ray13_ = 1.5 * kPi - a.half3();
        ray23_ = 1.5 * kPi + a.half3();
    }

    const JunctionAngles& angles() const { return angles_; }

    /// Polar angle of the ray separating D1 and D2, D1 and D3, D2 and D3.
    double ray12() const { return ray12_; }
    double ray13() const { return ray13_; }
    double ray23() const { return ray23_; }

    /// Angle of the ray between phases i and j (1-based, any order).
    double ray(int i, int j) const {
        if (i > j) std::swap(i, j);
        if (i == 1 && j == 2) return ray12_;
        if (i == 1 && j == 3) return ray13_;
        if (i == 2 && j == 3) return ray23_;
        throw std::invalid_argument("TriodPartition::ray: invalid pair");
    }

    /// Arc [begin, end) of D_i on the unit circle, counter-clockwise; end may exceed 2*pi.
    std::array<double, 2> arc(int phase) const {
        switch (phase) {
            case 1: return {ray12_, ray13_};
            case 2: return {ray23_, ray12_ + kTwoPi};
            case 3: return {ray13_, ray23_};
        }
        throw std::invalid_argument("TriodPartition::arc: invalid phase");
    }

    /// Sector containing z. Points on a ray get the lower adjacent label.
    SectorHit classify(const Vec2& z, double tol = 1e-12) const {
        if (norm(z) <= tol) return {1, true};
        const double th = polar_angle(z);
        auto near = [&](double r) { return std::abs(std::remainder(th - r, kTwoPi)) <= tol; };
        if (near(ray12_)) return {1, true};
        if (near(ray13_)) return {1, true};
        if (near(ray23_)) return {2, true};
        if (th > ray12_ && th < ray13_) return {1, false};
        if (th > ray13_ && th < ray23_) return {3, false};
        return {2, false};
    }

private:
    JunctionAngles angles_;
    double ray12_ = 0.0, ray13_ = 0.0, ray23_ = 0.0;
};

inline TriodPartition build_triod(const JunctionAngles& a) { return TriodPartition(a); }

struct U0Value {
    Vec2 value;
    int phase = 1;
    bool on_boundary = false;
};

/// Sharp-interface map u0 = sum a_i chi_{D_i}.
template <class MinimaRange>
U0Value u0_map(const TriodPartition& t, const MinimaRange& minima, const Vec2& z) {
    const SectorHit hit = t.classify(z);
    return {minima[hit.phase - 1], hit.phase, hit.on_boundary};
}

}  // namespace tj
