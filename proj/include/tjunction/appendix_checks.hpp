#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "tjunction/junction_geometry.hpp"

namespace tj {

/// Admissible (mu*, y*) box at the eps -> 0 limit.
struct EtildeBox {
    double mu_lo, mu_hi, y_lo, y_hi;
};

inline EtildeBox etilde_box(const JunctionAngles& a) {
    return {-std::sin(a.half3()), std::sin(a.half_gap()), -std::cos(a.half3()), std::cos(a.half_gap())};
}

/// Reduced lower-bound functional with tensions replaced by the sines of the
/// opposite angles.
inline double etilde(double mu, double y, const JunctionAngles& a) {
    const EtildeBox b = etilde_box(a);
    constexpr double tol = 1e-12;
    if (mu < b.mu_lo - tol || mu > b.mu_hi + tol || y < b.y_lo - tol || y > b.y_hi + tol)
        throw std::invalid_argument("etilde: arguments outside the admissible box");
    const double s1 = std::sin(a.alpha1), s2 = std::sin(a.alpha2), s3 = std::sin(a.alpha3);
    const double h3s = std::sin(a.half3()), h3c = std::cos(a.half3());
    const double gs = std::sin(a.half_gap()), gc = std::cos(a.half_gap());
    const double first = std::hypot(h3s * (s1 + s2) + mu * (s1 - s2), (y + h3c) * (s1 + s2));
    return first + s3 * std::hypot(gs - mu, gc - y);
}

namespace detail {

/// `count` nodes on [lo, hi] containing 0 exactly: uniform on each side of 0,
/// with the nodes shared out by length.
inline std::vector<double> axis_through_zero(double lo, double hi, int count) {
    std::vector<double> v;
    v.reserve(count);
    if (lo >= 0.0 || hi <= 0.0) {
        for (int k = 0; k < count; ++k) v.push_back(lo + (hi - lo) * k / (count - 1));
        if (lo == 0.0) v.front() = 0.0;
        if (hi == 0.0) v.back() = 0.0;
        return v;
    }
    const int intervals = count - 1;
    int left = int(std::lround(intervals * (-lo) / (hi - lo)));
    left = std::clamp(left, 1, intervals - 1);
    const int right = intervals - left;
    for (int k = 0; k < left; ++k) v.push_back(lo * (1.0 - double(k) / left));
    v.push_back(0.0);
    for (int k = 1; k <= right; ++k) v.push_back(hi * double(k) / right);
    return v;
}

}  // namespace detail

struct EtildeScan {
    JunctionAngles angles;
    int resolution = 0;
    double mu_star = 0.0;  ///< argmin
    double y_star = 0.0;
    int mu_index = 0;
    int y_index = 0;
    double cell_mu = 0.0;  ///< local spacing around the argmin
    double cell_y = 0.0;
    double min_value = 0.0;
    double sum_sines = 0.0;
    double gap = 0.0;  ///< min_value - sum of sines
    bool on_boundary = false;
};

/// Exhaustive scan on a resolution x resolution grid over the admissible box.
/// Both axes contain 0 as a node. Ties go to the lowest (mu, y) index.
inline EtildeScan scan_etilde(const JunctionAngles& a, int resolution = 201) {
    if (resolution < 101) throw std::invalid_argument("scan_etilde: resolution must be at least 101");
    const EtildeBox b = etilde_box(a);
    const auto mu = detail::axis_through_zero(b.mu_lo, b.mu_hi, resolution);
    const auto ys = detail::axis_through_zero(b.y_lo, b.y_hi, resolution);
    EtildeScan s;
    s.angles = a;
    s.resolution = resolution;
    s.min_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
            const double v = etilde(mu[i], ys[j], a);
            if (v < s.min_value) {
                s.min_value = v;
                s.mu_index = i;
                s.y_index = j;
            }
        }
    auto spacing = [](const std::vector<double>& ax, int k) {
        const double lo = k > 0 ? ax[k] - ax[k - 1] : 0.0;
        const double hi = k + 1 < int(ax.size()) ? ax[k + 1] - ax[k] : 0.0;
        return std::max(lo, hi);
    };
    s.mu_star = mu[s.mu_index];
    s.y_star = ys[s.y_index];
    s.cell_mu = spacing(mu, s.mu_index);
    s.cell_y = spacing(ys, s.y_index);
    s.sum_sines = std::sin(a.alpha1) + std::sin(a.alpha2) + std::sin(a.alpha3);
    s.gap = s.min_value - s.sum_sines;
    s.on_boundary = s.mu_index == 0 || s.mu_index == resolution - 1 || s.y_index == 0 || s.y_index == resolution - 1;
    return s;
}

struct AppendixBResidual {
    double direct = 0.0;       ///< radical squared minus (sum of sines)^2
    double closed_form = 0.0;  ///< 4 (sin^2(alpha3/2) - sin^2((alpha2-alpha1)/2))^2
};

inline AppendixBResidual appendixB_residual(const JunctionAngles& a) {
    const double s1 = std::sin(a.alpha1), s2 = std::sin(a.alpha2), s3 = std::sin(a.alpha3);
    const double h3s = std::sin(a.half3()), h3c = std::cos(a.half3());
    const double gs = std::sin(a.half_gap()), gc = std::cos(a.half_gap());
    const double v = h3s * (s2 + s1) + gs * (s1 - s2);
    const double h = (s1 + s2) * (h3c + gc);
    const double total = s1 + s2 + s3;
    const double d = h3s * h3s - gs * gs;
    return {v * v + h * h - total * total, 4.0 * d * d};
}

/// Uniform sample of valid sector angles with alpha2 >= alpha1: the supplementary
/// triangle angles are drawn uniformly from the simplex.
template <class Rng>
JunctionAngles sample_angles(Rng& rng, double margin = 1e-3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        double x = u(rng), y = u(rng);
        if (x > y) std::swap(x, y);
        const double b1 = kPi * x, b2 = kPi * (y - x), b3 = kPi - b1 - b2;
        if (std::min({b1, b2, b3}) < margin) continue;
        JunctionAngles a{kPi - b1, kPi - b2, kPi - b3, false};
        if (a.alpha2 < a.alpha1) std::swap(a.alpha1, a.alpha2);
        return a;
    }
}

}  // namespace tj
