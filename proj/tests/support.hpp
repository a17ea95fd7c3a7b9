#pragma once

#include <cmath>
#include <random>

#include "tjunction/potential.hpp"

namespace tjtest {

inline const tj::Vec2 kA1{-1.0, 0.0};
inline const tj::Vec2 kA2{1.0, 0.0};
inline const tj::Vec2 kApex{0.0, std::sqrt(3.0)};
inline const tj::Vec2 kIsoApex{0.0, 2.0};

inline tj::ProductPotential equilateral() { return tj::make_product_potential(kA1, kA2, kApex); }
inline tj::ProductPotential isoceles() { return tj::make_product_potential(kA1, kA2, kIsoApex); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace tjtest
