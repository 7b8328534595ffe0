#pragma once

#include <array>
#include <functional>
#include <vector>

#include "afemstop/mesh.hpp"

namespace afemstop {

/// Barycentric quadrature rule on the reference triangle; weights sum to 1
/// and are applied against the physical area.
struct TriQuadRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weight;
};

const TriQuadRule& tri_rule_midpoint3();  // degree 2, edge midpoints
const TriQuadRule& tri_rule_deg4_6pt();
const TriQuadRule& tri_rule_deg5_7pt();

double integrate_triangle(const Vec2& a, const Vec2& b, const Vec2& c,
                          const TriQuadRule& rule,
                          const std::function<double(Vec2)>& f);

/// Same, but with `levels` rounds of uniform midpoint subdivision first.
double integrate_triangle_subdivided(const Vec2& a, const Vec2& b, const Vec2& c,
                                     const TriQuadRule& rule, int levels,
                                     const std::function<double(Vec2)>& f);

/// n-point Gauss-Legendre on [lo, hi].
double integrate_interval(double lo, double hi, int n,
                          const std::function<double(double)>& f);

}  // namespace afemstop
