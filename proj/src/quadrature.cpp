#include "afemstop/quadrature.hpp"

#include <cmath>

namespace afemstop {

const TriQuadRule& tri_rule_midpoint3() {
  static const TriQuadRule rule{
      {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}},
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  return rule;
}

const TriQuadRule& tri_rule_deg4_6pt() {
  static const TriQuadRule rule = [] {
    TriQuadRule r;
    const double a = 0.445948490915965;
    const double wa = 0.223381589678011;
    const double b = 0.091576213509771;
    const double wb = 0.109951743655322;
    for (int i = 0; i < 3; ++i) {
      std::array<double, 3> pa{a, a, a}, pb{b, b, b};
      pa[i] = 1.0 - 2.0 * a;
      pb[i] = 1.0 - 2.0 * b;
      r.bary.push_back(pa);
      r.weight.push_back(wa);
      r.bary.push_back(pb);
      r.weight.push_back(wb);
    }
    return r;
  }();
  return rule;
}

const TriQuadRule& tri_rule_deg5_7pt() {
  static const TriQuadRule rule = [] {
    TriQuadRule r;
    r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weight.push_back(9.0 / 40.0);
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0;
    const double wa = (155.0 - s15) / 1200.0;
    const double b = (6.0 + s15) / 21.0;
    const double wb = (155.0 + s15) / 1200.0;
    for (int i = 0; i < 3; ++i) {
      std::array<double, 3> pa{a, a, a}, pb{b, b, b};
      pa[i] = 1.0 - 2.0 * a;
      pb[i] = 1.0 - 2.0 * b;
      r.bary.push_back(pa);
      r.weight.push_back(wa);
      r.bary.push_back(pb);
      r.weight.push_back(wb);
    }
    return r;
  }();
  return rule;
}

double integrate_triangle(const Vec2& a, const Vec2& b, const Vec2& c,
                          const TriQuadRule& rule,
                          const std::function<double(Vec2)>& f) {
  const double area = 0.5 * std::abs(cross(b - a, c - a));
  double s = 0.0;
  for (size_t q = 0; q < rule.weight.size(); ++q) {
    const auto& l = rule.bary[q];
    const Vec2 p = l[0] * a + l[1] * b + l[2] * c;
    s += rule.weight[q] * f(p);
  }
  return area * s;
}

double integrate_triangle_subdivided(const Vec2& a, const Vec2& b, const Vec2& c,
                                     const TriQuadRule& rule, int levels,
                                     const std::function<double(Vec2)>& f) {
  if (levels <= 0) return integrate_triangle(a, b, c, rule, f);
  const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return integrate_triangle_subdivided(a, ab, ca, rule, levels - 1, f) +
         integrate_triangle_subdivided(ab, b, bc, rule, levels - 1, f) +
         integrate_triangle_subdivided(ca, bc, c, rule, levels - 1, f) +
         integrate_triangle_subdivided(ab, bc, ca, rule, levels - 1, f);
}

double integrate_interval(double lo, double hi, int n,
                          const std::function<double(double)>& f) {
  // Golub-Welsch nodes computed once per n by Newton on Legendre polynomials
  static thread_local int cached_n = -1;
  static thread_local std::vector<double> xs, ws;
  if (cached_n != n) {
    xs.assign(n, 0.0);
    ws.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      xs[i] = x;
      ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    cached_n = n;
  }
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += ws[i] * f(mid + half * xs[i]);
  return half * s;
}

}  // namespace afemstop
