#ifndef QST_QUADRATURE_HPP
#define QST_QUADRATURE_HPP

// Gauss-Legendre nodes and composite (panelled) rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qst/chain.hpp"

namespace qst {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

namespace detail {

inline GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.assign(n, 0.0);
  gl.weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(pi * (i - 0.25) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    gl.nodes[i - 1] = -z;
    gl.nodes[n - i] = z;
    gl.weights[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    gl.weights[n - i] = gl.weights[i - 1];
  }
  return gl;
}

}  // namespace detail

inline constexpr int kMaxGaussOrder = 64;

/// Nodes/weights for 1 <= n <= 64, built once and shared read-only.
inline const GaussLegendre& gauss_legendre(int n) {
  if (n < 1 || n > kMaxGaussOrder) throw std::invalid_argument("gauss_legendre: order must be in 1..64");
  static const std::array<GaussLegendre, kMaxGaussOrder + 1> table = [] {
    std::array<GaussLegendre, kMaxGaussOrder + 1> t{};
    for (int k = 1; k <= kMaxGaussOrder; ++k) t[k] = detail::compute_gauss_legendre(k);
    return t;
  }();
  return table[n];
}

/// A 1-D rule: sum_i w_i f(x_i) approximates the integral over [lo, hi].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(0.0)) s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
    return s;
  }
};

/// Composite Gauss-Legendre rule on the given breakpoints (ascending).
inline Rule1D composite_rule(const std::vector<double>& breaks, int order) {
  const auto& gl = gauss_legendre(order);
  Rule1D r;
  r.x.reserve((breaks.size() - 1) * order);
  r.w.reserve((breaks.size() - 1) * order);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      r.x.push_back(mid + half * gl.nodes[i]);
      r.w.push_back(half * gl.weights[i]);
    }
  }
  return r;
}

/// Breakpoints on [-L, L] with panel width at most max_width, plus geometric
/// refinement towards 0 (ratio 1/2, down to min_width) on both sides.
inline std::vector<double> symmetric_graded_breaks(double half_range, double max_width, double min_width) {
  if (!(half_range > 0.0) || !(max_width > 0.0)) throw std::invalid_argument("graded breaks: bad widths");
  std::vector<double> pos;  // breakpoints in (0, half_range]
  double inner = half_range;
  if (min_width > 0.0) {
    inner = std::min(half_range, max_width);
    double b = inner;
    std::vector<double> geo;
    while (b > min_width) {
      geo.push_back(b);
      b *= 0.5;
    }
    geo.push_back(b);
    std::reverse(geo.begin(), geo.end());
    pos = geo;
  }
  const double outer = half_range - (min_width > 0.0 ? inner : 0.0);
  const int panels = std::max(1, static_cast<int>(std::ceil(outer / max_width - 1e-12)));
  const double start = min_width > 0.0 ? inner : 0.0;
  if (outer > 1e-15) {
    for (int k = 1; k <= panels; ++k) pos.push_back(start + outer * k / panels);
  }
  std::vector<double> breaks;
  breaks.reserve(2 * pos.size() + 1);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) breaks.push_back(-*it);
  breaks.push_back(0.0);
  for (double p : pos) breaks.push_back(p);
  return breaks;
}

}  // namespace qst

#endif  // QST_QUADRATURE_HPP
