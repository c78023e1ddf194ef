#ifndef QST_BETHE_HPP
#define QST_BETHE_HPP

// Two-magnon propagation on the infinite chain from Bethe-ansatz states.
//
// Scattering states (real p1, p2):
//   psi(x1, x2) = e^{i(p1 x1 + p2 x2)} - e^{i theta(p1,p2)} e^{i(p2 x1 + p1 x2)}
// with tan(theta/2) = Delta sin((p1-p2)/2) / (cos((p1+p2)/2) - Delta cos((p1-p2)/2)).
// The minus sign is the one that satisfies the contact condition of the
// ordered-pair eigenproblem; (p1,p2) and (p2,p1) label the same state, so the
// full Brillouin zone carries the measure 1/(8 pi^2) with psi unnormalised.
//
// Bound states (Delta = 1, complex rapidities q +- i/2):
//   psi_q(x1, x2) = (q^2/(1+q^2))^{(x2-x1)/2} e^{i (x1+x2) atan(1/q)}
//   measure (1/2pi) dq |dp/dq| / q^2,  energy eps0 + 4J / (1 + q^2).
// The q-line is integrated through the angle P = 2 atan(1/q), the total
// momentum, on (-pi, pi): the weight becomes sin^2(P/2) and q = 0 maps to
// the regular endpoints P = +-pi.
//
// Pair amplitudes are stored in centre/separation coordinates
// Y = x1 + x2, d = x2 - x1 >= 1; the quadrature factorises along those axes so
// whole wave packets propagate by a handful of dense matrix products.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qst/chain.hpp"
#include "qst/quadrature.hpp"

namespace qst {

enum class TwoMagnonPart { bound, scattering, total };

inline std::string to_string(TwoMagnonPart p) {
  switch (p) {
    case TwoMagnonPart::bound: return "bound";
    case TwoMagnonPart::scattering: return "scattering";
    default: return "total";
  }
}

inline TwoMagnonPart two_magnon_part_from_string(const std::string& s) {
  if (s == "bound") return TwoMagnonPart::bound;
  if (s == "scattering") return TwoMagnonPart::scattering;
  if (s == "total") return TwoMagnonPart::total;
  throw std::invalid_argument("unknown two-magnon part '" + s + "' (expected bound|scattering|total)");
}

/// Which momentum domain the scattering continuum is integrated over.
enum class ScatteringMeasure {
  full_zone,              // [-pi, pi]^2, valid for Delta = 1 and Delta = 0
  restricted_experimental // [-phi, phi]^2 with phi = pi - acos(-Delta), |Delta| < 1 only
};

/// Raised when a quadrature estimate misses its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

struct ScatterPhase {
  double theta = 0.0;  // (-pi, pi]
  double p1 = 0.0;
  double p2 = 0.0;
  double delta = 0.0;
};

inline ScatterPhase theta_phase(double p1, double p2, double delta) {
  const double num = delta * std::sin(0.5 * (p1 - p2));
  const double den = std::cos(0.5 * (p1 + p2)) - delta * std::cos(0.5 * (p1 - p2));
  double theta = 0.0;
  if (num == 0.0) {
    theta = 0.0;
  } else if (den == 0.0) {
    theta = pi;
  } else {
    theta = 2.0 * std::atan(num / den);
  }
  return {theta, p1, p2, delta};
}

/// e^{i theta} in centre/relative momenta P = p1 + p2, k = (p1 - p2)/2; 1 at the 0/0 point.
inline cplx scattering_phase_factor(double P, double k, double delta) {
  const double num = delta * std::sin(k);
  const double den = std::cos(0.5 * P) - delta * std::cos(k);
  if (num == 0.0 && den == 0.0) return 1.0;
  const cplx z(den, num);
  return z / std::conj(z);
}

/// Unnormalised bound-state amplitude; q = 0 is the limit (zero for x2 > x1).
inline cplx bound_wavefunction(int x1, int x2, double q) {
  if (x1 >= x2) throw std::invalid_argument("bound_wavefunction: requires x1 < x2");
  if (q == 0.0) return 0.0;
  const double q2 = q * q;
  const double mag = std::pow(q2 / (1.0 + q2), 0.5 * (x2 - x1));
  return std::polar(mag, (x1 + x2) * std::atan(1.0 / q));
}

/// Window in Y = x1 + x2 and separation d = x2 - x1.
struct PairWindow {
  int y_min = 3;
  int y_max = 3;
  int d_max = 1;

  int ny() const { return y_max - y_min + 1; }
  bool contains(int x1, int x2) const {
    const int y = x1 + x2, d = x2 - x1;
    return d >= 1 && d <= d_max && y >= y_min && y <= y_max;
  }
};

/// Amplitudes on ordered pairs x1 < x2 of the integer line.
class PairField {
 public:
  PairField() = default;
  explicit PairField(PairWindow w) : window_(w), data_(Eigen::MatrixXcd::Zero(w.ny(), w.d_max)) {
    if (w.ny() < 1 || w.d_max < 1) throw std::invalid_argument("PairField: empty window");
  }

  const PairWindow& window() const { return window_; }
  Eigen::MatrixXcd& data() { return data_; }
  const Eigen::MatrixXcd& data() const { return data_; }

  bool contains(int x1, int x2) const { return window_.contains(x1, x2); }

  cplx& at(int x1, int x2) {
    if (!contains(x1, x2)) throw std::out_of_range("PairField: pair outside window");
    return data_(x1 + x2 - window_.y_min, x2 - x1 - 1);
  }
  cplx at(int x1, int x2) const {
    if (!contains(x1, x2)) return 0.0;
    return data_(x1 + x2 - window_.y_min, x2 - x1 - 1);
  }

  template <class F>
  void for_each(F&& f) const {
    for (int r = 0; r < data_.rows(); ++r) {
      const int y = window_.y_min + r;
      for (int c = 0; c < data_.cols(); ++c) {
        const int d = c + 1;
        if ((y + d) % 2 != 0) continue;
        const cplx v = data_(r, c);
        if (v != cplx(0.0)) f((y - d) / 2, (y + d) / 2, v);
      }
    }
  }

  double norm2() const {
    double s = 0.0;
    for_each([&](int, int, cplx v) { s += std::norm(v); });
    return s;
  }

  /// Smallest window holding every non-zero amplitude.
  PairWindow support() const {
    PairWindow w{std::numeric_limits<int>::max(), std::numeric_limits<int>::min(), 0};
    for_each([&](int x1, int x2, cplx) {
      w.y_min = std::min(w.y_min, x1 + x2);
      w.y_max = std::max(w.y_max, x1 + x2);
      w.d_max = std::max(w.d_max, x2 - x1);
    });
    if (w.d_max == 0) return {3, 3, 1};
    return w;
  }

 private:
  PairWindow window_{};
  Eigen::MatrixXcd data_;
};

struct QuadratureOptions {
  int order = 16;               // Gauss nodes per oscillation panel
  int graded_order = 10;        // Gauss nodes per refinement panel
  double phase_per_panel = 5.0; // maximum phase advance across one panel
  double min_panel = 1e-5;      // smallest refinement panel at the singular lines
  bool estimate_error = true;   // re-run at lower order and report the difference
  double tolerance = 1e-3;      // bound on the estimate; exceeding it raises ConvergenceError
  ScatteringMeasure measure = ScatteringMeasure::full_zone;
};

struct PropagationResult {
  PairField field;
  double error_estimate = 0.0;
  std::size_t nodes = 0;
};

/// Two-magnon propagator on the infinite line for fixed couplings (J, Delta).
class TwoMagnonBethe {
 public:
  TwoMagnonBethe(double j, double delta, QuadratureOptions opts = {}) : j_(j), delta_(delta), opts_(opts) {
    if (!(j > 0.0)) throw std::invalid_argument("TwoMagnonBethe: J must be > 0");
  }

  double j() const { return j_; }
  double delta() const { return delta_; }
  const QuadratureOptions& options() const { return opts_; }

  static bool has_bound_states(double delta) { return delta == 1.0; }

  /// U(tau) restricted to the selected part, applied to source, sampled on target.
  /// eps0 is the reference (all-up) energy whose phase the result carries.
  PropagationResult propagate(const PairField& source, double tau, TwoMagnonPart part,
                              const PairWindow& target, double eps0 = 0.0) const {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("two-magnon: tau must be >= 0");
    PropagationResult res{PairField(target), 0.0, 0};
    const PairWindow src = source.support();
    const bool with_bound = part != TwoMagnonPart::scattering;
    const bool with_scatter = part != TwoMagnonPart::bound;
    if (with_bound && !has_bound_states(delta_) && delta_ != 0.0)
      throw std::invalid_argument("bound-state part is only implemented for Delta = 1 (none exist at Delta = 0)");
    if (opts_.measure == ScatteringMeasure::restricted_experimental && with_scatter &&
        !(std::abs(delta_) < 1.0))
      throw std::invalid_argument("restricted scattering measure requires |Delta| < 1");

    auto run = [&](int order, int graded) {
      Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(target.ny(), target.d_max);
      std::size_t nodes = 0;
      if (with_bound && has_bound_states(delta_)) nodes += add_bound(source, src, tau, target, order, graded, out);
      if (with_scatter) nodes += add_scattering(source, src, tau, target, order, graded, out);
      return std::pair{out, nodes};
    };

    auto [main, nodes] = run(opts_.order, opts_.graded_order);
    res.nodes = nodes;
    if (opts_.estimate_error) {
      auto [coarse, unused] = run(std::max(4, opts_.order - 4), std::max(4, opts_.graded_order - 3));
      (void)unused;
      res.error_estimate = (main - coarse).cwiseAbs().maxCoeff();
      if (res.error_estimate > opts_.tolerance)
        throw ConvergenceError("two-magnon quadrature did not reach tolerance " +
                                   std::to_string(opts_.tolerance),
                               res.error_estimate);
    }
    const cplx phase = std::polar(1.0, -eps0 * tau);
    res.field.data() = main * phase;
    // Cells with Y + d odd are not lattice pairs.
    for (int r = 0; r < target.ny(); ++r)
      for (int c = 0; c < target.d_max; ++c)
        if ((target.y_min + r + c + 1) % 2 != 0) res.field.data()(r, c) = 0.0;
    return res;
  }

 private:
  struct Spread {
    double dy = 0.0;  // largest |Y_target - Y_source|
    double dd = 0.0;  // largest d_source + d_target
  };

  static Spread spread(const PairWindow& s, const PairWindow& t) {
    Spread sp;
    sp.dy = std::max(std::abs(double(t.y_max - s.y_min)), std::abs(double(t.y_min - s.y_max)));
    sp.dd = double(s.d_max + t.d_max);
    return sp;
  }

  // Breakpoints on [-half, half] with panels no wider than max_width and
  // geometric refinement towards each focus point.
  std::vector<double> breaks(double half, double max_width, const std::vector<double>& foci) const {
    std::vector<double> b;
    const int base = std::max(2, static_cast<int>(std::ceil(2.0 * half / max_width)));
    for (int i = 0; i <= base; ++i) b.push_back(-half + 2.0 * half * i / base);
    for (double f : foci) {
      b.push_back(f);
      for (double w = std::min(max_width, half); w > opts_.min_panel; w *= 0.5) {
        if (f - w > -half) b.push_back(f - w);
        if (f + w < half) b.push_back(f + w);
      }
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double a, double c) { return std::abs(a - c) < 1e-14; }),
            b.end());
    return b;
  }

  // Panels on the refined region use the graded order, the rest the main order.
  Rule1D rule(const std::vector<double>& b, int order, int graded, double coarse_width) const {
    Rule1D r;
    for (std::size_t p = 0; p + 1 < b.size(); ++p) {
      const double width = b[p + 1] - b[p];
      const int o = width < 0.6 * coarse_width ? graded : order;
      const auto& gl = gauss_legendre(o);
      const double mid = 0.5 * (b[p] + b[p + 1]), half = 0.5 * width;
      for (int i = 0; i < o; ++i) {
        r.x.push_back(mid + half * gl.nodes[i]);
        r.w.push_back(half * gl.weights[i]);
      }
    }
    return r;
  }

  // Symmetrise a rule about 0 so that node j and node size-1-j are negatives.
  static Rule1D symmetrised(const Rule1D& r) {
    Rule1D s = r;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
      const double x = 0.5 * (s.x[n - 1 - i] - s.x[i]);
      const double w = 0.5 * (s.w[i] + s.w[n - 1 - i]);
      s.x[i] = -x;
      s.x[n - 1 - i] = x;
      s.w[i] = s.w[n - 1 - i] = w;
    }
    if (n % 2) s.x[n / 2] = 0.0;
    return s;
  }

  // Phase matrices e^{sign * i * P * Y / 2} (rows Y) and e^{sign * i * k * d} (rows d).
  static Eigen::MatrixXcd centre_phase(const PairWindow& w, const Rule1D& r, double sign) {
    Eigen::MatrixXcd m(w.ny(), r.size());
    for (int a = 0; a < w.ny(); ++a)
      for (std::size_t i = 0; i < r.size(); ++i)
        m(a, i) = std::polar(1.0, sign * 0.5 * r.x[i] * (w.y_min + a));
    return m;
  }

  static Eigen::MatrixXcd relative_phase(int d_max, const Rule1D& r, double sign) {
    Eigen::MatrixXcd m(d_max, r.size());
    for (int d = 1; d <= d_max; ++d)
      for (std::size_t j = 0; j < r.size(); ++j) m(d - 1, j) = std::polar(1.0, sign * r.x[j] * d);
    return m;
  }

  static Eigen::MatrixXcd source_matrix(const PairField& source, const PairWindow& s) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(s.ny(), s.d_max);
    source.for_each([&](int x1, int x2, cplx v) { m(x1 + x2 - s.y_min, x2 - x1 - 1) += v; });
    return m;
  }

  std::size_t add_scattering(const PairField& source, const PairWindow& s, double tau,
                             const PairWindow& t, int order, int graded, Eigen::MatrixXcd& out) const {
    if (opts_.measure == ScatteringMeasure::restricted_experimental)
      return add_scattering_restricted(source, s, tau, t, order, out);

    const Spread sp = spread(s, t);
    const double wp = 0.5 * sp.dy + 4.0 * j_ * tau + 1.0;  // max |d phase / dP|
    const double wk = sp.dd + 8.0 * j_ * tau + 1.0;        // max |d phase / dk|
    std::vector<double> pfoci, kfoci;
    if (delta_ != 0.0 && std::abs(delta_) <= 1.0) {
      // e^{i theta} is direction dependent where sin k = 0 and cos(P/2) = Delta cos k.
      const double ps = 2.0 * std::acos(std::clamp(delta_, -1.0, 1.0));
      pfoci.push_back(ps);
      if (ps != 0.0) pfoci.push_back(-ps);
      kfoci.push_back(0.0);
    }
    std::erase_if(pfoci, [](double f) { return std::abs(f) > pi; });
    const double wpan_p = std::min(opts_.phase_per_panel / wp, pi / 2);
    const double wpan_k = std::min(opts_.phase_per_panel / wk, pi / 2);
    const Rule1D rp = rule(breaks(pi, wpan_p, pfoci), order, graded, wpan_p);
    const Rule1D rk = symmetrised(rule(breaks(pi, wpan_k, kfoci), order, graded, wpan_k));
    const auto np = static_cast<Eigen::Index>(rp.size());
    const auto nk = static_cast<Eigen::Index>(rk.size());

    const Eigen::MatrixXcd src = source_matrix(source, s);
    // A(P,k) = sum_s Phi(s) e^{i P Y/2} e^{-i k d}
    const Eigen::MatrixXcd a = centre_phase(s, rp, +1.0).transpose() * src * relative_phase(s.d_max, rk, -1.0);

    Eigen::MatrixXcd c(np, nk), cs(np, nk);
    const double norm = 1.0 / (8.0 * pi * pi);
    for (Eigen::Index i = 0; i < np; ++i) {
      const double P = rp.x[i];
      const double cp = std::cos(0.5 * P);
      for (Eigen::Index jj = 0; jj < nk; ++jj) {
        const double k = rk.x[jj];
        const cplx sfac = scattering_phase_factor(P, k, delta_);
        const cplx amp = a(i, jj) - sfac * a(i, nk - 1 - jj);
        const double e = 8.0 * j_ * delta_ - 8.0 * j_ * cp * std::cos(k);
        const cplx v = norm * rp.w[i] * rk.w[jj] * amp * std::polar(1.0, -e * tau);
        c(i, jj) = v;
        cs(i, jj) = v * std::conj(sfac);
      }
    }
    const Eigen::MatrixXcd gp = centre_phase(t, rp, -1.0);
    out += gp * c * relative_phase(t.d_max, rk, +1.0).transpose();
    out -= gp * cs * relative_phase(t.d_max, rk, -1.0).transpose();
    return static_cast<std::size_t>(np * nk);
  }

  // Literal restricted-range continuum over (p1, p2) in [-phi, phi]^2.
  std::size_t add_scattering_restricted(const PairField& source, const PairWindow& s, double tau,
                                        const PairWindow& t, int order, Eigen::MatrixXcd& out) const {
    const double phi = pi - std::acos(-delta_);
    const Spread sp = spread(s, t);
    const double w = 0.5 * (sp.dy + sp.dd) + 4.0 * j_ * tau + 1.0;
    const double width = std::min(opts_.phase_per_panel / w, phi);
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * phi / width)));
    std::vector<double> b;
    for (int i = 0; i <= panels; ++i) b.push_back(-phi + 2.0 * phi * i / panels);
    const Rule1D r = composite_rule(b, order);
    std::vector<std::pair<int, int>> tgt;
    for (int y = t.y_min; y <= t.y_max; ++y)
      for (int d = 1; d <= t.d_max; ++d)
        if ((y + d) % 2 == 0) tgt.emplace_back((y - d) / 2, (y + d) / 2);
    const double norm = 1.0 / (8.0 * phi * phi);
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t jj = 0; jj < r.size(); ++jj) {
        const double p1 = r.x[i], p2 = r.x[jj];
        const cplx sfac = scattering_phase_factor(p1 + p2, 0.5 * (p1 - p2), delta_);
        auto psi = [&](int x1, int x2) {
          return std::polar(1.0, p1 * x1 + p2 * x2) - sfac * std::polar(1.0, p2 * x1 + p1 * x2);
        };
        cplx amp = 0.0;
        source.for_each([&](int x1, int x2, cplx v) { amp += v * psi(x1, x2); });
        const double e = 4.0 * j_ * (2.0 * delta_ - std::cos(p1) - std::cos(p2));
        const cplx coef = norm * r.w[i] * r.w[jj] * amp * std::polar(1.0, -e * tau);
        for (auto [x1, x2] : tgt) out(x1 + x2 - t.y_min, x2 - x1 - 1) += coef * std::conj(psi(x1, x2));
      }
    }
    (void)s;
    return r.size() * r.size();
  }

  std::size_t add_bound(const PairField& source, const PairWindow& s, double tau, const PairWindow& t,
                        int order, int graded, Eigen::MatrixXcd& out) const {
    const Spread sp = spread(s, t);
    const double wp = 0.5 * sp.dy + 2.0 * j_ * tau + 1.0;
    const double width = std::min(opts_.phase_per_panel / wp, pi / 2);
    const Rule1D rp = rule(breaks(pi, width, {0.0}), order, graded, width);
    const auto np = static_cast<Eigen::Index>(rp.size());

    // c^{d-1} with c = cos(P/2) >= 0 on (-pi, pi).
    auto powers = [&](int dmax) {
      Eigen::MatrixXd m(dmax, np);
      for (Eigen::Index i = 0; i < np; ++i) {
        const double c = std::cos(0.5 * rp.x[i]);
        double v = 1.0;
        for (int d = 1; d <= dmax; ++d) {
          m(d - 1, i) = v;
          v *= c;
        }
      }
      return m;
    };
    const Eigen::MatrixXcd src = source_matrix(source, s);
    const Eigen::MatrixXcd fs = centre_phase(s, rp, +1.0);
    const Eigen::MatrixXcd m1 = src * powers(s.d_max).cast<cplx>();
    Eigen::VectorXcd coef(np);
    for (Eigen::Index i = 0; i < np; ++i) {
      const double P = rp.x[i];
      const double sh = std::sin(0.5 * P);
      const cplx b = (fs.col(i).array() * m1.col(i).array()).sum();
      const double e = 4.0 * j_ * sh * sh;
      coef[i] = rp.w[i] * sh * sh / (2.0 * pi) * b * std::polar(1.0, -e * tau);
    }
    out += centre_phase(t, rp, -1.0) * coef.asDiagonal() * powers(t.d_max).cast<cplx>().transpose();
    return static_cast<std::size_t>(np);
  }

  double j_;
  double delta_;
  QuadratureOptions opts_;
};

struct Green2Value {
  cplx value;
  std::pair<int, int> source;
  std::pair<int, int> target;
  double t = 0.0;
  TwoMagnonPart part = TwoMagnonPart::total;
  double error_estimate = 0.0;
};

namespace detail {

inline std::pair<int, int> ordered_pair(int a, int b) {
  if (a == b) throw std::invalid_argument("two-magnon pair needs distinct sites");
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

inline Green2Value green2_part(int x1, int x2, int y1, int y2, double t, const ChainSpec& spec,
                               TwoMagnonPart part, QuadratureOptions opts) {
  if (spec.boundary != Boundary::closed)
    throw std::invalid_argument("two-magnon Bethe propagator is defined for closed/infinite chains");
  const auto s = ordered_pair(x1, x2);
  const auto g = ordered_pair(y1, y2);
  PairField src(PairWindow{s.first + s.second, s.first + s.second, s.second - s.first});
  src.at(s.first, s.second) = 1.0;
  const PairWindow tw{g.first + g.second, g.first + g.second, g.second - g.first};
  const ChainSpec ms = spec.magnon_spec();
  TwoMagnonBethe engine(ms.j, ms.delta, opts);
  auto r = engine.propagate(src, t, part, tw, ms.ground_energy());
  return {r.field.at(g.first, g.second), s, g, t, part, r.error_estimate};
}

}  // namespace detail

/// Infinite-chain two-magnon Green's function, bound-state part (Delta = 1).
inline Green2Value green2_bound(int x1, int x2, int y1, int y2, double t, const ChainSpec& spec,
                                QuadratureOptions opts = {}) {
  return detail::green2_part(x1, x2, y1, y2, t, spec, TwoMagnonPart::bound, opts);
}

inline Green2Value green2_scattering(int x1, int x2, int y1, int y2, double t, const ChainSpec& spec,
                                     QuadratureOptions opts = {}) {
  return detail::green2_part(x1, x2, y1, y2, t, spec, TwoMagnonPart::scattering, opts);
}

inline Green2Value green2(int x1, int x2, int y1, int y2, double t, const ChainSpec& spec,
                          QuadratureOptions opts = {}) {
  return detail::green2_part(x1, x2, y1, y2, t, spec, TwoMagnonPart::total, opts);
}

}  // namespace qst

#endif  // QST_BETHE_HPP
