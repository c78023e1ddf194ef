#ifndef QST_GREEN1_HPP
#define QST_GREEN1_HPP

// One-magnon propagators G^{x'}_x(t) = <x'| exp(-iHt) |x>.
//
// The propagator is the full matrix element, so it carries exp(-i eps0 t);
// the fidelity formulas multiply by exp(+i eps0 t) where the relative phase
// between the vacuum and the one-magnon sector enters.
//
// Two evaluation routes:
//   momentum_sum  spectral sum over the exact one-magnon eigenmodes
//                 (plane waves on rings, sine modes for open Delta = 0,
//                 cosine modes for open Delta = 1, tridiagonal eigensolve
//                 otherwise).
//   bessel        i^d J_d(4 J t) line propagator plus the image sum that
//                 folds it onto the finite chain (period N on rings,
//                 Dirichlet walls for open Delta = 0, reflecting walls for
//                 open Delta = 1).

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qst/bessel.hpp"
#include "qst/chain.hpp"

namespace qst {

enum class Green1Method { bessel, momentum_sum };

struct Green1Value {
  cplx value;
  int source = 0;
  int target = 0;
  double t = 0.0;
  Green1Method method = Green1Method::momentum_sum;
};

namespace detail {

inline cplx i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
}

// Image offsets relative to the source for the finite-chain fold of the line propagator.
struct ImageRule {
  int period = 0;          // 0: no periodic images (semi-infinite chain)
  bool mirrored = false;   // open chains: a second family of mirrored images
  int mirror_offset = 0;   // mirrored image of x sits at mirror_offset - x
  double mirror_sign = 1.0;
};

inline ImageRule image_rule(const ChainSpec& spec) {
  if (spec.boundary == Boundary::closed) return {spec.n, false, 0, 1.0};
  if (spec.boundary == Boundary::semi_infinite) {
    if (spec.delta == 0.0 || spec.model == MagnonModel::bare_hopping) return {0, true, 0, -1.0};
    if (spec.delta == 1.0) return {0, true, 1, 1.0};
    throw std::invalid_argument("semi-infinite chains are only available for Delta in {0, 1} or the bare-hopping model");
  }
  if (spec.delta == 0.0 || spec.model == MagnonModel::bare_hopping) return {2 * (spec.n + 1), true, 0, -1.0};
  if (spec.delta == 1.0) return {2 * spec.n, true, 1, 1.0};
  throw std::invalid_argument(
      "Bessel form is only available for closed chains and open chains with Delta in {0, 1}");
}

}  // namespace detail

/// Exact one-magnon sector eigenmodes of a finite chain.
class OneMagnonModes {
 public:
  explicit OneMagnonModes(const ChainSpec& spec) : spec_(spec) {
    spec_.validate();
    spec_.require_finite("mode expansion");
    const int n = spec_.n;
    const bool bare = spec_.model == MagnonModel::bare_hopping;
    const double eps0 = bare ? 0.0 : spec_.ground_energy();
    const double j = spec_.j;
    const double d = bare ? 0.0 : spec_.delta;
    modes_.resize(n, n);
    energies_.resize(n);
    if (spec_.boundary == Boundary::closed) {
      for (int k = 0; k < n; ++k) {
        const double p = 2.0 * pi * (k + 1) / n;
        energies_[k] = eps0 + 4.0 * j * (d - std::cos(p));
        for (int x = 1; x <= n; ++x) modes_(x - 1, k) = std::polar(1.0 / std::sqrt(double(n)), p * x);
      }
    } else if (d == 0.0) {
      for (int k = 0; k < n; ++k) {
        const double p = pi * (k + 1) / (n + 1);
        energies_[k] = eps0 - 4.0 * j * std::cos(p);
        for (int x = 1; x <= n; ++x) modes_(x - 1, k) = std::sqrt(2.0 / (n + 1)) * std::sin(p * x);
      }
    } else if (d == 1.0) {
      // Open isotropic chain: the sector Hamiltonian is eps0 + 2J x (path Laplacian).
      for (int k = 0; k < n; ++k) {
        const double p = pi * k / n;
        energies_[k] = eps0 + 4.0 * j * (1.0 - std::cos(p));
        const double a = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (int x = 1; x <= n; ++x) modes_(x - 1, k) = a * std::cos(p * (x - 0.5));
      }
    } else {
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
      for (int x = 0; x < n; ++x) h(x, x) = eps0 + ((x == 0 || x == n - 1) ? 2.0 : 4.0) * j * d;
      for (int x = 0; x + 1 < n; ++x) h(x, x + 1) = h(x + 1, x) = -2.0 * j;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      energies_ = es.eigenvalues();
      modes_ = es.eigenvectors().cast<cplx>();
    }
  }

  const ChainSpec& spec() const { return spec_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::MatrixXcd& modes() const { return modes_; }

  /// U(t) applied to an amplitude vector over sites 1..N (index 0 = site 1).
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& amps, double t) const {
    detail::check_time(t);
    Eigen::VectorXcd c = modes_.adjoint() * amps;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -energies_[k] * t);
    return modes_ * c;
  }

  Eigen::VectorXcd column(int source, double t) const {
    spec_.check_site(source);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(spec_.n);
    e[source - 1] = 1.0;
    return evolve(e, t);
  }

  cplx amplitude(int source, int target, double t) const {
    spec_.check_site(source);
    spec_.check_site(target);
    detail::check_time(t);
    cplx sum = 0.0;
    for (int k = 0; k < spec_.n; ++k)
      sum += modes_(source - 1, k) * std::conj(modes_(target - 1, k)) *
             std::polar(1.0, -energies_[k] * t);
    return sum;
  }

  /// Full N x N propagator, element (x', x) = G^{x'}_x(t).
  Eigen::MatrixXcd matrix(double t) const {
    detail::check_time(t);
    Eigen::VectorXcd ph(spec_.n);
    for (int k = 0; k < spec_.n; ++k) ph[k] = std::polar(1.0, -energies_[k] * t);
    return modes_ * ph.asDiagonal() * modes_.adjoint();
  }

 private:
  ChainSpec spec_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd modes_;
};

namespace detail {

/// G^{x'}_x(t) for x' = 1..rows; on semi-infinite chains rows and source may exceed N.
inline Eigen::VectorXcd bessel_column_window(int source, double t, const ChainSpec& spec, int rows) {
  spec.validate();
  if (source < 1 || (spec.finite() && source > spec.n)) spec.check_site(source);
  if (rows < 1 || (spec.finite() && rows > spec.n)) throw std::out_of_range("bessel column: bad row count");
  check_time(t);
  const auto rule = image_rule(spec);
  const double arg = 4.0 * spec.j * t;
  const int kmax = bessel_truncation_order(arg);
  const auto jn = bessel_j_sequence(kmax, arg);
  auto line = [&](long d) -> cplx {
    const long a = d < 0 ? -d : d;
    if (a > kmax) return 0.0;
    return i_pow(static_cast<int>(a % 4)) * jn[static_cast<std::size_t>(a)];
  };

  const int n = rows;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  const long period = rule.period;
  for (int xp = 1; xp <= n; ++xp) {
    cplx sum = 0.0;
    // Images x + w*period within the truncation window of x'.
    auto images = [&](long base) {
      if (period == 0) return line(base);
      const long wlo = static_cast<long>(std::floor(double(base - kmax) / period));
      const long whi = static_cast<long>(std::ceil(double(base + kmax) / period));
      cplx acc = 0.0;
      for (long w = wlo; w <= whi; ++w) acc += line(base - w * period);
      return acc;
    };
    sum += images(xp - source);
    if (rule.mirrored) sum += rule.mirror_sign * images(xp - (rule.mirror_offset - source));
    out[xp - 1] = sum;
  }
  const double offset =
      spec.model == MagnonModel::bare_hopping ? 0.0 : spec.ground_energy() + 4.0 * spec.j * spec.delta;
  return out * std::polar(1.0, -offset * t);
}

}  // namespace detail

/// Bessel-image propagator column: G^{x'}_x(t) for all x' (index 0 = site 1).
inline Eigen::VectorXcd green1_bessel_column(int source, double t, const ChainSpec& spec) {
  spec.check_site(source);
  return detail::bessel_column_window(source, t, spec, spec.n);
}

inline Green1Value green1(int x, int xp, double t, const ChainSpec& spec,
                          Green1Method method = Green1Method::momentum_sum) {
  spec.validate();
  spec.check_site(x);
  spec.check_site(xp);
  detail::check_time(t);
  if (!spec.finite()) method = Green1Method::bessel;
  Green1Value v{{}, x, xp, t, method};
  if (method == Green1Method::bessel) {
    v.value = green1_bessel_column(x, t, spec)[xp - 1];
  } else {
    v.value = OneMagnonModes(spec).amplitude(x, xp, t);
  }
  return v;
}

}  // namespace qst

#endif  // QST_GREEN1_HPP
