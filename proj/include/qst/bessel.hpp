#ifndef QST_BESSEL_HPP
#define QST_BESSEL_HPP

// Integer-order Bessel functions of the first kind via Miller's downward
// recurrence, normalised with J_0 + 2 sum_k J_2k = 1.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qst {

inline constexpr int kBesselMaxOrder = 100000;
inline constexpr double kBesselMaxArg = 1.0e5;

/// Order beyond which |J_n(y)| is below ~1e-16: ceil(y) + 40 + 10 ceil(y^(1/3)).
inline int bessel_truncation_order(double y) {
  y = std::abs(y);
  return static_cast<int>(std::ceil(y)) + 40 + 10 * static_cast<int>(std::ceil(std::cbrt(y)));
}

namespace detail {

inline void check_bessel_arg(double y) {
  if (!std::isfinite(y)) throw std::domain_error("bessel: non-finite argument");
  if (y < 0.0) throw std::domain_error("bessel: argument must be >= 0");
  if (y > kBesselMaxArg) throw std::domain_error("bessel: argument exceeds 1e5");
}

}  // namespace detail

/// J_0(y) .. J_nmax(y) for y >= 0.
inline std::vector<double> bessel_j_sequence(int nmax, double y) {
  detail::check_bessel_arg(y);
  if (nmax < 0) throw std::domain_error("bessel: negative maximum order");
  if (nmax > kBesselMaxOrder) throw std::domain_error("bessel: order exceeds 1e5");

  std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (y == 0.0) {
    out[0] = 1.0;
    return out;
  }

  int start = std::max(nmax, static_cast<int>(std::ceil(y))) + 40 +
              10 * static_cast<int>(std::ceil(std::cbrt(y)));
  if (start % 2) ++start;

  // Values are carried unnormalised; each rescale by kScale is counted so that
  // deep evanescent orders only flush to zero when they are below underflow.
  constexpr double kBig = 1.0e200;
  constexpr double kLogBig = 460.51701859880913680;  // ln(1e200)
  std::vector<double> raw(out.size(), 0.0);
  std::vector<int> shift_at(out.size(), 0);
  int shifts = 0;

  double above = 0.0;    // J_{k+1}
  double current = 1e-30;  // J_k
  double norm = 0.0;     // J_0 + 2 sum J_2k, in current units
  for (int k = start; k >= 0; --k) {
    if (k <= nmax) {
      raw[k] = current;
      shift_at[k] = shifts;
    }
    if (k % 2 == 0) norm += (k == 0 ? 1.0 : 2.0) * current;
    if (k == 0) break;
    const double below = (2.0 * k / y) * current - above;
    above = current;
    current = below;
    if (std::abs(current) > kBig) {
      current /= kBig;
      above /= kBig;
      norm /= kBig;
      ++shifts;
    }
  }

  const double log_norm = std::log(std::abs(norm));
  const double norm_sign = norm < 0.0 ? -1.0 : 1.0;
  for (int k = 0; k <= nmax; ++k) {
    const int d = shifts - shift_at[k];
    if (d == 0) {
      out[k] = raw[k] / norm;
    } else if (raw[k] != 0.0) {
      const double lg = std::log(std::abs(raw[k])) - log_norm - d * kLogBig;
      const double sign = (raw[k] < 0.0 ? -1.0 : 1.0) * norm_sign;
      out[k] = sign * std::exp(lg);
    }
  }
  return out;
}

/// J_n(y) for integer n (J_{-n} = (-1)^n J_n) and y >= 0.
inline double bessel_j(int order, double y) {
  detail::check_bessel_arg(y);
  const int n = std::abs(order);
  if (n > kBesselMaxOrder) throw std::domain_error("bessel: order exceeds 1e5");
  const double v = bessel_j_sequence(n, y)[n];
  return (order < 0 && (n % 2)) ? -v : v;
}

}  // namespace qst

#endif  // QST_BESSEL_HPP
