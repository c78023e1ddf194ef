#ifndef QST_HARPER_HPP
#define QST_HARPER_HPP

// Kicked Harper dynamics in the span of the empty chain and one particle.
//
// One period: U = exp(-i tau T) exp(-i tau g V), T_{j,j+1} = T_{j+1,j} = 1
// (plus the 1-N bond on rings), V_j = cos(2 pi j eta / N). The empty chain
// has energy 0, so it picks up no phase. States are sampled just after a
// kick, t = n tau.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qst/chain.hpp"

namespace qst {

struct HarperSpec {
  int n = 100;
  double g = 1.0;
  double eta = std::numbers::sqrt2;
  double tau = 0.1;
  Boundary boundary = Boundary::open;

  void validate() const {
    if (n < 2) throw std::invalid_argument("HarperSpec: N must be >= 2");
    if (boundary == Boundary::semi_infinite) throw std::invalid_argument("HarperSpec: boundary must be open or closed");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("HarperSpec: tau must be > 0");
    if (!std::isfinite(g) || !std::isfinite(eta)) throw std::invalid_argument("HarperSpec: g and eta must be finite");
  }
};

/// One kick period acting on the one-particle amplitudes.
struct FloquetStep {
  Eigen::MatrixXcd u;

  double unitarity_defect() const {
    return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  }
};

/// exp(-i s T) from the analytic eigenmodes of the hopping matrix.
inline Eigen::MatrixXcd hopping_exponential(int n, Boundary b, double s) {
  Eigen::MatrixXcd out(n, n);
  if (b == Boundary::closed) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        cplx sum = 0.0;
        for (int k = 0; k < n; ++k) {
          const double p = 2.0 * pi * k / n;
          sum += std::polar(1.0, p * (x - y) - 2.0 * s * std::cos(p));
        }
        out(x, y) = sum / double(n);
      }
    return out;
  }
  Eigen::MatrixXd modes(n, n);
  Eigen::VectorXcd ph(n);
  for (int k = 1; k <= n; ++k) {
    const double p = pi * k / (n + 1);
    ph[k - 1] = std::polar(1.0, -2.0 * s * std::cos(p));
    for (int x = 1; x <= n; ++x) modes(x - 1, k - 1) = std::sqrt(2.0 / (n + 1)) * std::sin(p * x);
  }
  const Eigen::MatrixXcd m = modes.cast<cplx>();
  return m * ph.asDiagonal() * m.transpose();
}

inline Eigen::VectorXd harper_potential(const HarperSpec& spec) {
  Eigen::VectorXd v(spec.n);
  for (int j = 1; j <= spec.n; ++j) v[j - 1] = std::cos(2.0 * pi * j * spec.eta / spec.n);
  return v;
}

inline FloquetStep floquet_step(const HarperSpec& spec) {
  spec.validate();
  const Eigen::VectorXd v = harper_potential(spec);
  Eigen::VectorXcd kick(spec.n);
  for (int j = 0; j < spec.n; ++j) kick[j] = std::polar(1.0, -spec.tau * spec.g * v[j]);
  return {hopping_exponential(spec.n, spec.boundary, spec.tau) * kick.asDiagonal()};
}

/// alpha |empty> + sum_j a_j |j>.
struct HarperState {
  cplx vacuum = 0.0;
  Eigen::VectorXcd amps;

  double norm2() const { return std::norm(vacuum) + amps.squaredNorm(); }
};

inline HarperState harper_initial(const HarperSpec& spec, const InitialState& in) {
  in.validate();
  HarperState s{in.alpha, Eigen::VectorXcd::Zero(spec.n)};
  s.amps[0] = in.beta;
  return s;
}

/// States after 0..kicks periods.
inline std::vector<HarperState> propagate_series(const HarperSpec& spec, int kicks, const InitialState& in) {
  if (kicks < 0) throw std::invalid_argument("propagate: kicks must be >= 0");
  const FloquetStep step = floquet_step(spec);
  std::vector<HarperState> out;
  out.reserve(static_cast<std::size_t>(kicks) + 1);
  out.push_back(harper_initial(spec, in));
  for (int k = 1; k <= kicks; ++k) out.push_back({out.back().vacuum, step.u * out.back().amps});
  return out;
}

inline HarperState propagate(const HarperSpec& spec, int kicks, const InitialState& in) {
  return propagate_series(spec, kicks, in).back();
}

/// Number measurement at site m after n0 kicks, read out after n kicks.
struct HarperQdpResult {
  Eigen::VectorXd x;        // occupations without the interruption
  Eigen::VectorXd x_tilde;  // with it
  Eigen::VectorXcd y_tilde; // <0| rho_l |1> with it
  Eigen::VectorXd f;        // detector x_tilde - x
  Eigen::VectorXd fidelity; // per-state fidelity with the interruption
  Eigen::VectorXd averaged; // Bloch-averaged fidelity with the interruption
  int n = 0;
  int n0 = 0;
  int m = 1;
};

namespace detail {

struct HarperBranches {
  Eigen::VectorXcd free, survive, collapse;  // unit-beta amplitudes after n kicks
};

inline HarperBranches harper_branches(const FloquetStep& step, int n_sites, int m, int n0, int n) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n_sites);
  a[0] = 1.0;
  for (int k = 0; k < n0; ++k) a = step.u * a;
  Eigen::VectorXcd survive = a, collapse = Eigen::VectorXcd::Zero(n_sites), free = a;
  survive[m - 1] = 0.0;
  collapse[m - 1] = a[m - 1];
  for (int k = n0; k < n; ++k) {
    survive = step.u * survive;
    collapse = step.u * collapse;
    free = step.u * free;
  }
  return {free, survive, collapse};
}

}  // namespace detail

inline HarperQdpResult qdp_and_detect(const HarperSpec& spec, int m, int n0, int n, const InitialState& in) {
  spec.validate();
  in.validate();
  if (m < 1 || m > spec.n) throw std::out_of_range("qdp site outside chain");
  if (n0 < 0 || n < n0) throw std::invalid_argument("qdp: need 0 <= n0 <= n");
  const FloquetStep step = floquet_step(spec);
  const auto br = detail::harper_branches(step, spec.n, m, n0, n);
  const double b2 = std::norm(in.beta), a2 = std::norm(in.alpha);
  HarperQdpResult r;
  r.n = n;
  r.n0 = n0;
  r.m = m;
  r.x = b2 * br.free.cwiseAbs2();
  r.x_tilde = b2 * (br.survive.cwiseAbs2() + br.collapse.cwiseAbs2());
  r.y_tilde = in.alpha * std::conj(in.beta) * br.survive.conjugate();
  r.f = r.x_tilde - r.x;
  r.fidelity.resize(spec.n);
  r.averaged.resize(spec.n);
  for (int l = 0; l < spec.n; ++l) {
    r.fidelity[l] = a2 * (1.0 - r.x_tilde[l]) + b2 * r.x_tilde[l] + 2.0 * (std::conj(in.alpha) * in.beta * r.y_tilde[l]).real();
    r.averaged[l] = 0.5 + (std::norm(br.survive[l]) + std::norm(br.collapse[l])) / 6.0 + br.survive[l].real() / 3.0;
  }
  return r;
}

/// Per-state and averaged fidelity of the uninterrupted dynamics after n kicks.
inline Eigen::VectorXd harper_fidelity(const HarperState& s, const InitialState& in) {
  Eigen::VectorXd f(s.amps.size());
  for (Eigen::Index l = 0; l < s.amps.size(); ++l) {
    const double x = std::norm(s.amps[l]);
    const cplx y = s.vacuum * std::conj(s.amps[l]);
    f[l] = std::norm(in.alpha) * (1.0 - x) + std::norm(in.beta) * x + 2.0 * (std::conj(in.alpha) * in.beta * y).real();
  }
  return f;
}

inline Eigen::VectorXd harper_fidelity_averaged(const Eigen::VectorXcd& unit_amps) {
  Eigen::VectorXd f(unit_amps.size());
  for (Eigen::Index l = 0; l < unit_amps.size(); ++l)
    f[l] = 0.5 + std::norm(unit_amps[l]) / 6.0 + unit_amps[l].real() / 3.0;
  return f;
}

/// Participation width 1 / sum p^2 of a non-negative profile.
inline double spread_metric(const Eigen::VectorXd& profile) {
  const double s = profile.sum();
  if (!(s > 0.0) || (profile.array() < 0.0).any()) throw std::invalid_argument("spread_metric: profile must be non-negative and non-zero");
  const Eigen::VectorXd p = profile / s;
  return 1.0 / p.squaredNorm();
}

/// First kick count at which |f_l| exceeds the threshold, or -1.
inline int first_passage(const HarperSpec& spec, int m, int n0, int l, int max_kicks, double threshold,
                         const InitialState& in) {
  const FloquetStep step = floquet_step(spec);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(spec.n);
  a[0] = 1.0;
  for (int k = 0; k < n0; ++k) a = step.u * a;
  Eigen::VectorXcd survive = a, collapse = Eigen::VectorXcd::Zero(spec.n), free = a;
  survive[m - 1] = 0.0;
  collapse[m - 1] = a[m - 1];
  const double b2 = std::norm(in.beta);
  for (int k = n0; k <= max_kicks; ++k) {
    const double f = b2 * (std::norm(survive[l - 1]) + std::norm(collapse[l - 1]) - std::norm(free[l - 1]));
    if (std::abs(f) > threshold) return k;
    survive = step.u * survive;
    collapse = step.u * collapse;
    free = step.u * free;
  }
  return -1;
}

}  // namespace qst

#endif  // QST_HARPER_HPP
