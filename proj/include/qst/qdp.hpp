#ifndef QST_QDP_HPP
#define QST_QDP_HPP

// Transfer fidelities with and without an interruption at (m, t0).
//
// Every protocol is written as amplitudes linear in the input qubit,
// c(C) = alpha u(C) + beta v(C) over configurations C (vacuum, one magnon,
// two magnons); mixtures are lists of such branches. The Bloch average of
// <phi| rho_l |phi> is then
//   1/2 + (S_vv - S_uu)/6 + Re sum_C u(C) conj(v(C + l)) / 3,
// with S_ww = sum over configurations containing l of |w|^2, summed over
// branches. This reproduces the free, projective and unitary closed forms.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qst/bethe.hpp"
#include "qst/chain.hpp"
#include "qst/green1.hpp"
#include "qst/parallel.hpp"
#include "qst/two_magnon.hpp"

namespace qst {

struct RdmElements {
  double x = 0.0;  // <1| rho_l |1>
  cplx y = 0.0;    // <0| rho_l |1>
  int l = 1;
  double t = 0.0;
};

struct QdpPropagators {
  cplx h = 0.0;
  cplx k = 0.0;
  cplx x = 0.0;  // h + k
  int y = 1;
  int y_target = 1;
  int m = 1;
  double t = 0.0;
  double t0 = 0.0;
};

struct QdpOptions {
  Green1Method method = Green1Method::momentum_sum;
  TwoMagnonBackend backend = TwoMagnonBackend::automatic;
  QuadratureOptions quadrature{};
};

/// Amplitudes of the unitary-interruption state: c = alpha u + beta v.
struct UnitaryQdpAmplitudes {
  cplx u0 = 0.0, v0 = 0.0;          // vacuum
  Eigen::VectorXcd u1, v1;          // one magnon, index y - 1
  Eigen::VectorXcd v2;              // two magnons (u part vanishes), PairIndex order
  double leakage = 0.0;
  double quadrature_error = 0.0;
};

/// Structured state for a given input qubit.
struct UnitaryQdpState {
  cplx vacuum = 0.0;
  Eigen::VectorXcd one;
  Eigen::VectorXcd two;
  int n = 0;

  double norm2() const { return std::norm(vacuum) + one.squaredNorm() + two.squaredNorm(); }
  cplx pair(int a, int b) const { return two[PairIndex(n)(a, b)]; }
};

namespace detail {

inline void check_order(double t0, double t) {
  check_time(t0);
  check_time(t);
  if (t < t0) throw std::invalid_argument("readout time precedes the interruption (t < t0)");
}

}  // namespace detail

/// Shared propagation machinery for one chain; safe for concurrent use.
class QdpEngine {
 public:
  explicit QdpEngine(const ChainSpec& spec, QdpOptions opts = {}) : spec_(spec), opts_(opts) {
    spec_.validate();
    if (!spec_.finite()) opts_.method = Green1Method::bessel;
    if (opts_.method == Green1Method::bessel)
      detail::image_rule(spec_);
    else
      modes_.emplace(spec_);
  }

  const ChainSpec& spec() const { return spec_; }
  const QdpOptions& options() const { return opts_; }
  int n() const { return spec_.n; }

  /// One-magnon U(t) applied to amplitudes over sites (finite chains).
  Eigen::VectorXcd evolve1(const Eigen::VectorXcd& v, double t) const {
    spec_.require_finite("evolution of an arbitrary amplitude vector");
    if (modes_) return modes_->evolve(v, t);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(spec_.n);
    for (int x = 1; x <= spec_.n; ++x)
      if (v[x - 1] != cplx(0.0)) out += v[x - 1] * green1_bessel_column(x, t, spec_);
    return out;
  }

  /// G^{y}_{source}(t) for all y.
  Eigen::VectorXcd column(int source, double t) const {
    spec_.check_site(source);
    if (modes_) return modes_->column(source, t);
    return green1_bessel_column(source, t, spec_);
  }

  const TwoMagnonSector& two_magnon() const {
    std::call_once(two_once_->flag, [&] {
      two_ = std::make_shared<TwoMagnonSector>(spec_, opts_.backend, opts_.quadrature);
    });
    return *two_;
  }

  cplx phase0(double t) const { return std::polar(1.0, spec_.ground_energy() * t); }  // e^{i eps0 t}

  // ----- free evolution --------------------------------------------------

  Eigen::VectorXd free_profile(double t) const {
    detail::check_time(t);
    const Eigen::VectorXcd g = column(1, t);
    Eigen::VectorXd f(spec_.n);
    const cplx ph = phase0(t);
    for (int l = 0; l < spec_.n; ++l) f[l] = 0.5 + std::norm(g[l]) / 6.0 + (ph * g[l]).real() / 3.0;
    return f;
  }

  // ----- projective interruption ----------------------------------------

  struct Projective {
    Eigen::VectorXcd g, h, k;  // over target sites
  };

  Projective projective(int m, double t0, double t) const {
    spec_.check_site(m);
    detail::check_order(t0, t);
    // Branch sums run over all intermediate sites, so H = G - K.
    const cplx gm = column(1, t0)[m - 1];
    Projective p;
    p.g = column(1, t);
    p.k = gm * column(m, t - t0);
    p.h = p.g - p.k;
    return p;
  }

  Eigen::VectorXd projective_profile(int m, double t0, double t) const {
    const Projective p = projective(m, t0, t);
    const cplx ph = phase0(t);
    Eigen::VectorXd f(spec_.n);
    for (int l = 0; l < spec_.n; ++l)
      f[l] = 0.5 + (std::norm(p.h[l]) + std::norm(p.k[l])) / 6.0 + (ph * p.h[l]).real() / 3.0;
    return f;
  }

  /// Projective minus free: |K|^2/3 - Re((e^{i eps0 t} + conj G) K)/3.
  Eigen::VectorXd projective_difference(int m, double t0, double t) const {
    const Projective p = projective(m, t0, t);
    const cplx ph = phase0(t);
    Eigen::VectorXd f(spec_.n);
    for (int l = 0; l < spec_.n; ++l)
      f[l] = std::norm(p.k[l]) / 3.0 - ((ph + std::conj(p.g[l])) * p.k[l]).real() / 3.0;
    return f;
  }

  // ----- unitary interruption -------------------------------------------

  UnitaryQdpAmplitudes unitary(const QdpEvent& ev, double t, TwoMagnonPart part = TwoMagnonPart::total) const {
    if (ev.kind != QdpKind::local_unitary) throw std::invalid_argument("unitary(): event must be local_unitary");
    ev.validate(spec_);
    detail::check_order(ev.t0, t);
    const Gate& gate = *ev.gate;
    const int m = ev.site;
    const double t0 = ev.t0, tau = t - t0;
    const double eps0 = spec_.ground_energy();

    const Eigen::VectorXcd g0 = column(1, t0);
    UnitaryQdpAmplitudes a;
    a.u0 = gate.gamma * std::polar(1.0, -eps0 * t);
    a.v0 = -std::conj(gate.delta) * g0[m - 1] * std::polar(1.0, -eps0 * tau);

    const Eigen::VectorXcd gmt = column(m, tau);
    a.u1 = gate.delta * std::polar(1.0, -eps0 * t0) * gmt;
    // U(tau) applied to gamma g0 with entry m replaced by conj(gamma) g0_m.
    a.v1 = gate.gamma * column(1, t) + (std::conj(gate.gamma) - gate.gamma) * g0[m - 1] * gmt;

    const PairIndex idx(spec_.n);
    a.v2 = Eigen::VectorXcd::Zero(idx.size());
    if (gate.delta != cplx(0.0)) {
      Eigen::VectorXcd phi0 = Eigen::VectorXcd::Zero(idx.size());
      for (int y = 1; y <= spec_.n; ++y)
        if (y != m) phi0[idx(m, y)] = g0[y - 1];
      a.v2 = gate.delta * two_magnon().evolve(phi0, tau, part, &a.leakage, &a.quadrature_error);
    }
    return a;
  }

  UnitaryQdpState unitary_state(const QdpEvent& ev, double t, const InitialState& in) const {
    in.validate();
    const auto a = unitary(ev, t);
    return {in.alpha * a.u0 + in.beta * a.v0, in.alpha * a.u1 + in.beta * a.v1, in.beta * a.v2, spec_.n};
  }

  /// Bloch-averaged fidelity over target sites from the (u, v) amplitudes.
  Eigen::VectorXd unitary_profile(const UnitaryQdpAmplitudes& a) const {
    const int n = spec_.n;
    const PairIndex idx(n);
    Eigen::VectorXd s_vv(n), s_uu(n);
    Eigen::VectorXcd cross(n);
    for (int l = 1; l <= n; ++l) {
      s_vv[l - 1] = std::norm(a.v1[l - 1]);
      s_uu[l - 1] = std::norm(a.u1[l - 1]);
      cross[l - 1] = a.u0 * std::conj(a.v1[l - 1]);
    }
    for (int p = 1; p <= n; ++p) {
      for (int q = p + 1; q <= n; ++q) {
        const cplx v = a.v2[idx(p, q)];
        if (v == cplx(0.0)) continue;
        s_vv[p - 1] += std::norm(v);
        s_vv[q - 1] += std::norm(v);
        cross[q - 1] += a.u1[p - 1] * std::conj(v);
        cross[p - 1] += a.u1[q - 1] * std::conj(v);
      }
    }
    Eigen::VectorXd f(n);
    for (int l = 0; l < n; ++l) f[l] = 0.5 + (s_vv[l] - s_uu[l]) / 6.0 + cross[l].real() / 3.0;
    return f;
  }

  Eigen::VectorXd unitary_fidelity_profile(const QdpEvent& ev, double t) const {
    return unitary_profile(unitary(ev, t));
  }

  Eigen::VectorXd unitary_difference(const QdpEvent& ev, double t) const {
    return unitary_fidelity_profile(ev, t) - free_profile(t);
  }

  /// |delta|^2/6 sum_{y != l} |L_part^{l,y}|^2 over target sites.
  Eigen::VectorXd split_profile(const QdpEvent& ev, double t, TwoMagnonPart part) const {
    const auto a = unitary(ev, t, part);
    const int n = spec_.n;
    const PairIndex idx(n);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (int p = 1; p <= n; ++p)
      for (int q = p + 1; q <= n; ++q) {
        const double w = std::norm(a.v2[idx(p, q)]) / 6.0;
        f[p - 1] += w;
        f[q - 1] += w;
      }
    return f;
  }

 private:
  struct Once {
    std::once_flag flag;
  };
  ChainSpec spec_;
  QdpOptions opts_;
  std::optional<OneMagnonModes> modes_;
  std::shared_ptr<Once> two_once_ = std::make_shared<Once>();
  mutable std::shared_ptr<TwoMagnonSector> two_;
};

// ----- element-wise entry points ---------------------------------------------

inline RdmElements rdm_free(int l, double t, const ChainSpec& spec, const InitialState& in) {
  in.validate();
  spec.check_site(l);
  const cplx g = green1(1, l, t, spec).value;
  return {std::norm(in.beta) * std::norm(g), in.alpha * std::conj(in.beta) * std::polar(1.0, -spec.ground_energy() * t) * std::conj(g), l, t};
}

inline double fidelity_from_rdm(const RdmElements& r, const InitialState& in) {
  return std::norm(in.alpha) * (1.0 - r.x) + std::norm(in.beta) * r.x +
         2.0 * (std::conj(in.alpha) * in.beta * r.y).real();
}

/// Per-state fidelity of free evolution.
inline double fidelity_free_state(int l, double t, const ChainSpec& spec, const InitialState& in) {
  return fidelity_from_rdm(rdm_free(l, t, spec, in), in);
}

/// Bloch-averaged fidelity of free evolution.
inline double fidelity_free(int l, double t, const ChainSpec& spec) {
  const cplx g = green1(1, l, t, spec).value;
  return 0.5 + std::norm(g) / 6.0 + (std::polar(1.0, spec.ground_energy() * t) * g).real() / 3.0;
}

inline QdpPropagators hk_propagators(int y, int y_target, int m, double t, double t0, const ChainSpec& spec) {
  spec.check_site(y);
  spec.check_site(y_target);
  spec.check_site(m);
  detail::check_order(t0, t);
  // Branch sums run over all intermediate sites, so H = G - K.
  const cplx gm = green1(y, m, t0, spec).value;
  QdpPropagators p;
  p.x = green1(y, y_target, t, spec).value;
  p.k = gm * green1(m, y_target, t - t0, spec).value;
  p.h = p.x - p.k;
  p.y = y;
  p.y_target = y_target;
  p.m = m;
  p.t = t;
  p.t0 = t0;
  return p;
}

inline double fidelity_projective(int l, int m, double t, double t0, const ChainSpec& spec) {
  const auto p = hk_propagators(1, l, m, t, t0, spec);
  return 0.5 + (std::norm(p.h) + std::norm(p.k)) / 6.0 +
         (std::polar(1.0, spec.ground_energy() * t) * p.h).real() / 3.0;
}

inline double delta_fidelity_projective(int l, int m, double t, double t0, const ChainSpec& spec) {
  const auto p = hk_propagators(1, l, m, t, t0, spec);
  const cplx g = p.x;
  return std::norm(p.k) / 3.0 - ((std::polar(1.0, spec.ground_energy() * t) + std::conj(g)) * p.k).real() / 3.0;
}

inline UnitaryQdpState unitary_qdp_state(const QdpEvent& ev, double t, const ChainSpec& spec,
                                         const InitialState& in, QdpOptions opts = {}) {
  return QdpEngine(spec, opts).unitary_state(ev, t, in);
}

inline double fidelity_unitary_qdp(int l, const QdpEvent& ev, double t, const ChainSpec& spec,
                                   QdpOptions opts = {}) {
  spec.check_site(l);
  return QdpEngine(spec, opts).unitary_fidelity_profile(ev, t)[l - 1];
}

/// RDM elements of the unitary-interruption state for a given input.
inline RdmElements rdm_unitary_qdp(int l, const QdpEvent& ev, double t, const ChainSpec& spec,
                                   const InitialState& in, QdpOptions opts = {}) {
  spec.check_site(l);
  const auto s = unitary_qdp_state(ev, t, spec, in, opts);
  RdmElements r{0.0, 0.0, l, t};
  r.x = std::norm(s.one[l - 1]);
  r.y = s.vacuum * std::conj(s.one[l - 1]);
  for (int y = 1; y <= spec.n; ++y) {
    if (y == l) continue;
    r.x += std::norm(s.pair(l, y));
    r.y += s.one[y - 1] * std::conj(s.pair(l, y));
  }
  return r;
}

inline double two_magnon_split_fidelity(int l, const QdpEvent& ev, double t, const ChainSpec& spec,
                                        TwoMagnonPart part, QdpOptions opts = {}) {
  spec.check_site(l);
  return QdpEngine(spec, opts).split_profile(ev, t, part)[l - 1];
}

// ----- grids -----------------------------------------------------------------

enum class Scenario { free, projective_qdp, unitary_qdp, difference, unitary_difference, split_bound, split_scattering };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::free: return "free";
    case Scenario::projective_qdp: return "projective_qdp";
    case Scenario::unitary_qdp: return "unitary_qdp";
    case Scenario::difference: return "difference";
    case Scenario::unitary_difference: return "unitary_difference";
    case Scenario::split_bound: return "split_bound";
    default: return "split_scattering";
  }
}

struct GridAxes {
  int l_min = 1;
  int l_max = 1;
  double t_min = 0.0;
  double t_max = 0.0;
  double dt = 1.0;

  void validate(const ChainSpec& spec) const {
    spec.check_site(l_min);
    spec.check_site(l_max);
    if (l_max < l_min) throw std::invalid_argument("grid: empty site range");
    if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be > 0");
    if (!(t_max >= t_min) || t_min < 0.0) throw std::invalid_argument("grid: empty time range");
  }
  std::vector<double> times() const {
    std::vector<double> ts;
    const auto steps = static_cast<long>(std::floor((t_max - t_min) / dt + 1e-9));
    for (long i = 0; i <= steps; ++i) ts.push_back(t_min + dt * static_cast<double>(i));
    return ts;
  }
};

struct FidelityGrid {
  Scenario scenario = Scenario::free;
  ChainSpec spec;
  QdpEvent event;
  int l_min = 1;
  std::vector<int> sites;
  std::vector<double> times;
  Eigen::MatrixXd values;  // rows: times, cols: sites
  double max_leakage = 0.0;

  double at(int l, std::size_t ti) const { return values(static_cast<Eigen::Index>(ti), l - l_min); }
};

/// Fill a grid; times before the interruption (scenarios with an event) use free evolution
/// for fidelity scenarios and 0 for differences and split maps.
inline FidelityGrid fill_grid(const QdpEngine& engine, Scenario sc, const QdpEvent& ev, const GridAxes& ax,
                              unsigned threads = default_threads()) {
  ax.validate(engine.spec());
  FidelityGrid g;
  g.scenario = sc;
  g.spec = engine.spec();
  g.event = ev;
  g.l_min = ax.l_min;
  for (int l = ax.l_min; l <= ax.l_max; ++l) g.sites.push_back(l);
  g.times = ax.times();
  const auto nl = static_cast<Eigen::Index>(g.sites.size());
  g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.times.size()), nl);
  if (sc != Scenario::free) ev.validate(engine.spec());
  if (sc == Scenario::unitary_qdp || sc == Scenario::unitary_difference || sc == Scenario::split_bound ||
      sc == Scenario::split_scattering)
    engine.two_magnon();
  std::vector<double> leak(g.times.size(), 0.0);
  parallel_for(g.times.size(), threads, [&](std::size_t i) {
    const double t = g.times[i];
    const bool before = sc != Scenario::free && t < ev.t0;
    Eigen::VectorXd prof;
    switch (sc) {
      case Scenario::free: prof = engine.free_profile(t); break;
      case Scenario::projective_qdp:
        prof = before ? engine.free_profile(t) : engine.projective_profile(ev.site, ev.t0, t);
        break;
      case Scenario::difference:
        prof = before ? Eigen::VectorXd::Zero(engine.n()) : engine.projective_difference(ev.site, ev.t0, t);
        break;
      case Scenario::unitary_qdp:
      case Scenario::unitary_difference: {
        if (before) {
          prof = sc == Scenario::unitary_qdp ? engine.free_profile(t) : Eigen::VectorXd::Zero(engine.n());
          break;
        }
        const auto a = engine.unitary(ev, t);
        leak[i] = a.leakage;
        prof = engine.unitary_profile(a);
        if (sc == Scenario::unitary_difference) prof -= engine.free_profile(t);
        break;
      }
      default:
        prof = before ? Eigen::VectorXd::Zero(engine.n())
                      : engine.split_profile(ev, t, sc == Scenario::split_bound ? TwoMagnonPart::bound
                                                                                : TwoMagnonPart::scattering);
    }
    g.values.row(static_cast<Eigen::Index>(i)) = prof.segment(ax.l_min - 1, nl).transpose();
  });
  for (double v : leak) g.max_leakage = std::max(g.max_leakage, v);
  return g;
}

}  // namespace qst

#endif  // QST_QDP_HPP
