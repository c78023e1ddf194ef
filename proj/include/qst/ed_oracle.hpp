#ifndef QST_ED_ORACLE_HPP
#define QST_ED_ORACLE_HPP

// Brute-force reference dynamics. Nothing here uses the propagator formulas of
// the analytic modules: states live on spin configurations, the Hamiltonian is
// built from the Pauli action on bit strings, and evolution is by exact
// eigendecomposition of each fixed-magnetisation block.
//
// Bit x-1 of a configuration is set when site x is down.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <limits>
#include <unordered_map>
#include <vector>

#include "qst/chain.hpp"

namespace qst::ed {

using Config = std::uint64_t;

enum class Sector { full, one_excitation, two_excitation };

inline constexpr int kMaxFullSites = 12;
inline constexpr int kMaxSectorSites = 64;

inline Config site_bit(int x) { return Config{1} << (x - 1); }

/// Ordered list of configurations spanning a sector, with reverse lookup.
class Basis {
 public:
  Basis(int n, Sector sector) : n_(n) {
    if (sector == Sector::full) {
      if (n > kMaxFullSites) throw std::invalid_argument("ed: full space limited to N <= 12");
      for (Config s = 0; s < (Config{1} << n); ++s) states_.push_back(s);
    } else {
      if (n > kMaxSectorSites) throw std::invalid_argument("ed: sectors limited to N <= 64");
      for (int a = 1; a <= n; ++a) {
        if (sector == Sector::one_excitation) {
          states_.push_back(site_bit(a));
          continue;
        }
        for (int b = a + 1; b <= n; ++b) states_.push_back(site_bit(a) | site_bit(b));
      }
    }
    index_from_states();
  }

  Basis(int n, std::vector<Config> states) : n_(n), states_(std::move(states)) { index_from_states(); }

  int sites() const { return n_; }
  std::size_t size() const { return states_.size(); }
  Config state(std::size_t i) const { return states_[i]; }
  const std::vector<Config>& states() const { return states_; }

  long index(Config s) const {
    auto it = index_.find(s);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
  }

 private:
  void index_from_states() {
    index_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
  }

  int n_;
  std::vector<Config> states_;
  std::unordered_map<Config, std::size_t> index_;
};

/// H|s> as (diagonal, list of (flipped config, amplitude)).
struct Action {
  double diagonal = 0.0;
  std::vector<std::pair<Config, double>> offdiag;
};

inline Action act(Config s, const ChainSpec& full) {
  const ChainSpec spec = full.magnon_spec();
  Action a;
  if (s == 0) a.diagonal = full.ground_energy() - spec.ground_energy();
  const int bonds = spec.bonds();
  for (int b = 0; b < bonds; ++b) {
    const int i = b + 1;
    const int k = i == spec.n ? 1 : i + 1;
    const bool di = s & site_bit(i);
    const bool dk = s & site_bit(k);
    a.diagonal += -spec.j * spec.delta * (di == dk ? 1.0 : -1.0);
    if (di != dk) a.offdiag.emplace_back(s ^ (site_bit(i) | site_bit(k)), -2.0 * spec.j);
  }
  return a;
}

inline Eigen::MatrixXd build_hamiltonian(const ChainSpec& spec, const Basis& basis) {
  spec.require_finite("exact diagonalization");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Action a = act(basis.state(c), spec);
    h(c, c) += a.diagonal;
    for (auto [t, amp] : a.offdiag) {
      const long r = basis.index(t);
      if (r < 0) throw std::logic_error("ed: Hamiltonian leaves the basis");
      h(r, c) += amp;
    }
  }
  return h;
}

inline Eigen::MatrixXd build_hamiltonian(const ChainSpec& spec, Sector sector) {
  spec.validate();
  return build_hamiltonian(spec, Basis(spec.n, sector));
}

/// Exact propagator on one block: H = V diag(E) V^T.
class BlockPropagator {
 public:
  BlockPropagator(const ChainSpec& spec, Basis basis) : basis_(std::move(basis)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(spec, basis_));
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  const Basis& basis() const { return basis_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double t) const {
    Eigen::VectorXcd c = vectors_.transpose().cast<cplx>() * v;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -energies_[k] * t);
    return vectors_.cast<cplx>() * c;
  }

 private:
  Basis basis_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
};

/// State vector over all 2^N configurations.
struct DenseState {
  int n = 0;
  Eigen::VectorXcd amps;

  static DenseState zero(int n) {
    if (n < 1 || n > kMaxFullSites) throw std::invalid_argument("ed: full space limited to N <= 12");
    return {n, Eigen::VectorXcd::Zero(Eigen::Index{1} << n)};
  }

  /// alpha |0...0> + beta |1 at site 1>.
  static DenseState initial(int n, const InitialState& s) {
    DenseState d = zero(n);
    d.amps[0] = s.alpha;
    d.amps[static_cast<Eigen::Index>(site_bit(1))] = s.beta;
    return d;
  }

  cplx& at(Config s) { return amps[static_cast<Eigen::Index>(s)]; }
  cplx at(Config s) const { return amps[static_cast<Eigen::Index>(s)]; }
  double norm2() const { return amps.squaredNorm(); }
};

/// Evolution in the full space through lazily diagonalised magnetisation blocks.
class Evolver {
 public:
  explicit Evolver(const ChainSpec& spec) : spec_(spec), blocks_(spec.n + 1) {
    spec_.validate();
    if (spec_.n > kMaxFullSites) throw std::invalid_argument("ed: full space limited to N <= 12");
  }

  const ChainSpec& spec() const { return spec_; }

  DenseState evolve(const DenseState& in, double t) const {
    if (in.n != spec_.n) throw std::invalid_argument("ed: state size mismatch");
    DenseState out = DenseState::zero(spec_.n);
    for (int k = 0; k <= spec_.n; ++k) {
      const auto& blk = block(k, in);
      if (!blk) continue;
      const auto& states = blk->basis().states();
      Eigen::VectorXcd v(states.size());
      for (std::size_t i = 0; i < states.size(); ++i) v[i] = in.at(states[i]);
      if (v.squaredNorm() == 0.0) continue;
      const Eigen::VectorXcd w = blk->evolve(v, t);
      for (std::size_t i = 0; i < states.size(); ++i) out.at(states[i]) = w[i];
    }
    return out;
  }

  const BlockPropagator& sector(int k) const {
    if (!blocks_[k]) blocks_[k] = std::make_shared<BlockPropagator>(spec_, Basis(spec_.n, configs_with(k)));
    return *blocks_[k];
  }

 private:
  std::vector<Config> configs_with(int k) const {
    std::vector<Config> v;
    for (Config s = 0; s < (Config{1} << spec_.n); ++s)
      if (std::popcount(s) == k) v.push_back(s);
    return v;
  }

  const std::shared_ptr<BlockPropagator>& block(int k, const DenseState& in) const {
    static const std::shared_ptr<BlockPropagator> none;
    bool occupied = false;
    for (Config s = 0; s < (Config{1} << spec_.n) && !occupied; ++s)
      if (std::popcount(s) == k && in.at(s) != cplx(0.0)) occupied = true;
    if (!occupied) return none;
    sector(k);
    return blocks_[k];
  }

  ChainSpec spec_;
  mutable std::vector<std::shared_ptr<BlockPropagator>> blocks_;
};

/// Branch of the sigma_z measurement at site m: outcome 0 keeps up, 1 keeps down.
inline DenseState apply_projector(const DenseState& in, int m, int outcome) {
  DenseState out = in;
  const Config b = site_bit(m);
  for (Config s = 0; s < (Config{1} << in.n); ++s) {
    const bool down = s & b;
    if (down != (outcome == 1)) out.at(s) = 0.0;
  }
  return out;
}

/// V_m with V|0> = gamma|0> + delta|1>, V|1> = -conj(delta)|0> + conj(gamma)|1>.
inline DenseState apply_gate(const DenseState& in, int m, const Gate& g) {
  g.validate();
  DenseState out = DenseState::zero(in.n);
  const Config b = site_bit(m);
  for (Config s = 0; s < (Config{1} << in.n); ++s) {
    if (s & b) continue;
    const cplx a0 = in.at(s), a1 = in.at(s | b);
    out.at(s) = g.gamma * a0 - std::conj(g.delta) * a1;
    out.at(s | b) = g.delta * a0 + std::conj(g.gamma) * a1;
  }
  return out;
}

/// 2x2 reduced density matrix of site l, basis (|0>, |1>).
inline Eigen::Matrix2cd rdm(const DenseState& st, int l) {
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  const Config b = site_bit(l);
  for (Config s = 0; s < (Config{1} << st.n); ++s) {
    if (s & b) continue;
    const cplx a0 = st.at(s), a1 = st.at(s | b);
    r(0, 0) += std::norm(a0);
    r(1, 1) += std::norm(a1);
    r(0, 1) += a0 * std::conj(a1);
  }
  r(1, 0) = std::conj(r(0, 1));
  return r;
}

inline double overlap(const Eigen::Matrix2cd& rho, const InitialState& phi) {
  const Eigen::Vector2cd v(phi.alpha, phi.beta);
  return (v.adjoint() * rho * v)(0, 0).real();
}

/// Six octahedron states: an exact 2-design, so their mean reproduces the Bloch average.
inline std::array<InitialState, 6> octahedron_states() {
  const double r = std::sqrt(0.5);
  return {InitialState{1.0, 0.0}, InitialState{0.0, 1.0}, InitialState{r, r},
          InitialState{r, -r},    InitialState{r, cplx(0, r)}, InitialState{r, cplx(0, -r)}};
}

/// Bloch-averaged transfer fidelity for free evolution.
inline double free_fidelity(const Evolver& ev, int l, double t) {
  double s = 0.0;
  for (const auto& phi : octahedron_states()) {
    const DenseState st = ev.evolve(DenseState::initial(ev.spec().n, phi), t);
    s += overlap(rdm(st, l), phi);
  }
  return s / 6.0;
}

/// Kraus branches of the projective interruption at (m, t0), read out at t >= t0.
inline std::array<DenseState, 2> projective_branches(const Evolver& ev, const InitialState& phi, int m,
                                                     double t0, double t) {
  const DenseState mid = ev.evolve(DenseState::initial(ev.spec().n, phi), t0);
  return {ev.evolve(apply_projector(mid, m, 0), t - t0), ev.evolve(apply_projector(mid, m, 1), t - t0)};
}

inline double projective_fidelity(const Evolver& ev, int l, int m, double t0, double t) {
  double s = 0.0;
  for (const auto& phi : octahedron_states()) {
    const auto br = projective_branches(ev, phi, m, t0, t);
    s += overlap(rdm(br[0], l) + rdm(br[1], l), phi);
  }
  return s / 6.0;
}

inline DenseState unitary_state(const Evolver& ev, const InitialState& phi, int m, double t0, double t,
                                const Gate& g) {
  const DenseState mid = ev.evolve(DenseState::initial(ev.spec().n, phi), t0);
  return ev.evolve(apply_gate(mid, m, g), t - t0);
}

inline double unitary_fidelity(const Evolver& ev, int l, int m, double t0, double t, const Gate& g) {
  double s = 0.0;
  for (const auto& phi : octahedron_states()) s += overlap(rdm(unitary_state(ev, phi, m, t0, t, g), l), phi);
  return s / 6.0;
}

/// Density matrix over the full space; only for small chains.
struct Density {
  int n = 0;
  Eigen::MatrixXcd rho;

  static Density pure(const DenseState& s) {
    if (s.n > 8) throw std::invalid_argument("ed: density matrices limited to N <= 8");
    return {s.n, s.amps * s.amps.adjoint()};
  }

  double trace() const { return rho.trace().real(); }

  Density kraus_measure(int m) const {
    Density out{n, Eigen::MatrixXcd::Zero(rho.rows(), rho.cols())};
    const Config b = site_bit(m);
    for (Eigen::Index r = 0; r < rho.rows(); ++r)
      for (Eigen::Index c = 0; c < rho.cols(); ++c)
        if (bool(Config(r) & b) == bool(Config(c) & b)) out.rho(r, c) = rho(r, c);
    return out;
  }

  Density transformed(const Eigen::MatrixXcd& u) const { return {n, u * rho * u.adjoint()}; }

  Eigen::Matrix2cd rdm(int l) const {
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    const Config b = site_bit(l);
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
      for (Eigen::Index j = 0; j < rho.cols(); ++j) {
        const Config si = Config(i), sj = Config(j);
        if ((si & ~b) != (sj & ~b)) continue;
        r(bool(si & b), bool(sj & b)) += rho(i, j);
      }
    return r;
  }
};

/// Full unitary exp(-iHt) for small chains.
inline Eigen::MatrixXcd full_unitary(const ChainSpec& spec, double t) {
  if (spec.n > 8) throw std::invalid_argument("ed: full unitary limited to N <= 8");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(spec, Sector::full));
  Eigen::VectorXcd ph(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < ph.size(); ++k) ph[k] = std::polar(1.0, -es.eigenvalues()[k] * t);
  const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
  return v * ph.asDiagonal() * v.adjoint();
}

/// Two-magnon sector helpers (ordered pairs a < b, N <= 64).
class PairSector {
 public:
  explicit PairSector(const ChainSpec& spec)
      : spec_(spec), prop_(spec, Basis(spec.n, Sector::two_excitation)) {}

  const ChainSpec& spec() const { return spec_; }
  const Basis& basis() const { return prop_.basis(); }
  const BlockPropagator& propagator() const { return prop_; }

  long index(int a, int b) const { return basis().index(site_bit(a) | site_bit(b)); }

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double t) const { return prop_.evolve(v, t); }

 private:
  ChainSpec spec_;
  BlockPropagator prop_;
};

/// Classification of two-magnon eigenstates of a ring into bound and scattering.
struct BoundBand {
  Eigen::MatrixXcd projector;  // onto the confined states, pair basis
  int confined = 0;            // lowest state of its momentum block with a non-increasing separation profile
  int strict = 0;              // states with >= 90% weight at separation <= 5
  int ambiguous = 0;           // states on which the two rules disagree
  int total = 0;
};

inline int ring_separation(int a, int b, int n) {
  const int d = std::abs(b - a);
  return std::min(d, n - d);
}

inline BoundBand bound_band_projector(const ChainSpec& spec) {
  spec.validate();
  if (spec.boundary != Boundary::closed) throw std::invalid_argument("bound band: closed chain required");
  if (spec.n < 4) throw std::invalid_argument("bound band: N >= 4 required");
  const int n = spec.n;
  const Basis basis(n, Sector::two_excitation);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const Eigen::MatrixXd h = build_hamiltonian(spec, basis);

  // Translation by one site; a small momentum-dependent shift splits the K degeneracies.
  Eigen::MatrixXcd tr = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Config s = basis.state(c);
    const Config shifted = ((s << 1) | (s >> (n - 1))) & ((n == 64) ? ~Config{0} : ((Config{1} << n) - 1));
    tr(basis.index(shifted), c) = 1.0;
  }
  const double a = 1.37e-3, b = 0.91e-3;
  const Eigen::MatrixXcd m = h.cast<cplx>() + 0.5 * a * (tr + tr.adjoint()) - 0.5 * I * b * (tr - tr.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);

  struct Info {
    int k;
    double e;
    bool monotone;
    bool strict;
  };
  std::vector<Info> info(dim);
  std::vector<int> counts(n / 2 + 1, 0);
  for (Eigen::Index p = 0; p < dim; ++p) {
    const Config s = basis.state(p);
    const int x = std::countr_zero(s) + 1;
    const int y = 63 - std::countl_zero(s) + 1;
    ++counts[ring_separation(x, y, n)];
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Eigen::VectorXcd w = es.eigenvectors().col(i);
    const cplx tw = w.dot(tr * w);
    const double kk = std::arg(tw);
    int k = static_cast<int>(std::lround(kk * n / (2.0 * pi)));
    k = ((k % n) + n) % n;
    const double e = w.dot(h.cast<cplx>() * w).real();
    std::vector<double> prof(n / 2 + 1, 0.0);
    for (Eigen::Index p = 0; p < dim; ++p) {
      const Config s = basis.state(p);
      const int x = std::countr_zero(s) + 1;
      const int y = 63 - std::countl_zero(s) + 1;
      prof[ring_separation(x, y, n)] += std::norm(w[p]);
    }
    double near = 0.0;
    for (int d = 1; d <= std::min(5, n / 2); ++d) near += prof[d];
    bool mono = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= n / 2; ++d) {
      if (counts[d] == 0) continue;
      const double amp = std::sqrt(prof[d] / counts[d]);
      if (amp > prev * (1.0 + 1e-9) + 1e-12) mono = false;
      prev = amp;
    }
    info[i] = {k, e, mono, near >= 0.9};
  }

  BoundBand band;
  band.total = static_cast<int>(dim);
  band.projector = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<Eigen::Index> lowest(n, -1);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int k = info[i].k;
    if (lowest[k] < 0 || info[i].e < info[lowest[k]].e) lowest[k] = i;
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    const bool confined = lowest[info[i].k] == i && info[i].monotone;
    if (confined) {
      ++band.confined;
      const Eigen::VectorXcd w = es.eigenvectors().col(i);
      band.projector += w * w.adjoint();
    }
    if (info[i].strict) ++band.strict;
    if (confined != info[i].strict) ++band.ambiguous;
  }
  return band;
}

}  // namespace qst::ed

#endif  // QST_ED_ORACLE_HPP
