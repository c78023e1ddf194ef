#ifndef QST_CHAIN_HPP
#define QST_CHAIN_HPP

// Physical conventions and configuration records shared by every module.
//
//   H = -J sum_i (sx_i sx_{i+1} + sy_i sy_{i+1} + Delta sz_i sz_{i+1})
//   U(t) = exp(-i H t), hbar = 1
//
// Sites are 1-based. |0> is spin up, |1> is spin down (a magnon).
// In the one-magnon sector the hopping amplitude is -2J and an isolated
// down spin costs 4 J Delta over the ferromagnetic reference energy.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qst {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// semi_infinite: sites 1, 2, 3, ... with a single wall at site 1. N counts the
// observed sites (targets and interruption sites) and fixes eps0 through N - 1 bonds.
enum class Boundary { open, closed, semi_infinite };

inline std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::open: return "open";
    case Boundary::closed: return "closed";
    default: return "semi-infinite";
  }
}

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "closed" || s == "periodic") return Boundary::closed;
  if (s == "semi-infinite" || s == "semi_infinite") return Boundary::semi_infinite;
  throw std::invalid_argument("unknown boundary '" + s + "' (expected open|closed|semi-infinite)");
}

// heisenberg: every sector evolves with H.
// bare_hopping: sectors with magnons evolve with the Delta = 0 (XX) part of H,
// while the empty chain keeps the energy eps0 of the full H. The one-magnon
// propagator is then the bare Bessel sum with no Ising phase.
enum class MagnonModel { heisenberg, bare_hopping };

inline std::string to_string(MagnonModel m) { return m == MagnonModel::heisenberg ? "heisenberg" : "bare-hopping"; }

inline MagnonModel magnon_model_from_string(const std::string& s) {
  if (s == "heisenberg") return MagnonModel::heisenberg;
  if (s == "bare-hopping" || s == "bare_hopping") return MagnonModel::bare_hopping;
  throw std::invalid_argument("unknown model '" + s + "' (expected heisenberg|bare-hopping)");
}

/// Chain geometry and couplings.
struct ChainSpec {
  int n = 100;
  Boundary boundary = Boundary::open;
  double j = 0.5;
  double delta = 1.0;
  MagnonModel model = MagnonModel::heisenberg;

  void validate() const {
    if (n < 2) throw std::invalid_argument("ChainSpec: N must be >= 2");
    if (!(j > 0.0) || !std::isfinite(j)) throw std::invalid_argument("ChainSpec: J must be > 0");
    if (!std::isfinite(delta)) throw std::invalid_argument("ChainSpec: Delta must be finite");
  }

  int bonds() const { return boundary == Boundary::closed ? n : n - 1; }

  bool finite() const { return boundary != Boundary::semi_infinite; }

  void require_finite(const char* what) const {
    if (!finite()) throw std::invalid_argument(std::string(what) + " needs a finite chain (open or closed)");
  }

  /// Energy of the all-up state, -J Delta (number of bonds).
  double ground_energy() const { return -j * delta * bonds(); }

  /// Spec whose H governs the magnon sectors.
  ChainSpec magnon_spec() const {
    if (model == MagnonModel::heisenberg) return *this;
    ChainSpec s = *this;
    s.delta = 0.0;
    s.model = MagnonModel::heisenberg;
    return s;
  }

  void check_site(int x) const {
    if (x < 1 || x > n)
      throw std::out_of_range("site " + std::to_string(x) + " outside 1.." + std::to_string(n));
  }
};

inline ChainSpec open_chain(int n, double j = 0.5, double delta = 1.0) {
  ChainSpec s{n, Boundary::open, j, delta};
  s.validate();
  return s;
}

inline ChainSpec closed_chain(int n, double j = 0.5, double delta = 1.0) {
  ChainSpec s{n, Boundary::closed, j, delta};
  s.validate();
  return s;
}

/// alpha |0 0 ... 0> + beta |1 0 ... 0>
struct InitialState {
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};

  void validate() const {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
      throw std::invalid_argument("InitialState: |alpha|^2 + |beta|^2 != 1");
  }

  static InitialState from_alpha2(double alpha2) {
    if (!(alpha2 >= 0.0 && alpha2 <= 1.0)) throw std::invalid_argument("alpha^2 must lie in [0,1]");
    InitialState s{cplx(std::sqrt(alpha2), 0.0), cplx(std::sqrt(1.0 - alpha2), 0.0)};
    return s;
  }
};

/// Single-qubit gate V|0> = gamma|0> + delta|1>, V|1> = -conj(delta)|0> + conj(gamma)|1>.
/// For real gamma this is exactly the (gamma, delta) gate of the local-unitary protocol.
struct Gate {
  cplx gamma{1.0, 0.0};
  cplx delta{0.0, 0.0};

  void validate() const {
    if (std::abs(std::norm(gamma) + std::norm(delta) - 1.0) > 1e-12)
      throw std::invalid_argument("Gate: |gamma|^2 + |delta|^2 != 1");
  }

  static Gate identity() { return {}; }
  static Gate bit_flip() { return {cplx(0.0), cplx(1.0)}; }
  static Gate hadamard_like() { return {cplx(std::sqrt(0.5)), cplx(std::sqrt(0.5))}; }

  /// gamma = cos(angle), delta = (n_y + i n_x) sin(angle) for a field direction (n_x, n_y).
  static Gate from_axis(double angle, double nx, double ny) {
    const double norm = std::hypot(nx, ny);
    if (!(norm > 0.0)) throw std::invalid_argument("Gate::from_axis: zero axis");
    return {cplx(std::cos(angle)), cplx(ny / norm, nx / norm) * std::sin(angle)};
  }

  /// gamma = |gamma| (real), delta = |delta| e^{i phase}; a missing modulus is completed to unit norm.
  static Gate from_moduli(std::optional<double> gamma_abs, std::optional<double> delta_abs,
                          double delta_phase) {
    double ga = 0.0, da = 0.0;
    if (gamma_abs && delta_abs) {
      ga = *gamma_abs;
      da = *delta_abs;
    } else if (gamma_abs) {
      ga = *gamma_abs;
      da = std::sqrt(std::max(0.0, 1.0 - ga * ga));
    } else if (delta_abs) {
      da = *delta_abs;
      ga = std::sqrt(std::max(0.0, 1.0 - da * da));
    } else {
      ga = 0.0;
      da = 1.0;
    }
    Gate g{cplx(ga), std::polar(da, delta_phase)};
    g.validate();
    return g;
  }
};

enum class QdpKind { none, projective, local_unitary };

/// The interruption: what happens, where (site m) and when (t0).
struct QdpEvent {
  QdpKind kind = QdpKind::none;
  int site = 1;
  double t0 = 0.0;
  std::optional<Gate> gate;

  void validate(const ChainSpec& spec) const {
    spec.check_site(site);
    if (!(t0 >= 0.0) || !std::isfinite(t0)) throw std::invalid_argument("QdpEvent: t0 must be >= 0");
    if (kind == QdpKind::local_unitary) {
      if (!gate) throw std::invalid_argument("QdpEvent: local_unitary requires a gate");
      gate->validate();
    }
  }

  static QdpEvent projective(int m, double t0) { return {QdpKind::projective, m, t0, std::nullopt}; }
  static QdpEvent unitary(int m, double t0, Gate g) { return {QdpKind::local_unitary, m, t0, g}; }
};

/// Averages of amplitude moments over Haar-random qubit states alpha|0> + beta|1>.
struct BlochMoments {
  static constexpr double a2 = 1.0 / 2.0;    // <|alpha|^2>
  static constexpr double b2 = 1.0 / 2.0;    // <|beta|^2>
  static constexpr double a2b2 = 1.0 / 6.0;  // <|alpha|^2 |beta|^2>
  static constexpr double b4 = 1.0 / 3.0;    // <|beta|^4>
  static constexpr double a4 = 1.0 / 3.0;    // <|alpha|^4>
  static constexpr double ab = 0.0;          // <conj(alpha) beta>
};

/// Closed: p = 2 pi I / N; open: p = pi I / (N + 1); I = 1..N.
inline std::vector<std::pair<double, int>> momentum_grid(Boundary boundary, int n) {
  if (n < 1) throw std::invalid_argument("momentum_grid: N must be >= 1");
  if (boundary == Boundary::semi_infinite) throw std::invalid_argument("momentum_grid: continuous spectrum on a semi-infinite chain");
  std::vector<std::pair<double, int>> grid;
  grid.reserve(n);
  for (int i = 1; i <= n; ++i) {
    const double p = boundary == Boundary::closed ? 2.0 * pi * i / n : pi * i / (n + 1);
    grid.emplace_back(p, i);
  }
  return grid;
}

inline std::vector<std::pair<double, int>> momentum_grid(const ChainSpec& spec) {
  spec.validate();
  return momentum_grid(spec.boundary, spec.n);
}

/// Plane-wave magnon energy eps0 + 4 J (Delta - cos p). Exact on closed chains.
inline double dispersion_one_magnon(double p, const ChainSpec& spec) {
  return spec.ground_energy() + 4.0 * spec.j * (spec.delta - std::cos(p));
}

/// eps0 + 4J(Delta - cos p1) + 4J(Delta - cos p2).
inline double two_magnon_energy(double p1, double p2, const ChainSpec& spec) {
  return spec.ground_energy() + 4.0 * spec.j * (spec.delta - std::cos(p1)) +
         4.0 * spec.j * (spec.delta - std::cos(p2));
}

/// Maximum group velocity of a single magnon (sites per unit time).
inline double magnon_speed(const ChainSpec& spec) { return 4.0 * spec.j; }

}  // namespace qst

#endif  // QST_CHAIN_HPP
