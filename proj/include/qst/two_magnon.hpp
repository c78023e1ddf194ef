#ifndef QST_TWO_MAGNON_HPP
#define QST_TWO_MAGNON_HPP

// Two-magnon sector of a finite chain: amplitude vectors over ordered pairs
// a < b and their time evolution, optionally restricted to the bound or the
// scattering part of the spectrum.
//
// Backends
//   ring_exact   closed chains; the sector is block-diagonal in total momentum
//                K = 2 pi k / N, each block is a relative-coordinate problem
//                of size ~N/2. Exact for every N, and it carries the
//                bound/scattering split (lowest, node-free state of a block).
//   dense_pairs  any boundary, N <= 64; direct eigendecomposition of the pair
//                Hamiltonian. Total part only.
//   bethe_line   closed chains; infinite-chain Bethe quadrature with the ring
//                images folded back. Exact up to quadrature while the pair
//                separation stays below N.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qst/bethe.hpp"
#include "qst/chain.hpp"

namespace qst {

enum class TwoMagnonBackend { automatic, ring_exact, dense_pairs, bethe_line };

inline std::string to_string(TwoMagnonBackend b) {
  switch (b) {
    case TwoMagnonBackend::ring_exact: return "ring_exact";
    case TwoMagnonBackend::dense_pairs: return "dense_pairs";
    case TwoMagnonBackend::bethe_line: return "bethe_line";
    default: return "automatic";
  }
}

inline TwoMagnonBackend two_magnon_backend_from_string(const std::string& s) {
  if (s == "ring_exact") return TwoMagnonBackend::ring_exact;
  if (s == "dense_pairs") return TwoMagnonBackend::dense_pairs;
  if (s == "bethe_line") return TwoMagnonBackend::bethe_line;
  if (s == "automatic" || s == "auto") return TwoMagnonBackend::automatic;
  throw std::invalid_argument("unknown two-magnon backend '" + s + "'");
}

/// Index of the ordered pair (a, b), 1 <= a < b <= N, in row-major order.
class PairIndex {
 public:
  explicit PairIndex(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("PairIndex: N must be >= 2");
  }
  int sites() const { return n_; }
  Eigen::Index size() const { return Eigen::Index(n_) * (n_ - 1) / 2; }
  Eigen::Index operator()(int a, int b) const {
    if (a > b) std::swap(a, b);
    if (a < 1 || b > n_ || a == b) throw std::out_of_range("PairIndex: invalid pair");
    return Eigen::Index(a - 1) * (2 * n_ - a) / 2 + (b - a - 1);
  }
  std::pair<int, int> pair(Eigen::Index i) const {
    int a = 1;
    Eigen::Index row = n_ - 1;
    while (i >= row) {
      i -= row;
      ++a;
      --row;
    }
    return {a, a + 1 + static_cast<int>(i)};
  }

 private:
  int n_;
};

/// H acting on a pair-amplitude vector.
inline Eigen::VectorXcd apply_pair_hamiltonian(const ChainSpec& full, const Eigen::VectorXcd& psi) {
  const ChainSpec spec = full.magnon_spec();
  const PairIndex idx(spec.n);
  const int n = spec.n;
  const bool ring = spec.boundary == Boundary::closed;
  const double eps0 = spec.ground_energy();
  const double hop = -2.0 * spec.j;
  auto degree = [&](int x) { return ring ? 2 : ((x == 1 || x == n) ? 1 : 2); };
  auto wrap = [&](int y) { return ring ? ((y - 1 + n) % n) + 1 : y; };
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  Eigen::Index i = 0;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b, ++i) {
      const cplx v = psi[i];
      if (v == cplx(0.0)) continue;
      // Antiparallel bonds: those touching exactly one of the two down spins.
      const int shared = (b == a + 1) + (ring && a == 1 && b == n);
      const int anti = degree(a) + degree(b) - 2 * shared;
      out[i] += (eps0 + 2.0 * spec.j * spec.delta * anti) * v;
      for (int step : {-1, 1}) {
        const int ya = wrap(a + step);
        if (ya >= 1 && ya <= n && ya != b) out[idx(ya, b)] += hop * v;
        const int yb = wrap(b + step);
        if (yb >= 1 && yb <= n && yb != a) out[idx(a, yb)] += hop * v;
      }
    }
  }
  return out;
}

namespace detail {

// Momentum blocks of the ring pair space.
class RingBlocks {
 public:
  explicit RingBlocks(const ChainSpec& spec) : spec_(spec), idx_(spec.n) {
    const int n = spec.n;
    if (n < 4) throw std::invalid_argument("ring two-magnon backend needs N >= 4");
    half_ = n / 2;
    phase_.resize(n);
    for (int r = 0; r < n; ++r) phase_[r] = std::polar(1.0, 2.0 * pi * r / n);
    blocks_.resize(n);
    for (int k = 0; k < n; ++k) build_block(k);
  }

  int sites() const { return spec_.n; }

  /// Coefficients per momentum block for a pair vector.
  std::vector<Eigen::VectorXcd> forward(const Eigen::VectorXcd& psi) const {
    std::vector<Eigen::VectorXcd> out(spec_.n);
    for (int k = 0; k < spec_.n; ++k) out[k] = forward_block(k, psi);
    return out;
  }

  Eigen::VectorXcd backward(const std::vector<Eigen::VectorXcd>& coeff) const {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(idx_.size());
    for (int k = 0; k < spec_.n; ++k) add_backward_block(k, coeff[k], psi);
    return psi;
  }

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double tau, TwoMagnonPart part) const {
    std::vector<Eigen::VectorXcd> c = forward(psi);
    for (int k = 0; k < spec_.n; ++k) {
      const Block& b = blocks_[k];
      Eigen::VectorXcd w = b.vectors.adjoint() * c[k];
      for (Eigen::Index s = 0; s < w.size(); ++s) {
        const bool bound = s == b.bound;
        const bool keep = part == TwoMagnonPart::total || (part == TwoMagnonPart::bound) == bound;
        w[s] = keep ? w[s] * std::polar(1.0, -b.energies[s] * tau) : cplx(0.0);
      }
      c[k] = b.vectors * w;
    }
    return backward(c);
  }

  int bound_count() const {
    int c = 0;
    for (const auto& b : blocks_) c += b.bound >= 0;
    return c;
  }

 private:
  struct Block {
    std::vector<int> seps;  // relative separations d present in this block
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vectors;
    Eigen::Index bound = -1;
  };

  // Ring sites are 0-based inside this class; pair (x, x + d mod N).
  Eigen::Index pair_of(int x, int d) const {
    const int n = spec_.n;
    const int a = x % n, b = (x + d) % n;
    return idx_(a + 1, b + 1);
  }

  double forward_scale(int d) const {
    return (2 * d == spec_.n) ? 1.0 / std::sqrt(2.0 * spec_.n) : 1.0 / std::sqrt(double(spec_.n));
  }
  double backward_scale(int d) const {
    return (2 * d == spec_.n) ? std::sqrt(2.0 / spec_.n) : 1.0 / std::sqrt(double(spec_.n));
  }

  Eigen::VectorXcd forward_block(int k, const Eigen::VectorXcd& psi) const {
    const Block& b = blocks_[k];
    const int n = spec_.n;
    Eigen::VectorXcd c(b.seps.size());
    for (std::size_t j = 0; j < b.seps.size(); ++j) {
      const int d = b.seps[j];
      cplx s = 0.0;
      for (int x = 0; x < n; ++x) s += std::conj(phase_[(k * x) % n]) * psi[pair_of(x, d)];
      c[j] = s * forward_scale(d);
    }
    return c;
  }

  void add_backward_block(int k, const Eigen::VectorXcd& c, Eigen::VectorXcd& psi) const {
    const Block& b = blocks_[k];
    const int n = spec_.n;
    for (std::size_t j = 0; j < b.seps.size(); ++j) {
      const int d = b.seps[j];
      const cplx v = c[j] * backward_scale(d);
      const int xs = (2 * d == n) ? n / 2 : n;
      for (int x = 0; x < xs; ++x) psi[pair_of(x, d)] += v * phase_[(k * x) % n];
    }
  }

  void build_block(int k) {
    const int n = spec_.n;
    Block& b = blocks_[k];
    for (int d = 1; d <= half_; ++d)
      if (!(2 * d == n && k % 2 == 1)) b.seps.push_back(d);
    const auto dim = static_cast<Eigen::Index>(b.seps.size());
    Eigen::MatrixXcd h(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(dim);
      unit[j] = 1.0;
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(idx_.size());
      add_backward_block(k, unit, psi);
      h.col(j) = forward_block(k, apply_pair_hamiltonian(spec_, psi));
    }
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    b.energies = es.eigenvalues();
    b.vectors = es.eigenvectors();
    // The lowest state is bound when its pair amplitude never grows with separation.
    const Eigen::VectorXcd low = b.vectors.col(0);
    bool mono = true;
    double prev = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double amp = std::abs(low[j]) * backward_scale(b.seps[j]);
      if (amp > prev * (1.0 + 1e-9) + 1e-12) mono = false;
      prev = amp;
    }
    if (mono && spec_.delta > 0.0) b.bound = 0;
  }

  ChainSpec spec_;
  PairIndex idx_;
  int half_ = 0;
  std::vector<cplx> phase_;
  std::vector<Block> blocks_;
};

}  // namespace detail

/// Evolution inside the two-magnon sector of a finite chain.
class TwoMagnonSector {
 public:
  TwoMagnonSector(const ChainSpec& spec, TwoMagnonBackend backend = TwoMagnonBackend::automatic,
                  QuadratureOptions quad = {})
      : spec_(spec.magnon_spec()), idx_(spec.n), backend_(backend), quad_(quad) {
    spec_.validate();
    spec_.require_finite("two-magnon sector");
    if (backend_ == TwoMagnonBackend::automatic)
      backend_ = spec_.boundary == Boundary::closed ? TwoMagnonBackend::ring_exact : TwoMagnonBackend::dense_pairs;
    switch (backend_) {
      case TwoMagnonBackend::ring_exact:
        if (spec_.boundary != Boundary::closed) throw std::invalid_argument("ring_exact requires a closed chain");
        ring_ = std::make_shared<detail::RingBlocks>(spec_);
        break;
      case TwoMagnonBackend::dense_pairs: {
        if (spec_.n > 64) throw std::invalid_argument("dense_pairs limited to N <= 64");
        Eigen::MatrixXd h(idx_.size(), idx_.size());
        for (Eigen::Index c = 0; c < idx_.size(); ++c) {
          Eigen::VectorXcd e = Eigen::VectorXcd::Zero(idx_.size());
          e[c] = 1.0;
          h.col(c) = apply_pair_hamiltonian(spec_, e).real();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        break;
      }
      case TwoMagnonBackend::bethe_line:
        if (spec_.boundary != Boundary::closed) throw std::invalid_argument("bethe_line requires a closed chain");
        break;
      default: break;
    }
  }

  const ChainSpec& spec() const { return spec_; }
  const PairIndex& index() const { return idx_; }
  TwoMagnonBackend backend() const { return backend_; }

  /// Number of bound states identified (ring_exact only).
  int bound_count() const {
    if (!ring_) throw std::logic_error("bound_count: ring_exact backend only");
    return ring_->bound_count();
  }

  /// U_2(tau) psi restricted to the chosen part. Leakage (bethe_line) is the
  /// norm carried to separations >= N, which the fold cannot represent.
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double tau, TwoMagnonPart part = TwoMagnonPart::total,
                          double* leakage = nullptr, double* error_estimate = nullptr) const {
    if (psi.size() != idx_.size()) throw std::invalid_argument("two-magnon vector size mismatch");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("two-magnon: tau must be >= 0");
    if (leakage) *leakage = 0.0;
    if (error_estimate) *error_estimate = 0.0;
    switch (backend_) {
      case TwoMagnonBackend::ring_exact: return ring_->evolve(psi, tau, part);
      case TwoMagnonBackend::dense_pairs: {
        if (part != TwoMagnonPart::total)
          throw std::invalid_argument("bound/scattering split needs the ring_exact or bethe_line backend");
        Eigen::VectorXcd c = vectors_.transpose().cast<cplx>() * psi;
        for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -energies_[k] * tau);
        return vectors_.cast<cplx>() * c;
      }
      default: return fold(psi, tau, part, leakage, error_estimate);
    }
  }

 private:
  Eigen::VectorXcd fold(const Eigen::VectorXcd& psi, double tau, TwoMagnonPart part, double* leakage,
                        double* error_estimate) const {
    const int n = spec_.n;
    // Lift each ring pair to the line with its shorter separation.
    std::vector<std::tuple<int, int, cplx>> lifted;
    int ylo = std::numeric_limits<int>::max(), yhi = std::numeric_limits<int>::min(), dmax = 1;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (psi[i] == cplx(0.0)) continue;
      auto [a, b] = idx_.pair(i);
      if (b - a > n - (b - a)) {
        const int t = a + n;
        a = b;
        b = t;
      }
      lifted.emplace_back(a, b, psi[i]);
      ylo = std::min(ylo, a + b);
      yhi = std::max(yhi, a + b);
      dmax = std::max(dmax, b - a);
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    if (lifted.empty()) return out;
    PairField src(PairWindow{ylo, yhi, dmax});
    for (auto [a, b, v] : lifted) src.at(a, b) += v;

    const int reach = static_cast<int>(std::ceil(4.0 * spec_.j * tau)) + 20 +
                      10 * static_cast<int>(std::ceil(std::cbrt(4.0 * spec_.j * tau)));
    const PairWindow tgt{ylo - 2 * reach, yhi + 2 * reach, n - 1};
    TwoMagnonBethe engine(spec_.j, spec_.delta, quad_);
    const auto res = engine.propagate(src, tau, part, tgt, spec_.ground_energy());
    if (error_estimate) *error_estimate = res.error_estimate;

    double total = 0.0;
    res.field.for_each([&](int x1, int x2, cplx v) {
      const int a = ((x1 - 1) % n + n) % n + 1;
      const int b = ((x2 - 1) % n + n) % n + 1;
      out[idx_(a, b)] += v;
      total += std::norm(v);
    });
    if (leakage) {
      double before = part == TwoMagnonPart::total ? psi.squaredNorm() : total;
      *leakage = std::max(0.0, before - total);
    }
    return out;
  }

  ChainSpec spec_;
  PairIndex idx_;
  TwoMagnonBackend backend_;
  QuadratureOptions quad_;
  std::shared_ptr<detail::RingBlocks> ring_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
};

}  // namespace qst

#endif  // QST_TWO_MAGNON_HPP
