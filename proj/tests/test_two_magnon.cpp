#include <gtest/gtest.h>

#include "qst/ed_oracle.hpp"
#include "qst/two_magnon.hpp"

using namespace qst;
namespace ed = qst::ed;

namespace {

// Transfers a pair-basis vector between the sector index and the oracle basis.
Eigen::VectorXcd to_oracle(const PairIndex& idx, const ed::PairSector& ps, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto [a, b] = idx.pair(i);
    out[ps.index(a, b)] = v[i];
  }
  return out;
}

double deviation_from_oracle(const ChainSpec& spec, TwoMagnonBackend backend, double t) {
  const TwoMagnonSector sector(spec, backend);
  const ed::PairSector ps(spec);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sector.index().size());
  psi[sector.index()(2, 3)] = cplx(0.6);
  psi[sector.index()(1, 5)] = cplx(0.0, 0.8);
  const Eigen::VectorXcd got = to_oracle(sector.index(), ps, sector.evolve(psi, t));
  const Eigen::VectorXcd want = ps.evolve(to_oracle(sector.index(), ps, psi), t);
  return (got - want).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(TwoMagnon, PairIndexRoundTrips) {
  const PairIndex idx(9);
  EXPECT_EQ(idx.size(), 36);
  for (Eigen::Index i = 0; i < idx.size(); ++i) {
    const auto [a, b] = idx.pair(i);
    EXPECT_LT(a, b);
    EXPECT_EQ(idx(a, b), i);
    EXPECT_EQ(idx(b, a), i);
  }
}

TEST(TwoMagnon, DensePairsMatchOracle) {
  for (auto spec : {open_chain(10, 0.5, 1.0), open_chain(10, 0.5, 0.4), closed_chain(10, 0.5, 1.0)})
    EXPECT_LE(deviation_from_oracle(spec, TwoMagnonBackend::dense_pairs, 2.3), 1e-11);
}

TEST(TwoMagnon, RingBlocksMatchOracle) {
  for (double d : {1.0, 0.0, 0.6}) EXPECT_LE(deviation_from_oracle(closed_chain(11, 0.5, d), TwoMagnonBackend::ring_exact, 3.1), 1e-11);
}

TEST(TwoMagnon, BareModelMatchesAnisotropyFreeOracle) {
  auto spec = open_chain(9, 0.5, 1.0);
  spec.model = MagnonModel::bare_hopping;
  EXPECT_LE(deviation_from_oracle(spec, TwoMagnonBackend::dense_pairs, 1.7), 1e-11);
}

TEST(TwoMagnon, RingSplitSumsToTotal) {
  const TwoMagnonSector sector(closed_chain(16, 0.5, 1.0), TwoMagnonBackend::ring_exact);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sector.index().size());
  psi[sector.index()(4, 5)] = 1.0;
  const auto b = sector.evolve(psi, 2.0, TwoMagnonPart::bound);
  const auto s = sector.evolve(psi, 2.0, TwoMagnonPart::scattering);
  const auto t = sector.evolve(psi, 2.0, TwoMagnonPart::total);
  EXPECT_LE((b + s - t).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(t.squaredNorm(), 1.0, 1e-12);
  EXPECT_NEAR(b.squaredNorm() + s.squaredNorm(), 1.0, 1e-12);
  EXPECT_EQ(sector.bound_count(), 16);
}

TEST(TwoMagnon, BetheLineFoldApproachesRingOnLongChains) {
  const auto spec = closed_chain(30, 0.5, 1.0);
  const TwoMagnonSector ring(spec, TwoMagnonBackend::ring_exact), line(spec, TwoMagnonBackend::bethe_line);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(ring.index().size());
  psi[ring.index()(10, 11)] = 1.0;
  double leak = 1.0;
  const auto a = line.evolve(psi, 1.5, TwoMagnonPart::total, &leak);
  EXPECT_LE((a - ring.evolve(psi, 1.5)).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LE(leak, 1e-6);
}

TEST(TwoMagnon, HamiltonianActionIsHermitian) {
  const auto spec = open_chain(8, 0.5, 0.7);
  const PairIndex idx(8);
  Eigen::MatrixXcd h(idx.size(), idx.size());
  for (Eigen::Index c = 0; c < idx.size(); ++c) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(idx.size());
    e[c] = 1.0;
    h.col(c) = apply_pair_hamiltonian(spec, e);
  }
  EXPECT_LE((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TwoMagnon, RejectsUnsupportedBackends) {
  EXPECT_THROW(TwoMagnonSector(open_chain(8), TwoMagnonBackend::ring_exact), std::invalid_argument);
  EXPECT_THROW(TwoMagnonSector(open_chain(8), TwoMagnonBackend::bethe_line), std::invalid_argument);
  EXPECT_THROW(TwoMagnonSector(open_chain(70), TwoMagnonBackend::dense_pairs), std::invalid_argument);
  EXPECT_THROW(TwoMagnonSector(ChainSpec{8, Boundary::semi_infinite, 0.5, 1.0}), std::invalid_argument);
  const TwoMagnonSector dense(open_chain(8));
  EXPECT_THROW(dense.evolve(Eigen::VectorXcd::Zero(3), 1.0), std::invalid_argument);
  EXPECT_THROW(dense.evolve(Eigen::VectorXcd::Zero(28), 1.0, TwoMagnonPart::bound), std::invalid_argument);
  EXPECT_EQ(two_magnon_backend_from_string(to_string(TwoMagnonBackend::ring_exact)), TwoMagnonBackend::ring_exact);
}
