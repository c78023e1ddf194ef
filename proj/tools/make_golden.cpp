// Regenerates the reference files in tests/golden from the exact-diagonalization
// oracle and the standard library. Usage: qst_golden <output-dir>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qst/chain.hpp"
#include "qst/ed_oracle.hpp"
#include "qst/golden.hpp"

namespace {

using qst::cplx;
namespace ed = qst::ed;

nlohmann::json chain(const qst::ChainSpec& s) {
  return {{"n", s.n}, {"boundary", qst::to_string(s.boundary)}, {"j", s.j}, {"delta", s.delta}, {"model", qst::to_string(s.model)}};
}

qst::GoldenRecord green1_case(const std::string& name, const qst::ChainSpec& spec, const std::vector<int>& sources,
                              const std::vector<double>& times) {
  const ed::BlockPropagator prop(spec, ed::Basis(spec.n, ed::Sector::one_excitation));
  qst::GoldenRecord r;
  r.name = name;
  r.inputs = {{"chain", chain(spec)}, {"sources", sources}, {"times", times}, {"layout", "source, time, target"}};
  for (int x : sources)
    for (double t : times) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(spec.n);
      e[x - 1] = 1.0;
      const Eigen::VectorXcd v = prop.evolve(e, t);
      r.values.insert(r.values.end(), v.data(), v.data() + v.size());
    }
  return r;
}

qst::GoldenRecord free_case(const qst::ChainSpec& spec, const std::vector<double>& times) {
  const ed::Evolver ev(spec);
  qst::GoldenRecord r;
  r.name = "free_fidelity_" + qst::to_string(spec.boundary) + std::to_string(spec.n);
  r.inputs = {{"chain", chain(spec)}, {"times", times}, {"layout", "time, target"}};
  for (double t : times)
    for (int l = 1; l <= spec.n; ++l) r.values.emplace_back(ed::free_fidelity(ev, l, t), 0.0);
  return r;
}

qst::GoldenRecord projective_case(const qst::ChainSpec& spec, int m, double t0, const std::vector<double>& times) {
  const ed::Evolver ev(spec);
  qst::GoldenRecord r;
  r.name = "projective_fidelity_" + qst::to_string(spec.boundary) + std::to_string(spec.n);
  r.inputs = {{"chain", chain(spec)}, {"site", m}, {"t0", t0}, {"times", times}, {"layout", "time, target"}};
  for (double t : times)
    for (int l = 1; l <= spec.n; ++l) r.values.emplace_back(ed::projective_fidelity(ev, l, m, t0, t), 0.0);
  return r;
}

qst::GoldenRecord unitary_case(const std::string& name, const qst::ChainSpec& spec, int m, double t0, double t,
                               const qst::Gate& g) {
  const ed::Evolver ev(spec);
  qst::GoldenRecord r;
  r.name = name;
  r.inputs = {{"chain", chain(spec)}, {"site", m}, {"t0", t0}, {"t", t},
              {"gate", {{"gamma", {g.gamma.real(), g.gamma.imag()}}, {"delta", {g.delta.real(), g.delta.imag()}}}},
              {"layout", "target"}};
  for (int l = 1; l <= spec.n; ++l) r.values.emplace_back(ed::unitary_fidelity(ev, l, m, t0, t, g), 0.0);
  return r;
}

/// Vacuum, one-magnon (y = 1..N), then pairs a < b in lexicographic order.
qst::GoldenRecord unitary_state_case(const qst::ChainSpec& spec, int m, double t0, double t, const qst::Gate& g,
                                     const qst::InitialState& in) {
  const ed::Evolver ev(spec);
  const ed::DenseState st = ed::unitary_state(ev, in, m, t0, t, g);
  qst::GoldenRecord r;
  r.name = "unitary_state_" + qst::to_string(spec.boundary) + std::to_string(spec.n);
  r.inputs = {{"chain", chain(spec)}, {"site", m}, {"t0", t0}, {"t", t},
              {"gate", {{"gamma", {g.gamma.real(), g.gamma.imag()}}, {"delta", {g.delta.real(), g.delta.imag()}}}},
              {"alpha", {in.alpha.real(), in.alpha.imag()}}, {"beta", {in.beta.real(), in.beta.imag()}},
              {"layout", "vacuum, one magnon y = 1..N, pairs a < b lexicographic"}};
  r.values.push_back(st.at(0));
  for (int y = 1; y <= spec.n; ++y) r.values.push_back(st.at(ed::site_bit(y)));
  for (int a = 1; a <= spec.n; ++a)
    for (int b = a + 1; b <= spec.n; ++b) r.values.push_back(st.at(ed::site_bit(a) | ed::site_bit(b)));
  return r;
}

/// Kicked chain from a generic dense eigensolver of the hopping matrix.
qst::GoldenRecord harper_case(int n, double g, double tau, double eta, int kicks) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x + 1 < n; ++x) t(x, x + 1) = t(x + 1, x) = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  Eigen::VectorXcd ph(n);
  for (int k = 0; k < n; ++k) ph[k] = std::polar(1.0, -tau * es.eigenvalues()[k]);
  const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
  const Eigen::MatrixXcd hop = v * ph.asDiagonal() * v.adjoint();
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
  a[0] = 1.0;
  for (int k = 0; k < kicks; ++k) {
    for (int j = 0; j < n; ++j) a[j] *= std::polar(1.0, -tau * g * std::cos(2.0 * qst::pi * (j + 1) * eta / n));
    a = hop * a;
  }
  qst::GoldenRecord r;
  r.name = "harper_open" + std::to_string(n);
  r.inputs = {{"n", n}, {"g", g}, {"tau", tau}, {"eta", eta}, {"kicks", kicks}, {"boundary", "open"}, {"layout", "site"}};
  r.values.assign(a.data(), a.data() + a.size());
  return r;
}

qst::GoldenRecord bessel_case() {
  const std::vector<double> xs{0.5, 5.0, 25.0, 80.0};
  const int orders = 120;
  qst::GoldenRecord r;
  r.name = "bessel_j";
  r.tolerance = 1e-12;
  r.inputs = {{"x", xs}, {"orders", orders}, {"layout", "x, order 0..orders-1"}};
  for (double x : xs)
    for (int k = 0; k < orders; ++k) r.values.emplace_back(std::cyl_bessel_j(double(k), x), 0.0);
  return r;
}

qst::GoldenRecord bound_band_case(int n) {
  const auto spec = qst::closed_chain(n, 0.5, 1.0);
  const auto band = ed::bound_band_projector(spec);
  qst::GoldenRecord r;
  r.name = "bound_band_closed" + std::to_string(n);
  r.tolerance = 0.0;
  r.inputs = {{"chain", chain(spec)}, {"layout", "confined, strict, total"}};
  r.values = {cplx(band.confined), cplx(band.strict), cplx(band.total)};
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: qst_golden <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  const std::vector<double> times{0.5, 1.0, 2.0, 5.0};

  const qst::Gate generic{cplx(0.6, 0.0), std::polar(0.8, 0.3)};
  auto bare = qst::open_chain(12, 0.5, 1.0);
  bare.model = qst::MagnonModel::bare_hopping;

  std::vector<qst::GoldenRecord> recs{
      green1_case("green1_open12_delta1", qst::open_chain(12, 0.5, 1.0), {1, 5}, times),
      green1_case("green1_open12_delta0", qst::open_chain(12, 0.5, 0.0), {1, 5}, times),
      green1_case("green1_open12_delta07", qst::open_chain(12, 0.5, 0.7), {1, 5}, times),
      green1_case("green1_closed12_delta05", qst::closed_chain(12, 0.5, 0.5), {1, 5}, times),
      green1_case("green1_open12_bare", bare, {1, 5}, times),
      free_case(qst::open_chain(10, 0.5, 1.0), {1.0, 3.0, 6.0}),
      projective_case(qst::open_chain(10, 0.5, 1.0), 4, 1.0, {1.0, 2.5, 4.0}),
      unitary_case("unitary_fidelity_closed10_hadamard", qst::closed_chain(10, 0.5, 1.0), 3, 1.0, 2.5, qst::Gate::hadamard_like()),
      unitary_case("unitary_fidelity_open10_bitflip", qst::open_chain(10, 0.5, 0.5), 4, 1.5, 3.0, qst::Gate::bit_flip()),
      unitary_state_case(qst::closed_chain(12, 0.5, 1.0), 5, 2.0, 4.0, generic, {cplx(0.8), cplx(0.0, 0.6)}),
      harper_case(30, 1.0, 0.3, std::sqrt(2.0), 20),
      bessel_case(),
      bound_band_case(20),
  };
  for (const auto& r : recs) {
    const auto path = dir / (r.name + ".json");
    qst::write_golden(path.string(), r);
    std::cout << path.string() << '\n';
  }
  return 0;
}
