// Acceptance report: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Dense>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qst/bessel.hpp"
#include "qst/bethe.hpp"
#include "qst/calibration.hpp"
#include "qst/chain.hpp"
#include "qst/ed_oracle.hpp"
#include "qst/green1.hpp"
#include "qst/harper.hpp"
#include "qst/qdp.hpp"
#include "qst/two_magnon.hpp"

#ifndef QST_CLI_PATH
#define QST_CLI_PATH "qst"
#endif

namespace {

using namespace qst;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Wall at site 1, observed sites 1..100.
ChainSpec semi_infinite_chain() { return ChainSpec{100, Boundary::semi_infinite, 0.5, 1.0}; }

ChainSpec bare(ChainSpec s) {
  s.model = MagnonModel::bare_hopping;
  return s;
}

// 1. One-magnon propagator vs exact diagonalization.
Outcome calibration_gate() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> times{0.5, 1.0, 2.0, 5.0};
  double dev = 0.0;
  for (double delta : {1.0, 0.0}) {
    const auto spec = open_chain(12, 0.5, delta);
    dev = std::max(dev, calibrate_green1(spec, times, Green1Method::momentum_sum).max_deviation());
    dev = std::max(dev, calibrate_green1(spec, times, Green1Method::bessel).max_deviation());
  }
  const double s = seconds_since(t0);
  return {dev <= 1e-10 && s < 1.0, "max|dev|=" + fmt(dev) + " runtime=" + fmt(s, 3) + "s"};
}

// 2. Free-transfer peak near t = l/2.
Outcome free_peak() {
  const auto t0 = std::chrono::steady_clock::now();
  const QdpEngine e(bare(semi_infinite_chain()));
  const std::array<int, 5> ls{20, 40, 60, 80, 100};
  std::array<double, 5> best{}, arg{};
  best.fill(-1.0);
  for (int i = 0; i <= 20000; ++i) {
    const double t = 0.01 * i;
    const auto f = e.free_profile(t);
    for (std::size_t k = 0; k < ls.size(); ++k)
      if (f[ls[k] - 1] > best[k]) {
        best[k] = f[ls[k] - 1];
        arg[k] = t;
      }
  }
  bool ok = seconds_since(t0) < 10.0;
  std::string d = "argmax t:";
  for (std::size_t k = 0; k < ls.size(); ++k) {
    ok = ok && std::abs(arg[k] - ls[k] / 2.0) <= 0.15 * ls[k] / 2.0;
    d += " l=" + std::to_string(ls[k]) + "->" + fmt(arg[k]);
  }
  return {ok, d + " runtime=" + fmt(seconds_since(t0), 3) + "s"};
}

// 3. Saturation at t = 200.
Outcome saturation() {
  const QdpEngine e(bare(semi_infinite_chain()));
  const auto f = e.free_profile(200.0);
  double dev = 0.0;
  for (int l = 1; l <= 20; ++l) dev = std::max(dev, std::abs(f[l - 1] - 0.5));
  return {dev <= 0.02, "max|F-0.5| over l<=20 = " + fmt(dev)};
}

double max_projective_difference(const QdpEngine& e, int m, double t0, double t_max, double dt) {
  double mx = -1.0;
  const auto steps = static_cast<long>(std::floor((t_max - t0) / dt + 1e-9));
  for (long i = 0; i <= steps; ++i) mx = std::max(mx, e.projective_difference(m, t0, t0 + dt * i).maxCoeff());
  return mx;
}

// 4. Projective-interruption extremes.
Outcome projective_extremes() {
  const auto c0 = std::chrono::steady_clock::now();
  const QdpEngine e(bare(semi_infinite_chain()));
  const double a = max_projective_difference(e, 1, 0.0, 100.0, 0.01);
  const double b = max_projective_difference(e, 20, 10.0, 100.0, 0.01);
  const double c = max_projective_difference(e, 1, 10.0, 100.0, 0.01);
  const double s = seconds_since(c0);
  const bool ok = std::abs(a - 0.4) <= 0.1 && std::abs(b - 0.15) <= 0.05 && c <= 0.02 && s < 30.0;
  return {ok, "max dF (m=1,t0=0+)=" + fmt(a) + " (m=20,t0=10)=" + fmt(b) + " (m=1,t0=10)=" + fmt(c) +
                  " runtime=" + fmt(s, 3) + "s"};
}

// 5. Difference of peak fidelities with m = l, t0 = l/2.
Outcome plateau() {
  const QdpEngine e(bare(semi_infinite_chain()));
  bool ok = true;
  std::string d = "peak difference:";
  for (int l = 40; l <= 100; l += 10) {
    const double t0 = l / 2.0;
    double free_max = -1.0, qdp_max = -1.0;
    for (int i = 0; i <= 10000; ++i) {
      const double t = 0.01 * i;
      const double f = e.free_profile(t)[l - 1];
      free_max = std::max(free_max, f);
      qdp_max = std::max(qdp_max, t < t0 ? f : e.projective_profile(l, t0, t)[l - 1]);
    }
    const double diff = qdp_max - free_max;
    ok = ok && diff >= 0.05 && diff <= 0.15;
    d += " l=" + std::to_string(l) + "->" + fmt(diff, 3);
  }
  return {ok, d};
}

// 6. Kraus identities.
Outcome kraus_identities() {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> site(1, 40);
  std::uniform_real_distribution<double> time(0.0, 15.0), delta(-1.5, 1.5);
  double hk = 0.0, trace = 0.0, diff = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ChainSpec spec{40, i % 2 ? Boundary::open : Boundary::closed, 0.5, delta(rng)};
    const OneMagnonModes modes(spec);
    const int m = site(rng), y = site(rng), yt = site(rng);
    double t0 = time(rng), t = time(rng);
    if (t < t0) std::swap(t, t0);
    const auto p = hk_propagators(y, yt, m, t, t0, spec);
    // H evolved directly from the projected state, independent of the branch identity.
    Eigen::VectorXcd mid = modes.column(y, t0);
    const cplx gm = mid[m - 1];
    mid[m - 1] = 0.0;
    const Eigen::VectorXcd hv = modes.evolve(mid, t - t0);
    hk = std::max(hk, std::abs(hv[yt - 1] + p.k - modes.amplitude(y, yt, t)));
    hk = std::max(hk, std::abs(hv[yt - 1] - p.h));
    const double norm = hv.squaredNorm() + (gm * modes.column(m, t - t0)).squaredNorm();
    trace = std::max(trace, std::abs(norm - 1.0));
    const int l = yt;
    diff = std::max(diff, std::abs(delta_fidelity_projective(l, m, t, t0, spec) -
                                   (fidelity_projective(l, m, t, t0, spec) - fidelity_free(l, t, spec))));
  }
  return {hk <= 1e-9 && trace <= 1e-9 && diff <= 1e-10,
          "max|H+K-G|=" + fmt(hk) + " max|trace-1|=" + fmt(trace) + " max|dF-(F~-F)|=" + fmt(diff)};
}

// 7. Gate interruption vs the oracle, and the Hadamard-at-origin identity.
Outcome unitary_vs_oracle() {
  double d01 = 0.0, d2 = 0.0, df = 0.0;
  const std::array<Gate, 2> gates{Gate::hadamard_like(), Gate::bit_flip()};
  const InitialState in{cplx(0.6), cplx(0.0, 0.8)};
  for (Boundary b : {Boundary::closed, Boundary::open}) {
    const ChainSpec spec{12, b, 0.5, 1.0};
    const QdpEngine e(spec);
    const ed::Evolver ev(spec);
    for (const Gate& g : gates) {
      const auto ev_qdp = QdpEvent::unitary(5, 2.0, g);
      const auto st = e.unitary_state(ev_qdp, 4.0, in);
      const auto ref = ed::unitary_state(ev, in, 5, 2.0, 4.0, g);
      d01 = std::max(d01, std::abs(st.vacuum - ref.at(0)));
      for (int y = 1; y <= 12; ++y) d01 = std::max(d01, std::abs(st.one[y - 1] - ref.at(ed::site_bit(y))));
      for (int a = 1; a <= 12; ++a)
        for (int c = a + 1; c <= 12; ++c)
          d2 = std::max(d2, std::abs(st.pair(a, c) - ref.at(ed::site_bit(a) | ed::site_bit(c))));
      const auto prof = e.unitary_fidelity_profile(ev_qdp, 4.0);
      for (int l = 1; l <= 12; ++l)
        df = std::max(df, std::abs(prof[l - 1] - ed::unitary_fidelity(ev, l, 5, 2.0, 4.0, g)));
    }
  }
  double had = 0.0;
  for (Boundary b : {Boundary::closed, Boundary::open}) {
    const ChainSpec spec{40, b, 0.5, 1.0};
    const QdpEngine e(spec);
    const auto ev_qdp = QdpEvent::unitary(1, 0.0, Gate::hadamard_like());
    for (double t : {0.5, 1.5, 3.0, 6.0}) {
      const auto prof = e.unitary_fidelity_profile(ev_qdp, t);
      const auto g = e.column(1, t);
      for (int l = 1; l <= spec.n; ++l)
        had = std::max(had, std::abs(prof[l - 1] - 0.5 - (e.phase0(t) * g[l - 1]).real() / 6.0));
    }
  }
  const bool ok = d01 <= 1e-8 && d2 <= 1e-2 && df <= 1e-2 && had <= 1e-10;
  return {ok, "zero/one-magnon " + fmt(d01) + " two-magnon " + fmt(d2) + " fidelity " + fmt(df) +
                  " hadamard identity " + fmt(had)};
}

// 8. Two-magnon completeness, unitarity and the free-fermion limit on the infinite line.
Outcome two_magnon_line() {
  const auto c0 = std::chrono::steady_clock::now();
  QuadratureOptions q;
  double kron = 0.0;
  for (double delta : {1.0, 0.0}) {
    const TwoMagnonBethe eng(0.5, delta, q);
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {0, 3}}) {
      PairField src(PairWindow{a + b, a + b, b - a});
      src.at(a, b) = 1.0;
      const PairWindow tw{a + b - 6, a + b + 6, 8};
      const auto r = eng.propagate(src, 0.0, TwoMagnonPart::total, tw);
      for (int y = tw.y_min; y <= tw.y_max; ++y)
        for (int d = 1; d <= tw.d_max; ++d) {
          if ((y + d) % 2) continue;
          const int x1 = (y - d) / 2, x2 = (y + d) / 2;
          const double want = (x1 == a && x2 == b) ? 1.0 : 0.0;
          kron = std::max(kron, std::abs(r.field.at(x1, x2) - want));
        }
    }
  }
  double unit = 0.0;
  const TwoMagnonBethe iso(0.5, 1.0, q);
  PairField src(PairWindow{1, 1, 1});
  src.at(0, 1) = 1.0;
  for (double t : {1.0, 2.0, 4.0}) {
    const int reach = static_cast<int>(std::ceil(2.0 * t)) + 14;
    const PairWindow tw{1 - 2 * reach, 1 + 2 * reach, 2 * reach};
    const auto r = iso.propagate(src, t, TwoMagnonPart::total, tw);
    unit = std::max(unit, std::abs(r.field.norm2() - 1.0));
  }
  double fact = 0.0;
  const TwoMagnonBethe xx(0.5, 0.0, q);
  auto g = [](int from, int to, double t) {
    const int d = to - from;
    return detail::i_pow(((std::abs(d) % 4) + 4) % 4) * bessel_j(std::abs(d), 2.0 * t);
  };
  for (double t : {1.0, 3.0}) {
    PairField s(PairWindow{3, 3, 1});
    s.at(1, 2) = 1.0;
    const PairWindow tw{-5, 11, 8};
    const auto r = xx.propagate(s, t, TwoMagnonPart::total, tw);
    for (int y = tw.y_min; y <= tw.y_max; ++y)
      for (int d = 1; d <= tw.d_max; ++d) {
        if ((y + d) % 2) continue;
        const int y1 = (y - d) / 2, y2 = (y + d) / 2;
        const cplx det = g(1, y1, t) * g(2, y2, t) - g(2, y1, t) * g(1, y2, t);
        fact = std::max(fact, std::abs(r.field.at(y1, y2) - det));
      }
  }
  const double s = seconds_since(c0);
  return {kron <= 1e-3 && unit <= 1e-3 && fact <= 1e-6 && s < 300.0,
          "t=0 kronecker " + fmt(kron) + " |sum|L|^2-1| " + fmt(unit) + " free-fermion " + fmt(fact) +
              " runtime=" + fmt(s, 3) + "s"};
}

// 9. Bound band count and the scattering/bound weight split.
Outcome bound_split() {
  const auto band = ed::bound_band_projector(closed_chain(20, 0.5, 1.0));
  const ChainSpec spec = closed_chain(40, 0.5, 1.0);
  const QdpEngine e(spec);
  const auto ev = QdpEvent::unitary(10, 5.0, Gate::bit_flip());
  const GridAxes ax{1, 40, 5.0, 20.0, 0.25};
  const auto gb = fill_grid(e, Scenario::split_bound, ev, ax);
  const auto gs = fill_grid(e, Scenario::split_scattering, ev, ax);
  const double wb = gb.values.sum(), ws = gs.values.sum();
  const bool ok = band.confined >= 17 && band.confined <= 20 && ws > wb;
  return {ok, "bound states at N=20: " + std::to_string(band.confined) + " (strict 90% rule: " +
                  std::to_string(band.strict) + "); weight scattering=" + fmt(ws) + " bound=" + fmt(wb)};
}

// 10. Constructive interference after a bit flip at m = 15, t0 = 7.5.
Outcome interference() {
  const auto c0 = std::chrono::steady_clock::now();
  const QdpEngine e(bare(closed_chain(100, 0.5, 1.0)));
  const auto ev = QdpEvent::unitary(15, 7.5, Gate::bit_flip());
  const auto g = fill_grid(e, Scenario::unitary_difference, ev, GridAxes{1, 100, 0.0, 40.0, 0.1});
  const double mx = g.values.maxCoeff();
  return {mx >= 0.15 && mx <= 0.30, "max dF=" + fmt(mx) + " min dF=" + fmt(g.values.minCoeff()) +
                                        " runtime=" + fmt(seconds_since(c0), 3) + "s"};
}

// 11. Kicked Harper properties.
Outcome harper_properties() {
  const auto c0 = std::chrono::steady_clock::now();
  double unit = 0.0;
  for (double tau : {0.1, 0.4, 0.9})
    for (Boundary b : {Boundary::open, Boundary::closed})
      unit = std::max(unit, floquet_step(HarperSpec{100, 1.0, std::sqrt(2.0), tau, b}).unitarity_defect());
  double fsum = 0.0;
  const InitialState half{std::sqrt(0.5), std::sqrt(0.5)};
  for (double g : {1.0, 3.0})
    for (int n : {5, 40, 200}) {
      const auto r = qdp_and_detect(HarperSpec{100, g, std::sqrt(2.0), 0.1}, 1, 5, n, half);
      fsum = std::max(fsum, std::abs(r.f.sum()));
    }
  const InitialState one{0.0, 1.0};
  const auto w1 = spread_metric(propagate(HarperSpec{100, 1.0, std::sqrt(2.0), 0.1}, 500, one).amps.cwiseAbs2());
  const auto w3 = spread_metric(propagate(HarperSpec{100, 3.0, std::sqrt(2.0), 0.1}, 500, one).amps.cwiseAbs2());
  const int slow = first_passage(HarperSpec{100, 1.0, std::sqrt(2.0), 0.1}, 1, 5, 100, 5000, 1e-4, half);
  const int fast = first_passage(HarperSpec{100, 1.0, std::sqrt(2.0), 0.9}, 1, 5, 100, 5000, 1e-4, half);
  const double s = seconds_since(c0);
  const bool ok = unit <= 1e-12 && fsum <= 1e-10 && w3 < w1 && fast > 0 && slow > 0 && 4 * (fast - 5) <= (slow - 5) && s < 30.0;
  return {ok, "unitarity " + fmt(unit) + " |sum f| " + fmt(fsum) + " width g=1: " + fmt(w1) + " g=3: " + fmt(w3) +
                  " first passage (kicks after the measurement) tau=0.1: " + std::to_string(slow - 5) +
                  " tau=0.9: " + std::to_string(fast - 5) + " runtime=" + fmt(s, 3) + "s"};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 12. Byte-identical repeated CLI runs.
Outcome determinism() {
  const std::string cli = QST_CLI_PATH;
  const std::vector<std::string> cases{
      "--n 40 --model bare-hopping fidelity --t-max 30 --dt 0.5",
      "--n 30 --boundary closed unitary-qdp --site 8 --t0 3 --t-max 10 --dt 0.5 --gamma-abs 0.6 --delta-phase 0.4",
      "--n 60 detector --g 1 --tau 0.4 --kicks 50 --qdp-site 1 --qdp-kick 5"};
  bool ok = true;
  int idx = 0;
  for (const auto& args : cases) {
    std::string outs[3];
    for (int run = 0; run < 3; ++run) {
      const std::string path = "acceptance_det_" + std::to_string(idx) + "_" + std::to_string(run) + ".csv";
      const std::string threads = run == 2 ? " --threads 1" : " --threads 4";
      const std::string cmd = "\"" + cli + "\" " + args + threads + " --out " + path;
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
      outs[run] = slurp(path) + slurp(path + ".meta.json");
      std::remove(path.c_str());
      std::remove((path + ".meta.json").c_str());
    }
    ok = ok && !outs[0].empty() && outs[0] == outs[1] && outs[0] == outs[2];
    ++idx;
  }
  return {ok, std::to_string(cases.size()) + " commands x 3 runs (including a thread-count change)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"calibration gate", calibration_gate},
      {"free-transfer peak", free_peak},
      {"saturation", saturation},
      {"projective extremes", projective_extremes},
      {"peak-difference plateau", plateau},
      {"kraus identities", kraus_identities},
      {"gate interruption vs oracle", unitary_vs_oracle},
      {"two-magnon completeness", two_magnon_line},
      {"bound/scattering split", bound_split},
      {"constructive interference", interference},
      {"kicked harper", harper_properties},
      {"determinism", determinism},
  };
  int failures = 0;
  int k = 0;
  for (const auto& [name, run] : criteria) {
    ++k;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << k << ' ' << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << '/' << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
