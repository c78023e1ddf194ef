#ifndef QST_CALIBRATION_HPP
#define QST_CALIBRATION_HPP

// Cross-checks of the production propagators against exact diagonalization.

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <vector>

#include "qst/chain.hpp"
#include "qst/ed_oracle.hpp"
#include "qst/green1.hpp"
#include "qst/qdp.hpp"

namespace qst {

struct CheckEntry {
  std::string label;
  double t = 0.0;
  double deviation = 0.0;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  double tolerance = 1e-10;

  double max_deviation() const {
    double d = 0.0;
    for (const auto& e : entries) d = std::max(d, e.deviation);
    return d;
  }
  bool passed() const { return max_deviation() <= tolerance; }
};

/// One-magnon propagator columns from every source vs the oracle's sector evolution.
inline CheckReport calibrate_green1(const ChainSpec& spec, const std::vector<double>& times,
                                    Green1Method method = Green1Method::momentum_sum, double tol = 1e-10) {
  spec.validate();
  const ed::BlockPropagator oracle(spec, ed::Basis(spec.n, ed::Sector::one_excitation));
  const OneMagnonModes modes(spec);
  CheckReport rep;
  rep.tolerance = tol;
  for (double t : times) {
    double dev = 0.0;
    for (int x = 1; x <= spec.n; ++x) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(spec.n);
      e[x - 1] = 1.0;
      const Eigen::VectorXcd ref = oracle.evolve(e, t);
      const Eigen::VectorXcd got = method == Green1Method::momentum_sum ? modes.column(x, t) : green1_bessel_column(x, t, spec);
      dev = std::max(dev, (ref - got).cwiseAbs().maxCoeff());
    }
    rep.entries.push_back({std::string("green1/") + (method == Green1Method::momentum_sum ? "momentum_sum" : "bessel"), t, dev});
  }
  return rep;
}

/// Bloch-averaged fidelity profiles of the engine vs the oracle (N <= 12).
inline CheckReport oracle_check(const ChainSpec& spec, const QdpEvent& ev, const std::vector<double>& times,
                                QdpOptions opts = {}, double tol = 1e-10) {
  const QdpEngine engine(spec, opts);
  const ed::Evolver oracle(spec);
  CheckReport rep;
  rep.tolerance = tol;
  for (double t : times) {
    Eigen::VectorXd got;
    std::string label;
    const bool after = ev.kind != QdpKind::none && t >= ev.t0;
    if (!after) {
      got = engine.free_profile(t);
      label = "free";
    } else if (ev.kind == QdpKind::projective) {
      got = engine.projective_profile(ev.site, ev.t0, t);
      label = "projective";
    } else {
      got = engine.unitary_fidelity_profile(ev, t);
      label = "unitary";
    }
    double dev = 0.0;
    for (int l = 1; l <= spec.n; ++l) {
      double ref;
      if (!after)
        ref = ed::free_fidelity(oracle, l, t);
      else if (ev.kind == QdpKind::projective)
        ref = ed::projective_fidelity(oracle, l, ev.site, ev.t0, t);
      else
        ref = ed::unitary_fidelity(oracle, l, ev.site, ev.t0, t, *ev.gate);
      dev = std::max(dev, std::abs(ref - got[l - 1]));
    }
    rep.entries.push_back({label, t, dev});
  }
  return rep;
}

}  // namespace qst

#endif  // QST_CALIBRATION_HPP
