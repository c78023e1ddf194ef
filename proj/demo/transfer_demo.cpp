// Arrival of a qubit sent from site 1 of a long chain, with and without a
// measurement of site m at time t0.

#include <algorithm>
#include <cstdio>

#include "qst/qdp.hpp"

int main() {
  qst::ChainSpec spec{100, qst::Boundary::semi_infinite, 0.5, 1.0};
  spec.model = qst::MagnonModel::bare_hopping;
  const qst::QdpEngine engine(spec);

  const int m = 20;
  const double t0 = 10.0;
  std::printf("   l   t_peak   F_free   F_measured\n");
  for (int l = 20; l <= 100; l += 20) {
    double best = 0.0, t_best = 0.0;
    for (double t = 0.0; t <= 80.0; t += 0.05) {
      const double f = engine.free_profile(t)[l - 1];
      if (f > best) {
        best = f;
        t_best = t;
      }
    }
    const double fm = engine.projective_profile(m, t0, std::max(t_best, t0))[l - 1];
    std::printf("%4d  %7.2f   %.4f   %.4f\n", l, t_best, best, fm);
  }
  return 0;
}
