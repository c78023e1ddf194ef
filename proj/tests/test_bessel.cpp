#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "qst/bessel.hpp"

using namespace qst;

namespace {

double power_series(int n, double x) {
  double term = std::pow(x / 2.0, n) / std::tgamma(n + 1.0), sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    sum += term;
    term *= -(x * x / 4.0) / ((k + 1.0) * (k + 1.0 + n));
  }
  return sum;
}

}  // namespace

TEST(Bessel, MatchesStandardLibrary) {
  for (double x : {0.1, 1.0, 7.5, 30.0, 120.0}) {
    const auto seq = bessel_j_sequence(150, x);
    for (int n = 0; n <= 150; ++n) EXPECT_NEAR(seq[n], std::cyl_bessel_j(double(n), x), 1e-13) << n << ' ' << x;
  }
}

TEST(Bessel, MatchesPowerSeriesAtSmallArgument) {
  for (double x : {0.05, 0.7, 2.0})
    for (int n = 0; n < 12; ++n) EXPECT_NEAR(bessel_j(n, x), power_series(n, x), 1e-14);
}

TEST(Bessel, NegativeOrderReflection) {
  for (int n = 1; n < 9; ++n) EXPECT_NEAR(bessel_j(-n, 3.3), (n % 2 ? -1.0 : 1.0) * bessel_j(n, 3.3), 1e-15);
}

TEST(Bessel, SumRuleAndZeroArgument) {
  for (double x : {0.3, 9.0, 60.0}) {
    const auto seq = bessel_j_sequence(bessel_truncation_order(x), x);
    double s = seq[0] * seq[0];
    for (std::size_t n = 1; n < seq.size(); ++n) s += 2.0 * seq[n] * seq[n];
    EXPECT_NEAR(s, 1.0, 1e-13);
  }
  EXPECT_DOUBLE_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(bessel_j(3, 0.0), 0.0);
}

TEST(Bessel, RejectsBadArgument) {
  EXPECT_THROW(bessel_j(0, -1.0), std::domain_error);
  EXPECT_THROW(bessel_j(0, std::nan("")), std::domain_error);
  EXPECT_THROW(bessel_j_sequence(-1, 1.0), std::domain_error);
}
