#include <gtest/gtest.h>

#include <string>

#include "qst/golden.hpp"
#include "qst/harper.hpp"

using namespace qst;

TEST(Harper, MatchesGenericEigensolverReference) {
  const auto r = read_golden(std::string(QST_GOLDEN_DIR) + "/harper_open30.json");
  HarperSpec spec;
  spec.n = r.inputs.at("n");
  spec.g = r.inputs.at("g");
  spec.tau = r.inputs.at("tau");
  spec.eta = r.inputs.at("eta");
  const auto s = propagate(spec, r.inputs.at("kicks").get<int>(), InitialState{cplx(0.0), cplx(1.0)});
  const std::vector<cplx> got(s.amps.data(), s.amps.data() + s.amps.size());
  EXPECT_LE(max_deviation(got, r.values), 1e-11);
}

TEST(Harper, FloquetStepIsUnitary) {
  for (auto b : {Boundary::open, Boundary::closed}) {
    HarperSpec spec;
    spec.n = 40;
    spec.boundary = b;
    spec.tau = 0.9;
    spec.g = 3.0;
    EXPECT_LE(floquet_step(spec).unitarity_defect(), 1e-12);
  }
}

TEST(Harper, NormIsConserved) {
  HarperSpec spec;
  spec.n = 50;
  const auto series = propagate_series(spec, 200, InitialState::from_alpha2(0.3));
  for (const auto& s : series) EXPECT_NEAR(s.norm2(), 1.0, 1e-11);
}

TEST(Harper, ZeroKickStrengthIsFreeHopping) {
  HarperSpec spec;
  spec.n = 20;
  spec.g = 0.0;
  const auto hop = hopping_exponential(20, Boundary::open, 5 * spec.tau);
  const auto s = propagate(spec, 5, InitialState{cplx(0.0), cplx(1.0)});
  EXPECT_LE((s.amps - hop.col(0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Harper, DetectorSumsToZeroAndDefinitionsAgree) {
  HarperSpec spec;
  spec.n = 60;
  const auto in = InitialState::from_alpha2(0.75);
  const auto r = qdp_and_detect(spec, 12, 30, 120, in);
  EXPECT_NEAR(r.f.sum(), 0.0, 1e-12);
  EXPECT_LE((r.x_tilde - r.x - r.f).cwiseAbs().maxCoeff(), 0.0);
  const auto none = qdp_and_detect(spec, 12, 120, 120, in);
  const auto free = propagate(spec, 120, in);
  EXPECT_LE((none.fidelity.head(11) - harper_fidelity(free, in).head(11)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Harper, StrongerKicksLocalise) {
  HarperSpec weak, strong;
  strong.g = 3.0;
  auto width = [](const HarperSpec& s) {
    return spread_metric(propagate(s, 500, InitialState{cplx(0.0), cplx(1.0)}).amps.cwiseAbs2());
  };
  EXPECT_GT(width(weak), 2.0 * width(strong));
}

TEST(Harper, FirstPassageIsCausal) {
  HarperSpec spec;
  spec.tau = 0.9;
  const int k = first_passage(spec, 10, 20, 40, 2000, 1e-4, InitialState{cplx(0.0), cplx(1.0)});
  ASSERT_GT(k, 20);
  EXPECT_EQ(first_passage(spec, 10, 20, 40, k - 1, 1e-4, InitialState{cplx(0.0), cplx(1.0)}), -1);
}

TEST(Harper, RejectsBadInput) {
  HarperSpec spec;
  spec.tau = 0.0;
  EXPECT_THROW(floquet_step(spec), std::invalid_argument);
  spec = HarperSpec{};
  spec.boundary = Boundary::semi_infinite;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  EXPECT_THROW(qdp_and_detect(HarperSpec{}, 0, 1, 2, InitialState{}), std::out_of_range);
  EXPECT_THROW(qdp_and_detect(HarperSpec{}, 3, 5, 2, InitialState{}), std::invalid_argument);
  EXPECT_THROW(spread_metric(Eigen::VectorXd::Zero(4)), std::invalid_argument);
}
