#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "qst/convention.hpp"
#include "qst/golden.hpp"

using namespace qst;

TEST(Golden, EveryFileCarriesTheCurrentConventionHash) {
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(QST_GOLDEN_DIR)) {
    if (e.path().extension() != ".json") continue;
    const auto r = read_golden(e.path().string());
    EXPECT_EQ(r.convention_hash, convention_hash()) << e.path();
    EXPECT_EQ(r.name + ".json", e.path().filename().string());
    EXPECT_FALSE(r.values.empty());
    ++count;
  }
  EXPECT_GE(count, 13);
}

TEST(Golden, RoundTripsThroughJson) {
  GoldenRecord r;
  r.name = "sample";
  r.inputs = {{"n", 3}};
  r.tolerance = 1e-9;
  r.values = {cplx(1.0, -2.0), cplx(0.125, 3e-17)};
  const auto path = (std::filesystem::temp_directory_path() / "qst_golden_roundtrip.json").string();
  write_golden(path, r);
  const auto back = read_golden(path);
  EXPECT_EQ(back.name, r.name);
  EXPECT_EQ(back.inputs, r.inputs);
  EXPECT_DOUBLE_EQ(back.tolerance, r.tolerance);
  EXPECT_EQ(max_deviation(back.values, r.values), 0.0);
  std::filesystem::remove(path);
}

TEST(Golden, MaxDeviationRejectsLengthMismatch) {
  EXPECT_THROW(max_deviation({cplx(1.0)}, {}), std::invalid_argument);
}
