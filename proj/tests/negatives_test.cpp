#include <gtest/gtest.h>

#include "tapmein/error.hpp"
#include "tapmein/negatives.hpp"
#include "tapmein/tap.hpp"

namespace {

using namespace tapmein;

ProcessedSequence Seq(std::vector<double> p, std::vector<double> d, std::vector<double> u) {
  ProcessedSequence s;
  s.pressures = std::move(p);
  s.sizes.assign(s.pressures.size(), 0.5);
  s.down_durations = std::move(d);
  s.up_durations = std::move(u);
  return s;
}

PopulationStats Stats() {
  PopulationStats s;
  s.pressure = {0.2, 0.9, 0.5, 0.3};
  s.size = {0.1, 0.6, 0.4, 0.2};
  s.down = {40, 500, 200, 120};
  s.up = {30, 900, 300, 250};
  s.sample_count = 10;
  return s;
}

TEST(Fit, PooledTwoPoint) {
  const std::vector<ProcessedSequence> corpus{Seq({0.4, 0.4}, {100, 150}, {10}),
                                              Seq({0.6, 0.6}, {150, 100}, {30})};
  const PopulationStats s = FitPopulationStats(corpus);
  EXPECT_DOUBLE_EQ(s.pressure.min, 0.4);
  EXPECT_DOUBLE_EQ(s.pressure.max, 0.6);
  EXPECT_DOUBLE_EQ(s.pressure.mean, 0.5);
  EXPECT_NEAR(s.pressure.std, 0.1, 1e-12);
  EXPECT_EQ(s.down.min, 100);
  EXPECT_EQ(s.down.max, 150);
  EXPECT_DOUBLE_EQ(s.down.mean, 125);
  EXPECT_DOUBLE_EQ(s.down.std, 25);
  EXPECT_DOUBLE_EQ(s.up.mean, 20);
  EXPECT_EQ(s.sample_count, 2u);
}

TEST(Fit, ConstantSequence) {
  const std::vector<ProcessedSequence> corpus{Seq({0.3, 0.3, 0.3}, {80, 80, 80}, {120, 120})};
  const PopulationStats s = FitPopulationStats(corpus);
  for (const ChannelStats* c : {&s.pressure, &s.size, &s.down, &s.up}) {
    EXPECT_EQ(c->std, 0.0);
    EXPECT_EQ(c->min, c->max);
    EXPECT_EQ(c->min, c->mean);
  }
}

TEST(Fit, EmptyCorpus) {
  try {
    FitPopulationStats(std::vector<ProcessedSequence>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(Sample, Clamped) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const ProcessedSequence n = SampleNegative(Stats(), 9, rng);
    for (double p : n.pressures) ASSERT_TRUE(p >= 0.2 && p <= 0.9);
    for (double s : n.sizes) ASSERT_TRUE(s >= 0.1 && s <= 0.6);
    for (double d : n.down_durations) ASSERT_TRUE(d >= 40 && d <= 500);
    for (double u : n.up_durations) ASSERT_TRUE(u >= 30 && u <= 900);
  }
}

TEST(Sample, ZeroStdGivesMean) {
  PopulationStats s = Stats();
  s.pressure.std = 0;
  s.up.std = 0;
  Rng rng(2);
  const ProcessedSequence n = SampleNegative(s, 6, rng);
  for (double p : n.pressures) EXPECT_EQ(p, 0.5);
  for (double u : n.up_durations) EXPECT_EQ(u, 300);
}

TEST(Sample, ShapeAndDeterminism) {
  Rng a(42), b(42);
  const ProcessedSequence x = SampleNegative(Stats(), 6, a);
  const ProcessedSequence y = SampleNegative(Stats(), 6, b);
  EXPECT_EQ(x, y);
  EXPECT_EQ(x.pressures.size(), 6u);
  EXPECT_EQ(x.sizes.size(), 6u);
  EXPECT_EQ(x.down_durations.size(), 6u);
  EXPECT_EQ(x.up_durations.size(), 5u);
}

TEST(Sample, BadLength) {
  Rng rng(0);
  EXPECT_THROW(SampleNegative(Stats(), 3, rng), Error);
  EXPECT_THROW(SampleNegative(Stats(), 65, rng), Error);
}

TEST(Generate, CountAndLength) {
  Rng rng(3);
  const auto list = GenerateNegatives(Stats(), 7, 25, rng);
  ASSERT_EQ(list.size(), 25u);
  for (const auto& s : list) EXPECT_EQ(s.length(), 7u);
  EXPECT_EQ(GenerateNegatives(Stats(), 7, 1, rng).size(), 1u);
}

TEST(Generate, SeedsDiffer) {
  Rng a(100), b(101);
  EXPECT_NE(GenerateNegatives(Stats(), 6, 5, a), GenerateNegatives(Stats(), 6, 5, b));
}

TEST(Generate, MaterializedNegativesValidate) {
  Rng rng(4);
  for (const auto& s : GenerateNegatives(Stats(), 10, 200, rng)) {
    EXPECT_TRUE(IsValidSequence(Materialize(s)));
  }
}

}  // namespace
