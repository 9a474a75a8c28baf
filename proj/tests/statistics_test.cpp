// Copyright 2026 The EPR Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "epr/statistics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"

using namespace epr;

namespace {

constexpr double kPi = std::numbers::pi;

CoincidenceCounts counts(std::uint64_t pp, std::uint64_t pm, std::uint64_t mp, std::uint64_t mm) {
  CoincidenceCounts c;
  c.pp = pp, c.pm = pm, c.mp = mp, c.mm = mm;
  c.total = pp + pm + mp + mm;
  return c;
}

SettingsEstimate block(double a, double b, double e, double err = 0.001) {
  return {Angle<>{a}, Angle<>{b}, {e, err}};
}

// Closed-form chi-square survival functions for 1 and 3 degrees of freedom.
double chi2Sf1(double x) { return std::erfc(std::sqrt(x / 2)); }
double chi2Sf3(double x) { return std::erfc(std::sqrt(x / 2)) + std::sqrt(2 * x / kPi) * std::exp(-x / 2); }

}  // namespace

TEST(EstimateE, WorkedExamples) {
  const auto e = estimateE(counts(400, 100, 100, 400));
  EXPECT_DOUBLE_EQ(e.value, 0.6);
  EXPECT_DOUBLE_EQ(e.stdError, std::sqrt(0.64 / 1000));

  const auto perfect = estimateE(counts(10, 0, 0, 10));
  EXPECT_EQ(perfect.value, 1.0);
  EXPECT_EQ(perfect.stdError, 0.0);

  EXPECT_EQ(estimateE(counts(0, 7, 3, 0)).value, -1.0);
  EXPECT_EQ(estimateE(counts(5, 5, 5, 5)).value, 0.0);
}

TEST(EstimateE, EmptyTallyThrows) {
  EXPECT_THROW(estimateE(CoincidenceCounts{}), std::invalid_argument);
}

TEST(CoincidenceCounts, AddAndMerge) {
  CoincidenceCounts a, b;
  a.addTwoChannel(ChannelOutcome::Plus, ChannelOutcome::Plus);
  a.addTwoChannel(ChannelOutcome::Plus, ChannelOutcome::Minus);
  b.addTwoChannel(ChannelOutcome::Minus, ChannelOutcome::Plus);
  b.addTwoChannel(ChannelOutcome::Minus, ChannelOutcome::Minus);
  b.addChain(true, true);
  b.addChain(true, false);
  b.addChain(false, true);
  const CoincidenceCounts m = a + b;
  EXPECT_EQ(m.pp, 2u);
  EXPECT_EQ(m.pm, 2u);
  EXPECT_EQ(m.mp, 2u);
  EXPECT_EQ(m.mm, 1u);
  EXPECT_EQ(m.detA, 2u);
  EXPECT_EQ(m.detB, 2u);
  EXPECT_EQ(m.detBoth, 1u);
  EXPECT_EQ(m.total, 7u);
  EXPECT_EQ(m.cellSum(), m.total);
}

TEST(ComputeS, IdealQuantumValues) {
  const double c = std::cos(kPi / 4);
  const auto r = computeS({block(0, 0.3927, c), block(0, 1.1781, -c), block(0.7854, 0.3927, c),
                           block(0.7854, 1.1781, c)});
  EXPECT_NEAR(r.s, 4 * c, 1e-15);
  EXPECT_EQ(r.s, r.recomputeS());
  EXPECT_NEAR(r.sStderr, 0.002, 1e-15);
  EXPECT_TRUE(r.violatesClassical);
  EXPECT_TRUE(r.withinTsirelson);
}

TEST(ComputeS, ClassicalBoundaryIsNotAViolation) {
  const auto r = computeS({block(0, 1, 0.5), block(0, 2, -0.5), block(3, 1, 0.5), block(3, 2, 0.5)}, 3);
  EXPECT_DOUBLE_EQ(r.s, 2.0);
  EXPECT_FALSE(r.violatesClassical);
  EXPECT_TRUE(r.withinTsirelson);
}

TEST(ComputeS, VerdictsRespectKSigma) {
  // S = 2.04 with sigma = 0.01: 4 sigma above 2.
  auto blocks = std::array{block(0, 1, 0.51, 0.005), block(0, 2, -0.51, 0.005), block(3, 1, 0.51, 0.005),
                           block(3, 2, 0.51, 0.005)};
  EXPECT_TRUE(computeS(blocks, 3).violatesClassical);
  EXPECT_FALSE(computeS(blocks, 5).violatesClassical);
  blocks = {block(0, 1, 0.75, 0.005), block(0, 2, -0.75, 0.005), block(3, 1, 0.75, 0.005),
            block(3, 2, 0.75, 0.005)};
  EXPECT_FALSE(computeS(blocks, 3).withinTsirelson);
}

TEST(ComputeS, RejectsMisorderedBlocks) {
  EXPECT_THROW(computeS({block(0, 1, 0), block(0, 2, 0), block(3, 2, 0), block(3, 1, 0)}), std::invalid_argument);
  EXPECT_THROW(computeS({block(0, 1, 0), block(3, 2, 0), block(3, 1, 0), block(3, 2, 0)}), std::invalid_argument);
}

TEST(ConditionalDetection, RatioAndError) {
  CoincidenceCounts c;
  c.detA = 200;
  c.detBoth = 50;
  const auto p = conditionalDetection(c);
  EXPECT_DOUBLE_EQ(p.value, 0.25);
  EXPECT_DOUBLE_EQ(p.stdError, std::sqrt(0.25 * 0.75 / 200));
  c.detBoth = 200;
  EXPECT_EQ(conditionalDetection(c).value, 1.0);
  EXPECT_THROW(conditionalDetection(CoincidenceCounts{}), std::invalid_argument);
}

TEST(OrderInvarianceTest, IdenticalHistogramsPass) {
  const std::array<std::uint64_t, 4> h{5000, 2000, 2000, 5000};
  const auto r = orderInvarianceTest(h, h);
  EXPECT_EQ(r.chiSquare, 0.0);
  EXPECT_EQ(r.degreesOfFreedom, 3);
  EXPECT_EQ(r.pValue, 1.0);
  EXPECT_TRUE(r.verdict);
}

TEST(OrderInvarianceTest, MatchesHandComputedStatistic) {
  const std::array<std::uint64_t, 4> a{5000, 2000, 2000, 5000};
  const std::array<std::uint64_t, 4> b{5100, 1950, 1980, 4970};
  double chi = 0;
  const double n1 = 14000, n2 = 14000, n = 28000;
  for (int k = 0; k < 4; ++k) {
    const double col = double(a[k] + b[k]);
    const double e1 = n1 * col / n, e2 = n2 * col / n;
    chi += (a[k] - e1) * (a[k] - e1) / e1 + (b[k] - e2) * (b[k] - e2) / e2;
  }
  const auto r = orderInvarianceTest(a, b);
  EXPECT_NEAR(r.chiSquare, chi, 1e-9);
  EXPECT_NEAR(r.pValue, chi2Sf3(chi), 1e-12);
}

TEST(OrderInvarianceTest, DetectsDifferentDistributions) {
  const std::array<std::uint64_t, 4> a{5000, 2000, 2000, 5000};
  const std::array<std::uint64_t, 4> b{4000, 3000, 3000, 4000};
  const auto r = orderInvarianceTest(a, b);
  EXPECT_LT(r.pValue, 1e-10);
  EXPECT_FALSE(r.verdict);
}

TEST(OrderInvarianceTest, DropsEmptyCategories) {
  const std::array<std::uint64_t, 4> a{6000, 0, 0, 6000};
  const std::array<std::uint64_t, 4> b{6100, 0, 0, 5900};
  const auto r = orderInvarianceTest(a, b);
  EXPECT_EQ(r.degreesOfFreedom, 1);
  EXPECT_NEAR(r.pValue, chi2Sf1(r.chiSquare), 1e-12);
}

TEST(OrderInvarianceTest, RejectsSmallOrMismatchedHistograms) {
  const std::array<std::uint64_t, 4> small{100, 100, 100, 100};
  const std::array<std::uint64_t, 3> three{5000, 5000, 5000};
  const std::array<std::uint64_t, 4> four{5000, 5000, 5000, 5000};
  EXPECT_THROW(orderInvarianceTest(small, small), std::invalid_argument);
  EXPECT_THROW(orderInvarianceTest(three, four), std::invalid_argument);
}

TEST(OrderInvarianceTest, FalseRejectionRateNearAlpha) {
  // Same multinomial on both sides: p-values should be roughly uniform.
  std::mt19937_64 rng(11);
  std::discrete_distribution<int> cell{0.4, 0.1, 0.1, 0.4};
  int rejections = 0;
  constexpr int kRuns = 400;
  for (int run = 0; run < kRuns; ++run) {
    std::array<std::uint64_t, 4> a{}, b{};
    for (int i = 0; i < 10000; ++i) ++a[cell(rng)], ++b[cell(rng)];
    rejections += !orderInvarianceTest(a, b).verdict;
  }
  EXPECT_LT(rejections, 16);  // expected 4
}
