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


#include "epr/rng.hpp"

#include <cmath>
#include <set>

#include "gtest/gtest.h"

using namespace epr;

using Block = std::array<std::uint32_t, 4>;

TEST(Philox4x32, KnownAnswers) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(TrialStream, FirstDrawsComeFromBlockZero) {
  TrialStream s(0, 0);
  const Block b = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(s.nextU64(), (std::uint64_t{b[0]} << 32) | b[1]);
  EXPECT_EQ(s.nextU64(), (std::uint64_t{b[2]} << 32) | b[3]);
  const Block next = philox4x32({0, 0, 1, 0}, {0, 0});
  EXPECT_EQ(s.nextU64(), (std::uint64_t{next[0]} << 32) | next[1]);
}

TEST(TrialStream, DeterministicPerSeedAndIndex) {
  for (std::uint64_t idx : {0ull, 1ull, 12345ull, 1ull << 40}) {
    TrialStream a(42, idx), b(42, idx);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(a.nextU64(), b.nextU64());
  }
}

TEST(TrialStream, DistinctSeedsAndIndicesGiveDistinctStreams) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed = 0; seed < 32; ++seed)
    for (std::uint64_t idx = 0; idx < 32; ++idx) firsts.insert(TrialStream(seed, idx).nextU64());
  EXPECT_EQ(firsts.size(), 32u * 32u);
  // High seed bits reach the key.
  EXPECT_NE(TrialStream(1, 0).nextU64(), TrialStream(1 | (1ull << 33), 0).nextU64());
}

TEST(TrialStream, UniformsInUnitInterval) {
  for (std::uint64_t idx = 0; idx < 1000; ++idx) {
    TrialStream s(9, idx);
    for (int i = 0; i < 5; ++i) {
      const double u = s.nextUniform();
      EXPECT_GE(u, 0.0);
      EXPECT_LT(u, 1.0);
    }
  }
}

TEST(TrialStream, AdjacentStreamsUncorrelated) {
  constexpr int kN = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < kN; ++i) {
    const double x = TrialStream(5, i).nextUniform();
    const double y = TrialStream(5, i + 1).nextUniform();
    sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
  }
  const double cov = sxy / kN - (sx / kN) * (sy / kN);
  const double r = cov / std::sqrt((sxx / kN - sx * sx / kN / kN) * (syy / kN - sy * sy / kN / kN));
  EXPECT_LT(std::abs(r), 0.05);
  EXPECT_NEAR(sx / kN, 0.5, 0.005);
}

TEST(TrialDraws, FixedOrder) {
  TrialStream a(77, 3), b(77, 3);
  const TrialDraws d = TrialDraws::from(a);
  EXPECT_EQ(d.settings, b.nextUniform());
  EXPECT_EQ(d.ordering, b.nextUniform());
  EXPECT_EQ(d.emission, b.nextUniform());
  EXPECT_EQ(d.coinArm1, b.nextUniform());
  EXPECT_EQ(d.coinArm2, b.nextUniform());
}
