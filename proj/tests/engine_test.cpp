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


#include "epr/engine.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "epr/errors.hpp"
#include "gtest/gtest.h"

using namespace epr;

namespace {

constexpr double kPi = std::numbers::pi;

RunConfig baseConfig(HypothesisModel model = QmFormal{}, std::uint64_t trials = 20000) {
  RunConfig c;
  c.model = std::move(model);
  c.trials = trials;
  c.settings = FixedSettings{{Angle<>{0.1}, Angle<>{0.6}}};
  c.seed = 1234;
  c.geometry = {12, 0};
  return c;
}

RandomizedSettings fourSettings() {
  RandomizedSettings r;
  for (double a : {0.0, kPi / 4})
    for (double b : {kPi / 8, 3 * kPi / 8}) r.choices.push_back({{Angle<>{a}, Angle<>{b}}, 0.25});
  return r;
}

std::array<std::uint64_t, 4> cellsOf(const RunTally& t) { return t.perSettings.at(0).cells(); }

}  // namespace

TEST(Geometry, SpacelikeSeparation) {
  EXPECT_TRUE((Geometry{12, 10e-9}.spacelike()));  // c * 10 ns = 3.0 m
  EXPECT_FALSE((Geometry{1, 10e-9}.spacelike()));
  EXPECT_TRUE((Geometry{12, 0}.spacelike()));
  EXPECT_TRUE((Geometry{12, -10e-9}.spacelike()));
  EXPECT_FALSE((Geometry{1, -10e-9}.spacelike()));
  EXPECT_TRUE((Geometry{12, 0}.simultaneous()));
  EXPECT_FALSE((Geometry{12, 1e-9}.simultaneous()));
  EXPECT_FALSE((Geometry{kSpeedOfLight, 1.0}.spacelike()));
}

TEST(RunTrial, PureFunctionOfSeedIndexAndConfig) {
  const RunConfig c = baseConfig();
  for (std::uint64_t i : {0ull, 5ull, 999ull}) EXPECT_EQ(runTrial(c, TwoChannelProtocol{}, i), runTrial(c, TwoChannelProtocol{}, i));
  RunConfig other = c;
  other.seed = 1235;
  int differ = 0;
  for (std::uint64_t i = 0; i < 200; ++i)
    differ += runTrial(c, TwoChannelProtocol{}, i).outcomeA != runTrial(other, TwoChannelProtocol{}, i).outcomeA;
  EXPECT_GT(differ, 50);
}

TEST(RunTrial, GeometryIsBookkeepingOnly) {
  RunConfig near = baseConfig(), far = baseConfig();
  near.geometry = {1, 10e-9};
  far.geometry = {12, 10e-9};
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto a = runTrial(near, TwoChannelProtocol{}, i);
    const auto b = runTrial(far, TwoChannelProtocol{}, i);
    EXPECT_EQ(a.outcomeA, b.outcomeA);
    EXPECT_EQ(a.outcomeB, b.outcomeB);
    EXPECT_FALSE(a.spacelike);
    EXPECT_TRUE(b.spacelike);
    EXPECT_FALSE(a.simultaneous);
  }
}

TEST(RunExperiment, DeterministicAndIndexed) {
  const RunConfig c = baseConfig(QmFormal{}, 3000);
  const auto r1 = runExperiment(c, TwoChannelProtocol{}, 1);
  const auto r2 = runExperiment(c, TwoChannelProtocol{}, 3);
  ASSERT_EQ(r1.size(), 3000u);
  EXPECT_EQ(r1, r2);
  for (std::size_t i = 0; i < r1.size(); ++i) EXPECT_EQ(r1[i].trialIndex, i);
}

TEST(TallyExperiment, WorkerCountDoesNotChangeCounts) {
  RunConfig c = baseConfig(QmFormal{}, 30011);
  c.settings = fourSettings();
  c.ordering = OrderingPolicy::RandomPerTrial;
  const RunTally one = tallyExperiment(c, TwoChannelProtocol{}, 1);
  for (unsigned w : {2u, 3u, 8u, 64u}) EXPECT_EQ(tallyExperiment(c, TwoChannelProtocol{}, w), one) << w;
  EXPECT_EQ(one.trials(), 30011u);
}

TEST(TallyRange, ArbitraryPartitionsMergeExactly) {
  RunConfig c = baseConfig(NdvNonlocal{}, 10000);
  c.settings = fourSettings();
  const RunTally whole = tallyRange(c, TwoChannelProtocol{}, 0, 10000);
  RunTally merged;
  std::uint64_t cut = 0;
  for (std::uint64_t next : {17ull, 18ull, 4000ull, 9999ull, 10000ull}) {
    merged += tallyRange(c, TwoChannelProtocol{}, cut, next);
    cut = next;
  }
  EXPECT_EQ(merged, whole);
}

TEST(TallyExperiment, ChainProtocolFillsDetectionCounters) {
  const RunTally t = tallyExperiment(baseConfig(QmFormal{}, 10000), QwpChainProtocol{}, 2);
  const auto& c = t.perSettings.at(0);
  EXPECT_EQ(c.total, 10000u);
  EXPECT_EQ(c.detBoth, c.detA);
  EXPECT_EQ(c.detA, c.detB);
}

TEST(TallyExperiment, FirstTrialIndexShiftsTheDraws) {
  RunConfig a = baseConfig(QmFormal{}, 5000), b = a;
  b.firstTrialIndex = 5000;
  EXPECT_NE(tallyExperiment(a, TwoChannelProtocol{}, 1), tallyExperiment(b, TwoChannelProtocol{}, 1));
  RunTally merged = tallyExperiment(a, TwoChannelProtocol{}, 1);
  merged += tallyExperiment(b, TwoChannelProtocol{}, 1);
  RunConfig both = a;
  both.trials = 10000;
  EXPECT_EQ(merged, tallyExperiment(both, TwoChannelProtocol{}, 1));
}

TEST(Ordering, LocalModelsIgnoreOrderTrialByTrial) {
  for (const HypothesisModel& m : {HypothesisModel{deterministicSignModel()}, HypothesisModel{DefiniteCircular{}}}) {
    RunConfig first = baseConfig(m, 2000), second = first;
    second.ordering = OrderingPolicy::Arm2First;
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const auto r1 = runTrial(first, TwoChannelProtocol{}, i);
      const auto r2 = runTrial(second, TwoChannelProtocol{}, i);
      EXPECT_EQ(r1.outcomeA, r2.outcomeA);
      EXPECT_EQ(r1.outcomeB, r2.outcomeB);
      EXPECT_EQ(r2.order, MeasurementOrder::Arm2First);
    }
  }
}

TEST(Ordering, EarlierEventIsMeasuredFirstAndPolicyOnlyBreaksTies) {
  RunConfig c = baseConfig(NdvNonlocal{}, 100);
  c.ordering = OrderingPolicy::Arm2First;
  c.geometry.delayS = 5e-9;
  EXPECT_EQ(runTrial(c, TwoChannelProtocol{}, 7).order, MeasurementOrder::Arm1First);
  c.ordering = OrderingPolicy::Arm1First;
  c.geometry.delayS = -5e-9;
  EXPECT_EQ(runTrial(c, TwoChannelProtocol{}, 7).order, MeasurementOrder::Arm2First);
  EXPECT_FALSE(runTrial(c, TwoChannelProtocol{}, 7).simultaneous);
  c.geometry.delayS = 0;
  c.ordering = OrderingPolicy::Arm2First;
  EXPECT_EQ(runTrial(c, TwoChannelProtocol{}, 7).order, MeasurementOrder::Arm2First);
  EXPECT_TRUE(runTrial(c, TwoChannelProtocol{}, 7).simultaneous);
}

TEST(Ordering, QuantumStatisticsIndependentOfOrder) {
  RunConfig first = baseConfig(QmFormal{}, 40000), second = first;
  second.ordering = OrderingPolicy::Arm2First;
  second.firstTrialIndex = 40000;
  const auto r = orderInvarianceTest(cellsOf(tallyExperiment(first, TwoChannelProtocol{}, 1)),
                                     cellsOf(tallyExperiment(second, TwoChannelProtocol{}, 1)));
  EXPECT_TRUE(r.verdict) << r.pValue;
}

TEST(Ordering, RandomPerTrialSplitsRoughlyEvenly) {
  RunConfig c = baseConfig(QmFormal{}, 20000);
  c.ordering = OrderingPolicy::RandomPerTrial;
  const RunTally t = tallyExperiment(c, TwoChannelProtocol{}, 1);
  EXPECT_NEAR(double(t.arm1First) / 20000, 0.5, 4 * std::sqrt(0.25 / 20000));
  EXPECT_EQ(t.simultaneous, 20000u);
}

TEST(RandomizedSettings, FrequenciesFollowWeights) {
  RunConfig c = baseConfig(QmFormal{}, 40000);
  RandomizedSettings r = fourSettings();
  r.choices[0].weight = 0.55;
  r.choices[1].weight = 0.15;
  r.choices[2].weight = 0.15;
  r.choices[3].weight = 0.15;
  c.settings = r;
  const RunTally t = tallyExperiment(c, TwoChannelProtocol{}, 1);
  ASSERT_EQ(t.perSettings.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = r.choices[i].weight;
    EXPECT_NEAR(double(t.perSettings[i].total) / 40000, p, 4 * std::sqrt(p * (1 - p) / 40000));
  }
}

TEST(RunConfig, ValidationNamesTheField) {
  auto fieldOf = [](const RunConfig& c) {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string();
  };
  RunConfig c = baseConfig();
  c.trials = 0;
  EXPECT_EQ(fieldOf(c), "trials");
  c = baseConfig();
  c.geometry.armLengthM = -1;
  EXPECT_EQ(fieldOf(c), "geometry.arm_length_m");
  c = baseConfig();
  c.geometry.delayS = std::nan("");
  EXPECT_EQ(fieldOf(c), "geometry.delay_s");
  c = baseConfig();
  RandomizedSettings r = fourSettings();
  r.choices[0].weight = 0.5;
  c.settings = r;
  EXPECT_EQ(fieldOf(c), "settings.weight");
  c.settings = RandomizedSettings{};
  EXPECT_EQ(fieldOf(c), "settings");
  c = baseConfig();
  c.settings = FixedSettings{{Angle<>{INFINITY}, Angle<>{0.0}}};
  EXPECT_EQ(fieldOf(c), "angles");
  LhvModel bad = malusResponseModel();
  bad.density = [](double) { return 1.0; };
  c = baseConfig(bad);
  EXPECT_EQ(fieldOf(c), "model");
  EXPECT_THROW(tallyExperiment(c, TwoChannelProtocol{}, 1), ConfigError);
}

TEST(Protocol, NonConformingChainIsAConfigError) {
  QwpChainProtocol p;
  p.arm2.polarizerOffset = Angle<>{0.3};
  EXPECT_THROW(tallyExperiment(baseConfig(QmFormal{}, 10), p, 1), ConfigError);
}

TEST(ForEachSlice, CoversRangeAndPropagatesExceptions) {
  std::vector<int> hits(1000, 0);
  forEachSlice(0, 1000, 7, [&](std::uint64_t f, std::uint64_t l, unsigned) {
    for (auto i = f; i < l; ++i) ++hits[i];
  });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(forEachSlice(0, 100, 4,
                            [](std::uint64_t f, std::uint64_t, unsigned) {
                              if (f > 0) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(ResolveWorkers, EnvironmentCap) {
  EXPECT_EQ(resolveWorkers(3), 3u);
  setenv("EPR_MAX_WORKERS", "2", 1);
  EXPECT_EQ(resolveWorkers(5), 2u);
  EXPECT_LE(resolveWorkers(0), 2u);
  unsetenv("EPR_MAX_WORKERS");
  EXPECT_GE(resolveWorkers(0), 1u);
}
