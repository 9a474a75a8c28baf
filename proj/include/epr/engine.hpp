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

// Seedable Monte Carlo driver. Trial i is a pure function of (seed, i,
// config): its uniforms come from a Philox stream keyed by the seed with
// counter i, so any partition of the index range across workers produces the
// same records and the same integer tallies.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

#include "epr/hypothesis.hpp"
#include "epr/statistics.hpp"

namespace epr {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact

struct SettingsPair {
  Angle<> a;
  Angle<> b;

  friend bool operator==(const SettingsPair&, const SettingsPair&) = default;
};

struct WeightedSettings {
  SettingsPair settings;
  double weight = 1;
};

struct FixedSettings {
  SettingsPair settings;
};

struct RandomizedSettings {
  std::vector<WeightedSettings> choices;
};

using SettingsPolicy = std::variant<FixedSettings, RandomizedSettings>;

enum class OrderingPolicy { Arm1First, Arm2First, RandomPerTrial };

/// Bookkeeping only: nothing in the physics reads these values.
struct Geometry {
  double armLengthM = 0;
  /// t_II - t_I between the two measurement events; negative when arm 2
  /// fires first.
  double delayS = 0;

  bool spacelike() const { return armLengthM > kSpeedOfLight * std::abs(delayS); }
  bool simultaneous() const { return delayS == 0; }
  /// Which arm's event is earlier; nullopt at exact simultaneity.
  std::optional<MeasurementOrder> timeOrder() const {
    if (delayS > 0) return MeasurementOrder::Arm1First;
    if (delayS < 0) return MeasurementOrder::Arm2First;
    return std::nullopt;
  }
};

struct RunConfig {
  HypothesisModel model = QmFormal{};
  std::uint64_t trials = 1;
  SettingsPolicy settings = FixedSettings{};
  OrderingPolicy ordering = OrderingPolicy::Arm1First;
  std::uint64_t seed = 0;
  Geometry geometry;
  /// Index of the first trial; disjoint blocks of one run use disjoint ranges.
  std::uint64_t firstTrialIndex = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct TwoChannelProtocol {};

struct QwpChainProtocol {
  QwpAnalyzer arm1 = QwpAnalyzer::forHandedness(Handedness::R);
  QwpAnalyzer arm2 = QwpAnalyzer::forHandedness(Handedness::R);
};

using Protocol = std::variant<TwoChannelProtocol, QwpChainProtocol>;

struct TrialRecord {
  std::uint64_t trialIndex = 0;
  std::size_t settingsIndex = 0;
  SettingsPair settings;
  MeasurementOrder order = MeasurementOrder::Arm1First;
  /// Two-channel outcomes; Absorbed never appears here.
  ChannelOutcome outcomeA = ChannelOutcome::Minus;
  ChannelOutcome outcomeB = ChannelOutcome::Minus;
  /// Chain protocol detections.
  bool detectedA = false;
  bool detectedB = false;
  bool spacelike = false;
  /// Exact simultaneity: the ordering policy acted as the tie-break rule.
  /// Otherwise the order is the time order of the two events.
  bool simultaneous = false;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

TrialRecord runTrial(const RunConfig& config, const Protocol& protocol, std::uint64_t trialIndex);

/// Mergeable tally over a run: one CoincidenceCounts per settings choice.
struct RunTally {
  std::vector<CoincidenceCounts> perSettings;
  std::uint64_t arm1First = 0;
  std::uint64_t arm2First = 0;
  std::uint64_t spacelike = 0;
  std::uint64_t simultaneous = 0;

  void add(const TrialRecord& record, const Protocol& protocol);
  RunTally& operator+=(const RunTally& other);
  std::uint64_t trials() const { return arm1First + arm2First; }

  friend bool operator==(const RunTally&, const RunTally&) = default;
};

std::size_t settingsCount(const SettingsPolicy& policy);

/// Tally of trials [first, last) (absolute indices).
RunTally tallyRange(const RunConfig& config, const Protocol& protocol, std::uint64_t first,
                    std::uint64_t last);

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// EPR_MAX_WORKERS environment variable when set.
unsigned resolveWorkers(unsigned requested);

/// Runs `body(first, last)` over contiguous slices of [first, last) on up to
/// `workers` threads.
void forEachSlice(std::uint64_t first, std::uint64_t last, unsigned workers,
                  const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body);

/// All records of a run, ordered by trial index.
std::vector<TrialRecord> runExperiment(const RunConfig& config, const Protocol& protocol,
                                       unsigned workers = 0);

/// Parallel tally; equal to tallyRange over the whole run for any worker count.
RunTally tallyExperiment(const RunConfig& config, const Protocol& protocol, unsigned workers = 0);

}  // namespace epr
