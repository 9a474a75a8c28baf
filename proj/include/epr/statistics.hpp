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

#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "epr/two_photon.hpp"

namespace epr {

/// Exact integer tallies for one settings pair. Two-channel trials fill the
/// pp/pm/mp/mm cells; chain trials fill the detection counters and also map
/// detection to Plus and a miss to Minus in the four cells.
struct CoincidenceCounts {
  std::uint64_t pp = 0, pm = 0, mp = 0, mm = 0;
  std::uint64_t detA = 0, detB = 0, detBoth = 0;
  std::uint64_t total = 0;

  void addTwoChannel(ChannelOutcome a, ChannelOutcome b);
  void addChain(bool detectedA, bool detectedB);

  std::uint64_t cellSum() const { return pp + pm + mp + mm; }
  std::array<std::uint64_t, 4> cells() const { return {pp, pm, mp, mm}; }

  CoincidenceCounts& operator+=(const CoincidenceCounts& other);
  friend CoincidenceCounts operator+(CoincidenceCounts a, const CoincidenceCounts& b) {
    return a += b;
  }
  friend bool operator==(const CoincidenceCounts&, const CoincidenceCounts&) = default;
};

struct CorrelationEstimate {
  double value = 0;
  double stdError = 0;
};

/// E = (N++ + N-- - N+- - N-+)/N with binomial error sqrt((1 - E^2)/N).
/// Throws std::invalid_argument on an empty tally.
CorrelationEstimate estimateE(const CoincidenceCounts& counts);

struct SettingsEstimate {
  Angle<> a;
  Angle<> b;
  CorrelationEstimate e;
};

inline constexpr double kTsirelsonBound = 2.8284271247461903;  // 2 sqrt(2)
inline constexpr double kClassicalBound = 2.0;

/// CHSH combination over blocks ordered (a,b), (a,b'), (a',b), (a',b').
struct ChshReport {
  std::array<SettingsEstimate, 4> blocks;
  double s = 0;
  double sStderr = 0;
  double kSigma = 3;
  bool violatesClassical = false;
  bool withinTsirelson = true;

  Angle<> a() const { return blocks[0].a; }
  Angle<> aPrime() const { return blocks[2].a; }
  Angle<> b() const { return blocks[0].b; }
  Angle<> bPrime() const { return blocks[1].b; }

  double recomputeS() const {
    return blocks[0].e.value - blocks[1].e.value + blocks[2].e.value + blocks[3].e.value;
  }
};

ChshReport computeS(const std::array<SettingsEstimate, 4>& blocks, double kSigma = 3);

struct ConditionalEstimate {
  double value = 0;
  double stdError = 0;
};

/// P(B detected | A detected) = N_detBoth / N_detA with binomial error.
ConditionalEstimate conditionalDetection(const CoincidenceCounts& counts);

struct OrderTestResult {
  double chiSquare = 0;
  double pValue = 1;
  int degreesOfFreedom = 0;
  bool verdict = true;
};

/// Pearson chi-square homogeneity test between two joint-outcome histograms
/// over the same categories. Categories empty in both histograms are dropped.
OrderTestResult orderInvarianceTest(std::span<const std::uint64_t> first,
                                    std::span<const std::uint64_t> second, double alpha = 0.01,
                                    std::uint64_t minTrials = 10'000);

}  // namespace epr
