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

// Named experiments. Each scenario is a fixed arrangement of trial blocks;
// block k of a scenario uses trial indices [k * trials, (k + 1) * trials), so
// blocks never share random draws.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "epr/engine.hpp"

namespace epr {

// ---------------------------------------------------------------------------
// Typed runners

struct ExperimentKnobs {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  OrderingPolicy ordering = OrderingPolicy::Arm1First;
  Geometry geometry{12.0, 0.0};
  double kSigma = 3;
  unsigned workers = 0;
};

/// Settings quadruple (a, b, a', b').
struct ChshAngles {
  Angle<> a, b, aPrime, bPrime;

  std::array<SettingsPair, 4> blocks() const {
    return {SettingsPair{a, b}, SettingsPair{a, bPrime}, SettingsPair{aPrime, b},
            SettingsPair{aPrime, bPrime}};
  }
  static ChshAngles canonical();
};

struct ChshScanResult {
  std::array<SettingsPair, 4> settings;
  std::array<CoincidenceCounts, 4> counts;
  ChshReport report;
  RunTally tally;
};

/// Four two-channel blocks starting at block index `firstBlock`.
ChshScanResult runChshScan(const HypothesisModel& model, const ChshAngles& angles,
                           const ExperimentKnobs& knobs, std::uint64_t firstBlock = 0);

struct QwpTestResult {
  CoincidenceCounts counts;
  ConditionalEstimate pBgivenA;
  RunTally tally;
};

QwpTestResult runQwpTest(const HypothesisModel& model, const QwpChainProtocol& protocol,
                         const ExperimentKnobs& knobs, std::uint64_t block = 0);

struct MalusPoint {
  Angle<> theta;
  std::uint64_t passed = 0;
  std::uint64_t total = 0;
};

/// Single photons linear along x through a polarizer at `theta`.
MalusPoint runMalusPoint(Angle<> theta, const ExperimentKnobs& knobs, std::uint64_t block = 0);

struct OrderTestOutcome {
  CoincidenceCounts arm1First;
  CoincidenceCounts arm2First;
  OrderTestResult test;
};

/// Two-channel analyzers at (0, theta), once with arm 1 measured first and
/// once with arm 2 first, in disjoint blocks; chi-square compares the two.
/// The ordering only acts at exact simultaneity, so a nonzero delay is a
/// ConfigError.
OrderTestOutcome runOrderTest(const HypothesisModel& model, Angle<> theta,
                              const ExperimentKnobs& knobs);

// ---------------------------------------------------------------------------
// CLI-level scenarios and result documents

enum class ScenarioName { ChshScan, MalusCheck, QwpTest, OrderTest, ModelMatrix };
enum class OutputFormat { Table, Tsv, Json };

std::string toString(ScenarioName name);
ScenarioName scenarioFromString(const std::string& s);
std::string toString(OutputFormat f);
OutputFormat formatFromString(const std::string& s);
std::string toString(OrderingPolicy p);
OrderingPolicy orderingFromString(const std::string& s);

/// QWP analyzers of the two arms, in degrees and in each photon's own frame.
struct QwpSettings {
  double fastAxisADeg = 0;
  double fastAxisBDeg = 0;
  double offsetADeg = 45;
  double offsetBDeg = 45;

  QwpChainProtocol protocol() const;
  friend bool operator==(const QwpSettings&, const QwpSettings&) = default;
};

struct ScenarioSpec {
  ScenarioName name = ScenarioName::ChshScan;
  std::vector<std::string> models;
  /// chsh-scan: a b a' b'; malus-check: polarizer angles. Degrees.
  std::vector<double> anglesDeg;
  double thetaDeg = 30;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  OrderingPolicy ordering = OrderingPolicy::Arm1First;
  Geometry geometry{12.0, 0.0};
  double kSigma = 3;
  QwpSettings qwp;
  OutputFormat format = OutputFormat::Table;
  std::optional<std::string> outPath;
  std::optional<std::string> plotPath;
  unsigned workers = 0;

  /// Fills scenario defaults (models, angles) left empty.
  void resolveDefaults();
  /// Throws ConfigError naming the offending field.
  void validate() const;
  ExperimentKnobs knobs() const;
};

using Cell = std::variant<std::monostate, std::uint64_t, double, std::string, bool>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(const std::string& name) const;
};

struct EngineMetadata {
  std::string version;
  std::uint64_t trials = 0;
  double wallSeconds = 0;
  unsigned workers = 1;
};

struct ResultDocument {
  /// {"config": <re-runnable config>, plus radian echoes of every angle}.
  nlohmann::ordered_json scenario;
  ResultTable table;
  nlohmann::ordered_json summary;
  EngineMetadata engine;
  ScenarioName name = ScenarioName::ChshScan;
};

/// Resolves defaults, validates, runs.
ResultDocument runScenario(ScenarioSpec spec);

// Config file <-> spec. Unknown keys are ConfigErrors.
ScenarioSpec specFromJson(const nlohmann::json& j, ScenarioSpec base = {});
nlohmann::ordered_json specToJson(const ScenarioSpec& spec);

// Renderers. TSV and JSON carry the same numbers; TSV omits wall time and
// worker count so identical runs give byte-identical files.
std::string renderTable(const ResultDocument& doc);
std::string renderTsv(const ResultDocument& doc);
std::string renderJson(const ResultDocument& doc);
std::string render(const ResultDocument& doc, OutputFormat format);
/// Numeric plot columns (angle vs E, or angle vs P).
std::string renderPlotData(const ResultDocument& doc);

}  // namespace epr
