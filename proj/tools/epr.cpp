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

// epr <scenario> [options]
//
// Exit codes: 0 success, 1 configuration error, 2 invariant violation or
// other internal failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "epr/errors.hpp"
#include "epr/scenarios.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInternal = 2;

void writeTo(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw epr::ConfigError("out", "cannot open '" + path + "' for writing");
  f << text;
}

nlohmann::json readConfig(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw epr::ConfigError("config", "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw epr::ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo workbench for two-photon polarization-correlation experiments"};
  app.set_version_flag("--version", EPR_VERSION);

  std::string scenario;
  std::vector<std::string> models;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> angles;
  double theta = 0;
  std::string format;
  std::string out;
  std::string plot;
  std::string configPath;
  unsigned workers = 0;
  std::string ordering;
  double armLength = 0;
  double delay = 0;
  double kSigma = 0;
  double fastA = 0, fastB = 0, offsetA = 0, offsetB = 0;

  app.add_option("scenario", scenario, "chsh-scan | malus-check | qwp-test | order-test | model-matrix");
  auto* oModel = app.add_option("--model", models,
                                "qm | lhv-sign | lhv-malus | definite-circular | ndv-nonlocal (repeatable)");
  auto* oTrials = app.add_option("--trials", trials, "Trials per settings block");
  auto* oSeed = app.add_option("--seed", seed, "64-bit run seed");
  auto* oAngles = app.add_option("--angles", angles, "Angles in degrees (chsh: a b a' b'; malus: list)");
  auto* oTheta = app.add_option("--theta", theta, "Relative analyzer angle in degrees (order-test)");
  auto* oFormat = app.add_option("--format", format, "table | tsv | json");
  auto* oOut = app.add_option("--out", out, "Write the result document here instead of stdout");
  auto* oPlot = app.add_option("--plot", plot, "Write numeric plot columns here");
  app.add_option("--config", configPath, "JSON config file; command-line flags take precedence");
  auto* oWorkers = app.add_option("--workers", workers, "Worker threads (0 = all cores)");
  auto* oOrdering = app.add_option("--ordering", ordering, "arm1-first | arm2-first | random");
  auto* oArm = app.add_option("--arm-length", armLength, "Arm length l in meters");
  auto* oDelay = app.add_option("--delay", delay, "t_II - t_I in seconds; the earlier event is measured first");
  auto* oK = app.add_option("--k-sigma", kSigma, "Verdict threshold in standard errors");
  auto* oFastA = app.add_option("--qwp-fast-a", fastA, "Arm-1 plate fast axis, degrees (own frame)");
  auto* oFastB = app.add_option("--qwp-fast-b", fastB, "Arm-2 plate fast axis, degrees (own frame)");
  auto* oOffA = app.add_option("--qwp-offset-a", offsetA, "Arm-1 polarizer offset from the fast axis (+-45)");
  auto* oOffB = app.add_option("--qwp-offset-b", offsetB, "Arm-2 polarizer offset from the fast axis (+-45)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    epr::ScenarioSpec spec;
    bool haveScenario = false;
    if (!configPath.empty()) {
      const nlohmann::json j = readConfig(configPath);
      spec = epr::specFromJson(j);
      haveScenario = j.contains("scenario");
    }
    if (!scenario.empty()) {
      spec.name = epr::scenarioFromString(scenario);
      haveScenario = true;
    }
    if (!haveScenario) throw epr::ConfigError("scenario", "no scenario given");

    if (oModel->count()) spec.models = models;
    if (oTrials->count()) spec.trials = trials;
    if (oSeed->count()) spec.seed = seed;
    if (oAngles->count()) spec.anglesDeg = angles;
    if (oTheta->count()) spec.thetaDeg = theta;
    if (oFormat->count()) spec.format = epr::formatFromString(format);
    if (oOut->count()) spec.outPath = out;
    if (oPlot->count()) spec.plotPath = plot;
    if (oWorkers->count()) spec.workers = workers;
    if (oOrdering->count()) spec.ordering = epr::orderingFromString(ordering);
    if (oArm->count()) spec.geometry.armLengthM = armLength;
    if (oDelay->count()) spec.geometry.delayS = delay;
    if (oK->count()) spec.kSigma = kSigma;
    if (oFastA->count()) spec.qwp.fastAxisADeg = fastA;
    if (oFastB->count()) spec.qwp.fastAxisBDeg = fastB;
    if (oOffA->count()) spec.qwp.offsetADeg = offsetA;
    if (oOffB->count()) spec.qwp.offsetBDeg = offsetB;

    const epr::ResultDocument doc = epr::runScenario(spec);
    const std::string text = epr::render(doc, spec.format);
    if (spec.outPath) {
      writeTo(*spec.outPath, text);
    } else {
      std::cout << text;
    }
    if (spec.plotPath) writeTo(*spec.plotPath, epr::renderPlotData(doc));
    return 0;
  } catch (const epr::ConfigError& e) {
    std::cerr << "epr: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const epr::InvariantViolation& e) {
    std::cerr << "epr: invariant violation: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "epr: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
