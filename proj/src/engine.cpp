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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#include "epr/rng.hpp"

namespace epr {

namespace {

bool finiteAngles(const SettingsPair& s) { return std::isfinite(s.a.rad) && std::isfinite(s.b.rad); }

std::size_t chooseSettings(const SettingsPolicy& policy, double u) {
  const auto* randomized = std::get_if<RandomizedSettings>(&policy);
  if (randomized == nullptr) return 0;
  double cumulative = 0;
  for (std::size_t i = 0; i < randomized->choices.size(); ++i) {
    cumulative += randomized->choices[i].weight;
    if (u < cumulative) return i;
  }
  return randomized->choices.size() - 1;
}

const SettingsPair& settingsAt(const SettingsPolicy& policy, std::size_t index) {
  if (const auto* fixed = std::get_if<FixedSettings>(&policy)) return fixed->settings;
  return std::get<RandomizedSettings>(policy).choices[index].settings;
}

MeasurementOrder chooseOrder(OrderingPolicy policy, double u) {
  switch (policy) {
    case OrderingPolicy::Arm1First: return MeasurementOrder::Arm1First;
    case OrderingPolicy::Arm2First: return MeasurementOrder::Arm2First;
    case OrderingPolicy::RandomPerTrial: break;
  }
  return u < 0.5 ? MeasurementOrder::Arm1First : MeasurementOrder::Arm2First;
}

void validateProtocol(const Protocol& protocol) {
  if (const auto* chain = std::get_if<QwpChainProtocol>(&protocol)) {
    try {
      chain->arm1.validate();
      chain->arm2.validate();
    } catch (const ModelError& e) {
      throw ConfigError("qwp", e.what());
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  if (trials < 1) throw ConfigError("trials", "must be at least 1");
  if (!(geometry.armLengthM >= 0) || !std::isfinite(geometry.armLengthM)) {
    throw ConfigError("geometry.arm_length_m", "must be a finite value >= 0");
  }
  if (!std::isfinite(geometry.delayS)) {
    throw ConfigError("geometry.delay_s", "must be finite");
  }
  if (const auto* fixed = std::get_if<FixedSettings>(&settings)) {
    if (!finiteAngles(fixed->settings)) throw ConfigError("angles", "must be finite");
  } else {
    const auto& choices = std::get<RandomizedSettings>(settings).choices;
    if (choices.empty()) throw ConfigError("settings", "randomized policy needs at least one pair");
    double sum = 0;
    for (const auto& c : choices) {
      if (!finiteAngles(c.settings)) throw ConfigError("angles", "must be finite");
      if (!(c.weight >= 0)) throw ConfigError("settings.weight", "must be nonnegative");
      sum += c.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("settings.weight", "weights must sum to 1");
  }
  if (const auto* lhv = std::get_if<LhvModel>(&model)) {
    const double norm = densityIntegral(*lhv);
    if (std::abs(norm - 1.0) > 1e-6) throw ConfigError("model", "LHV density is not normalized");
  }
}

std::size_t settingsCount(const SettingsPolicy& policy) {
  if (const auto* r = std::get_if<RandomizedSettings>(&policy)) return r->choices.size();
  return 1;
}

TrialRecord runTrial(const RunConfig& config, const Protocol& protocol, std::uint64_t trialIndex) {
  TrialStream stream = rngStreamFor(config.seed, trialIndex);
  const TrialDraws draws = TrialDraws::from(stream);

  TrialRecord rec;
  rec.trialIndex = trialIndex;
  rec.settingsIndex = chooseSettings(config.settings, draws.settings);
  rec.settings = settingsAt(config.settings, rec.settingsIndex);
  // The ordering draw is consumed either way so the stream stays aligned.
  const MeasurementOrder policyOrder = chooseOrder(config.ordering, draws.ordering);
  rec.order = config.geometry.timeOrder().value_or(policyOrder);
  rec.spacelike = config.geometry.spacelike();
  rec.simultaneous = config.geometry.simultaneous();

  const PairEmission emission = emitPair(config.model, draws.emission);
  const ArmCoins coins{draws.coinArm1, draws.coinArm2};
  if (const auto* chain = std::get_if<QwpChainProtocol>(&protocol)) {
    const ChainOutcome out =
        respondQwpChain(config.model, emission, chain->arm1, chain->arm2, rec.order, coins);
    rec.detectedA = out.detectedA;
    rec.detectedB = out.detectedB;
  } else {
    const TwoChannelOutcome out = respondTwoChannel(config.model, emission, rec.settings.a,
                                                    rec.settings.b, rec.order, coins);
    rec.outcomeA = out.a;
    rec.outcomeB = out.b;
  }
  return rec;
}

void RunTally::add(const TrialRecord& r, const Protocol& protocol) {
  if (perSettings.size() <= r.settingsIndex) perSettings.resize(r.settingsIndex + 1);
  if (std::holds_alternative<QwpChainProtocol>(protocol)) {
    perSettings[r.settingsIndex].addChain(r.detectedA, r.detectedB);
  } else {
    perSettings[r.settingsIndex].addTwoChannel(r.outcomeA, r.outcomeB);
  }
  (r.order == MeasurementOrder::Arm1First ? arm1First : arm2First) += 1;
  spacelike += r.spacelike;
  simultaneous += r.simultaneous;
}

RunTally& RunTally::operator+=(const RunTally& o) {
  if (perSettings.size() < o.perSettings.size()) perSettings.resize(o.perSettings.size());
  for (std::size_t i = 0; i < o.perSettings.size(); ++i) perSettings[i] += o.perSettings[i];
  arm1First += o.arm1First;
  arm2First += o.arm2First;
  spacelike += o.spacelike;
  simultaneous += o.simultaneous;
  return *this;
}

RunTally tallyRange(const RunConfig& config, const Protocol& protocol, std::uint64_t first,
                    std::uint64_t last) {
  RunTally tally;
  tally.perSettings.resize(settingsCount(config.settings));
  for (std::uint64_t i = first; i < last; ++i) tally.add(runTrial(config, protocol, i), protocol);
  return tally;
}

unsigned resolveWorkers(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("EPR_MAX_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(cap, &end, 10);
    if (end != cap && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return std::max(1u, n);
}

void forEachSlice(std::uint64_t first, std::uint64_t last, unsigned workers,
                  const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body) {
  const std::uint64_t count = last > first ? last - first : 0;
  const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers),
                                                                   std::max<std::uint64_t>(count, 1)));
  if (n == 1) {
    body(first, last, 0);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failureMutex;
  const std::uint64_t chunk = count / n;
  const std::uint64_t extra = count % n;
  std::uint64_t begin = first;
  for (unsigned w = 0; w < n; ++w) {
    const std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
    threads.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        std::lock_guard lock(failureMutex);
        if (!failure) failure = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<TrialRecord> runExperiment(const RunConfig& config, const Protocol& protocol,
                                       unsigned workers) {
  config.validate();
  validateProtocol(protocol);
  std::vector<TrialRecord> records(config.trials);
  const std::uint64_t base = config.firstTrialIndex;
  forEachSlice(base, base + config.trials, resolveWorkers(workers),
               [&](std::uint64_t first, std::uint64_t last, unsigned) {
                 for (std::uint64_t i = first; i < last; ++i) {
                   records[i - base] = runTrial(config, protocol, i);
                 }
               });
  return records;
}

RunTally tallyExperiment(const RunConfig& config, const Protocol& protocol, unsigned workers) {
  config.validate();
  validateProtocol(protocol);
  const unsigned n = resolveWorkers(workers);
  std::vector<RunTally> partial(n);
  const std::uint64_t base = config.firstTrialIndex;
  forEachSlice(base, base + config.trials, n,
               [&](std::uint64_t first, std::uint64_t last, unsigned w) {
                 partial[w] = tallyRange(config, protocol, first, last);
               });
  RunTally total;
  total.perSettings.resize(settingsCount(config.settings));
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace epr
