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

#include <algorithm>
#include <cmath>

#include "epr/scenarios.hpp"

namespace epr {

namespace {

template <class Enum, std::size_t N>
std::string lookupName(const std::array<std::pair<Enum, const char*>, N>& table, Enum value) {
  for (const auto& [e, name] : table)
    if (e == value) return name;
  return "?";
}

template <class Enum, std::size_t N>
Enum lookupValue(const std::array<std::pair<Enum, const char*>, N>& table, const std::string& s,
                 const char* field) {
  for (const auto& [e, name] : table)
    if (s == name) return e;
  std::string allowed;
  for (const auto& entry : table) allowed += std::string(allowed.empty() ? "" : "|") + entry.second;
  throw ConfigError(field, "unknown value '" + s + "' (expected " + allowed + ")");
}

constexpr std::array<std::pair<ScenarioName, const char*>, 5> kScenarios{{
    {ScenarioName::ChshScan, "chsh-scan"},
    {ScenarioName::MalusCheck, "malus-check"},
    {ScenarioName::QwpTest, "qwp-test"},
    {ScenarioName::OrderTest, "order-test"},
    {ScenarioName::ModelMatrix, "model-matrix"},
}};

constexpr std::array<std::pair<OutputFormat, const char*>, 3> kFormats{{
    {OutputFormat::Table, "table"},
    {OutputFormat::Tsv, "tsv"},
    {OutputFormat::Json, "json"},
}};

constexpr std::array<std::pair<OrderingPolicy, const char*>, 3> kOrderings{{
    {OrderingPolicy::Arm1First, "arm1-first"},
    {OrderingPolicy::Arm2First, "arm2-first"},
    {OrderingPolicy::RandomPerTrial, "random"},
}};

template <class T>
T fieldAs(const nlohmann::json& value, const std::string& field, const char* expected) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field, std::string("expected ") + expected);
  }
}

double numberField(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

std::uint64_t countField(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(field, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

std::string toString(ScenarioName name) { return lookupName(kScenarios, name); }
ScenarioName scenarioFromString(const std::string& s) { return lookupValue(kScenarios, s, "scenario"); }
std::string toString(OutputFormat f) { return lookupName(kFormats, f); }
OutputFormat formatFromString(const std::string& s) { return lookupValue(kFormats, s, "format"); }
std::string toString(OrderingPolicy p) { return lookupName(kOrderings, p); }
OrderingPolicy orderingFromString(const std::string& s) { return lookupValue(kOrderings, s, "ordering"); }

void ScenarioSpec::resolveDefaults() {
  if (models.empty()) {
    if (name == ScenarioName::ModelMatrix) {
      models = {"qm", "ndv-nonlocal", "definite-circular", "lhv-sign"};
    } else {
      models = {"qm"};
    }
  }
  if (anglesDeg.empty()) {
    if (name == ScenarioName::MalusCheck) {
      anglesDeg = {0, 15, 30, 45, 60, 75, 90};
    } else if (name == ScenarioName::ChshScan || name == ScenarioName::ModelMatrix) {
      anglesDeg = {0, 22.5, 45, 67.5};
    }
  }
}

void ScenarioSpec::validate() const {
  if (trials < 1) throw ConfigError("trials", "must be at least 1");
  if (name == ScenarioName::OrderTest && trials < 10'000) {
    throw ConfigError("trials", "order-test needs at least 10000 trials per ordering");
  }
  for (double d : anglesDeg)
    if (!std::isfinite(d)) throw ConfigError("angles_deg", "angles must be finite");
  if (!std::isfinite(thetaDeg)) throw ConfigError("theta_deg", "must be finite");
  if ((name == ScenarioName::ChshScan || name == ScenarioName::ModelMatrix) && anglesDeg.size() != 4) {
    throw ConfigError("angles_deg", "CHSH needs exactly four angles a b a' b'");
  }
  if (name == ScenarioName::MalusCheck && anglesDeg.empty()) {
    throw ConfigError("angles_deg", "malus-check needs at least one angle");
  }
  if (models.empty()) throw ConfigError("model", "no model selected");
  if (models.size() > 1 && (name == ScenarioName::ChshScan || name == ScenarioName::OrderTest)) {
    throw ConfigError("model", toString(name) + " takes a single model");
  }
  for (const auto& m : models) modelFromName(m);
  if (!(kSigma > 0) || !std::isfinite(kSigma)) throw ConfigError("k_sigma", "must be positive");
  if (!(geometry.armLengthM >= 0) || !std::isfinite(geometry.armLengthM)) {
    throw ConfigError("geometry.arm_length_m", "must be a finite value >= 0");
  }
  if (!std::isfinite(geometry.delayS)) throw ConfigError("geometry.delay_s", "must be finite");
  if (name == ScenarioName::OrderTest && geometry.delayS != 0) {
    throw ConfigError("geometry.delay_s", "order-test compares orderings at exact simultaneity; use 0");
  }
  const QwpChainProtocol p = qwp.protocol();
  try {
    p.arm1.validate();
    p.arm2.validate();
  } catch (const ModelError& e) {
    throw ConfigError("qwp", e.what());
  }
}

ExperimentKnobs ScenarioSpec::knobs() const {
  ExperimentKnobs k;
  k.trials = trials;
  k.seed = seed;
  k.ordering = ordering;
  k.geometry = geometry;
  k.kSigma = kSigma;
  k.workers = workers;
  return k;
}

ScenarioSpec specFromJson(const nlohmann::json& j, ScenarioSpec base) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  ScenarioSpec s = std::move(base);
  for (const auto& [key, v] : j.items()) {
    if (key == "scenario") {
      s.name = scenarioFromString(fieldAs<std::string>(v, key, "a string"));
    } else if (key == "model") {
      if (v.is_string()) {
        s.models = {v.get<std::string>()};
      } else {
        s.models = fieldAs<std::vector<std::string>>(v, key, "a string or array of strings");
      }
    } else if (key == "angles_deg") {
      if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
      s.anglesDeg.clear();
      for (const auto& a : v) s.anglesDeg.push_back(numberField(a, key));
    } else if (key == "theta_deg") {
      s.thetaDeg = numberField(v, key);
    } else if (key == "trials") {
      s.trials = countField(v, key);
    } else if (key == "seed") {
      s.seed = countField(v, key);
    } else if (key == "ordering") {
      s.ordering = orderingFromString(fieldAs<std::string>(v, key, "a string"));
    } else if (key == "k_sigma") {
      s.kSigma = numberField(v, key);
    } else if (key == "workers") {
      s.workers = static_cast<unsigned>(countField(v, key));
    } else if (key == "format") {
      s.format = formatFromString(fieldAs<std::string>(v, key, "a string"));
    } else if (key == "out") {
      s.outPath = fieldAs<std::string>(v, key, "a string");
    } else if (key == "plot") {
      s.plotPath = fieldAs<std::string>(v, key, "a string");
    } else if (key == "geometry") {
      if (!v.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [gk, gv] : v.items()) {
        const std::string field = "geometry." + gk;
        if (gk == "arm_length_m") s.geometry.armLengthM = numberField(gv, field);
        else if (gk == "delay_s") s.geometry.delayS = numberField(gv, field);
        else throw ConfigError(field, "unknown field");
      }
    } else if (key == "qwp") {
      if (!v.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [qk, qv] : v.items()) {
        const std::string field = "qwp." + qk;
        if (qk == "fast_axis_a_deg") s.qwp.fastAxisADeg = numberField(qv, field);
        else if (qk == "fast_axis_b_deg") s.qwp.fastAxisBDeg = numberField(qv, field);
        else if (qk == "offset_a_deg") s.qwp.offsetADeg = numberField(qv, field);
        else if (qk == "offset_b_deg") s.qwp.offsetBDeg = numberField(qv, field);
        else throw ConfigError(field, "unknown field");
      }
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  return s;
}

nlohmann::ordered_json specToJson(const ScenarioSpec& s) {
  nlohmann::ordered_json j;
  j["scenario"] = toString(s.name);
  j["model"] = s.models;
  j["angles_deg"] = s.anglesDeg;
  j["theta_deg"] = s.thetaDeg;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["ordering"] = toString(s.ordering);
  j["geometry"] = {{"arm_length_m", s.geometry.armLengthM}, {"delay_s", s.geometry.delayS}};
  j["k_sigma"] = s.kSigma;
  j["qwp"] = {{"fast_axis_a_deg", s.qwp.fastAxisADeg},
              {"fast_axis_b_deg", s.qwp.fastAxisBDeg},
              {"offset_a_deg", s.qwp.offsetADeg},
              {"offset_b_deg", s.qwp.offsetBDeg}};
  j["format"] = toString(s.format);
  return j;
}

}  // namespace epr
