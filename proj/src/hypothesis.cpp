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

#include "epr/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace epr {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double foldHalfTurn(double x) {
  x = std::fmod(x, kPi);
  return x < 0 ? x + kPi : x;
}

double uniformHalfTurnDensity(double lambda) {
  return (lambda >= 0 && lambda < kPi) ? 1.0 / kPi : 0.0;
}

double sampleHalfTurn(double u) { return kPi * u; }

double analyzerPass(Angle<> setting, const JonesVector<>& photon) {
  return epr::apply(OpticalElement<>{AnalyzerChannel<>{setting, Channel::Parallel}}, photon)
      .passProbability;
}

double chainPass(const OpticalChain& chain, const JonesVector<>& photon) {
  return transmit(chainMatrix(std::span<const OpticalElement<>>(chain)), photon).passProbability;
}

Handedness circularHandednessOf(double lambda) {
  return lambda < kPi / 2 ? Handedness::R : Handedness::L;
}

/// Hidden variable read as a shared linear polarization direction when a
/// chain (rather than a two-channel analyzer) sits in the arm.
double linearLambdaChainResponse(const OpticalChain& chain, Arm, double lambda) {
  return chainPass(chain, linear(Angle<>{lambda}));
}

const TwoPhotonState<>& entangledPair() {
  static const TwoPhotonState<> state = buildLinearEntangled<double>();
  return state;
}

template <class Emission>
const Emission& expectEmission(const PairEmission& emission, const char* model) {
  const auto* e = std::get_if<Emission>(&emission);
  if (e == nullptr) throw ModelError(std::string("emission does not belong to model ") + model);
  return *e;
}

Arm firstArm(MeasurementOrder order) {
  return order == MeasurementOrder::Arm1First ? Arm::Arm1 : Arm::Arm2;
}

ChannelOutcome sampleOutcome(double coin, double probPlus) {
  return coin < probPlus ? ChannelOutcome::Plus : ChannelOutcome::Minus;
}

}  // namespace

LhvModel deterministicSignModel() {
  LhvModel m;
  m.name = "lhv-sign";
  m.supportLow = 0;
  m.supportHigh = kPi;
  m.density = uniformHalfTurnDensity;
  m.sample = sampleHalfTurn;
  m.responseA = [](Angle<> s, double lambda) {
    return std::cos(2 * (s.rad - lambda)) > 0 ? 1.0 : 0.0;
  };
  m.responseB = m.responseA;
  m.chainResponse = linearLambdaChainResponse;
  m.breakpoints = [](Angle<> a, Angle<> b) {
    return std::vector<double>{foldHalfTurn(a.rad + kPi / 4), foldHalfTurn(a.rad - kPi / 4),
                               foldHalfTurn(b.rad + kPi / 4), foldHalfTurn(b.rad - kPi / 4)};
  };
  return m;
}

LhvModel malusResponseModel() {
  LhvModel m;
  m.name = "lhv-malus";
  m.supportLow = 0;
  m.supportHigh = kPi;
  m.density = uniformHalfTurnDensity;
  m.sample = sampleHalfTurn;
  m.responseA = [](Angle<> s, double lambda) {
    const double c = std::cos(s.rad - lambda);
    return c * c;
  };
  m.responseB = m.responseA;
  m.chainResponse = linearLambdaChainResponse;
  m.breakpoints = [](Angle<>, Angle<>) { return std::vector<double>{}; };
  return m;
}

LhvModel definiteCircularAsLhv() {
  LhvModel m;
  m.name = "definite-circular-lhv";
  m.supportLow = 0;
  m.supportHigh = kPi;
  m.density = uniformHalfTurnDensity;
  m.sample = sampleHalfTurn;
  m.responseA = [](Angle<> s, double lambda) {
    return analyzerPass(s, circular<double>(circularHandednessOf(lambda), Frame::AlongPlusZ));
  };
  m.responseB = [](Angle<> s, double lambda) {
    return analyzerPass(s, circular<double>(circularHandednessOf(lambda), Frame::AlongMinusZ));
  };
  m.chainResponse = [](const OpticalChain& chain, Arm arm, double lambda) {
    return chainPass(chain, circular<double>(circularHandednessOf(lambda), frameOf(arm)));
  };
  m.breakpoints = [](Angle<>, Angle<>) { return std::vector<double>{kPi / 2}; };
  return m;
}

const std::vector<std::string>& knownModelNames() {
  static const std::vector<std::string> names{"qm", "lhv-sign", "lhv-malus", "definite-circular",
                                              "ndv-nonlocal"};
  return names;
}

HypothesisModel modelFromName(std::string_view name) {
  if (name == "qm") return QmFormal{};
  if (name == "lhv-sign") return deterministicSignModel();
  if (name == "lhv-malus") return malusResponseModel();
  if (name == "definite-circular") return DefiniteCircular{};
  if (name == "ndv-nonlocal") return NdvNonlocal{};
  throw ConfigError("model", "unknown model '" + std::string(name) + "'");
}

std::string modelName(const HypothesisModel& model) {
  return std::visit(Overloaded{[](const QmFormal&) { return std::string("qm"); },
                               [](const LhvModel& m) { return m.name; },
                               [](const DefiniteCircular&) { return std::string("definite-circular"); },
                               [](const NdvNonlocal&) { return std::string("ndv-nonlocal"); }},
                    model);
}

PairEmission emitPair(const HypothesisModel& model, double emissionDraw) {
  return std::visit(
      Overloaded{[](const QmFormal&) -> PairEmission { return entangledPair(); },
                 [](const NdvNonlocal&) -> PairEmission { return entangledPair(); },
                 [&](const LhvModel& m) -> PairEmission {
                   return LambdaSample{m.sample(emissionDraw), m.name};
                 },
                 [&](const DefiniteCircular&) -> PairEmission {
                   return CircularPair{emissionDraw < 0.5 ? Handedness::R : Handedness::L};
                 }},
      model);
}

TwoChannelOutcome respondTwoChannel(const HypothesisModel& model, const PairEmission& emission,
                                    Angle<> a, Angle<> b, MeasurementOrder order,
                                    const ArmCoins& coins) {
  const Arm first = firstArm(order);
  const Arm second = otherArm(first);
  auto settingOf = [&](Arm arm) { return arm == Arm::Arm1 ? a : b; };
  auto assign = [](TwoChannelOutcome& out, Arm arm, ChannelOutcome o) {
    (arm == Arm::Arm1 ? out.a : out.b) = o;
  };

  return std::visit(
      Overloaded{
          [&](const QmFormal&) {
            const auto& state = expectEmission<TwoPhotonState<>>(emission, "qm");
            const auto m1 = measureArm(state, first, settingOf(first), coins.forArm(first));
            const auto m2 = measureArm(m1.reduced, second, settingOf(second), coins.forArm(second));
            TwoChannelOutcome out;
            assign(out, first, m1.outcome);
            assign(out, second, m2.outcome);
            return out;
          },
          [&](const LhvModel& m) {
            const auto& lambda = expectEmission<LambdaSample>(emission, "lhv");
            return TwoChannelOutcome{sampleOutcome(coins.arm1, m.responseA(a, lambda.value)),
                                     sampleOutcome(coins.arm2, m.responseB(b, lambda.value))};
          },
          [&](const DefiniteCircular&) {
            const auto& pair = expectEmission<CircularPair>(emission, "definite-circular");
            const double pA = analyzerPass(a, circular<double>(pair.handedness, frameOf(Arm::Arm1)));
            const double pB = analyzerPass(b, circular<double>(pair.handedness, frameOf(Arm::Arm2)));
            return TwoChannelOutcome{sampleOutcome(coins.arm1, pA), sampleOutcome(coins.arm2, pB)};
          },
          [&](const NdvNonlocal&) {
            expectEmission<TwoPhotonState<>>(emission, "ndv-nonlocal");
            const ChannelOutcome o1 = sampleOutcome(coins.forArm(first), 0.5);
            // The partner takes the polarization the first photon left with.
            const Angle<> taken = o1 == ChannelOutcome::Plus
                                      ? settingOf(first)
                                      : settingOf(first) + Angle<>{kPi / 2};
            const double p2 = analyzerPass(settingOf(second), linear(taken, frameOf(second)));
            TwoChannelOutcome out;
            assign(out, first, o1);
            assign(out, second, sampleOutcome(coins.forArm(second), p2));
            return out;
          }},
      model);
}

QwpAnalyzer QwpAnalyzer::forHandedness(Handedness h, Angle<> fastAxis) {
  return {fastAxis, Angle<>{h == Handedness::R ? kPi / 4 : -kPi / 4}};
}

Handedness QwpAnalyzer::analyzed() const {
  return std::abs(polarizerOffset.axis().rad - kPi / 4) < 1e-9 ? Handedness::R : Handedness::L;
}

void QwpAnalyzer::validate() const {
  if (!std::isfinite(fastAxis.rad) || !std::isfinite(polarizerOffset.rad)) {
    throw ModelError("QWP analyzer angles must be finite");
  }
  const double off = polarizerOffset.axis().rad;
  if (std::abs(off - kPi / 4) > 1e-9 && std::abs(off - 3 * kPi / 4) > 1e-9) {
    throw ModelError("QWP analyzer polarizer must sit at +-45 degrees to the fast axis");
  }
}

OpticalChain QwpAnalyzer::labChain(Arm arm) const {
  const Frame frame = frameOf(arm);
  return {QuarterWavePlate<>{toLabAngle(fastAxis, frame)},
          LinearPolarizer<>{toLabAngle(polarizerAxis(), frame)}};
}

ChainOutcome respondQwpChain(const HypothesisModel& model, const PairEmission& emission,
                             const QwpAnalyzer& chainA, const QwpAnalyzer& chainB,
                             MeasurementOrder order, const ArmCoins& coins) {
  chainA.validate();
  chainB.validate();
  const Arm first = firstArm(order);
  const Arm second = otherArm(first);
  const OpticalChain labA = chainA.labChain(Arm::Arm1);
  const OpticalChain labB = chainB.labChain(Arm::Arm2);
  auto chainOf = [&](Arm arm) -> const OpticalChain& { return arm == Arm::Arm1 ? labA : labB; };
  auto assign = [](ChainOutcome& out, Arm arm, bool detected) {
    (arm == Arm::Arm1 ? out.detectedA : out.detectedB) = detected;
  };

  return std::visit(
      Overloaded{
          [&](const QmFormal&) {
            const auto& state = expectEmission<TwoPhotonState<>>(emission, "qm");
            const auto m1 = measureArmChain(state, first, chainOf(first), coins.forArm(first));
            const auto m2 = measureArmChain(m1.reduced, second, chainOf(second), coins.forArm(second));
            ChainOutcome out;
            assign(out, first, m1.detected);
            assign(out, second, m2.detected);
            return out;
          },
          [&](const LhvModel& m) {
            const auto& lambda = expectEmission<LambdaSample>(emission, "lhv");
            return ChainOutcome{coins.arm1 < m.chainResponse(labA, Arm::Arm1, lambda.value),
                                coins.arm2 < m.chainResponse(labB, Arm::Arm2, lambda.value)};
          },
          [&](const DefiniteCircular&) {
            const auto& pair = expectEmission<CircularPair>(emission, "definite-circular");
            const double pA = chainPass(labA, circular<double>(pair.handedness, frameOf(Arm::Arm1)));
            const double pB = chainPass(labB, circular<double>(pair.handedness, frameOf(Arm::Arm2)));
            return ChainOutcome{coins.arm1 < pA, coins.arm2 < pB};
          },
          [&](const NdvNonlocal&) {
            expectEmission<TwoPhotonState<>>(emission, "ndv-nonlocal");
            const bool d1 = coins.forArm(first) < 0.5;
            // Polarizer axis of the first arm, in lab coordinates; a miss leaves
            // the partner with the orthogonal direction.
            const auto& pol = std::get<LinearPolarizer<>>(chainOf(first).back());
            const Angle<> taken = d1 ? pol.axis : pol.axis + Angle<>{kPi / 2};
            const double p2 = chainPass(chainOf(second), linear(taken, frameOf(second)));
            ChainOutcome out;
            assign(out, first, d1);
            assign(out, second, coins.forArm(second) < p2);
            return out;
          }},
      model);
}

double densityIntegral(const LhvModel& model, int panels) {
  const double h = (model.supportHigh - model.supportLow) / panels;
  double sum = 0;
  for (int k = 0; k < panels; ++k) sum += model.density(model.supportLow + (k + 0.5) * h);
  return sum * h;
}

JointProbabilities<double> lhvJointProbabilityOracle(const LhvModel& model, Angle<> a, Angle<> b,
                                                     int panels) {
  const double norm = densityIntegral(model, panels);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
    throw ModelError("density of model " + model.name + " integrates to " + std::to_string(norm));
  }

  std::vector<double> edges{model.supportLow, model.supportHigh};
  for (double x : model.breakpoints(a, b)) {
    if (x > model.supportLow && x < model.supportHigh) edges.push_back(x);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const double width = model.supportHigh - model.supportLow;
  JointProbabilities<double> p;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s];
    const double len = edges[s + 1] - lo;
    const int n = std::max(1, static_cast<int>(std::lround(panels * len / width)));
    const double h = len / n;
    for (int k = 0; k < n; ++k) {
      const double lambda = lo + (k + 0.5) * h;
      const double w = model.density(lambda) * h;
      const double pa = model.responseA(a, lambda);
      const double pb = model.responseB(b, lambda);
      p.pp += w * pa * pb;
      p.pm += w * pa * (1 - pb);
      p.mp += w * (1 - pa) * pb;
      p.mm += w * (1 - pa) * (1 - pb);
    }
  }
  return p;
}

}  // namespace epr
