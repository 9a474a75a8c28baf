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

// The four competing per-trial descriptions of a photon-pair experiment:
//
//   QmFormal          state-vector reduction on the entangled pair state.
//   LhvModel          factorized local hidden variables: a shared lambda and
//                     independent local responses.
//   DefiniteCircular  pairs leave the source as RR or LL and each photon
//                     answers its own analyzer locally.
//   NdvNonlocal       no definite polarization before measurement; the first
//                     measured photon lands in either channel with
//                     probability 1/2 and its partner instantly takes the
//                     resulting linear polarization.
//
// Every model consumes the same pre-drawn uniforms (see TrialDraws), so the
// per-trial contract is pure.

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "epr/polarization.hpp"
#include "epr/two_photon.hpp"

namespace epr {

using OpticalChain = std::vector<OpticalElement<double>>;

/// Local hidden-variable model: lambda ~ rho on [supportLow, supportHigh),
/// with independent local responses on each arm.
struct LhvModel {
  std::string name;
  double supportLow = 0;
  double supportHigh = 0;
  std::function<double(double lambda)> density;
  /// Inverse CDF: maps a uniform draw on [0, 1) into the support.
  std::function<double(double u)> sample;
  /// Probability of Plus on arm 1 / arm 2 for a two-channel analyzer at
  /// `setting` (lab angle).
  std::function<double(Angle<> setting, double lambda)> responseA;
  std::function<double(Angle<> setting, double lambda)> responseB;
  /// Transmission probability of a single-exit chain (lab-frame elements)
  /// for the photon on `arm`.
  std::function<double(const OpticalChain& labChain, Arm arm, double lambda)> chainResponse;
  /// Points in the support where either response may jump, for settings
  /// (a, b). Quadrature splits its grid there.
  std::function<std::vector<double>(Angle<> a, Angle<> b)> breakpoints;
};

struct QmFormal {};
struct DefiniteCircular {};
struct NdvNonlocal {};

using HypothesisModel = std::variant<QmFormal, LhvModel, DefiniteCircular, NdvNonlocal>;

/// lambda uniform on [0, pi); Plus iff cos 2(setting - lambda) > 0.
LhvModel deterministicSignModel();
/// lambda uniform on [0, pi); Plus with probability cos^2(setting - lambda).
LhvModel malusResponseModel();
/// DefiniteCircular recast as an LHV model: lambda in [0, pi/2) means RR,
/// [pi/2, pi) means LL, responses from Jones calculus on the helicity state.
LhvModel definiteCircularAsLhv();

/// CLI names: qm, lhv-sign, lhv-malus, definite-circular, ndv-nonlocal.
HypothesisModel modelFromName(std::string_view name);
std::string modelName(const HypothesisModel& model);
const std::vector<std::string>& knownModelNames();

struct LambdaSample {
  double value = 0;
  std::string distribution;
};

/// Helicity shared by both photons of a DefiniteCircular pair (RR or LL).
struct CircularPair {
  Handedness handedness = Handedness::R;
};

using PairEmission = std::variant<TwoPhotonState<double>, LambdaSample, CircularPair>;

PairEmission emitPair(const HypothesisModel& model, double emissionDraw);

struct ArmCoins {
  double arm1 = 0;
  double arm2 = 0;

  double forArm(Arm arm) const { return arm == Arm::Arm1 ? arm1 : arm2; }
};

struct TwoChannelOutcome {
  ChannelOutcome a = ChannelOutcome::Minus;
  ChannelOutcome b = ChannelOutcome::Minus;
};

/// Two-channel analyzers at lab angles `a` (arm 1) and `b` (arm 2). Throws
/// ModelError if the emission does not belong to the model.
TwoChannelOutcome respondTwoChannel(const HypothesisModel& model, const PairEmission& emission,
                                    Angle<> a, Angle<> b, MeasurementOrder order,
                                    const ArmCoins& coins);

/// Quarter-wave plate followed by a linear polarizer, described in the
/// photon's own frame. With offset +pi/4 the chain passes R with certainty,
/// with -pi/4 it passes L.
struct QwpAnalyzer {
  Angle<> fastAxis{};
  Angle<> polarizerOffset{std::numbers::pi / 4};

  static QwpAnalyzer forHandedness(Handedness h, Angle<> fastAxis = {});

  /// Throws ModelError unless the offset is +-pi/4 (mod pi).
  void validate() const;
  Handedness analyzed() const;
  /// Polarizer axis in the photon's own frame.
  Angle<> polarizerAxis() const { return fastAxis + polarizerOffset; }
  /// The element sequence in lab coordinates for a photon on `arm`.
  OpticalChain labChain(Arm arm) const;
};

struct ChainOutcome {
  bool detectedA = false;
  bool detectedB = false;
};

ChainOutcome respondQwpChain(const HypothesisModel& model, const PairEmission& emission,
                             const QwpAnalyzer& chainA, const QwpAnalyzer& chainB,
                             MeasurementOrder order, const ArmCoins& coins);

/// Default number of midpoint panels for lambda integrals.
inline constexpr int kQuadraturePanels = 4096;

/// Integral of rho over the support; used to reject non-normalizable models.
double densityIntegral(const LhvModel& model, int panels = kQuadraturePanels);

/// Joint outcome probabilities int rho p(A|a) p(B|b) dlambda by composite
/// midpoint quadrature split at the model's breakpoints. Throws ModelError if
/// rho does not integrate to 1 within 1e-6.
JointProbabilities<double> lhvJointProbabilityOracle(const LhvModel& model, Angle<> a, Angle<> b,
                                                     int panels = kQuadraturePanels);

}  // namespace epr
