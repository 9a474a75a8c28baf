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

// Two-photon pure states over the product basis
// {|x1 x2>, |x1 y2>, |y1 x2>, |y1 y2>}. Photon 1 travels along +z, photon 2
// along -z; amplitudes are written in the shared lab (x, y) coordinates.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "epr/polarization.hpp"

namespace epr {

template <typename Scalar>
using Amplitudes4 = Eigen::Matrix<Complex<Scalar>, 4, 1>;
template <typename Scalar>
using PairOperator = Eigen::Matrix<Complex<Scalar>, 4, 4>;

enum class Arm { Arm1, Arm2 };
enum class ChannelOutcome { Plus, Minus, Absorbed };
enum class MeasurementOrder { Arm1First, Arm2First };

constexpr Frame frameOf(Arm arm) {
  return arm == Arm::Arm1 ? Frame::AlongPlusZ : Frame::AlongMinusZ;
}
constexpr Arm otherArm(Arm arm) { return arm == Arm::Arm1 ? Arm::Arm2 : Arm::Arm1; }
constexpr int armIndex(Arm arm) { return arm == Arm::Arm1 ? 0 : 1; }

template <typename Scalar>
PairOperator<Scalar> kron(const JonesMatrix<Scalar>& first, const JonesMatrix<Scalar>& second) {
  PairOperator<Scalar> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.template block<2, 2>(2 * i, 2 * j) = first(i, j) * second;
  return out;
}

template <typename Scalar>
Amplitudes4<Scalar> kron(const Amplitudes2<Scalar>& first, const Amplitudes2<Scalar>& second) {
  Amplitudes4<Scalar> out;
  out << first(0) * second(0), first(0) * second(1), first(1) * second(0), first(1) * second(1);
  return out;
}

/// Lift a single-photon operator onto one arm of the pair.
template <typename Scalar>
PairOperator<Scalar> onArm(const JonesMatrix<Scalar>& m, Arm arm) {
  const JonesMatrix<Scalar> id = JonesMatrix<Scalar>::Identity();
  return arm == Arm::Arm1 ? kron(m, id) : kron(id, m);
}

template <typename Scalar = double>
struct TwoPhotonState {
  Amplitudes4<Scalar> amp = Amplitudes4<Scalar>::Zero();
  /// Set for a photon removed by a single-exit chain; the remaining amplitudes
  /// then describe its partner conditioned on that absorption.
  std::array<bool, 2> absorbed{false, false};

  Scalar norm2() const { return amp.squaredNorm(); }

  static TwoPhotonState product(const JonesVector<Scalar>& photon1,
                                const JonesVector<Scalar>& photon2) {
    return {kron(photon1.amp, photon2.amp)};
  }
};

template <typename Scalar>
bool phaseInsensitiveEquals(const TwoPhotonState<Scalar>& u, const TwoPhotonState<Scalar>& v,
                            Scalar tol = Scalar(kIdentityTolerance)) {
  return std::abs(u.amp.dot(v.amp)) >= Scalar(1) - tol;
}

/// (|R1 R2> + |L1 L2>)/sqrt(2), each helicity taken in its own photon's frame.
template <typename Scalar = double>
TwoPhotonState<Scalar> buildCircularEntangled() {
  const auto r1 = circular<Scalar>(Handedness::R, Frame::AlongPlusZ).amp;
  const auto r2 = circular<Scalar>(Handedness::R, Frame::AlongMinusZ).amp;
  const auto l1 = circular<Scalar>(Handedness::L, Frame::AlongPlusZ).amp;
  const auto l2 = circular<Scalar>(Handedness::L, Frame::AlongMinusZ).amp;
  return {(kron(r1, r2) + kron(l1, l2)) / std::sqrt(Scalar(2))};
}

/// (|x1 x2> + |y1 y2>)/sqrt(2).
template <typename Scalar = double>
TwoPhotonState<Scalar> buildLinearEntangled() {
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  TwoPhotonState<Scalar> st;
  st.amp << s, 0, 0, s;
  return st;
}

template <typename Scalar = double>
struct ArmMeasurement {
  ChannelOutcome outcome{};
  TwoPhotonState<Scalar> reduced;
  Scalar probPlus{};
};

/// Two-channel analyzer on one arm. Plus iff coin < probPlus (strict), and the
/// pair is replaced by its renormalized projection onto the observed channel.
template <typename Scalar>
ArmMeasurement<Scalar> measureArm(const TwoPhotonState<Scalar>& state, Arm arm,
                                  Angle<Scalar> orientation, Scalar coin) {
  requireNormalized(state.norm2(), "two-photon state");
  const PairOperator<Scalar> plus = onArm(projectorOnto(orientation.axis()), arm);
  const Amplitudes4<Scalar> wPlus = plus * state.amp;
  const Scalar pPlus = snapProbability(wPlus.squaredNorm());

  ArmMeasurement<Scalar> out;
  out.probPlus = pPlus;
  out.reduced.absorbed = state.absorbed;
  if (coin < pPlus) {
    out.outcome = ChannelOutcome::Plus;
    out.reduced.amp = wPlus / std::sqrt(wPlus.squaredNorm());
  } else {
    out.outcome = ChannelOutcome::Minus;
    const Amplitudes4<Scalar> wMinus = state.amp - wPlus;
    out.reduced.amp = wMinus / std::sqrt(wMinus.squaredNorm());
  }
  return out;
}

template <typename Scalar = double>
struct JointProbabilities {
  Scalar pp{}, pm{}, mp{}, mm{};

  Scalar sum() const { return pp + pm + mp + mm; }
  /// Correlation of the +/-1 outcomes.
  Scalar correlation() const { return pp + mm - pm - mp; }
  Scalar marginalAPlus() const { return pp + pm; }
  Scalar marginalBPlus() const { return pp + mp; }
};

/// Exact joint outcome probabilities for two-channel analyzers at `a` (arm 1)
/// and `b` (arm 2), computed by projecting the arms one after the other in
/// the requested order.
template <typename Scalar>
JointProbabilities<Scalar> jointProbabilities(const TwoPhotonState<Scalar>& state,
                                              Angle<Scalar> a, Angle<Scalar> b,
                                              MeasurementOrder order = MeasurementOrder::Arm1First) {
  requireNormalized(state.norm2(), "two-photon state");
  const PairOperator<Scalar> id = PairOperator<Scalar>::Identity();
  const PairOperator<Scalar> a1 = onArm(projectorOnto(a.axis()), Arm::Arm1);
  const PairOperator<Scalar> b1 = onArm(projectorOnto(b.axis()), Arm::Arm2);
  const std::array<PairOperator<Scalar>, 2> armA{a1, id - a1};
  const std::array<PairOperator<Scalar>, 2> armB{b1, id - b1};

  Scalar p[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Amplitudes4<Scalar> w = order == MeasurementOrder::Arm1First
                                        ? Amplitudes4<Scalar>(armB[j] * (armA[i] * state.amp))
                                        : Amplitudes4<Scalar>(armA[i] * (armB[j] * state.amp));
      p[i][j] = w.squaredNorm();
    }
  }
  return {p[0][0], p[0][1], p[1][0], p[1][1]};
}

template <typename Scalar = double>
struct ChainMeasurement {
  bool detected{};
  TwoPhotonState<Scalar> reduced;
  Scalar probDetect{};
};

/// Runs one arm's photon through a single-exit chain (plates and polarizers)
/// followed by an ideal detector. On a miss the partner is conditioned with
/// the complementary Kraus operator sqrt(I - M^dagger M).
template <typename Scalar>
ChainMeasurement<Scalar> measureArmChain(const TwoPhotonState<Scalar>& state, Arm arm,
                                         std::span<const OpticalElement<Scalar>> chain,
                                         Scalar coin) {
  requireNormalized(state.norm2(), "two-photon state");
  const JonesMatrix<Scalar> m = chainMatrix(chain);
  const Amplitudes4<Scalar> pass = onArm(m, arm) * state.amp;
  const Scalar p = snapProbability(pass.squaredNorm());

  ChainMeasurement<Scalar> out;
  out.probDetect = p;
  out.reduced.absorbed = state.absorbed;
  if (coin < p) {
    out.detected = true;
    out.reduced.amp = pass / std::sqrt(pass.squaredNorm());
    return out;
  }
  const JonesMatrix<Scalar> missEffect = JonesMatrix<Scalar>::Identity() - m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<JonesMatrix<Scalar>> eig(missEffect);
  const Eigen::Matrix<Scalar, 2, 1> roots = eig.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  const JonesMatrix<Scalar> kraus =
      eig.eigenvectors() * roots.template cast<Complex<Scalar>>().asDiagonal() *
      eig.eigenvectors().adjoint();
  const Amplitudes4<Scalar> miss = onArm(kraus, arm) * state.amp;
  out.detected = false;
  out.reduced.amp = miss / std::sqrt(miss.squaredNorm());
  out.reduced.absorbed[armIndex(arm)] = true;
  return out;
}

template <typename Scalar>
ChainMeasurement<Scalar> measureArmChain(const TwoPhotonState<Scalar>& state, Arm arm,
                                         const std::vector<OpticalElement<Scalar>>& chain,
                                         Scalar coin) {
  return measureArmChain(state, arm, std::span<const OpticalElement<Scalar>>(chain), coin);
}

}  // namespace epr
