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

// Jones calculus for single-photon polarization.
//
// Conventions (locked by tests/polarization_test.cpp):
//   * basis {|x>, |y>} in the shared lab transverse plane, angles measured
//     counterclockwise from x when looking along +z;
//   * right-circular in frame AlongPlusZ is (1, -i)/sqrt(2);
//   * a photon travelling along -z has helicity states with the imaginary
//     sign flipped when written in the shared (x, y) coordinates;
//   * QWP with fast axis x is diag(1, i), up to global phase.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>

#include <Eigen/Dense>

#include "epr/errors.hpp"

namespace epr {

/// Tolerance for algebraic identities (idempotence, unitarity, Malus).
inline constexpr double kIdentityTolerance = 1e-12;
/// Largest |norm^2 - 1| accepted on a state handed to a measurement.
inline constexpr double kNormalizationTolerance = 1e-9;

template <typename Scalar>
using Complex = std::complex<Scalar>;
template <typename Scalar>
using Amplitudes2 = Eigen::Matrix<Complex<Scalar>, 2, 1>;
template <typename Scalar>
using JonesMatrix = Eigen::Matrix<Complex<Scalar>, 2, 2>;

/// Angle in radians, counterclockwise from the lab x axis.
template <typename Scalar = double>
struct Angle {
  Scalar rad{};

  static constexpr Angle fromDegrees(Scalar deg) {
    return {deg * std::numbers::pi_v<Scalar> / Scalar(180)};
  }
  constexpr Scalar degrees() const { return rad * Scalar(180) / std::numbers::pi_v<Scalar>; }

  /// Axis orientation folded into [0, pi); polarizer and plate axes are
  /// symmetric under a half turn.
  Angle axis() const {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    Scalar r = std::fmod(rad, pi);
    if (r < 0) r += pi;
    if (r >= pi) r -= pi;
    return {r};
  }

  friend constexpr Angle operator+(Angle a, Angle b) { return {a.rad + b.rad}; }
  friend constexpr Angle operator-(Angle a, Angle b) { return {a.rad - b.rad}; }
  friend constexpr Angle operator-(Angle a) { return {-a.rad}; }
  friend constexpr bool operator==(Angle, Angle) = default;
};

enum class Frame { AlongPlusZ, AlongMinusZ };
enum class Handedness { R, L };

/// An angle given in a photon's own frame (looking along its propagation),
/// written in lab coordinates. The -z frame is the lab frame mirrored in y.
template <typename Scalar>
constexpr Angle<Scalar> toLabAngle(Angle<Scalar> own, Frame frame) {
  return frame == Frame::AlongPlusZ ? own : -own;
}

template <typename Scalar = double>
struct JonesVector {
  Amplitudes2<Scalar> amp = Amplitudes2<Scalar>::Zero();
  Frame frame = Frame::AlongPlusZ;

  Scalar norm2() const { return amp.squaredNorm(); }
  JonesVector normalized() const { return {amp / std::sqrt(norm2()), frame}; }
};

template <typename Scalar = double>
JonesVector<Scalar> linear(Angle<Scalar> theta, Frame frame = Frame::AlongPlusZ) {
  Amplitudes2<Scalar> v;
  v << Complex<Scalar>(std::cos(theta.rad), 0), Complex<Scalar>(std::sin(theta.rad), 0);
  return {v, frame};
}

template <typename Scalar = double>
JonesVector<Scalar> circular(Handedness h, Frame frame = Frame::AlongPlusZ) {
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  // Imaginary sign of the y amplitude in lab coordinates.
  const bool negative = (h == Handedness::R) == (frame == Frame::AlongPlusZ);
  Amplitudes2<Scalar> v;
  v << Complex<Scalar>(s, 0), Complex<Scalar>(0, negative ? -s : s);
  return {v, frame};
}

/// 2x2 rotation taking plate-frame coordinates to lab coordinates.
template <typename Scalar>
JonesMatrix<Scalar> rotation(Angle<Scalar> theta) {
  const Scalar c = std::cos(theta.rad);
  const Scalar s = std::sin(theta.rad);
  JonesMatrix<Scalar> r;
  r << c, -s, s, c;
  return r;
}

template <typename Scalar>
JonesMatrix<Scalar> projectorOnto(Angle<Scalar> axis) {
  const Amplitudes2<Scalar> v = linear(axis).amp;
  return v * v.adjoint();
}

enum class Channel { Parallel, Perpendicular };

template <typename Scalar = double>
struct LinearPolarizer {
  Angle<Scalar> axis;
};

template <typename Scalar = double>
struct QuarterWavePlate {
  Angle<Scalar> fastAxis;
};

template <typename Scalar = double>
struct AnalyzerChannel {
  Angle<Scalar> orientation;
  Channel channel = Channel::Parallel;
};

template <typename Scalar = double>
using OpticalElement =
    std::variant<LinearPolarizer<Scalar>, QuarterWavePlate<Scalar>, AnalyzerChannel<Scalar>>;

template <typename Scalar>
bool isUnitaryElement(const OpticalElement<Scalar>& e) {
  return std::holds_alternative<QuarterWavePlate<Scalar>>(e);
}

template <typename Scalar>
JonesMatrix<Scalar> matrixOf(const OpticalElement<Scalar>& element) {
  return std::visit(
      [](const auto& e) -> JonesMatrix<Scalar> {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, LinearPolarizer<Scalar>>) {
          return projectorOnto(e.axis.axis());
        } else if constexpr (std::is_same_v<E, QuarterWavePlate<Scalar>>) {
          const JonesMatrix<Scalar> r = rotation(e.fastAxis.axis());
          JonesMatrix<Scalar> phase = JonesMatrix<Scalar>::Zero();
          phase(0, 0) = Complex<Scalar>(1, 0);
          phase(1, 1) = Complex<Scalar>(0, 1);
          return r * phase * r.transpose();
        } else {
          const Scalar quarter = std::numbers::pi_v<Scalar> / 2;
          const Angle<Scalar> axis =
              e.channel == Channel::Parallel ? e.orientation : e.orientation + Angle<Scalar>{quarter};
          return projectorOnto(axis.axis());
        }
      },
      element);
}

/// Product of the element matrices in the order light traverses them.
template <typename Scalar>
JonesMatrix<Scalar> chainMatrix(std::span<const OpticalElement<Scalar>> chain) {
  JonesMatrix<Scalar> m = JonesMatrix<Scalar>::Identity();
  for (const auto& e : chain) m = matrixOf(e) * m;
  return m;
}

template <typename Scalar>
bool isProjector(const JonesMatrix<Scalar>& m, Scalar tol = Scalar(kIdentityTolerance)) {
  return (m * m - m).norm() <= tol && (m.adjoint() - m).norm() <= tol;
}

template <typename Scalar>
bool isUnitary(const JonesMatrix<Scalar>& m, Scalar tol = Scalar(kIdentityTolerance)) {
  return (m.adjoint() * m - JonesMatrix<Scalar>::Identity()).norm() <= tol;
}

/// Probabilities within kIdentityTolerance of 0 or 1 are snapped so that
/// strict coin comparisons give certain outcomes exactly.
template <typename Scalar>
Scalar snapProbability(Scalar p) {
  if (p <= Scalar(kIdentityTolerance)) return Scalar(0);
  if (p >= Scalar(1) - Scalar(kIdentityTolerance)) return Scalar(1);
  return p;
}

template <typename Scalar>
void requireNormalized(Scalar norm2, const char* what) {
  if (!std::isfinite(norm2) || std::abs(norm2 - Scalar(1)) > Scalar(kNormalizationTolerance)) {
    throw NormalizationError(std::string(what) + " is not normalized (norm^2 = " +
                             std::to_string(static_cast<double>(norm2)) + ")");
  }
}

template <typename Scalar = double>
struct Transmission {
  Scalar passProbability{};
  /// Conditional post-state given transmission; empty means Absorbed.
  std::optional<JonesVector<Scalar>> outState;

  bool absorbed() const { return !outState.has_value(); }
};

template <typename Scalar>
Transmission<Scalar> transmit(const JonesMatrix<Scalar>& m, const JonesVector<Scalar>& v) {
  requireNormalized(v.norm2(), "Jones vector");
  const Amplitudes2<Scalar> w = m * v.amp;
  const Scalar p = snapProbability(w.squaredNorm());
  if (p == Scalar(0)) return {p, std::nullopt};
  return {p, JonesVector<Scalar>{w / std::sqrt(w.squaredNorm()), v.frame}};
}

/// Deterministic passage of `v` through `element`: the pass probability and
/// the renormalized state conditional on passing. Sampling happens elsewhere.
template <typename Scalar>
Transmission<Scalar> apply(const OpticalElement<Scalar>& element, const JonesVector<Scalar>& v) {
  return transmit(matrixOf(element), v);
}

template <typename Scalar>
bool phaseInsensitiveEquals(const JonesVector<Scalar>& u, const JonesVector<Scalar>& v,
                            Scalar tol = Scalar(kIdentityTolerance)) {
  return std::abs(u.amp.dot(v.amp)) >= Scalar(1) - tol;
}

}  // namespace epr
