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

namespace epr {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Random stream for one trial. The Philox key is the run seed and the
/// counter is (trialIndex, block), so the stream depends on nothing but
/// (seed, trialIndex) and any subset of trials can be drawn in any order.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trialIndex);

  std::uint64_t nextU64();
  /// Uniform on [0, 1) with 53 random bits.
  double nextUniform();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t trialIndex_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

inline TrialStream rngStreamFor(std::uint64_t seed, std::uint64_t trialIndex) {
  return TrialStream(seed, trialIndex);
}

/// The uniforms one trial consumes, drawn in this fixed order regardless of
/// model or protocol so that configurations stay aligned draw for draw.
struct TrialDraws {
  double settings;
  double ordering;
  double emission;
  double coinArm1;
  double coinArm2;

  static TrialDraws from(TrialStream& stream) {
    TrialDraws d{};
    d.settings = stream.nextUniform();
    d.ordering = stream.nextUniform();
    d.emission = stream.nextUniform();
    d.coinArm1 = stream.nextUniform();
    d.coinArm2 = stream.nextUniform();
    return d;
  }
};

}  // namespace epr
