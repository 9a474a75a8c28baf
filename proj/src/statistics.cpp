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

#include "epr/statistics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace epr {

void CoincidenceCounts::addTwoChannel(ChannelOutcome a, ChannelOutcome b) {
  const bool aPlus = a == ChannelOutcome::Plus;
  const bool bPlus = b == ChannelOutcome::Plus;
  if (aPlus && bPlus) ++pp;
  else if (aPlus) ++pm;
  else if (bPlus) ++mp;
  else ++mm;
  ++total;
}

void CoincidenceCounts::addChain(bool detectedA, bool detectedB) {
  detA += detectedA;
  detB += detectedB;
  detBoth += detectedA && detectedB;
  addTwoChannel(detectedA ? ChannelOutcome::Plus : ChannelOutcome::Minus,
                detectedB ? ChannelOutcome::Plus : ChannelOutcome::Minus);
}

CoincidenceCounts& CoincidenceCounts::operator+=(const CoincidenceCounts& o) {
  pp += o.pp;
  pm += o.pm;
  mp += o.mp;
  mm += o.mm;
  detA += o.detA;
  detB += o.detB;
  detBoth += o.detBoth;
  total += o.total;
  return *this;
}

CorrelationEstimate estimateE(const CoincidenceCounts& c) {
  const std::uint64_t n = c.cellSum();
  if (n == 0) throw std::invalid_argument("estimateE: no coincidences");
  const double same = static_cast<double>(c.pp + c.mm);
  const double diff = static_cast<double>(c.pm + c.mp);
  const double e = (same - diff) / static_cast<double>(n);
  return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n))};
}

ChshReport computeS(const std::array<SettingsEstimate, 4>& blocks, double kSigma) {
  // (a,b) (a,b') (a',b) (a',b')
  if (blocks[0].a != blocks[1].a || blocks[2].a != blocks[3].a || blocks[0].b != blocks[2].b ||
      blocks[1].b != blocks[3].b) {
    throw std::invalid_argument("computeS: settings blocks do not form (a,b),(a,b'),(a',b),(a',b')");
  }
  ChshReport r;
  r.blocks = blocks;
  r.kSigma = kSigma;
  r.s = r.recomputeS();
  double var = 0;
  for (const auto& b : blocks) var += b.e.stdError * b.e.stdError;
  r.sStderr = std::sqrt(var);
  r.violatesClassical = std::abs(r.s) - kClassicalBound >= kSigma * r.sStderr &&
                        std::abs(r.s) > kClassicalBound;
  r.withinTsirelson = std::abs(r.s) <= kTsirelsonBound + kSigma * r.sStderr;
  return r;
}

ConditionalEstimate conditionalDetection(const CoincidenceCounts& c) {
  if (c.detA == 0) throw std::invalid_argument("conditionalDetection: no arm-A detections");
  const double n = static_cast<double>(c.detA);
  const double p = static_cast<double>(c.detBoth) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

OrderTestResult orderInvarianceTest(std::span<const std::uint64_t> first,
                                    std::span<const std::uint64_t> second, double alpha,
                                    std::uint64_t minTrials) {
  if (first.size() != second.size() || first.empty()) {
    throw std::invalid_argument("orderInvarianceTest: histogram categories differ");
  }
  const double n1 = static_cast<double>(std::accumulate(first.begin(), first.end(), std::uint64_t{0}));
  const double n2 =
      static_cast<double>(std::accumulate(second.begin(), second.end(), std::uint64_t{0}));
  if (n1 < static_cast<double>(minTrials) || n2 < static_cast<double>(minTrials)) {
    throw std::invalid_argument("orderInvarianceTest: each histogram needs at least " +
                                std::to_string(minTrials) + " trials");
  }
  const double n = n1 + n2;

  OrderTestResult r;
  int used = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    const double col = static_cast<double>(first[k] + second[k]);
    if (col == 0) continue;
    ++used;
    const double e1 = n1 * col / n;
    const double e2 = n2 * col / n;
    const double d1 = static_cast<double>(first[k]) - e1;
    const double d2 = static_cast<double>(second[k]) - e2;
    r.chiSquare += d1 * d1 / e1 + d2 * d2 / e2;
  }
  r.degreesOfFreedom = used - 1;
  if (r.degreesOfFreedom > 0) {
    const boost::math::chi_squared dist(r.degreesOfFreedom);
    r.pValue = boost::math::cdf(boost::math::complement(dist, r.chiSquare));
  }
  r.verdict = r.pValue > alpha;
  return r;
}

}  // namespace epr
