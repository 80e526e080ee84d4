// Copyright 2026 The rmc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic completion problems: random low-rank matrices, uniform masks and
// additive corruption. Every function is a pure function of its inputs and
// seed.

#ifndef RMC_SYNTH_HPP_
#define RMC_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "rmc/model.hpp"

namespace rmc {

enum class NoiseKind { kNone, kGmm, kSaltPepper };

std::string_view to_string(NoiseKind k);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kNone;
  // Two-component mixture (1 - c) N(0, sigma_a^2) + c N(0, sigma_b^2).
  double c = 0.0;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  // Fraction of observed entries replaced by sp_low or sp_high (equally
  // likely). Unset amplitudes default to the observed minimum / maximum.
  double sp_density = 0.0;
  std::optional<double> sp_low;
  std::optional<double> sp_high;

  static NoiseSpec none() { return {}; }
  static NoiseSpec gmm(double c, double sigma_a, double sigma_b);
  static NoiseSpec salt_pepper(double density,
                               std::optional<double> low = std::nullopt,
                               std::optional<double> high = std::nullopt);

  void validate() const;
  std::string label() const;
};

// U V with U (m x r), V (r x n) i.i.d. standard normal.
Matrix gen_low_rank(Index m, Index n, Index r, std::uint64_t seed);

// Exactly round(p m n) distinct cells drawn uniformly without replacement,
// row-major sorted.
Support sample_mask(Index m, Index n, double p, std::uint64_t seed);

// sample_mask redrawn (with derived seeds) until every row and column holds
// at least one cell; gives up with BadFraction after `attempts` draws.
Support sample_covering_mask(Index m, Index n, double p, std::uint64_t seed,
                             int attempts = 100);

// Adds noise to observed values only; the support is unchanged.
ObservedMatrix corrupt(const ObservedMatrix& obs, const NoiseSpec& spec,
                       std::uint64_t seed);

}  // namespace rmc

#endif  // RMC_SYNTH_HPP_
