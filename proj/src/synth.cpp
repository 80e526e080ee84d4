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

#include "rmc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <sstream>
#include <vector>

#include "rmc/error.hpp"
#include "rmc/random.hpp"

namespace rmc {

std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kGmm: return "gmm";
    case NoiseKind::kSaltPepper: return "salt_pepper";
  }
  return "?";
}

NoiseSpec NoiseSpec::gmm(double c, double sigma_a, double sigma_b) {
  NoiseSpec s;
  s.kind = NoiseKind::kGmm;
  s.c = c;
  s.sigma_a = sigma_a;
  s.sigma_b = sigma_b;
  return s;
}

NoiseSpec NoiseSpec::salt_pepper(double density, std::optional<double> low,
                                 std::optional<double> high) {
  NoiseSpec s;
  s.kind = NoiseKind::kSaltPepper;
  s.sp_density = density;
  s.sp_low = low;
  s.sp_high = high;
  return s;
}

void NoiseSpec::validate() const {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "outlier rate c outside [0, 1]");
  }
  if (!(sp_density >= 0.0 && sp_density <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sp_density outside [0, 1]");
  }
  if (!(sigma_a >= 0.0) || !(sigma_b >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise deviations must be >= 0");
  }
}

std::string NoiseSpec::label() const {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  switch (kind) {
    case NoiseKind::kNone: out << "none"; break;
    case NoiseKind::kGmm:
      out << "gmm(c=" << c << ",sa=" << sigma_a << ",sb=" << sigma_b << ")";
      break;
    case NoiseKind::kSaltPepper: out << "sp(" << sp_density << ")"; break;
  }
  return out.str();
}

Matrix gen_low_rank(Index m, Index n, Index r, std::uint64_t seed) {
  if (m < 1 || n < 1 || r < 1 || r > std::min(m, n)) {
    throw Error(ErrorCode::kBadRank, "rank " + std::to_string(r) +
                                         " outside [1, min(m, n)]");
  }
  Rng rng = make_rng(seed, 0, "low_rank");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix u(m, r);
  Matrix v(r, n);
  for (Index k = 0; k < u.size(); ++k) u.data()[k] = normal(rng);
  for (Index k = 0; k < v.size(); ++k) v.data()[k] = normal(rng);
  return u * v;
}

Support sample_mask(Index m, Index n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kBadFraction, "observation fraction outside (0, 1]");
  }
  if (m < 1 || n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "matrix dimensions must be >= 1");
  }
  const Index total = m * n;
  const auto count = static_cast<Index>(std::llround(p * static_cast<double>(total)));
  Rng rng = make_rng(seed, 0, "mask");
  std::vector<Index> cells(static_cast<std::size_t>(total));
  std::iota(cells.begin(), cells.end(), Index{0});
  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  // Selection sampling keeps the input order, i.e. row-major.
  std::sample(cells.begin(), cells.end(), std::back_inserter(chosen), count,
              rng);
  Support out;
  out.reserve(chosen.size());
  for (Index id : chosen) out.push_back({id / n, id % n});
  return out;
}

Support sample_covering_mask(Index m, Index n, double p, std::uint64_t seed,
                             int attempts) {
  for (int a = 0; a < attempts; ++a) {
    Support s = sample_mask(m, n, p, derive_seed(seed, static_cast<std::uint64_t>(a), "cover"));
    std::vector<bool> row_hit(static_cast<std::size_t>(m), false);
    std::vector<bool> col_hit(static_cast<std::size_t>(n), false);
    for (const Cell& c : s) {
      row_hit[c.row] = true;
      col_hit[c.col] = true;
    }
    if (std::all_of(row_hit.begin(), row_hit.end(), [](bool b) { return b; }) &&
        std::all_of(col_hit.begin(), col_hit.end(), [](bool b) { return b; })) {
      return s;
    }
  }
  throw Error(ErrorCode::kBadFraction,
              "no mask covering every row and column after " +
                  std::to_string(attempts) + " draws");
}

ObservedMatrix corrupt(const ObservedMatrix& obs, const NoiseSpec& spec,
                       std::uint64_t seed) {
  spec.validate();
  Vector values = obs.values();
  switch (spec.kind) {
    case NoiseKind::kNone:
      return obs;
    case NoiseKind::kGmm: {
      Rng rng = make_rng(seed, 0, "gmm");
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index k = 0; k < values.size(); ++k) {
        const bool outlier = unit(rng) < spec.c;
        values[k] += (outlier ? spec.sigma_b : spec.sigma_a) * normal(rng);
      }
      break;
    }
    case NoiseKind::kSaltPepper: {
      const double low = spec.sp_low.value_or(obs.values().minCoeff());
      const double high = spec.sp_high.value_or(obs.values().maxCoeff());
      const auto count = static_cast<Index>(
          std::llround(spec.sp_density * static_cast<double>(values.size())));
      Rng rng = make_rng(seed, 0, "salt_pepper");
      std::vector<Index> ids(static_cast<std::size_t>(values.size()));
      std::iota(ids.begin(), ids.end(), Index{0});
      std::vector<Index> hit;
      hit.reserve(static_cast<std::size_t>(count));
      std::sample(ids.begin(), ids.end(), std::back_inserter(hit), count, rng);
      std::bernoulli_distribution coin(0.5);
      for (Index k : hit) values[k] = coin(rng) ? high : low;
      break;
    }
  }
  return obs.with_values(std::move(values));
}

}  // namespace rmc
