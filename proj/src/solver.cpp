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

#include "rmc/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include "rmc/error.hpp"
#include "rmc/hqasd.hpp"
#include "rmc/hqpf.hpp"
#include "rmc/random.hpp"

namespace rmc {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kPF: return "PF";
    case Variant::kHQPF: return "HQPF";
    case Variant::kASD: return "ASD";
    case Variant::kScaledASD: return "ScaledASD";
    case Variant::kHQASD: return "HQASD";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string lower;
  for (char c : name) {
    if (c != '-' && c != '_') {
      lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (lower == "pf") return Variant::kPF;
  if (lower == "hqpf") return Variant::kHQPF;
  if (lower == "asd") return Variant::kASD;
  if (lower == "scaledasd") return Variant::kScaledASD;
  if (lower == "hqasd") return Variant::kHQASD;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(Phase p) {
  return p == Phase::kL2Warmup ? "L2_WARMUP" : "CORRENTROPY";
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kStalled: return "stalled";
  }
  return "?";
}

SolverConfig SolverConfig::defaults(Variant variant) {
  SolverConfig c;
  c.variant = variant;
  switch (variant) {
    case Variant::kPF:
    case Variant::kHQPF:
      c.epsilon_switch = 1e-2;
      c.epsilon_stop = 1e-3;
      break;
    case Variant::kASD:
    case Variant::kScaledASD:
    case Variant::kHQASD:
      c.epsilon_switch = 1e-4;
      c.epsilon_stop = 1e-7;
      break;
  }
  return c;
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (!(epsilon_switch >= 0.0)) fail("epsilon_switch must be >= 0");
  if (!(epsilon_stop > 0.0)) fail("epsilon_stop must be > 0");
  if (!(epsilon_inner > 0.0)) fail("epsilon_inner must be > 0");
  const bool two_phase = (variant == Variant::kHQPF ||
                          variant == Variant::kHQASD) && !fixed_sigma;
  if (two_phase && epsilon_stop > epsilon_switch) {
    fail("epsilon_stop must not exceed epsilon_switch");
  }
  if (max_outer < 1 || max_inner < 1) fail("iteration caps must be >= 1");
  if (!(ridge >= 0.0)) fail("ridge must be >= 0");
  if (workers < 1) fail("workers must be >= 1");
  if (fixed_sigma && !(*fixed_sigma > 0.0)) {
    throw Error(ErrorCode::kNonPositiveSigma, "fixed sigma must be positive");
  }
  kernel.validate();
}

FactorPair initial_factors(const ObservedMatrix& obs, Index rank,
                           std::uint64_t seed) {
  if (rank < 1 || rank > std::min(obs.rows(), obs.cols())) {
    throw Error(ErrorCode::kBadRank, "rank " + std::to_string(rank) +
                                         " outside [1, min(m, n)]");
  }
  Rng rng = make_rng(seed, 0, "init");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(std::max(obs.mean_abs_value(), 1e-12)) /
                       std::pow(static_cast<double>(rank), 0.25);
  FactorPair f{Matrix(obs.rows(), rank), Matrix(rank, obs.cols())};
  for (Index c = 0; c < rank; ++c) {
    for (Index i = 0; i < obs.rows(); ++i) f.u(i, c) = scale * normal(rng);
  }
  for (Index j = 0; j < obs.cols(); ++j) {
    for (Index c = 0; c < rank; ++c) f.v(c, j) = scale * normal(rng);
  }
  return f;
}

void check_solvable(const ObservedMatrix& obs, Index rank) {
  if (rank < 1 || rank > std::min(obs.rows(), obs.cols())) {
    throw Error(ErrorCode::kBadRank, "rank " + std::to_string(rank) +
                                         " outside [1, min(m, n)]");
  }
  if (auto i = obs.first_empty_row()) {
    throw Error(ErrorCode::kUnidentifiableRow,
                "row " + std::to_string(*i) + " has no observed entries");
  }
  if (auto j = obs.first_empty_col()) {
    throw Error(ErrorCode::kUnidentifiableColumn,
                "column " + std::to_string(*j) + " has no observed entries");
  }
}

KernelSchedule resolve_kernel(const KernelSchedule& schedule,
                              const ObservedMatrix& obs) {
  KernelSchedule out = schedule;
  if (!out.xi) out.xi = default_xi(obs.max_abs_value());
  out.validate();
  return out;
}

SolveResult solve(const ObservedMatrix& obs, Index rank,
                  const SolverConfig& config, const SolveHooks& hooks) {
  check_solvable(obs, rank);
  return solve_from(obs, initial_factors(obs, rank, config.seed), config,
                    hooks);
}

SolveResult solve_from(const ObservedMatrix& obs, FactorPair init,
                       const SolverConfig& config, const SolveHooks& hooks) {
  switch (config.variant) {
    case Variant::kPF:
    case Variant::kHQPF:
      return hqpf_solve_from(obs, std::move(init), config, hooks);
    case Variant::kASD:
    case Variant::kScaledASD:
    case Variant::kHQASD:
      return hqasd_solve_from(obs, std::move(init), config, hooks);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant");
}

}  // namespace rmc
