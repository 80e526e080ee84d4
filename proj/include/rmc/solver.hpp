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

// Solver configuration, convergence traces and the variant dispatcher.

#ifndef RMC_SOLVER_HPP_
#define RMC_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmc/correntropy.hpp"
#include "rmc/model.hpp"

namespace rmc {

enum class Variant {
  kPF,         // alternating least squares (l2 baseline)
  kHQPF,       // correntropy-weighted alternating least squares
  kASD,        // alternating steepest descent (l2 baseline)
  kScaledASD,  // ASD with Gram-preconditioned directions (l2 baseline)
  kHQASD,      // correntropy-weighted scaled ASD
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

enum class Phase { kL2Warmup, kCorrentropy };

std::string_view to_string(Phase p);

struct SolverConfig {
  Variant variant = Variant::kHQASD;
  // |change of ||E||_F| below which the l2 warm-up hands over to the
  // correntropy phase.
  double epsilon_switch = 1e-4;
  // |change of ||E||_F| below which the solver stops.
  double epsilon_stop = 1e-7;
  // Squared row-update size that ends an inner reweighting loop.
  double epsilon_inner = 1e-8;
  int max_outer = 1000;
  int max_inner = 50;
  // Relative Tikhonov term for singular r x r systems, scaled by trace / r.
  double ridge = 1e-12;
  std::uint64_t seed = 0;
  KernelSchedule kernel;
  // Pins sigma for every iteration and skips the warm-up. Used for the
  // large-width reduction to the l2 solvers.
  std::optional<double> fixed_sigma;
  // Threads for the independent row / column subproblems (HQ-PF and PF).
  int workers = 1;

  // Default thresholds for the variant: HQ-PF switches at 1e-2 and
  // stops at 1e-3, HQ-ASD switches at 1e-4 and stops at 1e-7.
  static SolverConfig defaults(Variant variant);

  void validate() const;
};

struct TraceRecord {
  int iteration = 0;
  double sigma = 0.0;
  // C-loss of the iterate after this step, at the width used by the step.
  double objective = 0.0;
  double residual_norm = 0.0;
  Phase phase = Phase::kL2Warmup;
  double elapsed = 0.0;  // seconds since solve start
};

using ConvergenceTrace = std::vector<TraceRecord>;

enum class SolveStatus {
  kConverged,
  kMaxIterations,  // iteration cap hit; the last iterate is returned
  kStalled,        // a search direction had zero curvature on the support
};

std::string_view to_string(SolveStatus s);

struct SolveResult {
  FactorPair factors;
  ConvergenceTrace trace;
  SolveStatus status = SolveStatus::kConverged;
  // First correntropy iteration, if the warm-up handed over.
  std::optional<int> switch_iteration;
  double elapsed = 0.0;
};

// One accepted steepest-descent step: the iterate before the step, the
// weights, the (possibly scaled) direction and the step length. The update
// is factor <- factor - mu * direction.
enum class Side { kU, kV };

struct StepEvent {
  int iteration = 0;
  Side side = Side::kU;
  const FactorPair* before = nullptr;
  const WeightField* weights = nullptr;
  const Matrix* direction = nullptr;
  double mu = 0.0;
};

struct SolveHooks {
  std::function<void(int iteration, const FactorPair&)> on_iterate;
  std::function<void(const StepEvent&)> on_step;
};

// U, V with i.i.d. N(0, 1) entries scaled by sqrt(mean |x|) / r^{1/4}, so the
// initial product has entries on the scale of the data.
FactorPair initial_factors(const ObservedMatrix& obs, Index rank,
                           std::uint64_t seed);

// Throws UnidentifiableRow / UnidentifiableColumn for empty rows / columns
// and BadRank for r outside [1, min(m, n)].
void check_solvable(const ObservedMatrix& obs, Index rank);

// Kernel schedule with xi resolved against the data.
KernelSchedule resolve_kernel(const KernelSchedule& schedule,
                              const ObservedMatrix& obs);

// Runs the configured variant from initial_factors(obs, rank, config.seed).
SolveResult solve(const ObservedMatrix& obs, Index rank,
                  const SolverConfig& config, const SolveHooks& hooks = {});

// Runs the configured variant from the given factors.
SolveResult solve_from(const ObservedMatrix& obs, FactorPair init,
                       const SolverConfig& config,
                       const SolveHooks& hooks = {});

}  // namespace rmc

#endif  // RMC_SOLVER_HPP_
