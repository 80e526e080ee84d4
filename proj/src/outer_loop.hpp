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

#ifndef RMC_SRC_OUTER_LOOP_HPP_
#define RMC_SRC_OUTER_LOOP_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rmc/correntropy.hpp"
#include "rmc/solver.hpp"

namespace rmc::detail {

// Phase bookkeeping shared by both solvers: the l2 warm-up, the hand-over
// test on |change of ||E||_F|, the clamped non-increasing kernel width, the
// trace and the stop test.
class OuterLoop {
 public:
  OuterLoop(const SolverConfig& config, const KernelSchedule& kernel,
            bool l2_only)
      : config_(config),
        kernel_(kernel),
        l2_only_(l2_only),
        phase_(!l2_only && config.fixed_sigma ? Phase::kCorrentropy
                                              : Phase::kL2Warmup),
        sigma_(kernel.warm_sigma),
        start_(std::chrono::steady_clock::now()) {}

  Phase phase() const { return phase_; }
  double sigma() const { return sigma_; }

  // Width for the coming iteration, from the residual of the current
  // iterate. Never increases once the correntropy phase has begun.
  double begin_iteration(const Vector& residual) {
    if (phase_ == Phase::kL2Warmup) {
      sigma_ = kernel_.warm_sigma;
    } else if (config_.fixed_sigma) {
      sigma_ = *config_.fixed_sigma;
    } else {
      sigma_ = std::min(sigma_, adaptive_sigma(residual, kernel_));
    }
    return sigma_;
  }

  // Records the finished iteration; returns true when the solve is done.
  bool end_iteration(int t, const Vector& residual, SolveResult& result) {
    const double norm = residual_fro_norm(residual);
    TraceRecord rec;
    rec.iteration = t;
    rec.sigma = sigma_;
    rec.objective = closs(residual, sigma_);
    rec.residual_norm = norm;
    rec.phase = phase_;
    rec.elapsed = elapsed();
    result.trace.push_back(rec);

    const double change = std::abs(norm - prev_norm_);
    prev_norm_ = norm;
    if (!std::isfinite(norm)) {
      result.status = SolveStatus::kStalled;
      return true;
    }
    if (phase_ == Phase::kL2Warmup && !l2_only_) {
      if (change < config_.epsilon_switch) {
        phase_ = Phase::kCorrentropy;
        result.switch_iteration = t + 1;
      }
      return false;
    }
    if (change < config_.epsilon_stop) {
      result.status = SolveStatus::kConverged;
      return true;
    }
    return false;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  const SolverConfig& config_;
  const KernelSchedule& kernel_;
  bool l2_only_;
  Phase phase_;
  double sigma_;
  // ||E^0||_F is taken as zero.
  double prev_norm_ = 0.0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace rmc::detail

#endif  // RMC_SRC_OUTER_LOOP_HPP_
