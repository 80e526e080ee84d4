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

#ifndef RMC_METRICS_HPP_
#define RMC_METRICS_HPP_

#include <span>

#include "rmc/model.hpp"

namespace rmc {

inline constexpr double kDefaultSuccessThreshold = 1e-1;

struct EvalReport {
  double nmse = 0.0;
  double psnr_db = 0.0;
  double rmse = 0.0;
  bool success = false;
  int trials = 0;
  double elapsed = 0.0;
};

// Mean over estimates of ||M - X||_F^2, divided by ||X||_F^2.
double nmse(std::span<const Matrix> estimates, const Matrix& truth);
double nmse(const Matrix& estimate, const Matrix& truth);

// n m / ||M - X||_F^2, the unlogged ratio.
double psnr_ratio(const Matrix& estimate, const Matrix& truth);

// 10 log10(peak^2 n m / ||M - X||_F^2). +infinity when M == X.
double psnr(const Matrix& estimate, const Matrix& truth, double peak = 1.0);

// sqrt of the mean squared error over the test support.
double rmse_test(const Matrix& estimate, const ObservedMatrix& test);
double rmse_test(const FactorPair& estimate, const ObservedMatrix& test);

bool phase_success(double nmse_value,
                   double threshold = kDefaultSuccessThreshold);

}  // namespace rmc

#endif  // RMC_METRICS_HPP_
