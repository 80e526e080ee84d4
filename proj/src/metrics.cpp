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

#include "rmc/metrics.hpp"

#include <cmath>
#include <limits>

#include "rmc/error.hpp"

namespace rmc {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "estimate and truth differ in shape");
  }
}

}  // namespace

double nmse(std::span<const Matrix> estimates, const Matrix& truth) {
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw Error(ErrorCode::kZeroTruth, "truth is the zero matrix");
  if (estimates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no estimates to score");
  }
  double total = 0.0;
  for (const Matrix& m : estimates) {
    check_same_shape(m, truth);
    total += (m - truth).squaredNorm();
  }
  return total / static_cast<double>(estimates.size()) / denom;
}

double nmse(const Matrix& estimate, const Matrix& truth) {
  return nmse(std::span<const Matrix>(&estimate, 1), truth);
}

double psnr_ratio(const Matrix& estimate, const Matrix& truth) {
  check_same_shape(estimate, truth);
  const double err = (estimate - truth).squaredNorm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(truth.size()) / err;
}

double psnr(const Matrix& estimate, const Matrix& truth, double peak) {
  const double ratio = psnr_ratio(estimate, truth);
  if (std::isinf(ratio)) return ratio;
  return 10.0 * std::log10(peak * peak * ratio);
}

double rmse_test(const Matrix& estimate, const ObservedMatrix& test) {
  if (estimate.rows() != test.rows() || estimate.cols() != test.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "estimate and test differ in shape");
  }
  const auto rows = test.row_indices();
  const auto cols = test.col_indices();
  double total = 0.0;
  for (Index k = 0; k < test.nnz(); ++k) {
    const double e = estimate(rows[k], cols[k]) - test.values()[k];
    total += e * e;
  }
  return std::sqrt(total / static_cast<double>(test.nnz()));
}

double rmse_test(const FactorPair& estimate, const ObservedMatrix& test) {
  return masked_residual(test, estimate).norm() /
         std::sqrt(static_cast<double>(test.nnz()));
}

bool phase_success(double nmse_value, double threshold) {
  return nmse_value < threshold;
}

}  // namespace rmc
