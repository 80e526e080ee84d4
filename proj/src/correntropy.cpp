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

#include "rmc/correntropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rmc/error.hpp"

namespace rmc {

namespace {

void require_positive(double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kNonPositiveSigma,
                "kernel width must be positive, got " + std::to_string(sigma));
  }
}

constexpr double kMinWeight = std::numeric_limits<double>::min();

}  // namespace

void KernelSchedule::validate() const {
  if (!(eta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eta must be positive");
  }
  if (xi && !(*xi > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "xi must be positive");
  }
  if (!(warm_sigma > 0.0) || (xi && warm_sigma < *xi)) {
    throw Error(ErrorCode::kInvalidArgument, "warm_sigma must be >= xi");
  }
}

double default_xi(double max_abs_value) {
  return 1e-4 * std::max(max_abs_value, 1e-4);
}

double gaussian_kernel(double e, double sigma) {
  require_positive(sigma);
  const double z = e / sigma;
  return std::max(std::exp(-0.5 * z * z), kMinWeight);
}

double closs(const Eigen::Ref<const Eigen::VectorXd>& residual, double sigma) {
  require_positive(sigma);
  const double s2 = sigma * sigma;
  double total = 0.0;
  for (Eigen::Index k = 0; k < residual.size(); ++k) {
    const double z = residual[k] / sigma;
    total += -s2 * std::expm1(-0.5 * z * z);
  }
  return total;
}

WeightField compute_weights(const Eigen::Ref<const Eigen::VectorXd>& residual,
                            double sigma) {
  require_positive(sigma);
  WeightField w{Eigen::VectorXd(residual.size())};
  const double inv = 1.0 / sigma;
  for (Eigen::Index k = 0; k < residual.size(); ++k) {
    const double z = residual[k] * inv;
    w.values[k] = std::max(std::exp(-0.5 * z * z), kMinWeight);
  }
  return w;
}

namespace {

// Interpolated q-quantile of v[from, end) after v has been partitioned so
// that every element before `from` is no larger. Reorders v.
double partial_quantile(std::vector<double>& v, std::size_t from, double q) {
  const double pos = static_cast<double>(v.size() - 1) * q;
  const auto lo = std::max(static_cast<std::size_t>(std::floor(pos)), from);
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(v.begin() + from, v.begin() + lo, v.end());
  const double a = v[lo];
  if (frac <= 0.0 || lo + 1 >= v.size()) return a;
  // The next order statistic is the minimum of the upper partition.
  const double b = *std::min_element(v.begin() + lo + 1, v.end());
  return a + frac * (b - a);
}

}  // namespace

double quantile(const Eigen::Ref<const Eigen::VectorXd>& values, double q) {
  if (values.size() == 0) {
    throw Error(ErrorCode::kEmptyResidual, "quantile of empty set");
  }
  std::vector<double> v(values.data(), values.data() + values.size());
  return partial_quantile(v, 0, q);
}

double adaptive_sigma(const Eigen::Ref<const Eigen::VectorXd>& residual,
                      double eta, double xi) {
  if (residual.size() == 0) {
    throw Error(ErrorCode::kEmptyResidual, "no residuals to size the kernel");
  }
  std::vector<double> v(residual.data(), residual.data() + residual.size());
  const double q1 = partial_quantile(v, 0, 0.25);
  // Everything below floor(0.25 (n - 1)) is now <= q1, so the upper quartile
  // only needs the tail.
  const auto start = static_cast<std::size_t>(
      std::floor(static_cast<double>(v.size() - 1) * 0.25));
  const double q3 = partial_quantile(v, start, 0.75);
  return std::max(eta * (q3 - q1), xi);
}

double adaptive_sigma(const Eigen::Ref<const Eigen::VectorXd>& residual,
                      const KernelSchedule& schedule) {
  if (!schedule.xi) {
    throw Error(ErrorCode::kInvalidArgument, "kernel floor xi is unset");
  }
  return adaptive_sigma(residual, schedule.eta, *schedule.xi);
}

double inner_sigma(const Eigen::Ref<const Eigen::VectorXd>& x_row,
                   const Eigen::Ref<const Eigen::MatrixXd>& basis,
                   const Eigen::Ref<const Eigen::VectorXd>& u_curr,
                   const Eigen::Ref<const Eigen::VectorXd>& u_prev,
                   double epsilon_inner, double sigma_outer, double xi) {
  const Eigen::Index count = x_row.size();
  if (count == 0) {
    throw Error(ErrorCode::kEmptyRow, "row has no observed entries");
  }
  if ((u_curr - u_prev).squaredNorm() <= epsilon_inner) return sigma_outer;
  const Eigen::VectorXd scaled =
      (x_row - basis.transpose() * u_curr) / (2.0 * static_cast<double>(count));
  return std::max(scaled.norm(), xi);
}

}  // namespace rmc
