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

// Gaussian-kernel correntropy: the kernel itself, the C-loss objective
// sum_k sigma^2 (1 - G_sigma(e_k)), the closed-form half-quadratic weights
// and the two kernel-width schedules (outer interquartile rule, inner
// per-row rule).

#ifndef RMC_CORRENTROPY_HPP_
#define RMC_CORRENTROPY_HPP_

#include <Eigen/Dense>

#include <optional>

namespace rmc {

struct KernelSchedule {
  // Multiplier on the residual interquartile range.
  double eta = 2.0;
  // Lower bound on every kernel width. Solvers fill an unset floor with
  // default_xi() of the observed data.
  std::optional<double> xi;
  // Width used during the l2 warm-up and as the first inner width.
  double warm_sigma = 1e4;

  // Throws InvalidArgument unless eta > 0, xi > 0 (when set) and
  // warm_sigma >= xi.
  void validate() const;
};

// 1e-4 times the largest observed magnitude, itself floored at 1e-4.
double default_xi(double max_abs_value);

// Half-quadratic weights on the support, each in (0, 1].
struct WeightField {
  Eigen::VectorXd values;
};

// exp(-e^2 / (2 sigma^2)), kept strictly positive (underflow is clamped to
// the smallest normal double).
double gaussian_kernel(double e, double sigma);

// sum over residuals of sigma^2 (1 - G_sigma(e)). Computed with expm1 so the
// large-sigma limit e^2 / 2 keeps full precision.
double closs(const Eigen::Ref<const Eigen::VectorXd>& residual, double sigma);

WeightField compute_weights(const Eigen::Ref<const Eigen::VectorXd>& residual,
                            double sigma);

// q-quantile with linear interpolation at position (n - 1) q of the sorted
// values.
double quantile(const Eigen::Ref<const Eigen::VectorXd>& values, double q);

// max(eta * (q75 - q25), xi) over the residual values.
double adaptive_sigma(const Eigen::Ref<const Eigen::VectorXd>& residual,
                      double eta, double xi);
double adaptive_sigma(const Eigen::Ref<const Eigen::VectorXd>& residual,
                      const KernelSchedule& schedule);

// Inner kernel width for one row subproblem.
//
// While ||u_curr - u_prev||^2 > epsilon_inner the width is the norm of the
// row residual scaled by 1 / (2 |theta|), floored at xi; once the row has
// settled it falls back to sigma_outer. `basis` is the r x |theta| slice of
// the opposite factor.
double inner_sigma(const Eigen::Ref<const Eigen::VectorXd>& x_row,
                   const Eigen::Ref<const Eigen::MatrixXd>& basis,
                   const Eigen::Ref<const Eigen::VectorXd>& u_curr,
                   const Eigen::Ref<const Eigen::VectorXd>& u_prev,
                   double epsilon_inner, double sigma_outer, double xi);

}  // namespace rmc

#endif  // RMC_CORRENTROPY_HPP_
