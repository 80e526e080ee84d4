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

// Half-quadratic power factorization: alternating row-wise and column-wise
// iteratively reweighted least squares on the correntropy objective, after an
// unweighted alternating-least-squares warm-up. PF is the unweighted special
// case.

#ifndef RMC_HQPF_HPP_
#define RMC_HQPF_HPP_

#include <vector>

#include "rmc/solver.hpp"

namespace rmc {

// One row (or column) least-squares subproblem restricted to its observed
// entries.
struct RowSubproblem {
  std::vector<Index> theta;  // observed column indices of the row
  Vector x;                  // observed values, |theta|
  Matrix basis;              // r x |theta| slice of the opposite factor
  Vector phi;                // diagonal weights, each in (0, 1]
};

// Gathers row i of `obs` against V (r x n). Weights start at one.
RowSubproblem row_subproblem(const ObservedMatrix& obs, const Matrix& v,
                             Index i);
// Gathers column j of `obs` against U (m x r); the basis is U_theta^T.
RowSubproblem col_subproblem(const ObservedMatrix& obs, const Matrix& u,
                             Index j);

// argmin_u || sqrt(phi) (x - basis^T u) ||^2 via the r x r normal equations.
// When the normal matrix is not positive definite, or fewer than r entries
// are observed, ridge * trace / r is added to its diagonal.
Vector weighted_ls(const Eigen::Ref<const Matrix>& basis,
                   const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& phi, double ridge);

Vector weighted_ls_row(const RowSubproblem& sub, double ridge);

struct InnerSolve {
  Vector u;
  int iterations = 0;
  // The reweighting schedule increased the row C-loss and the fixed-width
  // fallback was used instead.
  bool fallback = false;
};

// Inner reweighting loop for one subproblem, starting from u_start.
//
// Widths start at max(warm_sigma, sigma_outer) and then follow inner_sigma,
// never dropping below sigma_outer. Stops once the squared update falls
// under epsilon_inner or after max_inner solves. If the result has a larger
// row C-loss at sigma_outer than u_start, the loop is redone at the fixed
// width sigma_outer from u_start, which cannot increase it.
InnerSolve hq_subproblem_solve(const RowSubproblem& sub,
                               const Eigen::Ref<const Vector>& u_start,
                               double sigma_outer, const KernelSchedule& kernel,
                               const SolverConfig& config);

Vector hq_row_solve(Index i, const ObservedMatrix& obs, const Matrix& v,
                    const Eigen::Ref<const Vector>& u_start,
                    double sigma_outer, const SolverConfig& config);

// Variant PF or HQPF.
SolveResult hqpf_solve(const ObservedMatrix& obs, Index rank,
                       const SolverConfig& config,
                       const SolveHooks& hooks = {});
SolveResult hqpf_solve_from(const ObservedMatrix& obs, FactorPair init,
                            const SolverConfig& config,
                            const SolveHooks& hooks = {});

}  // namespace rmc

#endif  // RMC_HQPF_HPP_
