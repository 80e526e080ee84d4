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

// Half-quadratic alternating steepest descent. Each iteration refreshes the
// correntropy weights once, then takes one exact-line-search step on U and
// one on V of the weighted objective
//
//   f(U, V) = 1/2 || sqrt(W) o Omega o (X - U V) ||_F^2.
//
// ASD and ScaledASD are the unit-weight special cases.

#ifndef RMC_HQASD_HPP_
#define RMC_HQASD_HPP_

#include <utility>

#include "rmc/solver.hpp"

namespace rmc {

struct StepState {
  Matrix g_u;  // m x r
  Matrix g_v;  // r x n
  double mu_u = 0.0;
  double mu_v = 0.0;
  bool scaled = true;
};

// 1/2 sum_k w_k e_k^2 over the support.
double weighted_objective(const ObservedMatrix& obs, const FactorPair& f,
                          const WeightField& w);

// Gradient of the weighted objective with respect to U:
// -(W o Omega o (X - U V)) V^T.
Matrix grad_u(const ObservedMatrix& obs, const FactorPair& f,
              const WeightField& w);
// Gradient with respect to V: -U^T (W o Omega o (X - U V)).
Matrix grad_v(const ObservedMatrix& obs, const FactorPair& f,
              const WeightField& w);

// Exact minimizer of the weighted objective along -direction:
//   <gradient, direction> / || sqrt(W) o Omega o (D V) ||_F^2   (side U)
//   <gradient, direction> / || sqrt(W) o Omega o (U D) ||_F^2   (side V).
// With direction == gradient this is ||g||^2 over the masked curvature.
// Throws ZeroDirection for a zero direction and ZeroCurvature when the
// direction vanishes on the support.
double exact_step(const Matrix& direction, const Matrix& gradient, Side side,
                  const ObservedMatrix& obs, const FactorPair& f,
                  const WeightField& w);
double exact_step(const Matrix& gradient, Side side, const ObservedMatrix& obs,
                  const FactorPair& f, const WeightField& w);

// g_U (V V^T)^{-1} and (U^T U)^{-1} g_V. Singular Gram matrices get
// ridge * trace / r on the diagonal.
Matrix scale_u_direction(const Matrix& g_u, const Matrix& v, double ridge);
Matrix scale_v_direction(const Matrix& g_v, const Matrix& u, double ridge);
std::pair<Matrix, Matrix> scaled_directions(const FactorPair& f,
                                            const Matrix& g_u,
                                            const Matrix& g_v, double ridge);

// Variant ASD, ScaledASD or HQASD.
SolveResult hqasd_solve(const ObservedMatrix& obs, Index rank,
                        const SolverConfig& config,
                        const SolveHooks& hooks = {});
SolveResult hqasd_solve_from(const ObservedMatrix& obs, FactorPair init,
                             const SolverConfig& config,
                             const SolveHooks& hooks = {});

}  // namespace rmc

#endif  // RMC_HQASD_HPP_
