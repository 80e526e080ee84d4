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

#include "rmc/hqasd.hpp"

#include <string>

#include "outer_loop.hpp"
#include "rmc/error.hpp"

namespace rmc {

namespace {

void check_weights(const ObservedMatrix& obs, const WeightField& w) {
  if (w.values.size() != obs.nnz()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weights do not cover the support");
  }
}

// -(W o E) V^T from a residual on the support.
Matrix grad_u_from(const ObservedMatrix& obs, const Matrix& v,
                   const Vector& weighted_residual) {
  const auto offsets = obs.row_offsets();
  const auto cols = obs.col_indices();
  Matrix gt = Matrix::Zero(v.rows(), obs.rows());
  for (Index i = 0; i < obs.rows(); ++i) {
    auto g = gt.col(i);
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) {
      g.noalias() -= weighted_residual[k] * v.col(cols[k]);
    }
  }
  return gt.transpose();
}

// -U^T (W o E) from a residual on the support.
Matrix grad_v_from(const ObservedMatrix& obs, const Matrix& u,
                   const Vector& weighted_residual) {
  const auto offsets = obs.row_offsets();
  const auto cols = obs.col_indices();
  const Matrix ut = u.transpose();
  Matrix g = Matrix::Zero(u.cols(), obs.cols());
  for (Index i = 0; i < obs.rows(); ++i) {
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) {
      g.col(cols[k]).noalias() -= weighted_residual[k] * ut.col(i);
    }
  }
  return g;
}

// (A B)_k for every observed cell, A m x r, B r x n.
Vector masked_products(const ObservedMatrix& obs, const Matrix& a,
                       const Matrix& b) {
  const auto offsets = obs.row_offsets();
  const auto cols = obs.col_indices();
  const Matrix at = a.transpose();
  Vector p(obs.nnz());
  for (Index i = 0; i < obs.rows(); ++i) {
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) {
      p[k] = at.col(i).dot(b.col(cols[k]));
    }
  }
  return p;
}

Vector side_products(const ObservedMatrix& obs, const FactorPair& f,
                     const Matrix& direction, Side side) {
  return side == Side::kU ? masked_products(obs, direction, f.v)
                          : masked_products(obs, f.u, direction);
}

Matrix inverse_gram_times(const Matrix& gram, const Matrix& rhs, double ridge) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() == Eigen::Success) {
    Matrix out = llt.solve(rhs);
    if (out.allFinite()) return out;
  }
  Matrix regularized = gram;
  const double trace = gram.trace();
  regularized.diagonal().array() +=
      ridge * (trace > 0.0 ? trace / static_cast<double>(gram.rows()) : 1.0);
  Eigen::LDLT<Matrix> ldlt(regularized);
  Matrix out = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !out.allFinite()) {
    throw Error(ErrorCode::kNumericalFailure, "Gram matrix is singular");
  }
  return out;
}

}  // namespace

double weighted_objective(const ObservedMatrix& obs, const FactorPair& f,
                          const WeightField& w) {
  check_weights(obs, w);
  const Vector e = masked_residual(obs, f);
  return 0.5 * (w.values.array() * e.array().square()).sum();
}

Matrix grad_u(const ObservedMatrix& obs, const FactorPair& f,
              const WeightField& w) {
  check_weights(obs, w);
  const Vector we = w.values.cwiseProduct(masked_residual(obs, f));
  return grad_u_from(obs, f.v, we);
}

Matrix grad_v(const ObservedMatrix& obs, const FactorPair& f,
              const WeightField& w) {
  check_weights(obs, w);
  const Vector we = w.values.cwiseProduct(masked_residual(obs, f));
  return grad_v_from(obs, f.u, we);
}

double exact_step(const Matrix& direction, const Matrix& gradient, Side side,
                  const ObservedMatrix& obs, const FactorPair& f,
                  const WeightField& w) {
  check_weights(obs, w);
  const bool shape_ok = side == Side::kU
                            ? direction.rows() == f.u.rows() &&
                                  direction.cols() == f.u.cols()
                            : direction.rows() == f.v.rows() &&
                                  direction.cols() == f.v.cols();
  if (!shape_ok || gradient.rows() != direction.rows() ||
      gradient.cols() != direction.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "direction shape does not match the factor");
  }
  if (direction.squaredNorm() == 0.0) {
    throw Error(ErrorCode::kZeroDirection, "search direction is zero");
  }
  const Vector p = side_products(obs, f, direction, side);
  const double curvature = w.values.dot(p.cwiseAbs2());
  if (!(curvature > 0.0)) {
    throw Error(ErrorCode::kZeroCurvature,
                "direction vanishes on the observed support");
  }
  return gradient.cwiseProduct(direction).sum() / curvature;
}

double exact_step(const Matrix& gradient, Side side, const ObservedMatrix& obs,
                  const FactorPair& f, const WeightField& w) {
  return exact_step(gradient, gradient, side, obs, f, w);
}

Matrix scale_u_direction(const Matrix& g_u, const Matrix& v, double ridge) {
  // g_U (V V^T)^{-1} = ((V V^T)^{-1} g_U^T)^T, Gram symmetric.
  const Matrix gram = v * v.transpose();
  return inverse_gram_times(gram, g_u.transpose(), ridge).transpose();
}

Matrix scale_v_direction(const Matrix& g_v, const Matrix& u, double ridge) {
  const Matrix gram = u.transpose() * u;
  return inverse_gram_times(gram, g_v, ridge);
}

std::pair<Matrix, Matrix> scaled_directions(const FactorPair& f,
                                            const Matrix& g_u,
                                            const Matrix& g_v, double ridge) {
  return {scale_u_direction(g_u, f.v, ridge),
          scale_v_direction(g_v, f.u, ridge)};
}

SolveResult hqasd_solve(const ObservedMatrix& obs, Index rank,
                        const SolverConfig& config, const SolveHooks& hooks) {
  check_solvable(obs, rank);
  return hqasd_solve_from(obs, initial_factors(obs, rank, config.seed), config,
                          hooks);
}

SolveResult hqasd_solve_from(const ObservedMatrix& obs, FactorPair init,
                             const SolverConfig& config,
                             const SolveHooks& hooks) {
  const Variant variant = config.variant;
  if (variant != Variant::kASD && variant != Variant::kScaledASD &&
      variant != Variant::kHQASD) {
    throw Error(ErrorCode::kInvalidArgument,
                "hqasd_solve runs ASD, ScaledASD or HQASD, got " +
                    std::string(to_string(variant)));
  }
  config.validate();
  init.validate();
  check_solvable(obs, init.rank());
  const KernelSchedule kernel = resolve_kernel(config.kernel, obs);

  SolveResult result;
  result.factors = std::move(init);
  result.status = SolveStatus::kMaxIterations;
  FactorPair& f = result.factors;
  detail::OuterLoop loop(config, kernel, variant != Variant::kHQASD);

  StepState step;
  step.scaled = variant != Variant::kASD;
  const WeightField unit{Vector::Ones(obs.nnz())};
  WeightField weights = unit;

  // Steps one side and updates the residual in place; returns false when
  // the side cannot move.
  auto take_step = [&](int t, Side side, Vector& residual) -> bool {
    const Vector we = weights.values.cwiseProduct(residual);
    Matrix& gradient = side == Side::kU ? step.g_u : step.g_v;
    gradient = side == Side::kU ? grad_u_from(obs, f.v, we)
                                : grad_v_from(obs, f.u, we);
    if (gradient.squaredNorm() == 0.0) return false;
    const Matrix direction =
        !step.scaled ? gradient
        : side == Side::kU ? scale_u_direction(gradient, f.v, config.ridge)
                           : scale_v_direction(gradient, f.u, config.ridge);
    // Same quantity as exact_step(), sharing the masked products with the
    // residual update below.
    const Vector p = side_products(obs, f, direction, side);
    const double curvature = weights.values.dot(p.cwiseAbs2());
    if (!(curvature > 0.0)) {
      throw Error(ErrorCode::kZeroCurvature,
                  "direction vanishes on the observed support");
    }
    const double mu = gradient.cwiseProduct(direction).sum() / curvature;
    (side == Side::kU ? step.mu_u : step.mu_v) = mu;
    if (hooks.on_step) {
      hooks.on_step(StepEvent{t, side, &f, &weights, &direction, mu});
    }
    (side == Side::kU ? f.u : f.v).noalias() -= mu * direction;
    residual.noalias() += mu * p;
    return true;
  };

  Vector residual = masked_residual(obs, f);
  for (int t = 0; t < config.max_outer; ++t) {
    const double sigma = loop.begin_iteration(residual);
    weights = loop.phase() == Phase::kL2Warmup
                  ? unit
                  : compute_weights(residual, sigma);
    bool moved = false;
    try {
      moved |= take_step(t, Side::kU, residual);
      moved |= take_step(t, Side::kV, residual);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroCurvature) throw;
      result.status = SolveStatus::kStalled;
    }
    if (hooks.on_iterate) hooks.on_iterate(t, f);
    const bool done = loop.end_iteration(t, residual, result);
    if (result.status == SolveStatus::kStalled) break;
    if (!moved) {
      result.status = SolveStatus::kConverged;
      break;
    }
    if (done) break;
  }
  result.elapsed = loop.elapsed();
  return result;
}

}  // namespace rmc
