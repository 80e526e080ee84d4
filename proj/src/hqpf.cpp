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

#include "rmc/hqpf.hpp"

#include <algorithm>
#include <string>

#include "outer_loop.hpp"
#include "rmc/error.hpp"
#include "rmc/parallel.hpp"

namespace rmc {

RowSubproblem row_subproblem(const ObservedMatrix& obs, const Matrix& v,
                             Index i) {
  const auto offsets = obs.row_offsets();
  const auto cols = obs.col_indices();
  const Index begin = offsets[i];
  const Index count = offsets[i + 1] - begin;
  RowSubproblem sub;
  sub.theta.assign(cols.begin() + begin, cols.begin() + begin + count);
  sub.x = obs.values().segment(begin, count);
  sub.basis.resize(v.rows(), count);
  for (Index k = 0; k < count; ++k) sub.basis.col(k) = v.col(sub.theta[k]);
  sub.phi = Vector::Ones(count);
  return sub;
}

RowSubproblem col_subproblem(const ObservedMatrix& obs, const Matrix& u,
                             Index j) {
  const auto offsets = obs.col_offsets();
  const auto entries = obs.col_entries();
  const auto rows = obs.row_indices();
  const Index begin = offsets[j];
  const Index count = offsets[j + 1] - begin;
  RowSubproblem sub;
  sub.theta.resize(count);
  sub.x.resize(count);
  sub.basis.resize(u.cols(), count);
  for (Index k = 0; k < count; ++k) {
    const Index e = entries[begin + k];
    sub.theta[k] = rows[e];
    sub.x[k] = obs.values()[e];
    sub.basis.col(k) = u.row(rows[e]).transpose();
  }
  sub.phi = Vector::Ones(count);
  return sub;
}

Vector weighted_ls(const Eigen::Ref<const Matrix>& basis,
                   const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& phi, double ridge) {
  const Index r = basis.rows();
  const Index count = basis.cols();
  if (count == 0) {
    throw Error(ErrorCode::kDegenerateRow, "subproblem has no observations");
  }
  const Matrix weighted = basis * phi.asDiagonal();
  Matrix normal = weighted * basis.transpose();
  const Vector rhs = weighted * x;
  if (count >= r) {
    Eigen::LLT<Matrix> llt(normal);
    if (llt.info() == Eigen::Success) {
      Vector u = llt.solve(rhs);
      if (u.allFinite()) return u;
    }
  }
  const double trace = normal.trace();
  const double lambda =
      ridge * (trace > 0.0 ? trace / static_cast<double>(r) : 1.0);
  normal.diagonal().array() += lambda;
  Eigen::LDLT<Matrix> ldlt(normal);
  Vector u = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !u.allFinite()) {
    throw Error(ErrorCode::kNumericalFailure,
                "regularized normal equations could not be solved");
  }
  return u;
}

Vector weighted_ls_row(const RowSubproblem& sub, double ridge) {
  if (sub.theta.empty()) {
    throw Error(ErrorCode::kDegenerateRow, "subproblem has no observations");
  }
  return weighted_ls(sub.basis, sub.x, sub.phi, ridge);
}

namespace {

double row_closs(const RowSubproblem& sub, const Eigen::Ref<const Vector>& u,
                 double sigma) {
  return closs(sub.x - sub.basis.transpose() * u, sigma);
}

Vector kernel_weights(const RowSubproblem& sub,
                      const Eigen::Ref<const Vector>& u, double sigma) {
  return compute_weights(sub.x - sub.basis.transpose() * u, sigma).values;
}

}  // namespace

InnerSolve hq_subproblem_solve(const RowSubproblem& sub,
                               const Eigen::Ref<const Vector>& u_start,
                               double sigma_outer, const KernelSchedule& kernel,
                               const SolverConfig& config) {
  if (sub.theta.empty()) {
    throw Error(ErrorCode::kDegenerateRow, "subproblem has no observations");
  }
  const double xi = kernel.xi.value_or(default_xi(sub.x.cwiseAbs().maxCoeff()));
  InnerSolve out;
  Vector u_prev = u_start;
  Vector u = u_start;
  double sigma_in = std::max(kernel.warm_sigma, sigma_outer);
  for (int k = 1; k <= config.max_inner; ++k) {
    u = weighted_ls(sub.basis, sub.x, kernel_weights(sub, u_prev, sigma_in),
                    config.ridge);
    out.iterations = k;
    // The loop has no previous inner iterate at k = 1, so the first width
    // always comes from the residual, even when u_start is already the
    // l2 solution.
    const bool settled =
        k > 1 && (u - u_prev).squaredNorm() <= config.epsilon_inner;
    if (k == 1) {
      const double scale = 0.5 / static_cast<double>(sub.x.size());
      sigma_in = std::max(
          {(scale * (sub.x - sub.basis.transpose() * u)).norm(), xi, sigma_outer});
    } else {
      sigma_in = std::max(inner_sigma(sub.x, sub.basis, u, u_prev,
                                      config.epsilon_inner, sigma_outer, xi),
                          sigma_outer);
    }
    u_prev = u;
    if (settled) break;
  }

  const double start_loss = row_closs(sub, u_start, sigma_outer);
  if (row_closs(sub, u, sigma_outer) <= start_loss) {
    out.u = std::move(u);
    return out;
  }

  // Fixed-width reweighting from u_start: each solve minimizes a quadratic
  // majorizer of the row C-loss, so the loss is non-increasing.
  out.fallback = true;
  u_prev = u_start;
  for (int k = 1; k <= config.max_inner; ++k) {
    u = weighted_ls(sub.basis, sub.x, kernel_weights(sub, u_prev, sigma_outer),
                    config.ridge);
    ++out.iterations;
    const bool settled =
        (u - u_prev).squaredNorm() <= config.epsilon_inner;
    u_prev = u;
    if (settled) break;
  }
  out.u = row_closs(sub, u, sigma_outer) <= start_loss ? u : Vector(u_start);
  return out;
}

Vector hq_row_solve(Index i, const ObservedMatrix& obs, const Matrix& v,
                    const Eigen::Ref<const Vector>& u_start,
                    double sigma_outer, const SolverConfig& config) {
  if (obs.row_count(i) == 0) {
    throw Error(ErrorCode::kDegenerateRow,
                "row " + std::to_string(i) + " has no observed entries");
  }
  const KernelSchedule kernel = resolve_kernel(config.kernel, obs);
  return hq_subproblem_solve(row_subproblem(obs, v, i), u_start, sigma_outer,
                             kernel, config)
      .u;
}

namespace {

// Solves every row of U against V, or with `columns` every column of V
// against U. Each subproblem reads the fixed opposite factor and writes only
// its own row / column. Without a width the subproblems are unweighted.
void update_factor(const ObservedMatrix& obs, FactorPair& f, bool columns,
                   std::optional<double> sigma, const KernelSchedule& kernel,
                   const SolverConfig& config) {
  const Index count = columns ? obs.cols() : obs.rows();
  Matrix next = columns ? f.v : f.u;
  parallel_for(count, config.workers, [&](std::ptrdiff_t k) {
    const RowSubproblem sub =
        columns ? col_subproblem(obs, f.u, k) : row_subproblem(obs, f.v, k);
    Vector solved;
    if (!sigma) {
      solved = weighted_ls(sub.basis, sub.x, sub.phi, config.ridge);
    } else {
      const Vector start =
          columns ? Vector(f.v.col(k)) : Vector(f.u.row(k).transpose());
      solved = hq_subproblem_solve(sub, start, *sigma, kernel, config).u;
    }
    if (columns) {
      next.col(k) = solved;
    } else {
      next.row(k) = solved.transpose();
    }
  });
  (columns ? f.v : f.u) = std::move(next);
}

}  // namespace

SolveResult hqpf_solve(const ObservedMatrix& obs, Index rank,
                       const SolverConfig& config, const SolveHooks& hooks) {
  check_solvable(obs, rank);
  return hqpf_solve_from(obs, initial_factors(obs, rank, config.seed), config,
                         hooks);
}

SolveResult hqpf_solve_from(const ObservedMatrix& obs, FactorPair init,
                            const SolverConfig& config,
                            const SolveHooks& hooks) {
  if (config.variant != Variant::kPF && config.variant != Variant::kHQPF) {
    throw Error(ErrorCode::kInvalidArgument,
                "hqpf_solve runs PF or HQPF, got " +
                    std::string(to_string(config.variant)));
  }
  config.validate();
  init.validate();
  check_solvable(obs, init.rank());
  const KernelSchedule kernel = resolve_kernel(config.kernel, obs);

  SolveResult result;
  result.factors = std::move(init);
  result.status = SolveStatus::kMaxIterations;
  FactorPair& f = result.factors;
  detail::OuterLoop loop(config, kernel, config.variant == Variant::kPF);

  Vector residual = masked_residual(obs, f);
  for (int t = 0; t < config.max_outer; ++t) {
    std::optional<double> sigma;
    const double width = loop.begin_iteration(residual);
    if (loop.phase() == Phase::kCorrentropy) sigma = width;
    update_factor(obs, f, /*columns=*/false, sigma, kernel, config);
    update_factor(obs, f, /*columns=*/true, sigma, kernel, config);
    residual = masked_residual(obs, f);
    if (hooks.on_iterate) hooks.on_iterate(t, f);
    if (loop.end_iteration(t, residual, result)) break;
  }
  result.elapsed = loop.elapsed();
  return result;
}

}  // namespace rmc
