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

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rmc/error.hpp"
#include "rmc/hqasd.hpp"
#include "rmc/model.hpp"

namespace rmc {
namespace {

using testing::dense_mask;
using testing::random_matrix;
using testing::random_support;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no rmc::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(BuildObserved, SingleEntry) {
  const std::vector<Triplet> t = {{0, 0, 1.0}};
  const ObservedMatrix obs = ObservedMatrix::build(2, 2, t);
  EXPECT_EQ(obs.rows(), 2);
  EXPECT_EQ(obs.cols(), 2);
  ASSERT_EQ(obs.nnz(), 1);
  EXPECT_EQ(obs.support(), (Support{{0, 0}}));
  EXPECT_EQ(obs.values()[0], 1.0);
  EXPECT_DOUBLE_EQ(obs.fraction(), 0.25);
}

TEST(BuildObserved, DuplicateRejected) {
  const std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}};
  EXPECT_EQ(code_of([&] { ObservedMatrix::build(2, 2, t); }),
            ErrorCode::kDuplicateEntry);
}

TEST(BuildObserved, OutOfRange) {
  EXPECT_EQ(code_of([] {
              ObservedMatrix::build(2, 2, std::vector<Triplet>{{2, 0, 1.0}});
            }),
            ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([] {
              ObservedMatrix::build(2, 2, std::vector<Triplet>{{0, 2, 1.0}});
            }),
            ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([] {
              ObservedMatrix::build(2, 2, std::vector<Triplet>{{-1, 0, 1.0}});
            }),
            ErrorCode::kIndexOutOfRange);
}

TEST(BuildObserved, EmptySupport) {
  EXPECT_EQ(code_of([] { ObservedMatrix::build(2, 2, std::vector<Triplet>{}); }),
            ErrorCode::kEmptySupport);
}

TEST(BuildObserved, BadDimensions) {
  EXPECT_EQ(code_of([] {
              ObservedMatrix::build(0, 2, std::vector<Triplet>{{0, 0, 1.0}});
            }),
            ErrorCode::kInvalidArgument);
}

TEST(BuildObserved, MovieLensShapedFraction) {
  // 100000 distinct cells of a 943 x 1682 matrix.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> ui(0, 942), uj(0, 1681);
  std::set<std::pair<Index, Index>> seen;
  std::vector<Triplet> t;
  while (t.size() < 100000) {
    const Index i = ui(rng), j = uj(rng);
    if (seen.insert({i, j}).second) t.push_back({i, j, 3.0});
  }
  const ObservedMatrix obs = ObservedMatrix::build(943, 1682, t);
  EXPECT_NEAR(obs.fraction(), 0.063, 5e-4);
}

TEST(BuildObserved, RowMajorStorageAndColumnIndex) {
  const std::vector<Triplet> t = {
      {2, 1, 5.0}, {0, 2, 1.0}, {1, 0, 2.0}, {0, 0, 3.0}, {2, 0, 4.0}};
  const ObservedMatrix obs = ObservedMatrix::build(3, 3, t);
  const Support expect = {{0, 0}, {0, 2}, {1, 0}, {2, 0}, {2, 1}};
  EXPECT_EQ(obs.support(), expect);
  EXPECT_EQ(obs.values(), (Vector(5) << 3, 1, 2, 4, 5).finished());
  // Row slices are contiguous.
  EXPECT_EQ(obs.row_count(0), 2);
  EXPECT_EQ(obs.row_count(1), 1);
  EXPECT_EQ(obs.row_count(2), 2);
  // The column index lists storage positions of each column in row order.
  const auto off = obs.col_offsets();
  const auto ent = obs.col_entries();
  std::vector<Index> col0(ent.begin() + off[0], ent.begin() + off[1]);
  EXPECT_EQ(col0, (std::vector<Index>{0, 2, 3}));
  EXPECT_EQ(obs.col_count(1), 1);
  EXPECT_EQ(obs.col_count(2), 1);
}

TEST(BuildObserved, EmptyRowsAndColumnsReported) {
  const std::vector<Triplet> t = {{0, 0, 1.0}, {2, 2, 1.0}};
  const ObservedMatrix obs = ObservedMatrix::build(3, 4, t);
  EXPECT_EQ(obs.first_empty_row(), 1);
  EXPECT_EQ(obs.first_empty_col(), 1);
}

TEST(BuildObserved, RoundTripThroughTriplets) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_matrix(9, 7, rng);
    const ObservedMatrix obs =
        ObservedMatrix::observe(x, random_support(9, 7, 0.5, rng));
    const auto trip = obs.triplets();
    EXPECT_EQ(ObservedMatrix::build(9, 7, trip), obs);
    std::stringstream io;
    write_triplets(io, trip);
    EXPECT_EQ(ObservedMatrix::build(9, 7, read_triplets(io)), obs);
  }
}

TEST(Triplets, ParseErrorNamesLine) {
  std::stringstream in("0\t0\t1.5\n# comment\n1\t1\tx\n");
  try {
    read_triplets(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Triplets, MissingFile) {
  EXPECT_EQ(code_of([] { read_triplets(std::filesystem::path("/nonexistent/x")); }),
            ErrorCode::kMissingFile);
}

TEST(Observe, OutOfRangeCell) {
  EXPECT_EQ(code_of([] {
              ObservedMatrix::observe(Matrix::Zero(2, 2), Support{{2, 0}});
            }),
            ErrorCode::kIndexOutOfRange);
}

TEST(FactorPair, Validation) {
  FactorPair f{Matrix::Ones(3, 2), Matrix::Ones(2, 4)};
  EXPECT_NO_THROW(f.validate());
  EXPECT_EQ(f.rank(), 2);
  FactorPair bad{Matrix::Ones(3, 2), Matrix::Ones(3, 4)};
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kDimensionMismatch);
  FactorPair too_big{Matrix::Ones(3, 4), Matrix::Ones(4, 4)};
  EXPECT_EQ(code_of([&] { too_big.validate(); }), ErrorCode::kBadRank);
  f.u(0, 0) = std::nan("");
  EXPECT_EQ(code_of([&] { f.validate(); }), ErrorCode::kNumericalFailure);
}

TEST(MaskedResidual, ExactFitIsZero) {
  std::mt19937_64 rng(1);
  const FactorPair f{random_matrix(6, 2, rng), random_matrix(2, 5, rng)};
  const ObservedMatrix obs =
      ObservedMatrix::observe(f.product(), random_support(6, 5, 0.6, rng));
  EXPECT_EQ(masked_residual(obs, f).cwiseAbs().maxCoeff() < 1e-14, true);
}

TEST(MaskedResidual, DirectSubtraction) {
  const ObservedMatrix obs =
      ObservedMatrix::build(2, 2, std::vector<Triplet>{{0, 0, 3.0}});
  const FactorPair f{Matrix::Ones(2, 1), Matrix::Ones(1, 2)};
  const Vector e = masked_residual(obs, f);
  ASSERT_EQ(e.size(), 1);
  EXPECT_EQ(e[0], 2.0);
}

TEST(MaskedResidual, MatchesDenseOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(10, 10, rng);
    const FactorPair f{random_matrix(10, 2, rng), random_matrix(2, 10, rng)};
    const ObservedMatrix obs =
        ObservedMatrix::observe(x, random_support(10, 10, 0.5, rng));
    const Vector e = masked_residual(obs, f);
    const Matrix dense = dense_mask(obs).cwiseProduct(x - f.u * f.v);
    const Support s = obs.support();
    double off_support = 0.0;
    Matrix rebuilt = Matrix::Zero(10, 10);
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_NEAR(e[k], dense(s[k].row, s[k].col), 1e-13);
      rebuilt(s[k].row, s[k].col) = e[k];
    }
    off_support = (rebuilt - dense).norm();
    EXPECT_LT(off_support, 1e-12);
  }
}

TEST(MaskedResidual, DimensionMismatch) {
  const ObservedMatrix obs =
      ObservedMatrix::build(2, 2, std::vector<Triplet>{{0, 0, 3.0}});
  const FactorPair f{Matrix::Ones(3, 1), Matrix::Ones(1, 2)};
  EXPECT_EQ(code_of([&] { masked_residual(obs, f); }),
            ErrorCode::kDimensionMismatch);
}

TEST(ResidualNorm, Examples) {
  EXPECT_EQ(residual_fro_norm(Vector::Zero(4)), 0.0);
  EXPECT_EQ(residual_fro_norm((Vector(1) << 2.0).finished()), 2.0);
  EXPECT_EQ(residual_fro_norm((Vector(2) << 3.0, 4.0).finished()), 5.0);
}

TEST(MaskedResidualProperty, LinearInDataAndProduct) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Support s = random_support(8, 9, 0.4, rng);
    const Matrix x1 = random_matrix(8, 9, rng), x2 = random_matrix(8, 9, rng);
    const FactorPair f1{random_matrix(8, 2, rng), random_matrix(2, 9, rng)};
    const FactorPair f2{random_matrix(8, 3, rng), random_matrix(3, 9, rng)};
    // U V + U' V' = [U U'] [V; V'].
    FactorPair sum{Matrix(8, 5), Matrix(5, 9)};
    sum.u << f1.u, f2.u;
    sum.v << f1.v, f2.v;
    const Vector lhs = masked_residual(ObservedMatrix::observe(x1, s), f1) +
                       masked_residual(ObservedMatrix::observe(x2, s), f2);
    const Vector rhs = masked_residual(ObservedMatrix::observe(x1 + x2, s), sum);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MaskedResidualProperty, SquaredNormIsUnitWeightObjective) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix x = random_matrix(8, 8, rng);
    const FactorPair f{random_matrix(8, 3, rng), random_matrix(3, 8, rng)};
    const ObservedMatrix obs =
        ObservedMatrix::observe(x, random_support(8, 8, 0.5, rng));
    const double n = residual_fro_norm(masked_residual(obs, f));
    const double j2 = dense_mask(obs).cwiseProduct(x - f.u * f.v).squaredNorm();
    EXPECT_NEAR(n * n, j2, 1e-12 * std::max(1.0, j2));
    const WeightField unit{Vector::Ones(obs.nnz())};
    EXPECT_NEAR(n * n, 2.0 * weighted_objective(obs, f, unit),
                1e-12 * std::max(1.0, j2));
  }
}

}  // namespace
}  // namespace rmc
