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

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rmc/error.hpp"
#include "rmc/metrics.hpp"
#include "rmc/synth.hpp"

namespace rmc {
namespace {

using testing::random_matrix;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Nmse, HandExamples) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(5, 4, rng);
  EXPECT_EQ(nmse(x, x), 0.0);
  EXPECT_DOUBLE_EQ(nmse(Matrix::Zero(5, 4), x), 1.0);

  // ||X||^2 = 4, trial errors 1 and 3.
  Matrix truth = Matrix::Zero(2, 2);
  truth(0, 0) = 2.0;
  Matrix a = truth;
  a(1, 1) = 1.0;
  Matrix b = truth;
  b(0, 1) = std::sqrt(3.0);
  const std::vector<Matrix> trials = {a, b};
  EXPECT_DOUBLE_EQ(nmse(trials, truth), 0.5);
}

TEST(Nmse, Errors) {
  const Matrix x = Matrix::Ones(3, 3);
  EXPECT_EQ(code_of([&] { nmse(x, Matrix::Zero(3, 3)); }), ErrorCode::kZeroTruth);
  EXPECT_EQ(code_of([&] { nmse(Matrix::Ones(3, 2), x); }),
            ErrorCode::kDimensionMismatch);
  const std::vector<Matrix> mixed = {x, Matrix::Ones(2, 3)};
  EXPECT_EQ(code_of([&] { nmse(mixed, x); }), ErrorCode::kDimensionMismatch);
}

TEST(Nmse, ScaleCovariantAndNonnegative) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix x = random_matrix(6, 7, rng);
    const Matrix m = random_matrix(6, 7, rng);
    const double alpha = (trial % 2 ? -1.0 : 1.0) * std::exp(0.1 * (trial - 50));
    const double base = nmse(m, x);
    EXPECT_GT(base, 0.0);
    EXPECT_NEAR(nmse(alpha * m, alpha * x), base, 1e-12 * base);
  }
}

TEST(Psnr, HandExamples) {
  const Matrix x = Matrix::Constant(8, 6, 0.5);
  const Matrix off = x.array() + 0.1;
  EXPECT_NEAR(psnr(off, x), 20.0, 1e-10);
  const Matrix half = x.array() + 0.05;
  EXPECT_NEAR(psnr(half, x) - psnr(off, x), 20.0 * std::log10(2.0), 1e-10);
  EXPECT_NEAR(20.0 * std::log10(2.0), 6.0206, 1e-4);
  EXPECT_EQ(psnr(x, x), std::numeric_limits<double>::infinity());
  EXPECT_EQ(psnr_ratio(x, x), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(psnr_ratio(off, x), 100.0, 1e-9);
  // A peak of 255 adds 20 log10(255).
  EXPECT_NEAR(psnr(off, x, 255.0), 20.0 + 20.0 * std::log10(255.0), 1e-9);
  EXPECT_EQ(code_of([&] { psnr(Matrix::Zero(2, 2), x); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Psnr, StrictlyDecreasingInError) {
  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(10, 10, rng);
  const Matrix dir = random_matrix(10, 10, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 50; ++k) {
    const double v = psnr(x + 0.01 * k * dir, x);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(RmseTest, HandExamples) {
  const Matrix est = Matrix::Zero(3, 3);
  std::vector<Triplet> one = {{1, 2, 1.0}};
  EXPECT_DOUBLE_EQ(rmse_test(est, ObservedMatrix::build(3, 3, one)), 1.0);
  std::vector<Triplet> four = {{0, 0, 1.0}, {0, 1, -1.0}, {2, 2, 1.0}, {1, 0, 3.0}};
  const ObservedMatrix test = ObservedMatrix::build(3, 3, four);
  EXPECT_NEAR(rmse_test(est, test), 1.7320508, 1e-7);
  EXPECT_EQ(rmse_test(test.to_dense(), test), 0.0);
  EXPECT_EQ(code_of([&] { rmse_test(Matrix::Zero(2, 3), test); }),
            ErrorCode::kDimensionMismatch);
  // An empty test set cannot be built in the first place.
  std::vector<Triplet> none;
  EXPECT_EQ(code_of([&] { ObservedMatrix::build(3, 3, none); }),
            ErrorCode::kEmptySupport);
}

TEST(RmseTest, IgnoresValuesOffTheTestSupport) {
  std::mt19937_64 rng(4);
  const ObservedMatrix test = ObservedMatrix::observe(
      random_matrix(12, 9, rng), sample_mask(12, 9, 0.3, 5));
  const Matrix est = random_matrix(12, 9, rng);
  const double base = rmse_test(est, test);
  Matrix changed = est;
  const Matrix on = testing::dense_mask(test);
  for (Index k = 0; k < changed.size(); ++k) {
    if (on.data()[k] == 0.0) changed.data()[k] += 100.0;
  }
  EXPECT_EQ(rmse_test(changed, test), base);
}

TEST(RmseTest, FactorOverloadMatchesDense) {
  std::mt19937_64 rng(6);
  const FactorPair f{random_matrix(10, 2, rng), random_matrix(2, 8, rng)};
  const ObservedMatrix test = ObservedMatrix::observe(
      random_matrix(10, 8, rng), sample_mask(10, 8, 0.4, 7));
  EXPECT_NEAR(rmse_test(f, test), rmse_test(f.product(), test), 1e-12);
}

TEST(PhaseSuccess, Threshold) {
  EXPECT_TRUE(phase_success(0.0));
  EXPECT_TRUE(phase_success(0.099));
  EXPECT_FALSE(phase_success(0.1));
  EXPECT_FALSE(phase_success(0.5));
  EXPECT_TRUE(phase_success(0.5, 0.6));
  EXPECT_DOUBLE_EQ(kDefaultSuccessThreshold, 0.1);
}

}  // namespace
}  // namespace rmc
