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

// Dataset readers and writers: MovieLens rating files, grayscale images (PGM
// and CSV), dense CSV matrices, and the truncated low-rank approximation used
// to prepare inpainting targets.

#ifndef RMC_DATA_IO_HPP_
#define RMC_DATA_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string_view>
#include <vector>

#include "rmc/model.hpp"

namespace rmc {

struct Rating {
  Index user = 0;  // zero-based
  Index item = 0;  // zero-based
  double value = 0.0;
};

// Parses "user item rating [timestamp]" lines separated by tabs, spaces or
// "::", with one-based ids. Blank lines are skipped.
std::vector<Rating> read_ratings(std::istream& in);
std::vector<Rating> read_ratings(const std::filesystem::path& path);

struct RatingSplit {
  ObservedMatrix train;
  std::optional<ObservedMatrix> test;  // unset for raw files
};

// `split` is one of u1..u5, ua, ub (reads <dir>/<split>.base and .test) or
// "raw", which reads every rating from `path` itself (a file such as u.data
// or ratings.dat) into train. Both matrices are sized by the largest user
// and item ids seen in either file.
RatingSplit load_movielens(const std::filesystem::path& path,
                           std::string_view split);

// Sets round(fraction * count) of the entries equal to 1 to 5, and the same
// fraction of the entries equal to 5 to 1, chosen uniformly by seed.
ObservedMatrix flip_ratings(const ObservedMatrix& obs, double fraction,
                            std::uint64_t seed);

// P2 / P5 PGM scaled by maxval to [0, 1], or a comma separated matrix taken
// as is. The format is chosen by the magic number, not the extension.
Matrix load_image(const std::filesystem::path& path);
Matrix read_pgm(std::istream& in);

// Binary P5, values clamped to [0, 1] and quantized to 0..255.
void write_pgm(const std::filesystem::path& path, const Matrix& image);

Matrix read_csv_matrix(std::istream& in);
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(std::ostream& out, const Matrix& x);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& x);

// Best rank-k approximation by block subspace iteration on X^T X with a
// Rayleigh-Ritz step. Returns x itself when k >= min(m, n).
Matrix low_rank_approx(const Matrix& x, Index k, std::uint64_t seed = 0);

}  // namespace rmc

#endif  // RMC_DATA_IO_HPP_
