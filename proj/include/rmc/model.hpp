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

// Problem representation shared by every solver: a partially observed
// matrix, the rank-r factor pair that approximates it, and the residual
// restricted to the observed support.

#ifndef RMC_MODEL_HPP_
#define RMC_MODEL_HPP_

#include <Eigen/Dense>

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace rmc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Cell {
  Index row = 0;
  Index col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// Sorted list of observed cells, row-major.
using Support = std::vector<Cell>;

// A partially observed m x n matrix: the support set plus one value per
// observed cell.
//
// Entries are stored row-major sorted, so the observed columns of row i are
// the contiguous range [row_offsets()[i], row_offsets()[i + 1]). A secondary
// column index lists entry ids grouped by column (ascending row within each
// column). The support layout is shared between copies that differ only in
// their values.
class ObservedMatrix {
 public:
  // Validates bounds and uniqueness; triplets may arrive in any order.
  static ObservedMatrix build(Index rows, Index cols,
                              std::span<const Triplet> triplets);

  // Observes `dense` on `support`.
  static ObservedMatrix observe(const Matrix& dense, const Support& support);

  Index rows() const { return layout_->rows; }
  Index cols() const { return layout_->cols; }
  Index nnz() const { return values_.size(); }
  double fraction() const {
    return static_cast<double>(nnz()) /
           (static_cast<double>(rows()) * static_cast<double>(cols()));
  }

  std::span<const Index> row_offsets() const { return layout_->row_offsets; }
  std::span<const Index> row_indices() const { return layout_->row_of; }
  std::span<const Index> col_indices() const { return layout_->col_of; }
  std::span<const Index> col_offsets() const { return layout_->col_offsets; }
  // Entry ids ordered by column; column j occupies
  // [col_offsets()[j], col_offsets()[j + 1]).
  std::span<const Index> col_entries() const { return layout_->col_entries; }

  const Vector& values() const { return values_; }

  Index row_count(Index i) const {
    return layout_->row_offsets[i + 1] - layout_->row_offsets[i];
  }
  Index col_count(Index j) const {
    return layout_->col_offsets[j + 1] - layout_->col_offsets[j];
  }

  std::optional<Index> first_empty_row() const;
  std::optional<Index> first_empty_col() const;

  // Same support, new values (one per entry, in storage order).
  ObservedMatrix with_values(Vector values) const;

  bool same_support(const ObservedMatrix& other) const;

  std::vector<Triplet> triplets() const;
  Support support() const;

  // Dense m x n matrix with zeros off the support.
  Matrix to_dense() const;

  double max_abs_value() const { return values_.cwiseAbs().maxCoeff(); }
  double mean_abs_value() const { return values_.cwiseAbs().mean(); }

  friend bool operator==(const ObservedMatrix& a, const ObservedMatrix& b);

 private:
  struct Layout {
    Index rows = 0;
    Index cols = 0;
    std::vector<Index> row_offsets;
    std::vector<Index> row_of;
    std::vector<Index> col_of;
    std::vector<Index> col_offsets;
    std::vector<Index> col_entries;
  };

  ObservedMatrix(std::shared_ptr<const Layout> layout, Vector values)
      : layout_(std::move(layout)), values_(std::move(values)) {}

  std::shared_ptr<const Layout> layout_;
  Vector values_;
};

// Rank-r factors of the recovered matrix M = U V.
struct FactorPair {
  Matrix u;  // m x r
  Matrix v;  // r x n

  Index rank() const { return u.cols(); }
  Matrix product() const { return u * v; }

  // Throws unless 1 <= r <= min(m, n), shapes agree and entries are finite.
  void validate() const;
};

// (U V)_{ij} for every observed cell, in storage order.
Vector predict_on_support(const ObservedMatrix& obs, const FactorPair& f);

// X_{ij} - (U V)_{ij} on the support, in storage order. Entries off the
// support are not represented.
Vector masked_residual(const ObservedMatrix& obs, const FactorPair& f);

double residual_fro_norm(const Vector& residual);

// Triplet interchange: one `i<TAB>j<TAB>value` line per entry, zero-based.
std::vector<Triplet> read_triplets(std::istream& in);
std::vector<Triplet> read_triplets(const std::filesystem::path& path);
void write_triplets(std::ostream& out, std::span<const Triplet> triplets);
void write_triplets(const std::filesystem::path& path,
                    std::span<const Triplet> triplets);

}  // namespace rmc

#endif  // RMC_MODEL_HPP_
