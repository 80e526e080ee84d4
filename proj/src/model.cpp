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

#include "rmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>

#include "rmc/error.hpp"

namespace rmc {

ObservedMatrix ObservedMatrix::build(Index rows, Index cols,
                                     std::span<const Triplet> triplets) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::kInvalidArgument, "matrix dimensions must be >= 1");
  }
  if (triplets.empty()) {
    throw Error(ErrorCode::kEmptySupport, "no observed entries");
  }
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      std::ostringstream msg;
      msg << "entry (" << t.row << ", " << t.col << ") outside " << rows
          << "x" << cols;
      throw Error(ErrorCode::kIndexOutOfRange, msg.str());
    }
  }

  const auto nnz = static_cast<Index>(triplets.size());
  std::vector<Index> order(triplets.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Triplet& x = triplets[a];
    const Triplet& y = triplets[b];
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  auto layout = std::make_shared<Layout>();
  layout->rows = rows;
  layout->cols = cols;
  layout->row_of.resize(nnz);
  layout->col_of.resize(nnz);
  layout->row_offsets.assign(rows + 1, 0);
  layout->col_offsets.assign(cols + 1, 0);
  Vector values(nnz);
  for (Index k = 0; k < nnz; ++k) {
    const Triplet& t = triplets[order[k]];
    if (k > 0 && layout->row_of[k - 1] == t.row &&
        layout->col_of[k - 1] == t.col) {
      std::ostringstream msg;
      msg << "entry (" << t.row << ", " << t.col << ") given twice";
      throw Error(ErrorCode::kDuplicateEntry, msg.str());
    }
    layout->row_of[k] = t.row;
    layout->col_of[k] = t.col;
    values[k] = t.value;
    ++layout->row_offsets[t.row + 1];
    ++layout->col_offsets[t.col + 1];
  }
  std::partial_sum(layout->row_offsets.begin(), layout->row_offsets.end(),
                   layout->row_offsets.begin());
  std::partial_sum(layout->col_offsets.begin(), layout->col_offsets.end(),
                   layout->col_offsets.begin());

  // Row-major traversal visits each column in ascending row order.
  layout->col_entries.resize(nnz);
  std::vector<Index> cursor(layout->col_offsets.begin(),
                            layout->col_offsets.end() - 1);
  for (Index k = 0; k < nnz; ++k) {
    layout->col_entries[cursor[layout->col_of[k]]++] = k;
  }
  return ObservedMatrix(std::move(layout), std::move(values));
}

ObservedMatrix ObservedMatrix::observe(const Matrix& dense,
                                       const Support& support) {
  std::vector<Triplet> triplets;
  triplets.reserve(support.size());
  for (const Cell& c : support) {
    if (c.row < 0 || c.row >= dense.rows() || c.col < 0 ||
        c.col >= dense.cols()) {
      throw Error(ErrorCode::kIndexOutOfRange, "support cell outside matrix");
    }
    triplets.push_back({c.row, c.col, dense(c.row, c.col)});
  }
  return build(dense.rows(), dense.cols(), triplets);
}

std::optional<Index> ObservedMatrix::first_empty_row() const {
  for (Index i = 0; i < rows(); ++i) {
    if (row_count(i) == 0) return i;
  }
  return std::nullopt;
}

std::optional<Index> ObservedMatrix::first_empty_col() const {
  for (Index j = 0; j < cols(); ++j) {
    if (col_count(j) == 0) return j;
  }
  return std::nullopt;
}

ObservedMatrix ObservedMatrix::with_values(Vector values) const {
  if (values.size() != nnz()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "value count differs from support size");
  }
  return ObservedMatrix(layout_, std::move(values));
}

bool ObservedMatrix::same_support(const ObservedMatrix& other) const {
  if (layout_ == other.layout_) return true;
  return rows() == other.rows() && cols() == other.cols() &&
         layout_->row_of == other.layout_->row_of &&
         layout_->col_of == other.layout_->col_of;
}

std::vector<Triplet> ObservedMatrix::triplets() const {
  std::vector<Triplet> out(static_cast<std::size_t>(nnz()));
  for (Index k = 0; k < nnz(); ++k) {
    out[k] = {layout_->row_of[k], layout_->col_of[k], values_[k]};
  }
  return out;
}

Support ObservedMatrix::support() const {
  Support out(static_cast<std::size_t>(nnz()));
  for (Index k = 0; k < nnz(); ++k) {
    out[k] = {layout_->row_of[k], layout_->col_of[k]};
  }
  return out;
}

Matrix ObservedMatrix::to_dense() const {
  Matrix dense = Matrix::Zero(rows(), cols());
  for (Index k = 0; k < nnz(); ++k) {
    dense(layout_->row_of[k], layout_->col_of[k]) = values_[k];
  }
  return dense;
}

bool operator==(const ObservedMatrix& a, const ObservedMatrix& b) {
  return a.same_support(b) && a.values_ == b.values_;
}

void FactorPair::validate() const {
  const Index r = u.cols();
  if (v.rows() != r) {
    throw Error(ErrorCode::kDimensionMismatch,
                "U has " + std::to_string(r) + " columns but V has " +
                    std::to_string(v.rows()) + " rows");
  }
  if (r < 1 || r > std::min(u.rows(), v.cols())) {
    throw Error(ErrorCode::kBadRank, "rank " + std::to_string(r) +
                                         " outside [1, min(m, n)]");
  }
  if (!u.allFinite() || !v.allFinite()) {
    throw Error(ErrorCode::kNumericalFailure, "non-finite factor entry");
  }
}

namespace {

void check_dims(const ObservedMatrix& obs, const FactorPair& f) {
  if (f.u.rows() != obs.rows() || f.v.cols() != obs.cols() ||
      f.u.cols() != f.v.rows()) {
    std::ostringstream msg;
    msg << "factors " << f.u.rows() << "x" << f.u.cols() << " * "
        << f.v.rows() << "x" << f.v.cols() << " vs observed " << obs.rows()
        << "x" << obs.cols();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

}  // namespace

Vector predict_on_support(const ObservedMatrix& obs, const FactorPair& f) {
  check_dims(obs, f);
  const auto offsets = obs.row_offsets();
  const auto cols = obs.col_indices();
  Vector pred(obs.nnz());
  Eigen::RowVectorXd ui(f.rank());
  for (Index i = 0; i < obs.rows(); ++i) {
    if (offsets[i] == offsets[i + 1]) continue;
    ui = f.u.row(i);
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) {
      pred[k] = ui.dot(f.v.col(cols[k]));
    }
  }
  return pred;
}

Vector masked_residual(const ObservedMatrix& obs, const FactorPair& f) {
  return obs.values() - predict_on_support(obs, f);
}

double residual_fro_norm(const Vector& residual) { return residual.norm(); }

std::vector<Triplet> read_triplets(std::istream& in) {
  std::vector<Triplet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    long long i = 0, j = 0;
    double value = 0.0;
    std::string rest;
    if (!(fields >> i >> j >> value) || (fields >> rest)) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected i<TAB>j<TAB>value");
    }
    out.push_back({static_cast<Index>(i), static_cast<Index>(j), value});
  }
  return out;
}

std::vector<Triplet> read_triplets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, path.string());
  return read_triplets(in);
}

void write_triplets(std::ostream& out, std::span<const Triplet> triplets) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  for (const Triplet& t : triplets) {
    buf << t.row << '\t' << t.col << '\t' << t.value << '\n';
  }
  out << buf.str();
}

void write_triplets(const std::filesystem::path& path,
                    std::span<const Triplet> triplets) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kMissingFile, path.string());
  write_triplets(out, triplets);
}

}  // namespace rmc
