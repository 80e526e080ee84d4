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

#include "rmc/data_io.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>

#include "rmc/error.hpp"
#include "rmc/random.hpp"

namespace rmc {

namespace {

std::string at_line(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

std::ifstream open_or_throw(const std::filesystem::path& path,
                            std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  return in;
}

ObservedMatrix ratings_to_matrix(const std::vector<Rating>& ratings, Index rows,
                                 Index cols) {
  std::vector<Triplet> t;
  t.reserve(ratings.size());
  for (const Rating& r : ratings) t.push_back({r.user, r.item, r.value});
  return ObservedMatrix::build(rows, cols, t);
}

bool is_split_name(std::string_view s) {
  static constexpr std::string_view kNames[] = {"u1", "u2", "u3", "u4",
                                                "u5", "ua", "ub"};
  return std::find(std::begin(kNames), std::end(kNames), s) !=
         std::end(kNames);
}

// Next whitespace separated PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw Error(ErrorCode::kParseError, "truncated PGM");
  return tok;
}

long pgm_number(std::istream& in, std::string_view what) {
  const std::string tok = pgm_token(in);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    throw Error(ErrorCode::kParseError,
                "bad PGM " + std::string(what) + " '" + tok + "'");
  }
  return v;
}

double parse_double(std::string_view s, std::size_t line_no) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError,
                at_line(line_no) + "bad number '" + std::string(s) + "'");
  }
  return v;
}

Matrix orthonormal_basis(const Matrix& z) {
  Eigen::HouseholderQR<Matrix> qr(z);
  return qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
}

}  // namespace

std::vector<Rating> read_ratings(std::istream& in) {
  std::vector<Rating> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    for (std::size_t pos; (pos = line.find("::")) != std::string::npos;) {
      line.replace(pos, 2, "\t");
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    long long user = 0, item = 0;
    std::string value_text;
    if (!(fields >> user >> item >> value_text)) {
      throw Error(ErrorCode::kParseError,
                  at_line(line_no) + "expected user item rating [timestamp]");
    }
    const double value = parse_double(value_text, line_no);
    if (user < 1 || item < 1) {
      throw Error(ErrorCode::kParseError, at_line(line_no) + "ids are one-based");
    }
    out.push_back({static_cast<Index>(user - 1), static_cast<Index>(item - 1),
                   value});
  }
  return out;
}

std::vector<Rating> read_ratings(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  try {
    return read_ratings(in);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

RatingSplit load_movielens(const std::filesystem::path& path,
                           std::string_view split) {
  std::vector<Rating> train;
  std::vector<Rating> test;
  const bool raw = split == "raw";
  if (raw) {
    train = read_ratings(path);
  } else if (is_split_name(split)) {
    train = read_ratings(path / (std::string(split) + ".base"));
    test = read_ratings(path / (std::string(split) + ".test"));
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown split '" + std::string(split) +
                    "', expected u1..u5, ua, ub or raw");
  }
  if (train.empty()) {
    throw Error(ErrorCode::kEmptySupport, "no ratings in training file");
  }
  Index rows = 0, cols = 0;
  for (const auto* set : {&train, &test}) {
    for (const Rating& r : *set) {
      rows = std::max(rows, r.user + 1);
      cols = std::max(cols, r.item + 1);
    }
  }
  RatingSplit out{ratings_to_matrix(train, rows, cols), std::nullopt};
  if (!raw) {
    if (test.empty()) {
      throw Error(ErrorCode::kEmptySupport, "no ratings in test file");
    }
    out.test = ratings_to_matrix(test, rows, cols);
    const Support a = out.train.support();
    const Support b = out.test->support();
    std::vector<Cell> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(common));
    if (!common.empty()) {
      throw Error(ErrorCode::kDuplicateEntry,
                  "train and test share " + std::to_string(common.size()) +
                      " entries");
    }
  }
  return out;
}

ObservedMatrix flip_ratings(const ObservedMatrix& obs, double fraction,
                            std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kBadFraction, "flip fraction outside [0, 1]");
  }
  Vector values = obs.values();
  const auto flip = [&](double from, double to, std::string_view tag) {
    std::vector<Index> ids;
    for (Index k = 0; k < obs.nnz(); ++k) {
      if (obs.values()[k] == from) ids.push_back(k);
    }
    const auto count = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(ids.size())));
    std::vector<Index> hit;
    Rng rng = make_rng(seed, 0, tag);
    std::sample(ids.begin(), ids.end(), std::back_inserter(hit), count, rng);
    for (Index k : hit) values[k] = to;
  };
  flip(1.0, 5.0, "flip_low");
  flip(5.0, 1.0, "flip_high");
  return obs.with_values(std::move(values));
}

Matrix read_pgm(std::istream& in) {
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") {
    throw Error(ErrorCode::kParseError, "not a P2/P5 PGM: '" + magic + "'");
  }
  const long width = pgm_number(in, "width");
  const long height = pgm_number(in, "height");
  const long maxval = pgm_number(in, "maxval");
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw Error(ErrorCode::kParseError, "bad PGM header");
  }
  Matrix image(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (long y = 0; y < height; ++y) {
    for (long x = 0; x < width; ++x) {
      long v = 0;
      if (magic == "P2") {
        v = pgm_number(in, "pixel");
      } else {
        const int hi = in.get();
        const int lo = maxval > 255 ? in.get() : 0;
        if (hi == EOF || lo == EOF) {
          throw Error(ErrorCode::kParseError, "truncated PGM raster");
        }
        v = maxval > 255 ? (hi << 8) | lo : hi;
      }
      if (v > maxval) {
        throw Error(ErrorCode::kParseError, "PGM pixel exceeds maxval");
      }
      image(y, x) = static_cast<double>(v) * scale;
    }
  }
  return image;
}

Matrix load_image(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path, std::ios::in | std::ios::binary);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  in.clear();
  in.seekg(0);
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) {
    return read_pgm(in);
  }
  return read_csv_matrix(in);
}

void write_pgm(const std::filesystem::path& path, const Matrix& image) {
  std::ofstream out(path, std::ios::out | std::ios::binary);
  if (!out) throw Error(ErrorCode::kMissingFile, "cannot write " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::string raster(static_cast<std::size_t>(image.size()), '\0');
  std::size_t k = 0;
  for (Index y = 0; y < image.rows(); ++y) {
    for (Index x = 0; x < image.cols(); ++x) {
      const double v = std::clamp(image(y, x), 0.0, 1.0);
      raster[k++] = static_cast<char>(std::lround(v * 255.0));
    }
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

Matrix read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kNonRectangular,
                  at_line(line_no) + std::to_string(row.size()) +
                      " fields, expected " +
                      std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kParseError, "empty matrix file");
  Matrix x(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rows[i][j];
  }
  return x;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  return read_csv_matrix(in);
}

void write_csv_matrix(std::ostream& out, const Matrix& x) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) buf << ',';
      buf << x(i, j);
    }
    buf << '\n';
  }
  out << buf.str();
}

void write_csv_matrix(const std::filesystem::path& path, const Matrix& x) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kMissingFile, "cannot write " + path.string());
  write_csv_matrix(out, x);
}

Matrix low_rank_approx(const Matrix& x, Index k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::kBadRank, "approximation rank must be >= 1");
  const Index full = std::min(x.rows(), x.cols());
  if (k >= full) return x;
  // A few extra columns speed up convergence of the k-th direction.
  const Index block = std::min(full, k + std::max<Index>(10, k / 4));
  Rng rng = make_rng(seed, 0, "subspace");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix start(x.cols(), block);
  for (Index i = 0; i < start.size(); ++i) start.data()[i] = normal(rng);
  Matrix q = orthonormal_basis(start);

  // Stops once the top-k right subspace stops moving; eigenvalues settle
  // much earlier than the vectors do.
  Matrix p;
  for (int it = 0; it < 2000; ++it) {
    q = orthonormal_basis(x.transpose() * (x * q));
    const Matrix b = x * q;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b.transpose() * b);
    // Eigenvalues ascend; the last k span the dominant subspace.
    const Matrix next = q * eig.eigenvectors().rightCols(k);
    const bool settled =
        p.size() > 0 && (p - next * (next.transpose() * p)).norm() <= 1e-14;
    p = next;
    if (settled) break;
  }
  return (x * p) * p.transpose();
}

}  // namespace rmc
