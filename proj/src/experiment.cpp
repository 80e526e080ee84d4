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

#include "rmc/experiment.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "rmc/data_io.hpp"
#include "rmc/error.hpp"
#include "rmc/metrics.hpp"
#include "rmc/parallel.hpp"
#include "rmc/random.hpp"

namespace rmc {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string normalize_name(std::string_view name) {
  std::string s;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return s;
}

// Locale-independent shortest-enough text for tags and labels.
std::string num(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(12) << v;
  return out.str();
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json config_to_json(const SolverConfig& c) {
  return json{{"variant", std::string(to_string(c.variant))},
              {"epsilon_switch", c.epsilon_switch},
              {"epsilon_stop", c.epsilon_stop},
              {"epsilon_inner", c.epsilon_inner},
              {"max_outer", c.max_outer},
              {"max_inner", c.max_inner},
              {"ridge", c.ridge},
              {"seed", c.seed},
              {"eta", c.kernel.eta},
              {"xi", optional_json(c.kernel.xi)},
              {"warm_sigma", c.kernel.warm_sigma},
              {"fixed_sigma", optional_json(c.fixed_sigma)},
              {"workers", c.workers}};
}

SolverConfig config_from_json(const json& j) {
  SolverConfig c =
      SolverConfig::defaults(parse_variant(j.at("variant").get<std::string>()));
  c.epsilon_switch = j.value("epsilon_switch", c.epsilon_switch);
  c.epsilon_stop = j.value("epsilon_stop", c.epsilon_stop);
  c.epsilon_inner = j.value("epsilon_inner", c.epsilon_inner);
  c.max_outer = j.value("max_outer", c.max_outer);
  c.max_inner = j.value("max_inner", c.max_inner);
  c.ridge = j.value("ridge", c.ridge);
  c.seed = j.value("seed", c.seed);
  c.kernel.eta = j.value("eta", c.kernel.eta);
  c.kernel.xi = optional_from(j, "xi");
  c.kernel.warm_sigma = j.value("warm_sigma", c.kernel.warm_sigma);
  c.fixed_sigma = optional_from(j, "fixed_sigma");
  c.workers = j.value("workers", c.workers);
  return c;
}

json noise_to_json(const NoiseSpec& s) {
  return json{{"kind", std::string(to_string(s.kind))},
              {"c", s.c},
              {"sigma_a", s.sigma_a},
              {"sigma_b", s.sigma_b},
              {"sp_density", s.sp_density},
              {"sp_low", optional_json(s.sp_low)},
              {"sp_high", optional_json(s.sp_high)}};
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "none") {
    s.kind = NoiseKind::kNone;
  } else if (kind == "gmm") {
    s.kind = NoiseKind::kGmm;
  } else if (kind == "salt_pepper") {
    s.kind = NoiseKind::kSaltPepper;
  } else {
    throw Error(ErrorCode::kParseError, "unknown noise kind '" + kind + "'");
  }
  s.c = j.value("c", 0.0);
  s.sigma_a = j.value("sigma_a", 0.0);
  s.sigma_b = j.value("sigma_b", 0.0);
  s.sp_density = j.value("sp_density", 0.0);
  s.sp_low = optional_from(j, "sp_low");
  s.sp_high = optional_from(j, "sp_high");
  return s;
}

// Per-trial outcome; aggregated into a ResultRow.
struct Outcome {
  bool ok = false;
  std::string error;
  double nmse = kNaN;
  double psnr = kNaN;
  double rmse = kNaN;
  double time = 0.0;
  int iterations = 0;
  std::optional<int> switch_iteration;
  double sigma = kNaN;
  double objective = kNaN;
  bool converged = false;
};

void record_solve(const SolveResult& res, Outcome& o) {
  o.ok = true;
  o.time = res.elapsed;
  o.iterations = static_cast<int>(res.trace.size());
  o.switch_iteration = res.switch_iteration;
  if (!res.trace.empty()) {
    o.sigma = res.trace.back().sigma;
    o.objective = res.trace.back().objective;
  }
  o.converged = res.status == SolveStatus::kConverged;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void aggregate(const std::vector<Outcome>& trials, double threshold,
               ResultRow& row) {
  std::vector<double> nmse, psnr, rmse, time, iters, sw, sigma, obj;
  int successes = 0;
  row.trials = static_cast<int>(trials.size());
  for (const Outcome& o : trials) {
    if (!o.ok) {
      ++row.errors;
      if (row.error.empty()) row.error = o.error;
      continue;
    }
    const auto keep = [](std::vector<double>& v, double x) {
      if (!std::isnan(x)) v.push_back(x);
    };
    keep(nmse, o.nmse);
    keep(psnr, o.psnr);
    keep(rmse, o.rmse);
    time.push_back(o.time);
    iters.push_back(o.iterations);
    if (o.switch_iteration) sw.push_back(*o.switch_iteration);
    keep(sigma, o.sigma);
    keep(obj, o.objective);
    if (!std::isnan(o.nmse) && phase_success(o.nmse, threshold)) ++successes;
    if (o.converged) ++row.converged;
  }
  row.nmse = mean_of(nmse);
  row.nmse_median = median_of(nmse);
  row.psnr_db = mean_of(psnr);
  row.rmse = mean_of(rmse);
  row.success_rate = nmse.empty() ? kNaN
                                  : static_cast<double>(successes) /
                                        static_cast<double>(trials.size());
  row.mean_time = mean_of(time);
  row.mean_iterations = mean_of(iters);
  row.mean_switch = mean_of(sw);
  row.final_sigma = mean_of(sigma);
  row.final_objective = mean_of(obj);
}

// Runs body(k) for k in [0, count) on `jobs` threads pulling from a shared
// counter. Body must not throw.
void run_tasks(std::size_t count, int jobs,
               const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  parallel_for(threads, threads, [&](std::ptrdiff_t) {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) body(k);
  });
}

template <typename F>
void guarded(Outcome& o, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    o.ok = false;
    o.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    o.ok = false;
    o.error = e.what();
  }
}

SolverConfig trial_config(const SolverConfig& base, std::uint64_t seed,
                          int trial) {
  SolverConfig c = base;
  c.seed = derive_seed(seed, static_cast<std::uint64_t>(trial), "init");
  return c;
}

std::filesystem::path with_suffix(const std::string& prefix,
                                  const std::string& suffix) {
  return std::filesystem::path(prefix + suffix);
}

// Files written besides the CSV and manifest.
struct Artifacts {
  std::vector<std::string> files;
  void add(const std::filesystem::path& p) { files.push_back(p.string()); }
};

// ---- synthetic sweeps (NOISE_SWEEP, SIZE_SWEEP, PHASE, BENCH) ----

struct SynthPoint {
  Index m, n, r;
  double p;
  std::size_t noise;
  int workers;
};

Outcome synth_trial(const ExperimentSpec& spec, const SynthPoint& g,
                    const SolverConfig& base, int t) {
  Outcome o;
  guarded(o, [&] {
    const auto trial = static_cast<std::uint64_t>(t);
    const Matrix truth = gen_low_rank(
        g.m, g.n, g.r,
        derive_seed(spec.seed, trial,
                    "truth/" + std::to_string(g.m) + "x" + std::to_string(g.n) +
                        "/" + std::to_string(g.r)));
    const Support mask = sample_covering_mask(
        g.m, g.n, g.p,
        derive_seed(spec.seed, trial,
                    "mask/" + std::to_string(g.m) + "x" + std::to_string(g.n) +
                        "/" + num(g.p)));
    const ObservedMatrix obs =
        corrupt(ObservedMatrix::observe(truth, mask), spec.noise[g.noise],
                derive_seed(spec.seed, trial, "noise"));
    SolverConfig cfg = trial_config(base, spec.seed, t);
    cfg.workers = g.workers;
    const SolveResult res = solve(obs, g.r, cfg);
    record_solve(res, o);
    const Matrix est = res.factors.product();
    o.nmse = nmse(est, truth);
    o.psnr = psnr(est, truth, spec.peak);
  });
  return o;
}

void write_phase_grids(const ExperimentSpec& spec,
                       const std::vector<SynthPoint>& points,
                       const std::vector<ResultRow>& rows, Artifacts& art) {
  const auto sizes = spec.sizes();
  const bool single = sizes.size() == 1 && spec.noise.size() == 1 &&
                      spec.workers.size() == 1;
  const std::size_t nv = spec.solvers.size();
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      for (std::size_t k = 0; k < spec.noise.size(); ++k) {
        std::map<std::pair<Index, double>, double> cell;
        for (std::size_t g = 0; g < points.size(); ++g) {
          const SynthPoint& pt = points[g];
          if (pt.m != sizes[s].first || pt.n != sizes[s].second ||
              pt.noise != k || pt.workers != spec.workers.front()) {
            continue;
          }
          cell[{pt.r, pt.p}] = rows[g * nv + v].success_rate;
        }
        std::string name = spec.out + ".phase." +
                           std::string(to_string(spec.solvers[v].variant));
        if (!single) {
          name += "." + std::to_string(sizes[s].first) + "x" +
                  std::to_string(sizes[s].second) + ".noise" +
                  std::to_string(k);
        }
        name += ".csv";
        std::ofstream out(name);
        if (!out) throw Error(ErrorCode::kMissingFile, "cannot write " + name);
        out << "r\\p";
        for (double p : spec.p) out << ',' << num(p);
        out << '\n';
        for (Index r : spec.rank) {
          out << r;
          for (double p : spec.p) out << ',' << num(cell.at({r, p}));
          out << '\n';
        }
        art.add(name);
      }
    }
  }
}

std::vector<ResultRow> run_synthetic(const ExperimentSpec& spec,
                                     Artifacts& art) {
  std::vector<SynthPoint> points;
  for (const auto& [m, n] : spec.sizes()) {
    for (Index r : spec.rank) {
      for (double p : spec.p) {
        for (std::size_t k = 0; k < spec.noise.size(); ++k) {
          for (int w : spec.workers) points.push_back({m, n, r, p, k, w});
        }
      }
    }
  }
  const std::size_t nv = spec.solvers.size();
  const auto nt = static_cast<std::size_t>(spec.trials);
  std::vector<Outcome> outcomes(points.size() * nv * nt);
  run_tasks(outcomes.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t t = k % nt;
    const std::size_t v = (k / nt) % nv;
    const std::size_t g = k / (nt * nv);
    outcomes[k] = synth_trial(spec, points[g], spec.solvers[v],
                              static_cast<int>(t));
  });

  std::vector<ResultRow> rows;
  for (std::size_t g = 0; g < points.size(); ++g) {
    for (std::size_t v = 0; v < nv; ++v) {
      const SynthPoint& pt = points[g];
      ResultRow row;
      row.experiment = std::string(to_string(spec.kind));
      row.variant = std::string(to_string(spec.solvers[v].variant));
      row.label = spec.noise[pt.noise].label();
      row.m = pt.m;
      row.n = pt.n;
      row.rank = pt.r;
      row.p = pt.p;
      row.workers = pt.workers;
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((g * nv + v) * nt);
      aggregate(std::vector<Outcome>(first, first + static_cast<std::ptrdiff_t>(nt)),
                spec.success_threshold, row);
      rows.push_back(std::move(row));
    }
  }
  if (spec.kind == ExperimentKind::kPhase && !spec.out.empty()) {
    write_phase_grids(spec, points, rows, art);
  }
  return rows;
}

// ---- COMPLETE ----

std::vector<ResultRow> run_complete(const ExperimentSpec& spec,
                                    Artifacts& art) {
  const std::vector<Triplet> triplets = read_triplets(std::filesystem::path(spec.input));
  std::optional<Matrix> truth;
  if (!spec.truth.empty()) truth = read_csv_matrix(std::filesystem::path(spec.truth));
  Index rows_n = 0, cols_n = 0;
  for (const Triplet& t : triplets) {
    rows_n = std::max(rows_n, t.row + 1);
    cols_n = std::max(cols_n, t.col + 1);
  }
  if (truth) {
    if (truth->rows() < rows_n || truth->cols() < cols_n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "truth is smaller than the observed index range");
    }
    rows_n = truth->rows();
    cols_n = truth->cols();
  }
  const ObservedMatrix obs = ObservedMatrix::build(rows_n, cols_n, triplets);

  const std::size_t nv = spec.solvers.size();
  const auto nt = static_cast<std::size_t>(spec.trials);
  const std::size_t nr = spec.rank.size();
  std::vector<Outcome> outcomes(nr * nv * nt);
  std::vector<std::optional<FactorPair>> first_factors(nr * nv);
  run_tasks(outcomes.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t t = k % nt;
    const std::size_t v = (k / nt) % nv;
    const std::size_t g = k / (nt * nv);
    Outcome& o = outcomes[k];
    guarded(o, [&] {
      const SolveResult res =
          solve(obs, spec.rank[g],
                trial_config(spec.solvers[v], spec.seed, static_cast<int>(t)));
      record_solve(res, o);
      o.rmse = rmse_test(res.factors, obs);
      if (truth) {
        const Matrix est = res.factors.product();
        o.nmse = nmse(est, *truth);
        o.psnr = psnr(est, *truth, spec.peak);
      }
      if (t == 0) first_factors[g * nv + v] = res.factors;
    });
  });

  std::vector<ResultRow> rows;
  for (std::size_t g = 0; g < nr; ++g) {
    for (std::size_t v = 0; v < nv; ++v) {
      ResultRow row;
      row.experiment = std::string(to_string(spec.kind));
      row.variant = std::string(to_string(spec.solvers[v].variant));
      row.label = spec.input;
      row.m = rows_n;
      row.n = cols_n;
      row.rank = spec.rank[g];
      row.p = obs.fraction();
      row.workers = spec.solvers[v].workers;
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((g * nv + v) * nt);
      aggregate(std::vector<Outcome>(first, first + static_cast<std::ptrdiff_t>(nt)),
                spec.success_threshold, row);
      const std::string stem = spec.out + "." + row.variant + ".r" +
                               std::to_string(spec.rank[g]);
      rows.push_back(std::move(row));
      const auto& f = first_factors[g * nv + v];
      if (!spec.out.empty() && f) {
        write_csv_matrix(with_suffix(stem, ".U.csv"), f->u);
        write_csv_matrix(with_suffix(stem, ".V.csv"), f->v);
        write_csv_matrix(with_suffix(stem, ".completed.csv"), f->product());
        art.add(stem + ".U.csv");
        art.add(stem + ".V.csv");
        art.add(stem + ".completed.csv");
      }
    }
  }
  return rows;
}

// ---- MOVIELENS ----

// Training matrix restricted to its nonempty rows and columns, with the maps
// back to the full index space (-1 for dropped indices).
struct Compacted {
  ObservedMatrix train;
  std::vector<Index> row_map;
  std::vector<Index> col_map;
};

Compacted compact(const ObservedMatrix& full) {
  std::vector<Index> row_map(static_cast<std::size_t>(full.rows()), -1);
  std::vector<Index> col_map(static_cast<std::size_t>(full.cols()), -1);
  Index nr = 0, nc = 0;
  for (Index i = 0; i < full.rows(); ++i) {
    if (full.row_count(i) > 0) row_map[i] = nr++;
  }
  for (Index j = 0; j < full.cols(); ++j) {
    if (full.col_count(j) > 0) col_map[j] = nc++;
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(full.nnz()));
  const auto ri = full.row_indices();
  const auto ci = full.col_indices();
  for (Index k = 0; k < full.nnz(); ++k) {
    t.push_back({row_map[ri[k]], col_map[ci[k]], full.values()[k]});
  }
  return {ObservedMatrix::build(nr, nc, t), std::move(row_map),
          std::move(col_map)};
}

// Test RMSE; entries whose user or item never appears in training are
// predicted by the training mean.
double movielens_rmse(const Compacted& c, const FactorPair& f,
                      const ObservedMatrix& test) {
  const double fallback = c.train.values().mean();
  const auto ri = test.row_indices();
  const auto ci = test.col_indices();
  double total = 0.0;
  for (Index k = 0; k < test.nnz(); ++k) {
    const Index i = c.row_map[ri[k]];
    const Index j = c.col_map[ci[k]];
    const double pred = i >= 0 && j >= 0 ? f.u.row(i).dot(f.v.col(j)) : fallback;
    const double e = pred - test.values()[k];
    total += e * e;
  }
  return std::sqrt(total / static_cast<double>(test.nnz()));
}

std::vector<ResultRow> run_movielens(const ExperimentSpec& spec) {
  const std::size_t ns = spec.splits.size();
  std::vector<RatingSplit> data;
  data.reserve(ns);
  for (const std::string& s : spec.splits) {
    data.push_back(load_movielens(spec.input, s));
  }
  const std::size_t nv = spec.solvers.size();
  const auto nt = static_cast<std::size_t>(spec.trials);
  const std::size_t nr = spec.rank.size();
  std::vector<Outcome> outcomes(ns * nr * nv * nt);
  run_tasks(outcomes.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t t = k % nt;
    const std::size_t v = (k / nt) % nv;
    const std::size_t g = k / (nt * nv);
    const std::size_t s = g / nr;
    const Index r = spec.rank[g % nr];
    Outcome& o = outcomes[k];
    guarded(o, [&] {
      ObservedMatrix train = data[s].train;
      if (spec.flip_fraction > 0.0) {
        train = flip_ratings(train, spec.flip_fraction,
                             derive_seed(spec.seed, t, "flip/" + spec.splits[s]));
      }
      const Compacted c = compact(train);
      const SolveResult res = solve(
          c.train, r, trial_config(spec.solvers[v], spec.seed, static_cast<int>(t)));
      record_solve(res, o);
      o.rmse = data[s].test ? movielens_rmse(c, res.factors, *data[s].test)
                            : rmse_test(res.factors, c.train);
    });
  });

  std::vector<ResultRow> rows;
  for (std::size_t g = 0; g < ns * nr; ++g) {
    for (std::size_t v = 0; v < nv; ++v) {
      const std::size_t s = g / nr;
      ResultRow row;
      row.experiment = std::string(to_string(spec.kind));
      row.variant = std::string(to_string(spec.solvers[v].variant));
      row.label = spec.splits[s];
      row.m = data[s].train.rows();
      row.n = data[s].train.cols();
      row.rank = spec.rank[g % nr];
      row.p = data[s].train.fraction();
      row.workers = spec.solvers[v].workers;
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((g * nv + v) * nt);
      aggregate(std::vector<Outcome>(first, first + static_cast<std::ptrdiff_t>(nt)),
                spec.success_threshold, row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---- INPAINT ----

std::vector<ResultRow> run_inpaint(const ExperimentSpec& spec, Artifacts& art) {
  const Matrix image = load_image(spec.input);
  const Matrix truth = low_rank_approx(image, spec.approx_rank, spec.seed);
  std::optional<Support> fixed_mask;
  if (!spec.mask.empty()) {
    const Matrix m = load_image(spec.mask);
    if (m.rows() != truth.rows() || m.cols() != truth.cols()) {
      throw Error(ErrorCode::kDimensionMismatch, "mask and image differ in size");
    }
    Support s;
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) > 0.5) s.push_back({i, j});
      }
    }
    fixed_mask = std::move(s);
  }
  const auto observe_trial = [&](std::uint64_t t) {
    const Support mask =
        fixed_mask ? *fixed_mask
                   : sample_mask(truth.rows(), truth.cols(), spec.p.front(),
                                 derive_seed(spec.seed, t, "mask"));
    ObservedMatrix obs = ObservedMatrix::observe(truth, mask);
    // The noise list is applied in order, e.g. Gaussian then salt-and-pepper.
    for (std::size_t k = 0; k < spec.noise.size(); ++k) {
      obs = corrupt(obs, spec.noise[k],
                    derive_seed(spec.seed, t, "noise/" + std::to_string(k)));
    }
    return obs;
  };
  std::string label;
  for (const NoiseSpec& s : spec.noise) {
    label += (label.empty() ? "" : "+") + s.label();
  }

  const std::size_t nv = spec.solvers.size();
  const auto nt = static_cast<std::size_t>(spec.trials);
  const std::size_t nr = spec.rank.size();
  std::vector<Outcome> outcomes(nr * nv * nt);
  std::vector<std::optional<Matrix>> first_estimate(nr * nv);
  double fraction = kNaN;
  run_tasks(outcomes.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t t = k % nt;
    const std::size_t v = (k / nt) % nv;
    const std::size_t g = k / (nt * nv);
    Outcome& o = outcomes[k];
    guarded(o, [&] {
      const ObservedMatrix obs = observe_trial(t);
      const SolveResult res = solve(
          obs, spec.rank[g], trial_config(spec.solvers[v], spec.seed, static_cast<int>(t)));
      record_solve(res, o);
      const Matrix est = res.factors.product();
      o.nmse = nmse(est, truth);
      o.psnr = psnr(est, truth, spec.peak);
      if (t == 0) first_estimate[g * nv + v] = est;
    });
  });
  {
    Outcome probe;
    guarded(probe, [&] { fraction = observe_trial(0).fraction(); });
  }

  std::vector<ResultRow> rows;
  for (std::size_t g = 0; g < nr; ++g) {
    for (std::size_t v = 0; v < nv; ++v) {
      ResultRow row;
      row.experiment = std::string(to_string(spec.kind));
      row.variant = std::string(to_string(spec.solvers[v].variant));
      row.label = label;
      row.m = truth.rows();
      row.n = truth.cols();
      row.rank = spec.rank[g];
      row.p = fraction;
      row.workers = spec.solvers[v].workers;
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((g * nv + v) * nt);
      aggregate(std::vector<Outcome>(first, first + static_cast<std::ptrdiff_t>(nt)),
                spec.success_threshold, row);
      rows.push_back(std::move(row));
    }
  }
  if (!spec.out.empty()) {
    write_pgm(with_suffix(spec.out, ".truth.pgm"), truth);
    art.add(spec.out + ".truth.pgm");
    Outcome probe;
    guarded(probe, [&] {
      const ObservedMatrix obs = observe_trial(0);
      Matrix shown = Matrix::Zero(truth.rows(), truth.cols());
      const auto ri = obs.row_indices();
      const auto ci = obs.col_indices();
      for (Index k = 0; k < obs.nnz(); ++k) shown(ri[k], ci[k]) = obs.values()[k];
      write_pgm(with_suffix(spec.out, ".observed.pgm"), shown);
      art.add(spec.out + ".observed.pgm");
    });
    for (std::size_t g = 0; g < nr; ++g) {
      for (std::size_t v = 0; v < nv; ++v) {
        if (!first_estimate[g * nv + v]) continue;
        const std::string name =
            spec.out + "." + std::string(to_string(spec.solvers[v].variant)) +
            ".r" + std::to_string(spec.rank[g]) + ".pgm";
        write_pgm(name, *first_estimate[g * nv + v]);
        art.add(name);
      }
    }
  }
  return rows;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kComplete: return "complete";
    case ExperimentKind::kNoiseSweep: return "noise-sweep";
    case ExperimentKind::kSizeSweep: return "size-sweep";
    case ExperimentKind::kPhase: return "phase";
    case ExperimentKind::kMovieLens: return "movielens";
    case ExperimentKind::kInpaint: return "inpaint";
    case ExperimentKind::kBench: return "bench";
  }
  return "?";
}

ExperimentKind parse_experiment(std::string_view name) {
  const std::string s = normalize_name(name);
  for (ExperimentKind k :
       {ExperimentKind::kComplete, ExperimentKind::kNoiseSweep,
        ExperimentKind::kSizeSweep, ExperimentKind::kPhase,
        ExperimentKind::kMovieLens, ExperimentKind::kInpaint,
        ExperimentKind::kBench}) {
    if (normalize_name(to_string(k)) == s) return k;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown experiment '" + std::string(name) + "'");
}

std::vector<std::pair<Index, Index>> ExperimentSpec::sizes() const {
  if (!n.empty() && n.size() != m.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "m and n lists must have the same length");
  }
  std::vector<std::pair<Index, Index>> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.emplace_back(m[i], n.empty() ? m[i] : n[i]);
  }
  return out;
}

void ExperimentSpec::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(trials >= 1, "trials must be >= 1");
  require(jobs >= 1, "jobs must be >= 1");
  require(!solvers.empty(), "no solvers configured");
  require(!rank.empty(), "rank grid is empty");
  for (const SolverConfig& c : solvers) c.validate();
  for (const NoiseSpec& s : noise) s.validate();
  switch (kind) {
    case ExperimentKind::kComplete:
      require(!input.empty(), "complete needs an input triplet file");
      break;
    case ExperimentKind::kMovieLens:
      require(!input.empty(), "movielens needs a dataset path");
      require(!splits.empty(), "split list is empty");
      require(flip_fraction >= 0.0 && flip_fraction <= 1.0,
              "flip fraction outside [0, 1]");
      break;
    case ExperimentKind::kInpaint:
      require(!input.empty(), "inpaint needs an image");
      require(approx_rank >= 1, "approximation rank must be >= 1");
      require(!mask.empty() || !p.empty(), "inpaint needs a mask or p");
      break;
    default:
      require(!m.empty(), "size grid is empty");
      require(!p.empty(), "p grid is empty");
      require(!noise.empty(), "noise grid is empty");
      require(!workers.empty(), "workers grid is empty");
      for (int w : workers) require(w >= 1, "workers must be >= 1");
      sizes();
      break;
  }
  for (double v : p) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kBadFraction, "p outside (0, 1]");
    }
  }
}

std::string spec_to_json(const ExperimentSpec& spec) {
  json solvers = json::array();
  for (const SolverConfig& c : spec.solvers) solvers.push_back(config_to_json(c));
  json noise = json::array();
  for (const NoiseSpec& s : spec.noise) noise.push_back(noise_to_json(s));
  const json j{{"experiment", std::string(to_string(spec.kind))},
               {"m", spec.m},
               {"n", spec.n},
               {"rank", spec.rank},
               {"p", spec.p},
               {"noise", noise},
               {"workers", spec.workers},
               {"trials", spec.trials},
               {"seed", spec.seed},
               {"solvers", solvers},
               {"success_threshold", spec.success_threshold},
               {"jobs", spec.jobs},
               {"input", spec.input},
               {"truth", spec.truth},
               {"splits", spec.splits},
               {"flip_fraction", spec.flip_fraction},
               {"mask", spec.mask},
               {"approx_rank", spec.approx_rank},
               {"peak", spec.peak},
               {"out", spec.out}};
  return j.dump(2);
}

ExperimentSpec spec_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  // A full run manifest nests the spec.
  if (j.contains("spec")) j = j.at("spec");
  try {
    ExperimentSpec s;
    s.kind = parse_experiment(j.at("experiment").get<std::string>());
    s.m = j.value("m", s.m);
    s.n = j.value("n", s.n);
    s.rank = j.value("rank", s.rank);
    s.p = j.value("p", s.p);
    if (j.contains("noise")) {
      s.noise.clear();
      for (const json& n : j.at("noise")) s.noise.push_back(noise_from_json(n));
    }
    s.workers = j.value("workers", s.workers);
    s.trials = j.value("trials", s.trials);
    s.seed = j.value("seed", s.seed);
    for (const json& c : j.at("solvers")) s.solvers.push_back(config_from_json(c));
    s.success_threshold = j.value("success_threshold", s.success_threshold);
    s.jobs = j.value("jobs", s.jobs);
    s.input = j.value("input", s.input);
    s.truth = j.value("truth", s.truth);
    s.splits = j.value("splits", s.splits);
    s.flip_fraction = j.value("flip_fraction", s.flip_fraction);
    s.mask = j.value("mask", s.mask);
    s.approx_rank = j.value("approx_rank", s.approx_rank);
    s.peak = j.value("peak", s.peak);
    s.out = j.value("out", s.out);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
}

std::vector<std::string_view> result_columns() {
  return {"experiment", "variant",   "label",        "m",
          "n",          "rank",      "p",            "workers",
          "trials",     "nmse",      "nmse_median",  "psnr_db",
          "rmse",       "success_rate", "mean_time", "mean_iterations",
          "mean_switch", "final_sigma", "final_objective", "converged",
          "errors",     "error"};
}

bool is_timing_column(std::string_view name) { return name == "mean_time"; }

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(12);
  const auto text = [&](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
      buf << s;
      return;
    }
    buf << '"';
    for (char c : s) {
      if (c == '"') buf << '"';
      buf << (c == '\n' ? ' ' : c);
    }
    buf << '"';
  };
  const auto value = [&](double v) {
    if (std::isnan(v)) {
      buf << "nan";
    } else if (std::isinf(v)) {
      buf << (v > 0 ? "inf" : "-inf");
    } else {
      buf << v;
    }
  };
  const auto cols = result_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    buf << (c ? "," : "") << cols[c];
  }
  buf << '\n';
  for (const ResultRow& r : rows) {
    text(r.experiment);
    buf << ',';
    text(r.variant);
    buf << ',';
    text(r.label);
    buf << ',' << r.m << ',' << r.n << ',' << r.rank << ',';
    value(r.p);
    buf << ',' << r.workers << ',' << r.trials;
    for (double v : {r.nmse, r.nmse_median, r.psnr_db, r.rmse, r.success_rate,
                     r.mean_time, r.mean_iterations, r.mean_switch,
                     r.final_sigma, r.final_objective}) {
      buf << ',';
      value(v);
    }
    buf << ',' << r.converged << ',' << r.errors << ',';
    text(r.error);
    buf << '\n';
  }
  out << buf.str();
}

std::string_view tool_version() { return "1.0.0"; }

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (!spec.out.empty()) {
    const auto parent = std::filesystem::path(spec.out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
  }
  Artifacts art;
  std::vector<ResultRow> rows;
  switch (spec.kind) {
    case ExperimentKind::kComplete: rows = run_complete(spec, art); break;
    case ExperimentKind::kMovieLens: rows = run_movielens(spec); break;
    case ExperimentKind::kInpaint: rows = run_inpaint(spec, art); break;
    default: rows = run_synthetic(spec, art); break;
  }
  if (spec.out.empty()) return rows;

  const std::string csv = spec.out + ".csv";
  {
    std::ofstream out(csv);
    if (!out) throw Error(ErrorCode::kMissingFile, "cannot write " + csv);
    write_results_csv(out, rows);
  }
  const json manifest{
      {"tool", "rmc"},
      {"version", std::string(tool_version())},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
      {"spec", json::parse(spec_to_json(spec))},
      {"results", csv},
      {"artifacts", art.files}};
  const std::string path = spec.out + ".json";
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kMissingFile, "cannot write " + path);
  out << manifest.dump(2) << '\n';
  return rows;
}

}  // namespace rmc
