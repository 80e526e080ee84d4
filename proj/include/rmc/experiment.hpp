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

// Experiment drivers behind the command-line tool: synthetic sweeps, phase
// grids, MovieLens splits, image inpainting and timing runs. Every trial's
// randomness derives from (seed, trial, purpose), so results do not depend
// on the order or concurrency of execution.

#ifndef RMC_EXPERIMENT_HPP_
#define RMC_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rmc/solver.hpp"
#include "rmc/synth.hpp"

namespace rmc {

enum class ExperimentKind {
  kComplete,
  kNoiseSweep,
  kSizeSweep,
  kPhase,
  kMovieLens,
  kInpaint,
  kBench,
};

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kNoiseSweep;
  // Matrix sizes; m[i] pairs with n[i]. An empty n means square.
  std::vector<Index> m = {128};
  std::vector<Index> n;
  std::vector<Index> rank = {5};
  std::vector<double> p = {0.6};
  std::vector<NoiseSpec> noise = {NoiseSpec::none()};
  // Solver thread counts, crossed with the grid (BENCH).
  std::vector<int> workers = {1};
  int trials = 1;
  std::uint64_t seed = 1;
  std::vector<SolverConfig> solvers;
  double success_threshold = 1e-1;
  // Concurrent trials. Never changes a result.
  int jobs = 1;

  // COMPLETE: triplet file (zero-based) and optional dense truth (CSV).
  // MOVIELENS: dataset directory, or a rating file for the "raw" split.
  // INPAINT: the image.
  std::string input;
  std::string truth;
  // MOVIELENS.
  std::vector<std::string> splits = {"u1", "u2", "u3", "u4", "u5"};
  double flip_fraction = 0.0;
  // INPAINT: mask image (pixels above 0.5 observed); random mask at p[0] if
  // empty.
  std::string mask;
  Index approx_rank = 50;
  double peak = 1.0;

  // Output prefix: <out>.csv, <out>.json and any extra files.
  std::string out;

  void validate() const;
  std::vector<std::pair<Index, Index>> sizes() const;
};

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(std::string_view text);

struct ResultRow {
  std::string experiment;
  std::string variant;
  // Grid point.
  std::string label;  // noise label, split name or image path
  Index m = 0;
  Index n = 0;
  Index rank = 0;
  double p = 0.0;
  int workers = 1;
  int trials = 0;
  // Means over successful trials; NaN when not applicable.
  double nmse = 0.0;
  double nmse_median = 0.0;
  double psnr_db = 0.0;
  double rmse = 0.0;
  double success_rate = 0.0;
  double mean_time = 0.0;
  double mean_iterations = 0.0;
  double mean_switch = 0.0;  // NaN when no trial switched
  double final_sigma = 0.0;
  double final_objective = 0.0;
  int converged = 0;
  int errors = 0;
  std::string error;  // first error message, if any
};

// Column names in output order.
std::vector<std::string_view> result_columns();
// Columns holding wall times; excluded when comparing runs.
bool is_timing_column(std::string_view name);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// Runs the experiment. When spec.out is set, writes <out>.csv, <out>.json and
// the experiment's extra files (phase grids, recovered images, factors).
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

// The tool version recorded in manifests.
std::string_view tool_version();

}  // namespace rmc

#endif  // RMC_EXPERIMENT_HPP_
