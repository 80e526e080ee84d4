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
#include <filesystem>
#include <fstream>
#include <functional>
#include <locale>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmc/data_io.hpp"
#include "rmc/error.hpp"
#include "rmc/experiment.hpp"
#include "rmc/metrics.hpp"
#include "rmc/synth.hpp"

namespace rmc {
namespace {

namespace fs = std::filesystem;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rmc_experiment_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Splits one CSV line, honouring double quotes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  return out;
}

// CSV text with every timing column blanked.
std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  std::string out = line + "\n";
  while (std::getline(in, line)) {
    auto fields = split_csv(line);
    for (std::size_t k = 0; k < fields.size() && k < header.size(); ++k) {
      if (is_timing_column(header[k])) fields[k] = "-";
    }
    for (const auto& f : fields) out += f + "|";
    out += "\n";
  }
  return out;
}

ExperimentSpec small_sweep() {
  ExperimentSpec s;
  s.kind = ExperimentKind::kNoiseSweep;
  s.m = {30};
  s.rank = {2};
  s.p = {0.5};
  s.noise = {NoiseSpec::gmm(0.1, 0.01, 1.0), NoiseSpec::salt_pepper(0.05)};
  s.trials = 4;
  s.seed = 17;
  SolverConfig pf = SolverConfig::defaults(Variant::kHQPF);
  pf.max_outer = 40;
  SolverConfig asd = SolverConfig::defaults(Variant::kHQASD);
  asd.max_outer = 60;
  s.solvers = {pf, asd};
  return s;
}

TEST(ExperimentKind, NamesRoundTrip) {
  for (ExperimentKind k :
       {ExperimentKind::kComplete, ExperimentKind::kNoiseSweep,
        ExperimentKind::kSizeSweep, ExperimentKind::kPhase,
        ExperimentKind::kMovieLens, ExperimentKind::kInpaint,
        ExperimentKind::kBench}) {
    EXPECT_EQ(parse_experiment(to_string(k)), k);
  }
  EXPECT_EQ(parse_experiment("noise-sweep"), ExperimentKind::kNoiseSweep);
  EXPECT_EQ(parse_experiment("PHASE"), ExperimentKind::kPhase);
  EXPECT_EQ(code_of([] { parse_experiment("sweep"); }), ErrorCode::kInvalidArgument);
}

TEST(ExperimentSpec, JsonRoundTripKeepsEveryField) {
  ExperimentSpec s = small_sweep();
  s.n = {40};
  s.workers = {1, 2};
  s.solvers[0].fixed_sigma = 0.25;
  s.solvers[0].kernel.xi = 1e-5;
  s.solvers[1].kernel.eta = 1.5;
  s.noise.push_back(NoiseSpec::salt_pepper(0.1, 0.0, 1.0));
  s.success_threshold = 0.05;
  s.out = "results/x";
  const std::string text = spec_to_json(s);
  const ExperimentSpec back = spec_from_json(text);
  EXPECT_EQ(spec_to_json(back), text);
  EXPECT_EQ(back.n, s.n);
  EXPECT_EQ(back.solvers[0].fixed_sigma, 0.25);
  EXPECT_EQ(back.solvers[0].kernel.xi, 1e-5);
  EXPECT_FALSE(back.solvers[1].kernel.xi.has_value());
  EXPECT_EQ(back.noise[2].sp_high, 1.0);
  EXPECT_FALSE(back.noise[1].sp_high.has_value());
  // Defaults are written out, not left implicit.
  const auto j = nlohmann::json::parse(text);
  EXPECT_TRUE(j["solvers"][1].contains("epsilon_inner"));
  EXPECT_TRUE(j["solvers"][1].contains("max_inner"));
  EXPECT_TRUE(j["solvers"][1].contains("warm_sigma"));
}

TEST(ExperimentSpec, ValidateRejects) {
  ExperimentSpec s = small_sweep();
  s.trials = 0;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kInvalidArgument);
  s = small_sweep();
  s.m.clear();
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kInvalidArgument);
  s = small_sweep();
  s.solvers.clear();
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kInvalidArgument);
  s = small_sweep();
  s.p = {0.0};
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kBadFraction);
  s = small_sweep();
  s.kind = ExperimentKind::kComplete;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kInvalidArgument);
}

TEST(ResultsCsv, SchemaQuotingAndLocale) {
  std::locale old = std::locale::global(std::locale::classic());
  try {
    std::locale::global(std::locale("de_DE.UTF-8"));
  } catch (const std::runtime_error&) {
    // Locale not installed; the classic one still exercises the format.
  }
  ResultRow row;
  row.experiment = "NOISE_SWEEP";
  row.variant = "HQASD";
  row.label = "gmm(c=0.1,sa=0.01,sb=1)";
  row.p = 0.5;
  row.nmse = 1.25e-3;
  row.mean_switch = std::nan("");
  row.psnr_db = INFINITY;
  std::ostringstream out;
  write_results_csv(out, {row});
  std::locale::global(old);

  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  const auto cols = split_csv(header);
  ASSERT_EQ(cols.size(), result_columns().size());
  for (std::size_t k = 0; k < cols.size(); ++k) EXPECT_EQ(cols[k], result_columns()[k]);
  const auto fields = split_csv(line);
  ASSERT_EQ(fields.size(), cols.size());
  const auto at = [&](std::string_view name) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == name) return fields[k];
    }
    return std::string("?");
  };
  EXPECT_EQ(at("label"), row.label);
  EXPECT_EQ(at("p"), "0.5");
  EXPECT_EQ(at("nmse"), "0.00125");
  EXPECT_EQ(at("mean_switch"), "nan");
  EXPECT_EQ(at("psnr_db"), "inf");
  EXPECT_NE(line.find("\"gmm(c=0.1,sa=0.01,sb=1)\""), std::string::npos);
  EXPECT_TRUE(is_timing_column("mean_time"));
  EXPECT_FALSE(is_timing_column("nmse"));
}

TEST(RunExperiment, JobsNeverChangeResults) {
  ExperimentSpec s = small_sweep();
  s.jobs = 1;
  const auto serial = run_experiment(s);
  s.jobs = 3;
  const auto parallel = run_experiment(s);
  ASSERT_EQ(serial.size(), 4u);
  ASSERT_EQ(parallel.size(), serial.size());
  std::ostringstream a, b;
  write_results_csv(a, serial);
  write_results_csv(b, parallel);
  EXPECT_EQ(without_timing(a.str()), without_timing(b.str()));
  for (const ResultRow& r : serial) {
    EXPECT_EQ(r.trials, 4);
    EXPECT_EQ(r.errors, 0) << r.error;
    EXPECT_GE(r.success_rate, 0.0);
    EXPECT_LE(r.success_rate, 1.0);
  }
}

TEST(RunExperiment, ManifestReplaysToTheSameCsv) {
  ExperimentSpec s = small_sweep();
  s.trials = 2;
  s.out = scratch("replay_a").string();
  run_experiment(s);
  const auto manifest = nlohmann::json::parse(slurp(s.out + ".json"));
  EXPECT_EQ(manifest["tool"], "rmc");
  EXPECT_EQ(manifest["version"], std::string(tool_version()));
  EXPECT_TRUE(manifest.contains("eigen"));
  ExperimentSpec again = spec_from_json(manifest.dump());
  again.out = scratch("replay_b").string();
  run_experiment(again);
  EXPECT_EQ(without_timing(slurp(s.out + ".csv")),
            without_timing(slurp(again.out + ".csv")));
}

TEST(RunExperiment, TrialErrorsAreRecordedInTheRow) {
  ExperimentSpec s;
  s.kind = ExperimentKind::kSizeSweep;
  s.m = {3, 20};
  s.rank = {2};
  // A 3 x 3 mask of two cells never covers every row.
  s.p = {0.2};
  s.trials = 2;
  SolverConfig cfg = SolverConfig::defaults(Variant::kHQASD);
  cfg.max_outer = 5;
  s.solvers = {cfg};
  const auto rows = run_experiment(s);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].m, 3);
  EXPECT_EQ(rows[0].errors, 2);
  EXPECT_NE(rows[0].error.find("BadFraction"), std::string::npos);
  EXPECT_EQ(rows[1].m, 20);
}

TEST(RunExperiment, PhaseGridSucceedsInsideTheRecoverableRegion) {
  ExperimentSpec s;
  s.kind = ExperimentKind::kPhase;
  s.m = {64};
  s.rank = {2, 4};
  s.p = {0.3, 0.6};
  s.trials = 20;
  s.solvers = {SolverConfig::defaults(Variant::kHQASD)};
  s.out = scratch("phase").string();
  const auto rows = run_experiment(s);
  ASSERT_EQ(rows.size(), 4u);
  for (const ResultRow& r : rows) {
    if (r.rank == 2 && r.p == 0.6) {
      EXPECT_EQ(r.success_rate, 1.0);
    }
  }
  std::istringstream grid(slurp(s.out + ".phase.HQASD.csv"));
  std::string line;
  std::getline(grid, line);
  EXPECT_EQ(line, "r\\p,0.3,0.6");
  std::getline(grid, line);
  EXPECT_EQ(line.substr(0, 2), "2,");
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "1");
}

TEST(RunExperiment, CompleteRecoversTripletFile) {
  const Matrix truth = gen_low_rank(20, 20, 2, 5);
  const ObservedMatrix obs =
      ObservedMatrix::observe(truth, sample_covering_mask(20, 20, 0.6, 6));
  const fs::path input = scratch("complete_in.tsv");
  {
    std::ofstream out(input);
    const auto t = obs.triplets();
    write_triplets(out, t);
  }
  write_csv_matrix(scratch("complete_truth.csv"), truth);

  ExperimentSpec s;
  s.kind = ExperimentKind::kComplete;
  s.input = input.string();
  s.truth = scratch("complete_truth.csv").string();
  s.rank = {2};
  s.solvers = {SolverConfig::defaults(Variant::kHQASD)};
  s.out = scratch("complete").string();
  const auto rows = run_experiment(s);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].errors, 0) << rows[0].error;
  EXPECT_LT(rows[0].nmse, 1e-8);

  const Matrix u = read_csv_matrix(fs::path(s.out + ".HQASD.r2.U.csv"));
  const Matrix v = read_csv_matrix(fs::path(s.out + ".HQASD.r2.V.csv"));
  ASSERT_EQ(u.rows(), 20);
  ASSERT_EQ(u.cols(), 2);
  EXPECT_LT(nmse(u * v, truth), 1e-8);
  const Matrix completed = read_csv_matrix(fs::path(s.out + ".HQASD.r2.completed.csv"));
  EXPECT_LT(nmse(completed, truth), 1e-8);
}

// Integer ratings from a rank-2 model, written as five base/test splits.
fs::path fake_movielens() {
  const fs::path dir = scratch("ml");
  fs::create_directories(dir);
  const Matrix x = gen_low_rank(40, 60, 2, 3);
  const double spread = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
  const Support mask = sample_covering_mask(40, 60, 0.5, 4);
  std::mt19937_64 rng(5);
  std::vector<int> fold(mask.size());
  for (int& f : fold) f = static_cast<int>(rng() % 5);
  for (int s = 0; s < 5; ++s) {
    std::ofstream base(dir / ("u" + std::to_string(s + 1) + ".base"));
    std::ofstream test(dir / ("u" + std::to_string(s + 1) + ".test"));
    for (std::size_t k = 0; k < mask.size(); ++k) {
      const auto [i, j] = mask[k];
      const long rating =
          std::clamp(std::lround(3.0 + 1.5 * x(i, j) / spread), 1L, 5L);
      (fold[k] == s ? test : base)
          << i + 1 << '\t' << j + 1 << '\t' << rating << "\t874965758\n";
    }
  }
  return dir;
}

TEST(RunExperiment, MovielensRowsPerSplitAndSolver) {
  ExperimentSpec s;
  s.kind = ExperimentKind::kMovieLens;
  s.input = fake_movielens().string();
  s.rank = {2};
  s.splits = {"u1", "u2"};
  s.solvers = {SolverConfig::defaults(Variant::kHQASD),
               SolverConfig::defaults(Variant::kPF)};
  const auto clean = run_experiment(s);
  ASSERT_EQ(clean.size(), 4u);
  EXPECT_EQ(clean[0].label, "u1");
  EXPECT_EQ(clean[0].variant, "HQASD");
  EXPECT_EQ(clean[1].variant, "PF");
  for (const ResultRow& r : clean) {
    EXPECT_EQ(r.errors, 0) << r.error;
    EXPECT_TRUE(std::isfinite(r.rmse));
    // Rounded and clipped rank-2 ratings.
    EXPECT_LT(r.rmse, 1.0);
    EXPECT_TRUE(std::isnan(r.nmse));
  }
  s.flip_fraction = 0.1;
  const auto flipped = run_experiment(s);
  ASSERT_EQ(flipped.size(), 4u);
  EXPECT_NE(flipped[1].rmse, clean[1].rmse);
}

}  // namespace
}  // namespace rmc
