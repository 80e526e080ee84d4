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

// rmc: benchmark harness for robust matrix completion.
//
//   rmc noise-sweep --solver pf,hqpf --noise 0.1,0.01,1 --trials 20 --out r/ns
//   rmc phase --rank 2,6,10 --p 0.2,0.4,0.6,0.8 --trials 20 --out r/phase
//   rmc movielens --input ml-100k --rank 2 --flip 0.1 --out r/ml
//   rmc replay r/ns.json

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmc/error.hpp"
#include "rmc/experiment.hpp"

namespace {

using rmc::ExperimentKind;
using rmc::ExperimentSpec;
using rmc::NoiseSpec;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

double to_double(const std::string& s) {
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v = 0.0;
  std::string rest;
  if (!(in >> v) || (in >> rest)) {
    throw rmc::Error(rmc::ErrorCode::kParseError, "bad number '" + s + "'");
  }
  return v;
}

// "none", "c,sa,sb" (mixture) or "sp:density[,low,high]".
NoiseSpec parse_noise(const std::string& text) {
  if (text == "none") return NoiseSpec::none();
  if (text.rfind("sp:", 0) == 0) {
    const auto f = split(text.substr(3), ',');
    if (f.size() != 1 && f.size() != 3) {
      throw rmc::Error(rmc::ErrorCode::kParseError,
                       "salt-and-pepper noise is sp:density[,low,high]");
    }
    if (f.size() == 1) return NoiseSpec::salt_pepper(to_double(f[0]));
    return NoiseSpec::salt_pepper(to_double(f[0]), to_double(f[1]),
                                  to_double(f[2]));
  }
  const auto f = split(text, ',');
  if (f.size() != 3) {
    throw rmc::Error(rmc::ErrorCode::kParseError,
                     "mixture noise is c,sigma_a,sigma_b, got '" + text + "'");
  }
  return NoiseSpec::gmm(to_double(f[0]), to_double(f[1]), to_double(f[2]));
}

// Flag values shared by every experiment subcommand.
struct Flags {
  std::string solvers;
  std::vector<long> m, n, rank;
  std::vector<double> p;
  std::vector<std::string> noise;
  std::vector<int> workers;
  int trials = 1;
  std::uint64_t seed = 1;
  double eta = 2.0;
  double xi = 0.0;
  double warm_sigma = 1e4;
  double sigma = 0.0;
  double eps_switch = 0.0;
  double eps_stop = 0.0;
  double eps_inner = 0.0;
  int max_outer = 0;
  int max_inner = 0;
  double threshold = 1e-1;
  int jobs = 1;
  std::string out;
  std::string input, truth, mask;
  std::vector<std::string> splits;
  double flip = 0.0;
  long approx_rank = 50;
  double peak = 1.0;
  bool print_spec = false;
};

struct Command {
  ExperimentKind kind;
  CLI::App* app = nullptr;
  Flags flags;
  ExperimentSpec defaults;
  std::string default_solvers;
};

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

void add_flags(Command& c) {
  CLI::App* a = c.app;
  Flags& f = c.flags;
  const ExperimentSpec& d = c.defaults;
  a->add_option("--solver", f.solvers,
                "comma separated: pf, hqpf, asd, scaledasd, hqasd")
      ->default_str(c.default_solvers);
  a->add_option("--rank", f.rank, "rank grid")->delimiter(',')->default_str(join(d.rank));
  a->add_option("--p", f.p, "observed fraction grid")->delimiter(',')->default_str(join(d.p));
  a->add_option("--noise", f.noise,
                "c,sigma_a,sigma_b | sp:density[,low,high] | none; repeat for a grid");
  a->add_option("--trials", f.trials, "Monte-Carlo trials per grid point")
      ->default_val(d.trials);
  a->add_option("--seed", f.seed, "base seed")->default_val(d.seed);
  a->add_option("--eta", f.eta, "kernel width multiplier on the IQR")->default_val(2.0);
  a->add_option("--xi", f.xi, "kernel width floor (default 1e-4 max|x|)");
  a->add_option("--warm-sigma", f.warm_sigma, "kernel width of the l2 warm-up")
      ->default_val(1e4);
  a->add_option("--sigma", f.sigma, "pin the kernel width, skipping the warm-up");
  a->add_option("--eps-switch", f.eps_switch, "warm-up hand-over threshold");
  a->add_option("--eps-stop", f.eps_stop, "stopping threshold");
  a->add_option("--eps-inner", f.eps_inner, "inner reweighting threshold");
  a->add_option("--max-outer", f.max_outer, "outer iteration cap");
  a->add_option("--max-inner", f.max_inner, "inner iteration cap");
  a->add_option("--threshold", f.threshold, "NMSE below which a trial succeeds")
      ->default_val(1e-1);
  a->add_option("--jobs", f.jobs, "concurrent trials")->default_val(1);
  a->add_option("--out", f.out, "output prefix for .csv, .json and extra files");
  a->add_flag("--print-spec", f.print_spec, "print the resolved spec and exit");
}

void add_size_flags(Command& c) {
  Flags& f = c.flags;
  c.app->add_option("--m", f.m, "row counts")->delimiter(',')->default_str(join(c.defaults.m));
  c.app->add_option("--n", f.n, "column counts, paired with --m (default square)")
      ->delimiter(',');
  c.app->add_option("--workers", f.workers, "solver threads grid")
      ->delimiter(',')
      ->default_str(join(c.defaults.workers));
}

ExperimentSpec resolve(const Command& c) {
  const Flags& f = c.flags;
  CLI::App* a = c.app;
  ExperimentSpec s = c.defaults;
  s.kind = c.kind;
  const auto given = [&](const char* name) {
    const CLI::Option* o = a->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  const auto to_index = [](const std::vector<long>& v) {
    return std::vector<rmc::Index>(v.begin(), v.end());
  };
  if (given("--rank")) s.rank = to_index(f.rank);
  if (given("--p")) s.p = f.p;
  if (given("--noise")) {
    s.noise.clear();
    for (const std::string& text : f.noise) s.noise.push_back(parse_noise(text));
  }
  if (given("--m")) s.m = to_index(f.m);
  if (given("--n")) s.n = to_index(f.n);
  if (given("--workers")) s.workers = f.workers;
  s.trials = f.trials;
  s.seed = f.seed;
  s.success_threshold = f.threshold;
  s.jobs = f.jobs;
  s.out = f.out;
  if (given("--input") || given("input")) s.input = f.input;
  if (given("--truth")) s.truth = f.truth;
  if (given("--mask")) s.mask = f.mask;
  if (given("--splits")) s.splits = f.splits;
  if (a->get_option_no_throw("--flip")) s.flip_fraction = f.flip;
  if (a->get_option_no_throw("--approx-rank")) s.approx_rank = f.approx_rank;
  if (a->get_option_no_throw("--peak")) s.peak = f.peak;

  const std::string names = given("--solver") ? f.solvers : c.default_solvers;
  for (const std::string& name : split(names, ',')) {
    rmc::SolverConfig cfg = rmc::SolverConfig::defaults(rmc::parse_variant(name));
    cfg.kernel.eta = f.eta;
    cfg.kernel.warm_sigma = f.warm_sigma;
    if (given("--xi")) cfg.kernel.xi = f.xi;
    if (given("--sigma")) cfg.fixed_sigma = f.sigma;
    if (given("--eps-switch")) cfg.epsilon_switch = f.eps_switch;
    if (given("--eps-stop")) cfg.epsilon_stop = f.eps_stop;
    if (given("--eps-inner")) cfg.epsilon_inner = f.eps_inner;
    if (given("--max-outer")) cfg.max_outer = f.max_outer;
    if (given("--max-inner")) cfg.max_inner = f.max_inner;
    s.solvers.push_back(cfg);
  }
  return s;
}

int execute(const ExperimentSpec& spec, bool print_spec) {
  if (print_spec) {
    std::cout << rmc::spec_to_json(spec) << '\n';
    return 0;
  }
  const auto rows = rmc::run_experiment(spec);
  if (spec.out.empty()) {
    rmc::write_results_csv(std::cout, rows);
  } else {
    std::cout << "wrote " << spec.out << ".csv and " << spec.out << ".json ("
              << rows.size() << " rows)\n";
  }
  int failed = 0;
  for (const auto& r : rows) failed += r.errors;
  if (failed > 0) {
    std::cerr << failed << " trial(s) failed; see the error column\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust matrix completion benchmarks"};
  app.require_subcommand(1);
  app.allow_extras(false);

  std::vector<Command> commands;
  commands.reserve(7);
  const auto make = [&](ExperimentKind kind, const char* help,
                        const std::string& solvers) -> Command& {
    Command& c = commands.emplace_back();
    c.kind = kind;
    c.app = app.add_subcommand(std::string(rmc::to_string(kind)), help);
    c.default_solvers = solvers;
    c.defaults.kind = kind;
    return c;
  };

  {
    Command& c = make(ExperimentKind::kComplete,
                      "complete a zero-based triplet file", "hqasd");
    c.defaults.rank = {2};
    add_flags(c);
    c.app->add_option("input", c.flags.input, "triplet file")->required();
    c.app->add_option("--truth", c.flags.truth, "dense CSV truth for NMSE");
  }
  const NoiseSpec fig_noise = NoiseSpec::gmm(0.1, 0.01, 1.0);
  {
    Command& c = make(ExperimentKind::kNoiseSweep,
                      "NMSE against the inlier noise level",
                      "pf,hqpf,scaledasd,hqasd");
    c.defaults.noise.clear();
    for (double sa : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
      c.defaults.noise.push_back(NoiseSpec::gmm(0.1, sa, 1.0));
    }
    c.defaults.trials = 10;
    add_flags(c);
    add_size_flags(c);
  }
  {
    Command& c = make(ExperimentKind::kSizeSweep, "NMSE and time against size",
                      "pf,hqpf,scaledasd,hqasd");
    c.defaults.m = {100, 200, 400};
    c.defaults.noise = {fig_noise};
    c.defaults.trials = 5;
    add_flags(c);
    add_size_flags(c);
  }
  {
    Command& c = make(ExperimentKind::kPhase,
                      "success probability over a rank x fraction grid", "hqasd");
    c.defaults.m = {64};
    c.defaults.rank = {2, 4, 6, 8, 10};
    c.defaults.p = {0.2, 0.4, 0.6, 0.8};
    c.defaults.trials = 20;
    add_flags(c);
    add_size_flags(c);
  }
  {
    Command& c = make(ExperimentKind::kMovieLens,
                      "test RMSE on MovieLens splits", "pf,hqpf,hqasd");
    c.defaults.rank = {2};
    add_flags(c);
    c.app->add_option("--input", c.flags.input,
                      "dataset directory (or rating file with --splits raw)")
        ->required();
    c.app->add_option("--splits", c.flags.splits, "u1..u5, ua, ub or raw")
        ->delimiter(',')
        ->default_str("u1,u2,u3,u4,u5");
    c.app->add_option("--flip", c.flags.flip,
                      "fraction of 1s and 5s swapped in training")
        ->default_val(0.0);
  }
  {
    Command& c = make(ExperimentKind::kInpaint,
                      "inpaint a rank-limited grayscale image", "hqpf,hqasd");
    c.defaults.rank = {50};
    c.defaults.p = {0.7};
    c.defaults.noise = {NoiseSpec::gmm(0.0, 0.01, 0.0),
                        NoiseSpec::salt_pepper(0.1, 0.0, 1.0)};
    add_flags(c);
    c.app->add_option("--input", c.flags.input, "PGM or CSV image")->required();
    c.app->add_option("--mask", c.flags.mask,
                      "mask image, pixels above 0.5 observed (default: random at --p)");
    c.app->add_option("--approx-rank", c.flags.approx_rank,
                      "rank of the clean target")
        ->default_val(50);
    c.app->add_option("--peak", c.flags.peak, "PSNR peak value")->default_val(1.0);
  }
  {
    Command& c = make(ExperimentKind::kBench, "wall time per solver",
                      "hqpf,hqasd");
    c.defaults.m = {512};
    c.defaults.p = {0.3};
    c.defaults.noise = {fig_noise};
    c.defaults.workers = {1, 4};
    c.defaults.trials = 3;
    add_flags(c);
    add_size_flags(c);
  }

  std::string manifest;
  bool replay_print = false;
  CLI::App* replay =
      app.add_subcommand("replay", "rerun an experiment from its JSON manifest");
  replay->add_option("manifest", manifest, "manifest or spec JSON")->required();
  std::string replay_out;
  replay->add_option("--out", replay_out, "override the output prefix");
  replay->add_flag("--print-spec", replay_print, "print the spec and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (replay->parsed()) {
      std::ifstream in(manifest);
      if (!in) {
        throw rmc::Error(rmc::ErrorCode::kMissingFile, "cannot open " + manifest);
      }
      std::stringstream text;
      text << in.rdbuf();
      ExperimentSpec spec = rmc::spec_from_json(text.str());
      if (replay->count("--out")) spec.out = replay_out;
      return execute(spec, replay_print);
    }
    for (Command& c : commands) {
      if (c.app->parsed()) return execute(resolve(c), c.flags.print_spec);
    }
  } catch (const rmc::Error& e) {
    std::cerr << "error: " << rmc::to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
