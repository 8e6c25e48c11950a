// Copyright 2026 The kpc Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// kpc: dataset generation, rank estimation, single solves, sweeps and
// figure data from the command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "kpc/adaptive.hpp"
#include "kpc/dataset.hpp"
#include "kpc/errors.hpp"
#include "kpc/figures.hpp"
#include "kpc/results.hpp"
#include "kpc/sweep.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

// Flags that map one-to-one onto config keys.
class ConfigFlags {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto slot = std::make_unique<Slot>();
    slot->key = key;
    slot->option = app->add_option(flag, slot->value, help);
    slots_.push_back(std::move(slot));
  }

  void apply(kpc::ExperimentConfig& cfg) const {
    for (const auto& s : slots_) {
      if (s->option->count() > 0) kpc::apply_config_key(cfg, s->key, s->value);
    }
  }

 private:
  struct Slot {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
  };
  std::vector<std::unique_ptr<Slot>> slots_;
};

void add_data_flags(CLI::App* app, ConfigFlags& flags) {
  flags.add(app, "--source", "source", "synthetic, csv or sparse");
  flags.add(app, "--path", "path", "input file for csv or sparse sources");
  flags.add(app, "--sparse-dim", "sparse_dim", "declared dimension for sparse text input");
  flags.add(app, "-n,--n", "n", "number of synthetic points");
  flags.add(app, "-d,--d", "d", "dimension of synthetic points");
  flags.add(app, "--edge", "edge", "cube edge length (default n^(1/d))");
  flags.add(app, "--data-seed", "data_seed", "seed for synthetic points");
  flags.add(app, "--n-max", "n_max", "largest accepted n");
}

void add_kernel_flags(CLI::App* app, ConfigFlags& flags) {
  flags.add(app, "--kernel", "kernel", "gaussian, matern32 or imq");
  flags.add(app, "--param-kind", "param_kind", "l2, inv_l or l");
  flags.add(app, "--imq-c", "imq_c", "inverse multiquadric shift c");
  flags.add(app, "--imq-p", "imq_p", "inverse multiquadric power p");
}

void add_solver_flags(CLI::App* app, ConfigFlags& flags) {
  flags.add(app, "--tol", "tol", "relative residual tolerance");
  flags.add(app, "--maxit", "maxit", "iteration limit");
  flags.add(app, "--afn-w", "afn_w", "FSAI neighbours inside AFN");
  flags.add(app, "--fsai-w", "fsai_w", "neighbours for plain FSAI");
  flags.add(app, "--ran-rank", "ran_rank", "landmarks for RAN");
  flags.add(app, "--landmark-cap", "landmark_cap", "largest AFN landmark count");
  flags.add(app, "--afn-threshold", "afn_threshold", "estimated rank at which AFN is chosen");
  flags.add(app, "--rank-m", "rank_m", "subsample size for rank estimation");
  flags.add(app, "--timings", "timings", "record wall-clock times (true/false)");
}

void set_threads_from_env() {
  if (const char* env = std::getenv("KPC_NUM_THREADS")) {
    const int threads = std::atoi(env);
    if (threads > 0) omp_set_num_threads(threads);
  }
}

kpc::KernelSpec spec_for(const kpc::ExperimentConfig& cfg, double param, double mu) {
  kpc::KernelSpec spec;
  spec.family = cfg.family;
  spec.length_scale = kpc::length_scale_for(cfg.param_kind, param);
  spec.imq_c = cfg.imq_c;
  spec.imq_p = cfg.imq_p;
  spec.mu = mu;
  spec.validate();
  return spec;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kpc::ConfigError("cannot write '" + path + "'");
  fn(out);
}

void require_single(const kpc::ExperimentConfig& cfg) {
  if (cfg.params.size() != 1 || cfg.mus.size() != 1 || cfg.methods.size() != 1 || cfg.seeds.size() != 1) {
    throw kpc::ConfigError("solve takes exactly one --param, --mu, --method and --seed");
  }
}

int run_gen(const kpc::ExperimentConfig& cfg) {
  const kpc::PointSet ps = kpc::load_dataset(cfg);
  with_output(cfg.output, [&](std::ostream& out) { kpc::write_points_csv(out, ps); });
  return 0;
}

int run_estimate_rank(const kpc::ExperimentConfig& cfg, bool print_curve) {
  const kpc::PointSet ps = kpc::load_dataset(cfg);
  const kpc::KernelSpec spec = spec_for(cfg, cfg.params.front(), cfg.mus.front());
  const kpc::Index m = cfg.solver.rank_subsample.value_or(kpc::default_subsample_size(ps.size()));
  kpc::StrategyOverrides overrides;
  overrides.threshold = cfg.solver.afn_threshold;
  overrides.landmark_cap = cfg.solver.landmark_cap;
  const kpc::StrategyChoice choice =
      kpc::choose_preconditioner(spec, ps, std::min(m, ps.size()), cfg.seeds.front(), overrides);
  with_output(cfg.output, [&](std::ostream& out) {
    out << "n " << ps.size() << "\nm " << choice.estimate.m << "\nr " << choice.estimate.r_subsample << "\nk_hat "
        << choice.estimate.k_hat << "\nrefined " << (choice.estimate.refined ? "true" : "false") << "\nstrategy "
        << kpc::to_string(choice.chosen) << "\nk_used " << choice.k_used << '\n';
    if (print_curve) {
      for (const auto& [rank, err] : choice.estimate.error_curve) {
        out << "curve " << rank << ' ' << kpc::format_double(err) << '\n';
      }
    }
  });
  return 0;
}

int run_solve(const kpc::ExperimentConfig& cfg) {
  require_single(cfg);
  const kpc::PointSet ps = kpc::load_dataset(cfg);
  const kpc::KernelSpec spec = spec_for(cfg, cfg.params.front(), cfg.mus.front());
  const kpc::RegularizedKernelOperator op(spec, ps);
  kpc::ResultRow row;
  try {
    row = kpc::run_method(ps, spec, op, cfg.methods.front(), cfg.solver, cfg.seeds.front(), true);
  } catch (const kpc::NumericError& e) {
    std::cerr << "kpc solve: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  row.kernel = cfg.label;
  row.param = cfg.params.front();
  with_output(cfg.output, [&](std::ostream& out) { kpc::emit_results(out, {row}, cfg.format); });
  return 0;
}

int run_sweep_command(std::vector<kpc::ExperimentConfig> configs) {
  std::vector<kpc::ResultRow> to_stdout;
  kpc::ResultFormat stdout_format = configs.front().format;
  for (const kpc::ExperimentConfig& cfg : configs) {
    cfg.validate();
    std::vector<kpc::ResultRow> rows = kpc::run_sweep(cfg);
    if (cfg.output.empty() || cfg.output == "-") {
      stdout_format = cfg.format;
      to_stdout.insert(to_stdout.end(), rows.begin(), rows.end());
    } else {
      kpc::write_results(cfg.output, rows, cfg.format);
    }
  }
  if (!to_stdout.empty()) kpc::emit_results(std::cout, to_stdout, stdout_format);
  return 0;
}

int run_figure(const kpc::ExperimentConfig& cfg, const std::string& kind_name, const std::vector<kpc::Index>& ks,
               bool all_ranks) {
  const kpc::FigureKind kind = kpc::parse_figure_kind(kind_name);
  const kpc::PointSet ps = kpc::load_dataset(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  kpc::FigureTable table;
  switch (kind) {
    case kpc::FigureKind::Spectrum: {
      std::vector<double> scales;
      std::vector<std::string> labels;
      for (double p : cfg.params) {
        scales.push_back(kpc::length_scale_for(cfg.param_kind, p));
        labels.push_back(std::string(kpc::to_string(cfg.param_kind)) + "=" + kpc::format_double(p));
      }
      table = kpc::spectrum_figure(spec_for(cfg, cfg.params.front(), cfg.mus.front()), ps, scales, labels);
      break;
    }
    case kpc::FigureKind::FillVsError:
      if (ks.empty()) throw kpc::ConfigError("fill_vs_error needs --k");
      table = kpc::fill_vs_error_figure(spec_for(cfg, cfg.params.front(), cfg.mus.front()), ps, ks, seed);
      break;
    case kpc::FigureKind::Histogram:
      table = kpc::histogram_figure(spec_for(cfg, cfg.params.front(), cfg.mus.front()), ps, ks.empty() ? 100 : ks.front());
      break;
    case kpc::FigureKind::SubsampleMatch: {
      const kpc::Index m = cfg.solver.rank_subsample.value_or(kpc::default_subsample_size(ps.size()));
      const kpc::SubsampleMatch match = kpc::subsample_match(spec_for(cfg, cfg.params.front(), cfg.mus.front()), ps,
                                                             m, seed, all_ranks ? 0.0 : 0.1);
      table = kpc::subsample_match_figure(match);
      break;
    }
  }
  with_output(cfg.output, [&](std::ostream& out) { kpc::write_figure_csv(out, table); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  set_threads_from_env();

  CLI::App app{"Preconditioned kernel solves: AFN, Nystrom, FSAI and PCG"};
  app.require_subcommand(1);

  kpc::ExperimentConfig base;
  base.params = {1.0};

  ConfigFlags gen_flags;
  CLI::App* gen = app.add_subcommand("gen", "Generate uniform points in a cube (CSV)");
  add_data_flags(gen, gen_flags);
  gen_flags.add(gen, "-o,--output", "output", "output file (stdout if omitted)");

  ConfigFlags est_flags;
  bool print_curve = false;
  CLI::App* est = app.add_subcommand("estimate-rank", "Estimate the Nystrom rank and pick a preconditioner");
  add_data_flags(est, est_flags);
  add_kernel_flags(est, est_flags);
  est_flags.add(est, "--param", "params", "kernel parameter value");
  est_flags.add(est, "--mu", "mus", "regularization");
  est_flags.add(est, "--seed", "seeds", "subsample seed");
  est_flags.add(est, "--rank-m", "rank_m", "subsample size");
  est_flags.add(est, "--afn-threshold", "afn_threshold", "estimated rank at which AFN is chosen");
  est_flags.add(est, "--landmark-cap", "landmark_cap", "largest AFN landmark count");
  est_flags.add(est, "-o,--output", "output", "output file (stdout if omitted)");
  est->add_flag("--curve", print_curve, "also print the subsample error curve");

  ConfigFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "Solve one system and print a result row");
  add_data_flags(solve, solve_flags);
  add_kernel_flags(solve, solve_flags);
  add_solver_flags(solve, solve_flags);
  solve_flags.add(solve, "--param", "params", "kernel parameter value");
  solve_flags.add(solve, "--mu", "mus", "regularization");
  solve_flags.add(solve, "--method", "methods", "cg, afn, ran, nystrom, fsai or adaptive");
  solve_flags.add(solve, "--seed", "seeds", "right-hand side seed");
  solve_flags.add(solve, "--label", "label", "value of the kernel column");
  solve_flags.add(solve, "--format", "format", "csv or json");
  solve_flags.add(solve, "-o,--output", "output", "output file (stdout if omitted)");

  ConfigFlags sweep_flags;
  std::string config_path;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("-c,--config", config_path, "config file; flags override every section");
  add_data_flags(sweep, sweep_flags);
  add_kernel_flags(sweep, sweep_flags);
  add_solver_flags(sweep, sweep_flags);
  sweep_flags.add(sweep, "--params", "params", "comma separated kernel parameters");
  sweep_flags.add(sweep, "--mus", "mus", "comma separated regularizations");
  sweep_flags.add(sweep, "--methods", "methods", "comma separated methods");
  sweep_flags.add(sweep, "--seeds", "seeds", "comma separated seeds");
  sweep_flags.add(sweep, "--label", "label", "value of the kernel column");
  sweep_flags.add(sweep, "--format", "format", "csv or json");
  sweep_flags.add(sweep, "-o,--output", "output", "output file (stdout if omitted)");

  ConfigFlags fig_flags;
  std::string figure_kind;
  std::vector<kpc::Index> ks;
  bool all_ranks = false;
  CLI::App* fig = app.add_subcommand("figure", "Emit plot-ready figure data (CSV)");
  fig->add_option("--kind", figure_kind, "spectrum, fill_vs_error, histogram or subsample_match")->required();
  add_data_flags(fig, fig_flags);
  add_kernel_flags(fig, fig_flags);
  fig_flags.add(fig, "--params", "params", "kernel parameters (spectrum uses all, others the first)");
  fig_flags.add(fig, "--mu", "mus", "regularization");
  fig_flags.add(fig, "--seed", "seeds", "random landmark / subsample seed");
  fig_flags.add(fig, "--rank-m", "rank_m", "subsample size for subsample_match");
  fig_flags.add(fig, "-o,--output", "output", "output file (stdout if omitted)");
  fig->add_option("--k", ks, "landmark counts (fill_vs_error) or landmark count (histogram)")->delimiter(',');
  fig->add_flag("--full-curves", all_ranks, "subsample_match: compute the curves to the end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    kpc::ExperimentConfig cfg = base;
    if (gen->parsed()) {
      gen_flags.apply(cfg);
      return run_gen(cfg);
    }
    if (est->parsed()) {
      cfg.seeds = {0};
      est_flags.apply(cfg);
      cfg.validate();
      return run_estimate_rank(cfg, print_curve);
    }
    if (solve->parsed()) {
      cfg.label = "cli";
      cfg.seeds = {0};
      solve_flags.apply(cfg);
      cfg.validate();
      return run_solve(cfg);
    }
    if (sweep->parsed()) {
      std::vector<kpc::ExperimentConfig> configs;
      if (config_path.empty()) {
        cfg.label = "cli";
        configs.push_back(cfg);
      } else {
        configs = kpc::load_config(config_path);
      }
      for (kpc::ExperimentConfig& c : configs) sweep_flags.apply(c);
      return run_sweep_command(std::move(configs));
    }
    if (fig->parsed()) {
      cfg.seeds = {0};
      fig_flags.apply(cfg);
      cfg.validate();
      return run_figure(cfg, figure_kind, ks, all_ranks);
    }
  } catch (const kpc::ConfigError& e) {
    std::cerr << "kpc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kpc::ParseError& e) {
    std::cerr << "kpc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kpc::ArgumentError& e) {
    std::cerr << "kpc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kpc::SizeError& e) {
    std::cerr << "kpc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kpc::NumericError& e) {
    std::cerr << "kpc: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
