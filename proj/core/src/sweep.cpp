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

#include "kpc/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <utility>

#include "kpc/dataset.hpp"
#include "kpc/errors.hpp"
#include "kpc/linalg.hpp"
#include "kpc/precond.hpp"

namespace kpc {

const char* to_string(DataSource source) {
  switch (source) {
    case DataSource::Synthetic: return "synthetic";
    case DataSource::Csv: return "csv";
    case DataSource::SparseText: return "sparse";
  }
  return "?";
}

const char* to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::LengthSquared: return "l2";
    case ParamKind::InverseLength: return "inv_l";
    case ParamKind::Length: return "l";
  }
  return "?";
}

const char* to_string(Method method) {
  switch (method) {
    case Method::CG: return "cg";
    case Method::AFN: return "afn";
    case Method::RAN: return "ran";
    case Method::Nystrom: return "nystrom";
    case Method::FSAI: return "fsai";
    case Method::Adaptive: return "adaptive";
  }
  return "?";
}

DataSource parse_data_source(std::string_view name) {
  if (name == "synthetic") return DataSource::Synthetic;
  if (name == "csv") return DataSource::Csv;
  if (name == "sparse" || name == "libsvm") return DataSource::SparseText;
  throw ConfigError("unknown data source '" + std::string(name) + "'");
}

ParamKind parse_param_kind(std::string_view name) {
  if (name == "l2") return ParamKind::LengthSquared;
  if (name == "inv_l") return ParamKind::InverseLength;
  if (name == "l") return ParamKind::Length;
  throw ConfigError("unknown parameter kind '" + std::string(name) + "' (expected l2, inv_l or l)");
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::CG, Method::AFN, Method::RAN, Method::Nystrom, Method::FSAI, Method::Adaptive}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

double length_scale_for(ParamKind kind, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("kernel parameters must be positive");
  switch (kind) {
    case ParamKind::LengthSquared: return std::sqrt(value);
    case ParamKind::InverseLength: return 1.0 / value;
    case ParamKind::Length: return value;
  }
  return value;
}

void ExperimentConfig::validate() const {
  if (params.empty()) throw ConfigError(label + ": parameter grid is empty");
  if (mus.empty()) throw ConfigError(label + ": mu grid is empty");
  if (methods.empty()) throw ConfigError(label + ": method list is empty");
  if (seeds.empty()) throw ConfigError(label + ": seed list is empty");
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError(label + ": parameters must be positive");
  }
  for (double mu : mus) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError(label + ": mu must be positive");
  }
  if (!(solver.tol > 0.0 && solver.tol < 1.0)) throw ConfigError(label + ": tol must lie in (0, 1)");
  if (solver.maxit < 1) throw ConfigError(label + ": maxit must be >= 1");
  if (solver.afn_w < 1 || solver.fsai_w < 1) throw ConfigError(label + ": FSAI neighbour counts must be >= 1");
  if (solver.ran_rank < 1 || solver.landmark_cap < 1 || solver.afn_threshold < 1) {
    throw ConfigError(label + ": ranks and thresholds must be >= 1");
  }
  if (solver.rank_subsample && *solver.rank_subsample < 2) throw ConfigError(label + ": rank_m must be >= 2");
  if (n_max < 1) throw ConfigError(label + ": n_max must be >= 1");
  if (family == KernelFamily::InverseMultiquadric && !(imq_p > 0.0)) throw ConfigError(label + ": imq_p must be > 0");
  if (source == DataSource::Synthetic) {
    if (n < 1 || d < 1) throw ConfigError(label + ": n and d must be >= 1");
    if (n > n_max) {
      throw ConfigError(label + ": n = " + std::to_string(n) + " exceeds n_max = " + std::to_string(n_max) +
                        " for dense runs");
    }
    if (edge && !(*edge > 0.0)) throw ConfigError(label + ": edge must be positive");
  } else if (path.empty()) {
    throw ConfigError(label + ": path is required for file sources");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T to_number(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> items;
  while (true) {
    const std::size_t comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return items;
}

template <typename T>
std::vector<T> to_number_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (std::string_view item : split_list(text)) out.push_back(to_number<T>(key, item));
  return out;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

struct Assignment {
  std::string key;
  std::string value;
  std::size_t line;
};

void apply_at(ExperimentConfig& cfg, const Assignment& a) {
  try {
    apply_config_key(cfg, a.key, a.value);
  } catch (const ConfigError& e) {
    throw ConfigError("line " + std::to_string(a.line) + ": " + e.what());
  }
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void apply_config_key(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "label") {
    cfg.label = std::string(value);
  } else if (key == "source") {
    cfg.source = parse_data_source(value);
  } else if (key == "path") {
    cfg.path = std::string(value);
  } else if (key == "sparse_dim") {
    cfg.sparse_dim = to_number<Index>(key, value);
  } else if (key == "n") {
    cfg.n = to_number<Index>(key, value);
  } else if (key == "d") {
    cfg.d = to_number<Index>(key, value);
  } else if (key == "edge") {
    if (value == "auto") {
      cfg.edge.reset();
    } else {
      cfg.edge = to_number<double>(key, value);
    }
  } else if (key == "data_seed") {
    cfg.data_seed = to_number<std::uint64_t>(key, value);
  } else if (key == "kernel" || key == "family") {
    try {
      cfg.family = parse_kernel_family(value);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "imq_c") {
    cfg.imq_c = to_number<double>(key, value);
  } else if (key == "imq_p") {
    cfg.imq_p = to_number<double>(key, value);
  } else if (key == "param_kind") {
    cfg.param_kind = parse_param_kind(value);
  } else if (key == "params") {
    cfg.params = to_number_list<double>(key, value);
  } else if (key == "mu" || key == "mus") {
    cfg.mus = to_number_list<double>(key, value);
  } else if (key == "methods") {
    cfg.methods.clear();
    for (std::string_view item : split_list(value)) cfg.methods.push_back(parse_method(item));
  } else if (key == "seeds") {
    cfg.seeds = to_number_list<std::uint64_t>(key, value);
  } else if (key == "tol") {
    cfg.solver.tol = to_number<double>(key, value);
  } else if (key == "maxit") {
    cfg.solver.maxit = to_number<Index>(key, value);
  } else if (key == "afn_w") {
    cfg.solver.afn_w = to_number<Index>(key, value);
  } else if (key == "fsai_w") {
    cfg.solver.fsai_w = to_number<Index>(key, value);
  } else if (key == "ran_rank") {
    cfg.solver.ran_rank = to_number<Index>(key, value);
  } else if (key == "landmark_cap") {
    cfg.solver.landmark_cap = to_number<Index>(key, value);
  } else if (key == "afn_threshold") {
    cfg.solver.afn_threshold = to_number<Index>(key, value);
  } else if (key == "rank_m") {
    cfg.solver.rank_subsample = to_number<Index>(key, value);
  } else if (key == "timings") {
    cfg.solver.timings = to_bool(key, value);
  } else if (key == "n_max") {
    cfg.n_max = to_number<Index>(key, value);
  } else if (key == "output") {
    cfg.output = std::string(value);
  } else if (key == "format") {
    try {
      cfg.format = parse_result_format(value);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

std::vector<ExperimentConfig> parse_config(std::istream& in) {
  std::vector<Assignment> defaults;
  std::vector<std::pair<std::string, std::vector<Assignment>>> sections;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const std::size_t hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      }
      const std::string name(trim(text.substr(1, text.size() - 2)));
      for (const auto& s : sections) {
        if (s.first == name) throw ConfigError("line " + std::to_string(line_no) + ": duplicate section '" + name + "'");
      }
      sections.emplace_back(name, std::vector<Assignment>{});
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    Assignment a{std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))), line_no};
    if (a.key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    (sections.empty() ? defaults : sections.back().second).push_back(std::move(a));
  }

  std::vector<ExperimentConfig> out;
  if (sections.empty()) sections.emplace_back("sweep", std::vector<Assignment>{});
  for (const auto& [name, assignments] : sections) {
    ExperimentConfig cfg;
    cfg.label = name;
    for (const Assignment& a : defaults) apply_at(cfg, a);
    for (const Assignment& a : assignments) apply_at(cfg, a);
    cfg.validate();
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<ExperimentConfig> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

PointSet load_dataset(const ExperimentConfig& cfg) {
  if (cfg.source == DataSource::Synthetic) {
    if (cfg.n > cfg.n_max) {
      throw ConfigError("n = " + std::to_string(cfg.n) + " exceeds n_max = " + std::to_string(cfg.n_max));
    }
    return gen_synthetic(cfg.n, cfg.d, cfg.edge.value_or(default_edge(cfg.n, cfg.d)), cfg.data_seed);
  }
  PointSet ps = [&] {
    try {
      return cfg.source == DataSource::Csv ? load_points_csv(cfg.path)
                                           : load_points_sparse_text(cfg.path, cfg.sparse_dim);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    } catch (const ParseError& e) {
      throw ConfigError(cfg.path + ": " + e.what());
    }
  }();
  if (ps.size() > cfg.n_max) {
    throw ConfigError(cfg.path + " has " + std::to_string(ps.size()) + " points, above n_max = " +
                      std::to_string(cfg.n_max));
  }
  return ps;
}

Eigen::VectorXd random_rhs(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-0.5, 0.5);
  Eigen::VectorXd b(n);
  for (Index i = 0; i < n; ++i) b[i] = entry(rng);
  return b;
}

ResultRow run_method(const PointSet& ps, const KernelSpec& spec, const RegularizedKernelOperator& op, Method method,
                     const SolverSettings& settings, std::uint64_t seed, bool rethrow_numeric) {
  const Index n = ps.size();
  ResultRow row;
  row.family = to_string(spec.family);
  row.mu = spec.mu;
  row.method = to_string(method);
  row.seed = seed;

  const Eigen::VectorXd b = random_rhs(n, seed);
  const LinearOperator apply_A = [&op](const Eigen::VectorXd& v) { return op.apply(v); };
  const Index m = std::min(settings.rank_subsample.value_or(default_subsample_size(n)), n);
  auto estimated_rank = [&] { return estimate_rank(spec, ps, std::max<Index>(m, 2), seed).k_hat; };
  auto nystrom_for = [&](Index k) {
    return std::make_shared<NystromPreconditioner>(build_nystrom(spec, ps, fps_sample(ps, k)));
  };
  auto afn_for = [&](Index k) {
    AfnOptions opts;
    opts.landmark_cap = settings.landmark_cap;
    opts.sample_seed = seed;
    return std::make_shared<AfnFactors>(build_afn(spec, ps, k, std::min(settings.afn_w, n - k), opts));
  };

  try {
    const auto setup_start = std::chrono::steady_clock::now();
    LinearOperator apply_M;
    switch (method) {
      case Method::CG:
        break;
      case Method::FSAI: {
        auto G = std::make_shared<SparseLowerTriangular>(build_fsai_plain(spec, ps, std::min(settings.fsai_w, n)));
        apply_M = [G](const Eigen::VectorXd& v) { return apply_fsai_inv(*G, v); };
        break;
      }
      case Method::RAN: {
        row.k = std::min(settings.ran_rank, n);
        auto P = std::make_shared<NystromPreconditioner>(build_nystrom(spec, ps, uniform_sample(ps, row.k, seed)));
        apply_M = [P](const Eigen::VectorXd& v) { return apply_nystrom_inv(*P, v); };
        break;
      }
      case Method::Nystrom: {
        row.k = std::min({estimated_rank(), settings.ran_rank, n});
        auto P = nystrom_for(row.k);
        apply_M = [P](const Eigen::VectorXd& v) { return apply_nystrom_inv(*P, v); };
        break;
      }
      case Method::AFN: {
        row.k = std::min({estimated_rank(), settings.landmark_cap, n - 1});
        if (row.k < 1) throw ArgumentError("AFN needs at least two points");
        auto F = afn_for(row.k);
        apply_M = [F](const Eigen::VectorXd& v) { return apply_afn_inv(*F, v); };
        break;
      }
      case Method::Adaptive: {
        StrategyOverrides overrides;
        overrides.threshold = settings.afn_threshold;
        overrides.landmark_cap = settings.landmark_cap;
        const StrategyChoice choice = choose_preconditioner(spec, ps, std::max<Index>(m, 2), seed, overrides);
        if (choice.chosen == PreconditionerKind::AFN && n > 1) {
          row.k = std::min(choice.k_used, n - 1);
          auto F = afn_for(row.k);
          apply_M = [F](const Eigen::VectorXd& v) { return apply_afn_inv(*F, v); };
        } else {
          row.k = std::min({choice.k_used, settings.ran_rank, n});
          auto P = nystrom_for(row.k);
          apply_M = [P](const Eigen::VectorXd& v) { return apply_nystrom_inv(*P, v); };
        }
        row.method = std::string("adaptive-") + to_string(choice.chosen);
        break;
      }
    }
    const double setup = elapsed_since(setup_start);

    PcgOptions options;
    options.tol = settings.tol;
    options.maxit = settings.maxit;
    const auto solve_start = std::chrono::steady_clock::now();
    const PcgResult result = pcg(apply_A, b, apply_M, options);
    const double solve = elapsed_since(solve_start);

    row.iters = result.report.iterations;
    row.converged = result.report.converged;
    row.relres = result.report.final_residual();
    row.setup_s = settings.timings ? setup : 0.0;
    row.solve_s = settings.timings ? solve : 0.0;
  } catch (const NumericError&) {
    if (rethrow_numeric) throw;
    row.iters = 0;
    row.converged = false;
    row.relres = std::numeric_limits<double>::quiet_NaN();
    row.setup_s = 0.0;
    row.solve_s = 0.0;
  }
  return row;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const PointSet ps = load_dataset(cfg);
  return run_sweep(cfg, ps);
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const PointSet& ps) {
  cfg.validate();
  if (ps.size() > cfg.n_max) throw ConfigError(cfg.label + ": point set exceeds n_max");
  std::vector<ResultRow> rows;
  rows.reserve(cfg.params.size() * cfg.mus.size() * cfg.methods.size() * cfg.seeds.size());
  for (double param : cfg.params) {
    for (double mu : cfg.mus) {
      KernelSpec spec;
      spec.family = cfg.family;
      spec.length_scale = length_scale_for(cfg.param_kind, param);
      spec.imq_c = cfg.imq_c;
      spec.imq_p = cfg.imq_p;
      spec.mu = mu;
      const RegularizedKernelOperator op(spec, ps);
      for (Method method : cfg.methods) {
        for (std::uint64_t seed : cfg.seeds) {
          ResultRow row = run_method(ps, spec, op, method, cfg.solver, seed);
          row.kernel = cfg.label;
          row.param = param;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

}  // namespace kpc
