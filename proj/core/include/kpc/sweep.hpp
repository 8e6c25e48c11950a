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

// Experiment configuration and the PCG sweep driver.

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kpc/adaptive.hpp"
#include "kpc/geometry.hpp"
#include "kpc/kernel.hpp"
#include "kpc/results.hpp"

namespace kpc {

enum class DataSource { Synthetic, Csv, SparseText };
enum class ParamKind { LengthSquared, InverseLength, Length };
enum class Method { CG, AFN, RAN, Nystrom, FSAI, Adaptive };

const char* to_string(DataSource source);
const char* to_string(ParamKind kind);
const char* to_string(Method method);
DataSource parse_data_source(std::string_view name);
ParamKind parse_param_kind(std::string_view name);
Method parse_method(std::string_view name);

/// Length scale for a grid value: sqrt(p), 1/p or p.
double length_scale_for(ParamKind kind, double value);

struct SolverSettings {
  double tol = 1e-4;
  Index maxit = 500;
  Index afn_w = kDefaultAfnFsaiNeighbors;
  Index fsai_w = kDefaultPlainFsaiNeighbors;
  Index ran_rank = 3000;  // capped at n
  Index landmark_cap = kDefaultLandmarkCap;
  Index afn_threshold = kDefaultAfnThreshold;
  std::optional<Index> rank_subsample;  // default_subsample_size(n) when unset
  bool timings = true;                  // false writes 0 for setup_s and solve_s
};

struct ExperimentConfig {
  std::string label = "sweep";
  DataSource source = DataSource::Synthetic;
  std::string path;
  std::optional<Index> sparse_dim;
  Index n = 1000;
  Index d = 3;
  std::optional<double> edge;  // default_edge(n, d) when unset
  std::uint64_t data_seed = 0;
  KernelFamily family = KernelFamily::Gaussian;
  double imq_c = 1.0;
  double imq_p = 1.0;
  ParamKind param_kind = ParamKind::LengthSquared;
  std::vector<double> params;
  std::vector<double> mus{1e-4};
  std::vector<Method> methods{Method::CG};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  SolverSettings solver;
  Index n_max = 20000;
  std::string output;
  ResultFormat format = ResultFormat::Csv;

  /// Throws ConfigError on empty grids, tol outside (0, 1) and similar.
  void validate() const;
};

/// Parses the flat `key = value` format. Keys before the first `[section]`
/// are defaults inherited by every section; each section is one sweep whose
/// label is the section name. Lists are comma separated, `#` starts a
/// comment. Throws ConfigError with the offending line number.
std::vector<ExperimentConfig> parse_config(std::istream& in);
std::vector<ExperimentConfig> load_config(const std::string& path);

/// Applies one `key = value` assignment. Throws ConfigError.
void apply_config_key(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Loads or generates the point set. Throws ConfigError above n_max.
PointSet load_dataset(const ExperimentConfig& cfg);

/// Entries uniform in [-0.5, 0.5], deterministic per seed.
Eigen::VectorXd random_rhs(Index n, std::uint64_t seed);

/// Builds the preconditioner for one method, solves, and reports one row.
/// Numeric failures are recorded as a non-converged row with NaN relres
/// unless `rethrow_numeric` is set.
ResultRow run_method(const PointSet& ps, const KernelSpec& spec, const RegularizedKernelOperator& op, Method method,
                     const SolverSettings& settings, std::uint64_t seed, bool rethrow_numeric = false);

/// Rows ordered by param, then mu, then method, then seed.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const PointSet& ps);

}  // namespace kpc
