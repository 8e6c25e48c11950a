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

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "kpc/geometry.hpp"

namespace kpc {

struct ResultRow {
  std::string kernel;  // sweep label
  std::string family;
  double param = 0.0;
  double mu = 0.0;
  std::string method;
  Index k = 0;
  Index iters = 0;
  bool converged = false;
  double setup_s = 0.0;
  double solve_s = 0.0;
  double relres = 0.0;  // NaN when the run failed numerically
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kResultHeader =
    "kernel,family,param,mu,method,k,iters,converged,setup_s,solve_s,relres,seed";

enum class ResultFormat { Csv, Json };

ResultFormat parse_result_format(std::string_view name);

void emit_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void emit_results_json(std::ostream& out, const std::vector<ResultRow>& rows);
void emit_results(std::ostream& out, const std::vector<ResultRow>& rows, ResultFormat format);
/// Throws ArgumentError if the file cannot be written.
void write_results(const std::string& path, const std::vector<ResultRow>& rows, ResultFormat format);

/// Inverse of emit_results_csv. Throws ParseError.
std::vector<ResultRow> parse_results_csv(std::istream& in);

struct SeedAverage {
  std::string kernel;
  std::string family;
  double param = 0.0;
  double mu = 0.0;
  std::string method;
  Index runs = 0;
  Index converged_runs = 0;
  double mean_k = 0.0;
  double mean_iters = 0.0;
  double mean_setup_s = 0.0;
  double mean_solve_s = 0.0;
  double mean_relres = 0.0;
};

/// Groups rows by (kernel, family, param, mu, method) in first-seen order
/// and averages each group with a left-to-right sum divided by the count.
std::vector<SeedAverage> average_over_seeds(const std::vector<ResultRow>& rows);

}  // namespace kpc
