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

#include "kpc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpc/errors.hpp"

namespace kpc {

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::InverseMultiquadric: return "imq";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "matern32" || name == "matern-3/2" || name == "matern") return KernelFamily::Matern32;
  if (name == "imq" || name == "inverse-multiquadric") return KernelFamily::InverseMultiquadric;
  throw ArgumentError("unknown kernel family '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
    throw ArgumentError("kernel length-scale must be positive and finite");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ArgumentError("regularization mu must be >= 0");
  if (family == KernelFamily::InverseMultiquadric && !(imq_p > 0.0)) {
    throw ArgumentError("inverse multiquadric exponent p must be > 0");
  }
}

double kernel_from_squared_distance(const KernelSpec& spec, double r2) {
  switch (spec.family) {
    case KernelFamily::Gaussian:
      return std::exp(-r2 / (spec.length_scale * spec.length_scale));
    case KernelFamily::Matern32: {
      const double a = std::sqrt(3.0) * std::sqrt(r2) / spec.length_scale;
      return (1.0 + a) * std::exp(-a);
    }
    case KernelFamily::InverseMultiquadric:
      return std::pow(spec.imq_c * spec.imq_c + r2, -0.5 * spec.imq_p);
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  return kernel_from_squared_distance(spec, squared_distance(x, y));
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& ps, std::span<const Index> rows,
                              std::span<const Index> cols) {
  for (Index id : rows) {
    if (id < 0 || id >= ps.size()) throw ArgumentError("row id out of range");
  }
  for (Index id : cols) {
    if (id < 0 || id >= ps.size()) throw ArgumentError("column id out of range");
  }
  const auto nr = static_cast<Index>(rows.size());
  const auto nc = static_cast<Index>(cols.size());
  Eigen::MatrixXd values(nr, nc);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < nc; ++j) {
    const auto y = ps.point(cols[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < nr; ++i) {
      values(i, j) = kernel_eval(spec, ps.point(rows[static_cast<std::size_t>(i)]), y);
    }
  }
  return values;
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& ps) {
  std::vector<Index> all(static_cast<std::size_t>(ps.size()));
  std::iota(all.begin(), all.end(), Index{0});
  return kernel_matrix(spec, ps, all, all);
}

KernelBlock assemble_block(const KernelSpec& spec, const PointSet& ps, std::span<const Index> rows,
                           std::span<const Index> cols) {
  KernelBlock block;
  block.values = kernel_matrix(spec, ps, rows, cols);
  block.rows.assign(rows.begin(), rows.end());
  block.cols.assign(cols.begin(), cols.end());
  return block;
}

Eigen::VectorXd matvec(const KernelSpec& spec, const PointSet& ps, const Eigen::VectorXd& v,
                       Index block_size) {
  const Index n = ps.size();
  if (v.size() != n) throw ArgumentError("matvec: vector length does not match the point count");
  if (block_size < 1) throw ArgumentError("matvec: block size must be >= 1");

  Eigen::VectorXd out(n);
  const Index blocks = (n + block_size - 1) / block_size;
#pragma omp parallel for schedule(dynamic, 1)
  for (Index b = 0; b < blocks; ++b) {
    const Index begin = b * block_size;
    const Index end = std::min(n, begin + block_size);
    for (Index i = begin; i < end; ++i) {
      const auto xi = ps.point(i);
      double acc = 0.0;
      for (Index j = 0; j < n; ++j) acc += kernel_eval(spec, xi, ps.point(j)) * v[j];
      out[i] = acc;
    }
  }
  return out;
}

RegularizedKernelOperator::RegularizedKernelOperator(KernelSpec spec, const PointSet& ps,
                                                     std::size_t dense_budget_bytes)
    : spec_(spec), ps_(&ps) {
  spec_.validate();
  const auto n = static_cast<std::size_t>(ps.size());
  if (n * n * sizeof(double) <= dense_budget_bytes) dense_ = kernel_matrix(spec_, ps);
}

Eigen::VectorXd RegularizedKernelOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != size()) throw ArgumentError("operator: vector length mismatch");
  Eigen::VectorXd out = dense_ ? Eigen::VectorXd(*dense_ * v) : matvec(spec_, *ps_, v);
  out += spec_.mu * v;
  return out;
}

}  // namespace kpc
