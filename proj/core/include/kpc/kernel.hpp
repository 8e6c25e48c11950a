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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kpc/geometry.hpp"

namespace kpc {

enum class KernelFamily { Gaussian, Matern32, InverseMultiquadric };

const char* to_string(KernelFamily family);
/// Accepts "gaussian", "matern32" (or "matern-3/2") and "imq".
KernelFamily parse_kernel_family(std::string_view name);

/// Kernel family, its parameters and the regularization mu of (K + mu I).
///
/// Gaussian:  exp(-r^2 / l^2)
/// Matern32:  (1 + sqrt(3) r / l) exp(-sqrt(3) r / l)
/// IMQ:       (c^2 + r^2)^(-p/2)        (l is unused)
///
/// mu is carried here but never added by the kernel routines; consumers add
/// mu I where they need it.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double length_scale = 1.0;
  double imq_c = 1.0;
  double imq_p = 1.0;
  double mu = 0.0;

  /// Throws ArgumentError unless l > 0, mu >= 0 and (for IMQ) p > 0.
  void validate() const;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Kernel value as a function of the squared distance.
double kernel_from_squared_distance(const KernelSpec& spec, double r2);

/// Dense block K(rows, cols); values(i, j) = kernel(x_rows[i], x_cols[j]).
struct KernelBlock {
  std::vector<Index> rows;
  std::vector<Index> cols;
  Eigen::MatrixXd values;
};

KernelBlock assemble_block(const KernelSpec& spec, const PointSet& ps, std::span<const Index> rows,
                           std::span<const Index> cols);

/// Just the matrix of assemble_block, without copying the id lists.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& ps, std::span<const Index> rows,
                              std::span<const Index> cols);

/// Full n x n kernel matrix (no regularization).
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& ps);

/// K * v evaluated in row blocks without forming K. Each output entry sums
/// over columns in increasing order, so the result is reproducible for any
/// block size and thread count.
Eigen::VectorXd matvec(const KernelSpec& spec, const PointSet& ps, const Eigen::VectorXd& v,
                       Index block_size = 256);

/// The operator v -> (K + mu I) v. Materializes K when n^2 doubles fit in
/// `dense_budget_bytes`, otherwise evaluates kernel entries on the fly.
class RegularizedKernelOperator {
 public:
  RegularizedKernelOperator(KernelSpec spec, const PointSet& ps,
                            std::size_t dense_budget_bytes = std::size_t{1} << 30);

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Index size() const noexcept { return ps_->size(); }
  bool materialized() const noexcept { return dense_.has_value(); }
  const KernelSpec& spec() const noexcept { return spec_; }

 private:
  KernelSpec spec_;
  const PointSet* ps_;
  std::optional<Eigen::MatrixXd> dense_;
};

}  // namespace kpc
