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

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "kpc/geometry.hpp"

namespace kpc {

/// Diagonal shift schedule used when a Cholesky factorization breaks down:
/// 0 first, then base * growth^t for t = 0..max_escalations-1 where
/// base = initial_relative * trace(A) / k (or initial_relative if the trace
/// is not positive).
struct JitterPolicy {
  double initial_relative = 1e-14;
  double growth = 10.0;
  int max_escalations = 6;
};

/// A + jitter I = L L^T with L lower triangular.
struct CholeskyFactor {
  Eigen::MatrixXd L;
  double jitter_applied = 0.0;

  Index size() const noexcept { return L.rows(); }
};

/// Factors the symmetric part of A, escalating jitter per `policy`.
/// Throws FactorizationError naming the failing pivot.
CholeskyFactor cholesky(const Eigen::MatrixXd& A, const JitterPolicy& policy = {});

enum class TriangularMode { Lower, Upper };

/// Lower: solves L x = b. Upper: solves L^T x = b.
Eigen::VectorXd tri_solve(const CholeskyFactor& factor, const Eigen::VectorXd& b, TriangularMode mode);

/// (L L^T)^{-1} b.
Eigen::VectorXd cholesky_solve(const CholeskyFactor& factor, const Eigen::VectorXd& b);

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns, matching `values`
};

inline constexpr Index kDenseEigenLimit = 4000;

/// Eigendecomposition of a dense symmetric matrix. Throws SizeError above
/// `dense_limit` and NumericError if the solver does not converge.
SymmetricEigen sym_eig(const Eigen::MatrixXd& A, Index dense_limit = kDenseEigenLimit);

/// Eigenvalues only, descending.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& A, Index dense_limit = kDenseEigenLimit);

/// Largest |eigenvalue| of a symmetric operator by power iteration; stops
/// when successive estimates agree to `rel_tol`.
double power_iteration_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                            Index n, double rel_tol = 1e-6, int max_iter = 1000,
                            const Eigen::VectorXd* start = nullptr, Eigen::VectorXd* final_vector = nullptr);

/// Spectral norm of a dense symmetric matrix by power iteration.
double symmetric_spectral_norm(const Eigen::MatrixXd& A, double rel_tol = 1e-6);

/// Lower-triangular matrix in compressed row storage. Column ids are
/// strictly increasing within a row and each row ends with its diagonal.
class SparseLowerTriangular {
 public:
  SparseLowerTriangular() = default;
  SparseLowerTriangular(Index dim, std::vector<Index> row_ptr, std::vector<Index> cols,
                        std::vector<double> values);

  Index dim() const noexcept { return dim_; }
  Index nnz() const noexcept { return static_cast<Index>(values_.size()); }
  const std::vector<Index>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<Index>& cols() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double diagonal(Index row) const { return values_[static_cast<std::size_t>(row_ptr_[row + 1] - 1)]; }
  Eigen::MatrixXd to_dense() const;

 private:
  Index dim_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
};

/// G v, or G^T v when `transpose` is set. O(nnz).
Eigen::VectorXd sparse_tri_apply(const SparseLowerTriangular& G, const Eigen::VectorXd& v, bool transpose);

/// SolveReport of one (P)CG run. History entry t is ||b - A x_t|| / ||b||.
struct SolveReport {
  Index iterations = 0;
  std::vector<double> rel_residual_history;
  bool converged = false;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;

  double final_residual() const { return rel_residual_history.back(); }
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PcgOptions {
  double tol = 1e-4;
  Index maxit = 500;
  /// Called with (iteration, iterate) after every update.
  std::function<void(Index, const Eigen::VectorXd&)> on_iterate;
};

struct PcgResult {
  Eigen::VectorXd x;
  SolveReport report;
};

/// Preconditioned CG from x0 = 0. `apply_Minv` may be empty (plain CG). The
/// stopping test uses the true residual b - A x at every iteration.
PcgResult pcg(const LinearOperator& apply_A, const Eigen::VectorXd& b, const LinearOperator& apply_Minv,
              const PcgOptions& options = {});

}  // namespace kpc
