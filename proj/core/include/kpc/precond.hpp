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

// Preconditioners for (K + mu I): landmark Nystrom (FPS or uniform
// landmarks), factorized sparse approximate inverse (FSAI), and the
// adaptive factorized Nystrom (AFN) block preconditioner
//
//   M = [ L               0      ] [ L^T   L^{-1} K12 ]
//       [ K12^T L^{-T}    G^{-1} ] [ 0     G^{-T}     ]
//
// where L L^T = K11 + mu I and G^T G approximates the inverse of the
// regularized Schur complement S = K22 + mu I - K12^T (K11 + mu I)^{-1} K12.

#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "kpc/geometry.hpp"
#include "kpc/kernel.hpp"
#include "kpc/linalg.hpp"

namespace kpc {

// ---------------------------------------------------------------------------
// Nystrom
// ---------------------------------------------------------------------------

/// Scaled: (lambda_k + mu) U (Lambda + mu I)^{-1} U^T + (I - U U^T).
/// Plain:  U (Lambda + mu I)^{-1} U^T + (1 / mu) (I - U U^T), the exact
///         inverse of U Lambda U^T + mu I.
enum class NystromApplyForm { Scaled, Plain };

/// K_nys = U diag(eigenvalues) U^T with orthonormal U (n x k).
struct NystromPreconditioner {
  Eigen::MatrixXd U;
  Eigen::VectorXd eigenvalues;  // descending, non-negative
  double mu = 0.0;
  double lambda_k = 0.0;
  SamplingMethod landmark_method = SamplingMethod::FPS;
  std::vector<Index> landmarks;
  double jitter = 0.0;
  NystromApplyForm form = NystromApplyForm::Scaled;

  Index rank() const noexcept { return U.cols(); }
};

/// Thin factorization C chol(W)^{-T} followed by QR and a k x k
/// eigendecomposition, where C = K(X, X_k) and W = K(X_k, X_k).
NystromPreconditioner build_nystrom(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& sel,
                                    const JitterPolicy& jitter = {});

Eigen::VectorXd apply_nystrom_inv(const NystromPreconditioner& P, const Eigen::VectorXd& r);
Eigen::VectorXd apply_nystrom_inv(const NystromPreconditioner& P, const Eigen::VectorXd& r,
                                  NystromApplyForm form);

enum class MatrixNorm { Spectral, Frobenius };

struct NystromErrorOptions {
  bool relative = true;
  MatrixNorm norm = MatrixNorm::Spectral;
  double power_tol = 1e-6;
};

/// ||K - K_nys|| = ||K22 - K21 K11^{-1} K12||, optionally divided by ||K||.
/// Dense; intended for diagnostics at moderate n.
double nystrom_error(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& sel,
                     const NystromErrorOptions& options = {});

// ---------------------------------------------------------------------------
// FSAI
// ---------------------------------------------------------------------------

/// Read access to principal submatrices of an SPD matrix.
class SpdBlockSource {
 public:
  virtual ~SpdBlockSource() = default;
  virtual Index size() const = 0;
  /// A(idx, idx).
  virtual Eigen::MatrixXd block(std::span<const Index> idx) const = 0;
};

class DenseSpdSource final : public SpdBlockSource {
 public:
  explicit DenseSpdSource(Eigen::MatrixXd A) : A_(std::move(A)) {}
  Index size() const override { return A_.rows(); }
  Eigen::MatrixXd block(std::span<const Index> idx) const override;

 private:
  Eigen::MatrixXd A_;
};

/// K + mu I restricted to the points of `ordering`, in that order.
class RegularizedKernelSource final : public SpdBlockSource {
 public:
  RegularizedKernelSource(KernelSpec spec, const PointSet& ps, std::vector<Index> ordering);
  Index size() const override { return static_cast<Index>(ordering_.size()); }
  Eigen::MatrixXd block(std::span<const Index> idx) const override;

 private:
  KernelSpec spec_;
  const PointSet* ps_;
  std::vector<Index> ordering_;
};

/// Entries of the regularized Schur complement
///   S(a, b) = k(x_a, x_b) + mu [a = b] - <V(:, a), V(:, b)>,  V = L^{-1} K12,
/// indexed by position among the non-landmark points. V is materialized when
/// it fits `memory_budget_bytes`; otherwise its columns are computed on
/// demand and kept in an LRU cache of `cache_columns` entries.
class SchurOracle final : public SpdBlockSource {
 public:
  SchurOracle(KernelSpec spec, const PointSet& ps, std::vector<Index> landmarks, std::vector<Index> others,
              const CholeskyFactor& landmark_factor, std::size_t memory_budget_bytes, Index cache_columns);

  Index size() const override { return static_cast<Index>(others_.size()); }
  Eigen::MatrixXd block(std::span<const Index> idx) const override;
  double entry(Index a, Index b) const;
  bool materialized() const noexcept { return V_.has_value(); }
  Eigen::MatrixXd dense() const;

 private:
  Eigen::VectorXd column(Index a) const;
  Eigen::VectorXd compute_column(Index a) const;

  KernelSpec spec_;
  const PointSet* ps_;
  std::vector<Index> landmarks_;
  std::vector<Index> others_;
  const CholeskyFactor* factor_;
  std::optional<Eigen::MatrixXd> V_;

  Index cache_capacity_;
  mutable std::mutex cache_mutex_;
  mutable std::list<std::pair<Index, Eigen::VectorXd>> lru_;
  mutable std::unordered_map<Index, std::list<std::pair<Index, Eigen::VectorXd>>::iterator> lookup_;
};

/// Row i with pattern J (ascending, ending at i): solve A(J, J) y = e_i and
/// set G(i, J) = y / sqrt(y_i), so diag(G A G^T) = 1. Rows are independent.
SparseLowerTriangular build_fsai(const SpdBlockSource& A, const SparsityPattern& pattern,
                                 const JitterPolicy& jitter = {});

/// G^T G v.
Eigen::VectorXd apply_fsai_inv(const SparseLowerTriangular& G, const Eigen::VectorXd& v);

inline constexpr Index kDefaultPlainFsaiNeighbors = 400;
inline constexpr Index kDefaultAfnFsaiNeighbors = 100;

/// FSAI of K + mu I over the dataset order with a knn_pattern of size w.
SparseLowerTriangular build_fsai_plain(const KernelSpec& spec, const PointSet& ps,
                                       Index w = kDefaultPlainFsaiNeighbors, const JitterPolicy& jitter = {});

// ---------------------------------------------------------------------------
// AFN
// ---------------------------------------------------------------------------

inline constexpr Index kDefaultLandmarkCap = 2000;

struct AfnOptions {
  Index landmark_cap = kDefaultLandmarkCap;
  /// Above this dimension landmarks are drawn uniformly instead of by FPS.
  Index fps_dim_limit = 10;
  std::optional<Index> fps_seed;  // defaults to centroid_seed
  std::uint64_t sample_seed = 0;
  std::size_t schur_memory_budget = std::size_t{2} << 30;
  JitterPolicy jitter;
};

struct AfnFactors {
  LandmarkSelection landmarks;
  CholeskyFactor L;                 // K11 + mu I = L L^T
  KernelBlock K12;                  // k x (n - k)
  SparseLowerTriangular G;          // (n - k) x (n - k)
  std::vector<Index> ordering;      // solver position -> point id, landmarks first
  Index w = 0;
  double mu = 0.0;

  Index k() const noexcept { return landmarks.size(); }
  Index size() const noexcept { return static_cast<Index>(ordering.size()); }
};

AfnFactors build_afn(const KernelSpec& spec, const PointSet& ps, Index k, Index w = kDefaultAfnFsaiNeighbors,
                     const AfnOptions& options = {});

/// Same, with the landmark selection supplied by the caller.
AfnFactors build_afn(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& landmarks, Index w,
                     const AfnOptions& options = {});

/// s2 = G^T G (r2 - K12^T (L L^T)^{-1} r1);  s1 = (L L^T)^{-1} (r1 - K12 s2).
Eigen::VectorXd apply_afn_inv(const AfnFactors& F, const Eigen::VectorXd& r);

}  // namespace kpc
