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

// Nystrom rank estimation from a rescaled random subsample, and the
// AFN-vs-Nystrom choice driven by it.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kpc/geometry.hpp"
#include "kpc/kernel.hpp"
#include "kpc/precond.hpp"

namespace kpc {

inline constexpr Index kDefaultAfnThreshold = 2000;

struct RankEstimateOptions {
  double error_tol = 0.1;        // relative Nystrom error that defines r
  double eigen_threshold = 0.1;  // eigenvalue cut for the refined count
  Index refine_below = kDefaultAfnThreshold;
  MatrixNorm norm = MatrixNorm::Spectral;
  double power_tol = 1e-6;
};

struct RankEstimate {
  Index k_hat = 0;
  Index r_subsample = 0;
  Index m = 0;
  bool refined = false;
  std::vector<std::pair<Index, double>> error_curve;  // (rank, relative error) on the subsample
};

/// max(100, n / 100) capped at 500 and at n.
Index default_subsample_size(Index n);

/// round-half-up of r * n / m.
Index rescale_rank(Index r, Index n, Index m);

/// Relative errors ||K - K_nys(order[0..r))|| / ||K|| for r = 1, 2, ...,
/// computed by rank-one Schur complement updates of a dense PSD K. Stops
/// after the first error below `stop_below` (pass 0 for the full curve).
std::vector<double> nystrom_error_curve(const Eigen::MatrixXd& K, std::span<const Index> order, double stop_below,
                                        MatrixNorm norm = MatrixNorm::Spectral, double power_tol = 1e-6);

RankEstimate estimate_rank(const KernelSpec& spec, const PointSet& ps, Index m, std::uint64_t rng_seed,
                           const RankEstimateOptions& options = {});

enum class PreconditionerKind { AFN, Nystrom };

const char* to_string(PreconditionerKind kind);

struct StrategyOverrides {
  Index threshold = kDefaultAfnThreshold;
  Index landmark_cap = kDefaultLandmarkCap;
};

struct StrategyChoice {
  PreconditionerKind chosen = PreconditionerKind::Nystrom;
  Index k_used = 0;
  RankEstimate estimate;
  Index threshold = kDefaultAfnThreshold;
};

/// AFN with min(cap, k_hat) landmarks iff k_hat >= threshold, otherwise
/// FPS-Nystrom with k_hat landmarks.
StrategyChoice strategy_for_rank(Index k_hat, const StrategyOverrides& overrides = {});

StrategyChoice choose_preconditioner(const KernelSpec& spec, const PointSet& ps, Index m, std::uint64_t rng_seed,
                                     const StrategyOverrides& overrides = {},
                                     const RankEstimateOptions& options = {});

}  // namespace kpc
