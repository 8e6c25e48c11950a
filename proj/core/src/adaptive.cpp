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

#include "kpc/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpc/errors.hpp"
#include "kpc/linalg.hpp"

namespace kpc {

Index default_subsample_size(Index n) { return std::min({std::max<Index>(100, n / 100), Index{500}, n}); }

Index rescale_rank(Index r, Index n, Index m) { return (2 * r * n + m) / (2 * m); }

std::vector<double> nystrom_error_curve(const Eigen::MatrixXd& K, std::span<const Index> order, double stop_below,
                                        MatrixNorm norm, double power_tol) {
  const Index m = K.rows();
  auto measure = [&](const Eigen::MatrixXd& A, const Eigen::VectorXd* start, Eigen::VectorXd* vec) {
    if (norm == MatrixNorm::Frobenius) return A.norm();
    return power_iteration_norm([&A](const Eigen::VectorXd& v) -> Eigen::VectorXd { return A * v; }, A.rows(),
                                power_tol, 1000, start, vec);
  };
  const double knorm = measure(K, nullptr, nullptr);
  // Pivots below this are already reproduced by the previous landmarks.
  const double negligible = 1e-14 * std::max(K.diagonal().maxCoeff(), 0.0);

  std::vector<double> curve;
  if (!(knorm > 0.0)) return curve;
  Eigen::MatrixXd E = K;
  Eigen::VectorXd warm;
  for (Index p : order) {
    if (p < 0 || p >= m) throw ArgumentError("nystrom_error_curve: landmark out of range");
    const double pivot = E(p, p);
    if (pivot > negligible) {
      const Eigen::VectorXd c = E.col(p);
      E.noalias() -= (c / pivot) * c.transpose();
    }
    E.row(p).setZero();
    E.col(p).setZero();
    Eigen::VectorXd next;
    const double err = measure(E, warm.size() == m ? &warm : nullptr, &next) / knorm;
    warm = next;
    curve.push_back(err);
    if (err < stop_below) break;
  }
  return curve;
}

RankEstimate estimate_rank(const KernelSpec& spec, const PointSet& ps, Index m, std::uint64_t rng_seed,
                           const RankEstimateOptions& options) {
  spec.validate();
  const Index n = ps.size();
  if (m < 2 || m > n) {
    throw ArgumentError("estimate_rank: subsample size m = " + std::to_string(m) + " outside [2, n]");
  }

  const LandmarkSelection sample = uniform_sample(ps, m, rng_seed);
  const PointSet subset = ps.subset(sample.indices);
  const double scale = std::pow(static_cast<double>(m) / static_cast<double>(n), 1.0 / static_cast<double>(ps.dim()));
  const PointSet scaled = subset.scaled(scale);

  const LandmarkSelection order = fps_sample(scaled, m, centroid_seed(scaled));
  const std::vector<double> curve =
      nystrom_error_curve(kernel_matrix(spec, scaled), order.indices, options.error_tol, options.norm, options.power_tol);

  RankEstimate est;
  est.m = m;
  for (std::size_t t = 0; t < curve.size(); ++t) est.error_curve.emplace_back(static_cast<Index>(t) + 1, curve[t]);
  const bool reached = !curve.empty() && curve.back() < options.error_tol;
  est.r_subsample = reached ? static_cast<Index>(curve.size()) : m;
  est.k_hat = reached ? rescale_rank(est.r_subsample, n, m) : n;

  if (est.k_hat < options.refine_below) {
    const Eigen::VectorXd eig = sym_eigenvalues(kernel_matrix(spec, subset));
    const auto count = static_cast<Index>((eig.array() > options.eigen_threshold).count());
    est.k_hat = std::max<Index>(count, 1);
    est.refined = true;
  }
  return est;
}

const char* to_string(PreconditionerKind kind) { return kind == PreconditionerKind::AFN ? "afn" : "nystrom"; }

StrategyChoice strategy_for_rank(Index k_hat, const StrategyOverrides& overrides) {
  StrategyChoice choice;
  choice.threshold = overrides.threshold;
  choice.estimate.k_hat = k_hat;
  if (k_hat >= overrides.threshold) {
    choice.chosen = PreconditionerKind::AFN;
    choice.k_used = std::min(overrides.landmark_cap, k_hat);
  } else {
    choice.chosen = PreconditionerKind::Nystrom;
    choice.k_used = k_hat;
  }
  return choice;
}

StrategyChoice choose_preconditioner(const KernelSpec& spec, const PointSet& ps, Index m, std::uint64_t rng_seed,
                                     const StrategyOverrides& overrides, const RankEstimateOptions& options) {
  RankEstimateOptions opts = options;
  opts.refine_below = overrides.threshold;
  RankEstimate est = estimate_rank(spec, ps, m, rng_seed, opts);
  StrategyChoice choice = strategy_for_rank(est.k_hat, overrides);
  choice.estimate = std::move(est);
  return choice;
}

}  // namespace kpc
