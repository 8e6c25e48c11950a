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

#include <string>

#include "kpc/errors.hpp"
#include "kpc/precond.hpp"

namespace kpc {

AfnFactors build_afn(const KernelSpec& spec, const PointSet& ps, Index k, Index w, const AfnOptions& options) {
  if (k < 1 || k >= ps.size()) {
    throw ArgumentError("build_afn: need 1 <= k < n, got k = " + std::to_string(k));
  }
  if (k > options.landmark_cap) {
    throw ArgumentError("build_afn: k = " + std::to_string(k) + " exceeds the landmark cap " +
                        std::to_string(options.landmark_cap));
  }
  const LandmarkSelection sel = ps.dim() > options.fps_dim_limit
                                    ? uniform_sample(ps, k, options.sample_seed)
                                    : fps_sample(ps, k, options.fps_seed.value_or(centroid_seed(ps)));
  return build_afn(spec, ps, sel, w, options);
}

AfnFactors build_afn(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& landmarks, Index w,
                     const AfnOptions& options) {
  spec.validate();
  const Index n = ps.size();
  const Index k = landmarks.size();
  if (k < 1 || k >= n) throw ArgumentError("build_afn: need 1 <= k < n");
  if (k > options.landmark_cap) throw ArgumentError("build_afn: landmark count exceeds the cap");
  if (w < 1) throw ArgumentError("build_afn: w must be >= 1");

  AfnFactors F;
  F.landmarks = landmarks;
  F.w = w;
  F.mu = spec.mu;

  std::vector<char> is_landmark(static_cast<std::size_t>(n), 0);
  for (Index id : landmarks.indices) {
    if (id < 0 || id >= n || is_landmark[static_cast<std::size_t>(id)]) {
      throw ArgumentError("build_afn: landmark ids must be distinct and in range");
    }
    is_landmark[static_cast<std::size_t>(id)] = 1;
  }
  std::vector<Index> rest;
  rest.reserve(static_cast<std::size_t>(n - k));
  for (Index i = 0; i < n; ++i) {
    if (!is_landmark[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  F.ordering = landmarks.indices;
  F.ordering.insert(F.ordering.end(), rest.begin(), rest.end());

  Eigen::MatrixXd K11 = kernel_matrix(spec, ps, landmarks.indices, landmarks.indices);
  K11.diagonal().array() += spec.mu;
  F.L = cholesky(K11, options.jitter);
  F.K12 = assemble_block(spec, ps, landmarks.indices, rest);

  const SchurOracle schur(spec, ps, landmarks.indices, rest, F.L, options.schur_memory_budget, 2 * w);
  const SparsityPattern pattern = knn_pattern(ps, rest, w);
  F.G = build_fsai(schur, pattern, options.jitter);
  return F;
}

Eigen::VectorXd apply_afn_inv(const AfnFactors& F, const Eigen::VectorXd& r) {
  const Index n = F.size();
  const Index k = F.k();
  if (r.size() != n) throw ArgumentError("apply_afn_inv: dimension mismatch");

  Eigen::VectorXd r1(k);
  Eigen::VectorXd r2(n - k);
  for (Index i = 0; i < k; ++i) r1[i] = r[F.ordering[static_cast<std::size_t>(i)]];
  for (Index i = k; i < n; ++i) r2[i - k] = r[F.ordering[static_cast<std::size_t>(i)]];

  const Eigen::MatrixXd& K12 = F.K12.values;
  const Eigen::VectorXd t = cholesky_solve(F.L, r1);
  const Eigen::VectorXd s2 = apply_fsai_inv(F.G, r2 - K12.transpose() * t);
  const Eigen::VectorXd s1 = cholesky_solve(F.L, r1 - K12 * s2);

  Eigen::VectorXd s(n);
  for (Index i = 0; i < k; ++i) s[F.ordering[static_cast<std::size_t>(i)]] = s1[i];
  for (Index i = k; i < n; ++i) s[F.ordering[static_cast<std::size_t>(i)]] = s2[i - k];
  return s;
}

}  // namespace kpc
