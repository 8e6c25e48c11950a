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

#include <array>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "kpc/errors.hpp"
#include "kpc/precond.hpp"

namespace kpc {

Eigen::MatrixXd DenseSpdSource::block(std::span<const Index> idx) const {
  const auto m = static_cast<Index>(idx.size());
  Eigen::MatrixXd out(m, m);
  for (Index b = 0; b < m; ++b) {
    for (Index a = 0; a < m; ++a) out(a, b) = A_(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return out;
}

RegularizedKernelSource::RegularizedKernelSource(KernelSpec spec, const PointSet& ps, std::vector<Index> ordering)
    : spec_(spec), ps_(&ps), ordering_(std::move(ordering)) {}

Eigen::MatrixXd RegularizedKernelSource::block(std::span<const Index> idx) const {
  std::vector<Index> ids(idx.size());
  for (std::size_t t = 0; t < idx.size(); ++t) ids[t] = ordering_[static_cast<std::size_t>(idx[t])];
  Eigen::MatrixXd out = kernel_matrix(spec_, *ps_, ids, ids);
  out.diagonal().array() += spec_.mu;
  return out;
}

SchurOracle::SchurOracle(KernelSpec spec, const PointSet& ps, std::vector<Index> landmarks,
                         std::vector<Index> others, const CholeskyFactor& landmark_factor,
                         std::size_t memory_budget_bytes, Index cache_columns)
    : spec_(spec),
      ps_(&ps),
      landmarks_(std::move(landmarks)),
      others_(std::move(others)),
      factor_(&landmark_factor),
      cache_capacity_(std::max<Index>(cache_columns, 1)) {
  if (factor_->size() != static_cast<Index>(landmarks_.size())) {
    throw ArgumentError("SchurOracle: factor size does not match the landmark count");
  }
  const std::size_t bytes = landmarks_.size() * others_.size() * sizeof(double);
  if (bytes <= memory_budget_bytes) {
    V_ = factor_->L.triangularView<Eigen::Lower>().solve(kernel_matrix(spec_, ps, landmarks_, others_));
  }
}

Eigen::VectorXd SchurOracle::compute_column(Index a) const {
  const std::array<Index, 1> col{others_[static_cast<std::size_t>(a)]};
  const Eigen::VectorXd k12 = kernel_matrix(spec_, *ps_, landmarks_, col).col(0);
  return factor_->L.triangularView<Eigen::Lower>().solve(k12);
}

Eigen::VectorXd SchurOracle::column(Index a) const {
  if (V_) return V_->col(a);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto hit = lookup_.find(a);
    if (hit != lookup_.end()) {
      lru_.splice(lru_.begin(), lru_, hit->second);
      return hit->second->second;
    }
  }
  Eigen::VectorXd col = compute_column(a);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (lookup_.find(a) == lookup_.end()) {
    lru_.emplace_front(a, col);
    lookup_[a] = lru_.begin();
    while (static_cast<Index>(lru_.size()) > cache_capacity_) {
      lookup_.erase(lru_.back().first);
      lru_.pop_back();
    }
  }
  return col;
}

Eigen::MatrixXd SchurOracle::block(std::span<const Index> idx) const {
  const auto m = static_cast<Index>(idx.size());
  std::vector<Index> ids(idx.size());
  Eigen::MatrixXd VJ(static_cast<Index>(landmarks_.size()), m);
  for (Index t = 0; t < m; ++t) {
    const Index a = idx[static_cast<std::size_t>(t)];
    if (a < 0 || a >= size()) throw ArgumentError("SchurOracle: index out of range");
    ids[static_cast<std::size_t>(t)] = others_[static_cast<std::size_t>(a)];
    VJ.col(t) = column(a);
  }
  Eigen::MatrixXd S = kernel_matrix(spec_, *ps_, ids, ids);
  S.diagonal().array() += spec_.mu;
  S.noalias() -= VJ.transpose() * VJ;
  return S;
}

double SchurOracle::entry(Index a, Index b) const {
  const std::array<Index, 2> pair{a, b};
  if (a == b) return block(std::span<const Index>(pair.data(), 1))(0, 0);
  return block(pair)(0, 1);
}

Eigen::MatrixXd SchurOracle::dense() const {
  std::vector<Index> all(others_.size());
  std::iota(all.begin(), all.end(), Index{0});
  return block(all);
}

SparseLowerTriangular build_fsai(const SpdBlockSource& A, const SparsityPattern& pattern,
                                 const JitterPolicy& jitter) {
  const Index m = A.size();
  if (pattern.size() != m) throw ArgumentError("build_fsai: pattern size does not match the matrix");
  for (Index i = 0; i < m; ++i) {
    const auto& row = pattern.rows[static_cast<std::size_t>(i)];
    if (row.empty() || row.back() != i) {
      throw ArgumentError("build_fsai: row " + std::to_string(i) + " must end with its diagonal");
    }
    for (std::size_t t = 1; t < row.size(); ++t) {
      if (row[t - 1] >= row[t] || row[t - 1] < 0) {
        throw ArgumentError("build_fsai: row " + std::to_string(i) + " is not strictly increasing");
      }
    }
  }

  std::vector<Index> row_ptr(static_cast<std::size_t>(m) + 1, 0);
  for (Index i = 0; i < m; ++i) {
    row_ptr[static_cast<std::size_t>(i) + 1] =
        row_ptr[static_cast<std::size_t>(i)] + static_cast<Index>(pattern.rows[static_cast<std::size_t>(i)].size());
  }
  std::vector<Index> cols(static_cast<std::size_t>(row_ptr.back()));
  std::vector<double> values(cols.size());

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < m; ++i) {
    try {
      const auto& J = pattern.rows[static_cast<std::size_t>(i)];
      const auto len = static_cast<Index>(J.size());
      CholeskyFactor local;
      try {
        local = cholesky(A.block(J), jitter);
      } catch (const FactorizationError&) {
        throw FactorizationError("build_fsai: local matrix of row " + std::to_string(i) + " is not SPD", i);
      }
      // y / sqrt(y_i) with y = A_J^{-1} e_i reduces to L^{-T} e_i.
      Eigen::VectorXd g = Eigen::VectorXd::Zero(len);
      g[len - 1] = 1.0;
      local.L.triangularView<Eigen::Lower>().transpose().solveInPlace(g);
      const auto offset = static_cast<std::size_t>(row_ptr[static_cast<std::size_t>(i)]);
      for (Index t = 0; t < len; ++t) {
        cols[offset + static_cast<std::size_t>(t)] = J[static_cast<std::size_t>(t)];
        values[offset + static_cast<std::size_t>(t)] = g[t];
      }
    } catch (...) {
#pragma omp critical(kpc_fsai_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return SparseLowerTriangular(m, std::move(row_ptr), std::move(cols), std::move(values));
}

Eigen::VectorXd apply_fsai_inv(const SparseLowerTriangular& G, const Eigen::VectorXd& v) {
  return sparse_tri_apply(G, sparse_tri_apply(G, v, false), true);
}

SparseLowerTriangular build_fsai_plain(const KernelSpec& spec, const PointSet& ps, Index w,
                                       const JitterPolicy& jitter) {
  spec.validate();
  std::vector<Index> ordering(static_cast<std::size_t>(ps.size()));
  std::iota(ordering.begin(), ordering.end(), Index{0});
  const SparsityPattern pattern = knn_pattern(ps, ordering, w);
  const RegularizedKernelSource source(spec, ps, std::move(ordering));
  return build_fsai(source, pattern, jitter);
}

}  // namespace kpc
