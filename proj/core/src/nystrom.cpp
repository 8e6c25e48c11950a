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

#include <numeric>
#include <string>

#include <Eigen/QR>

#include "kpc/errors.hpp"
#include "kpc/precond.hpp"

namespace kpc {

namespace {

std::vector<Index> complement(Index n, std::span<const Index> ids) {
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (Index id : ids) taken[static_cast<std::size_t>(id)] = 1;
  std::vector<Index> rest;
  rest.reserve(static_cast<std::size_t>(n) - ids.size());
  for (Index i = 0; i < n; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  return rest;
}

}  // namespace

NystromPreconditioner build_nystrom(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& sel,
                                    const JitterPolicy& jitter) {
  spec.validate();
  const Index n = ps.size();
  const Index k = sel.size();
  if (k < 1 || k > n) throw ArgumentError("build_nystrom: landmark count out of range");
  if (k > kDenseEigenLimit) {
    throw SizeError("build_nystrom: rank " + std::to_string(k) + " exceeds the dense eigen limit");
  }

  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  const Eigen::MatrixXd C = kernel_matrix(spec, ps, all, sel.indices);  // n x k
  Eigen::MatrixXd W(k, k);
  for (Index a = 0; a < k; ++a) W.row(a) = C.row(sel.indices[static_cast<std::size_t>(a)]);

  const CholeskyFactor chol = cholesky(W, jitter);
  // B = C L^{-T}, so K_nys = B B^T.
  const Eigen::MatrixXd B = chol.L.triangularView<Eigen::Lower>().solve(C.transpose()).transpose();

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const SymmetricEigen eig = sym_eig(R * R.transpose());

  NystromPreconditioner P;
  P.U = Q * eig.vectors;
  P.eigenvalues = eig.values.cwiseMax(0.0);
  P.mu = spec.mu;
  P.lambda_k = P.eigenvalues[k - 1];
  P.landmark_method = sel.method;
  P.landmarks = sel.indices;
  P.jitter = chol.jitter_applied;
  return P;
}

Eigen::VectorXd apply_nystrom_inv(const NystromPreconditioner& P, const Eigen::VectorXd& r) {
  return apply_nystrom_inv(P, r, P.form);
}

Eigen::VectorXd apply_nystrom_inv(const NystromPreconditioner& P, const Eigen::VectorXd& r,
                                  NystromApplyForm form) {
  if (r.size() != P.U.rows()) throw ArgumentError("apply_nystrom_inv: dimension mismatch");
  const Eigen::VectorXd t = P.U.transpose() * r;
  const Eigen::VectorXd shifted = (P.eigenvalues.array() + P.mu).matrix();
  if (form == NystromApplyForm::Scaled) {
    const Eigen::VectorXd scaled = ((P.lambda_k + P.mu) * t.array() / shifted.array()).matrix();
    return r - P.U * t + P.U * scaled;
  }
  if (!(P.mu > 0.0)) throw ArgumentError("apply_nystrom_inv: the plain form needs mu > 0");
  const Eigen::VectorXd inner = (t.array() / shifted.array()).matrix();
  return (r - P.U * t) / P.mu + P.U * inner;
}

double nystrom_error(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& sel,
                     const NystromErrorOptions& options) {
  spec.validate();
  if (sel.size() < 1) throw ArgumentError("nystrom_error: empty selection");
  const std::vector<Index> rest = complement(ps.size(), sel.indices);
  if (rest.empty()) return 0.0;

  const CholeskyFactor chol = cholesky(kernel_matrix(spec, ps, sel.indices, sel.indices));
  const Eigen::MatrixXd V =
      chol.L.triangularView<Eigen::Lower>().solve(kernel_matrix(spec, ps, sel.indices, rest));
  Eigen::MatrixXd E = kernel_matrix(spec, ps, rest, rest);
  E.noalias() -= V.transpose() * V;

  double err = 0.0;
  if (options.norm == MatrixNorm::Frobenius) {
    err = E.norm();
  } else {
    err = symmetric_spectral_norm(E, options.power_tol);
  }
  if (!options.relative) return err;

  const Eigen::MatrixXd K = kernel_matrix(spec, ps);
  const double knorm = options.norm == MatrixNorm::Frobenius ? K.norm() : symmetric_spectral_norm(K, options.power_tol);
  return knorm > 0.0 ? err / knorm : 0.0;
}

}  // namespace kpc
