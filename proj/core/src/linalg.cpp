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

#include "kpc/linalg.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "kpc/errors.hpp"

namespace kpc {

namespace {

// Index of the first non-positive pivot of an unblocked Cholesky, or -1.
Index first_bad_pivot(const Eigen::MatrixXd& A) {
  const Index k = A.rows();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    const double d = A(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return j;
    L(j, j) = std::sqrt(d);
    if (j + 1 < k) {
      L.col(j).tail(k - j - 1) =
          (A.col(j).tail(k - j - 1) - L.bottomLeftCorner(k - j - 1, j) * L.row(j).head(j).transpose()) /
          L(j, j);
    }
  }
  return -1;
}

}  // namespace

CholeskyFactor cholesky(const Eigen::MatrixXd& A, const JitterPolicy& policy) {
  if (A.rows() != A.cols()) throw ArgumentError("cholesky: matrix must be square");
  const Index k = A.rows();
  if (k == 0) return {};

  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  const double mean_diag = sym.trace() / static_cast<double>(k);
  const double base = policy.initial_relative * (mean_diag > 0.0 ? mean_diag : 1.0);

  double jitter = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (int attempt = 0; attempt <= policy.max_escalations; ++attempt) {
    if (attempt > 0) jitter = base * std::pow(policy.growth, attempt - 1);
    Eigen::MatrixXd shifted = sym;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0) {
      CholeskyFactor out;
      out.L = llt.matrixL();
      out.jitter_applied = jitter;
      return out;
    }
  }
  Eigen::MatrixXd shifted = sym;
  shifted.diagonal().array() += jitter;
  const Index pivot = first_bad_pivot(shifted);
  throw FactorizationError("Cholesky breakdown after jitter " + std::to_string(jitter), pivot < 0 ? 0 : pivot);
}

Eigen::VectorXd tri_solve(const CholeskyFactor& factor, const Eigen::VectorXd& b, TriangularMode mode) {
  if (b.size() != factor.size()) throw ArgumentError("tri_solve: dimension mismatch");
  if (mode == TriangularMode::Lower) return factor.L.triangularView<Eigen::Lower>().solve(b);
  return factor.L.transpose().triangularView<Eigen::Upper>().solve(b);
}

Eigen::VectorXd cholesky_solve(const CholeskyFactor& factor, const Eigen::VectorXd& b) {
  return tri_solve(factor, tri_solve(factor, b, TriangularMode::Lower), TriangularMode::Upper);
}

SymmetricEigen sym_eig(const Eigen::MatrixXd& A, Index dense_limit) {
  if (A.rows() != A.cols()) throw ArgumentError("sym_eig: matrix must be square");
  if (A.rows() > dense_limit) {
    throw SizeError("sym_eig: k = " + std::to_string(A.rows()) + " exceeds the dense limit " +
                    std::to_string(dense_limit));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) throw NumericError("sym_eig: eigensolver did not converge");
  SymmetricEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& A, Index dense_limit) {
  if (A.rows() != A.cols()) throw ArgumentError("sym_eigenvalues: matrix must be square");
  if (A.rows() > dense_limit) throw SizeError("sym_eigenvalues: matrix exceeds the dense limit");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("sym_eigenvalues: eigensolver did not converge");
  return solver.eigenvalues().reverse();
}

double power_iteration_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, Index n,
                            double rel_tol, int max_iter, const Eigen::VectorXd* start,
                            Eigen::VectorXd* final_vector) {
  if (n == 0) return 0.0;
  Eigen::VectorXd v(n);
  if (start != nullptr && start->size() == n && start->norm() > 0.0) {
    v = *start;
  } else {
    // Fixed, non-symmetric start so results are reproducible.
    for (Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i) + 1.0);
  }
  v.normalize();

  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = apply(v);
    const double next = w.norm();
    if (next == 0.0) {
      estimate = 0.0;
      break;
    }
    v = w / next;
    const bool done = std::abs(next - estimate) <= rel_tol * next;
    estimate = next;
    if (done) break;
  }
  if (final_vector != nullptr) *final_vector = v;
  return estimate;
}

double symmetric_spectral_norm(const Eigen::MatrixXd& A, double rel_tol) {
  return power_iteration_norm([&A](const Eigen::VectorXd& v) -> Eigen::VectorXd { return A * v; }, A.rows(),
                              rel_tol);
}

SparseLowerTriangular::SparseLowerTriangular(Index dim, std::vector<Index> row_ptr, std::vector<Index> cols,
                                             std::vector<double> values)
    : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
  if (dim_ < 0 || static_cast<Index>(row_ptr_.size()) != dim_ + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != static_cast<Index>(cols_.size()) || cols_.size() != values_.size()) {
    throw ArgumentError("SparseLowerTriangular: inconsistent storage");
  }
  for (Index i = 0; i < dim_; ++i) {
    const Index begin = row_ptr_[static_cast<std::size_t>(i)];
    const Index end = row_ptr_[static_cast<std::size_t>(i) + 1];
    if (end <= begin) throw ArgumentError("SparseLowerTriangular: row " + std::to_string(i) + " is empty");
    for (Index t = begin; t < end; ++t) {
      const Index c = cols_[static_cast<std::size_t>(t)];
      if (c < 0 || c > i) throw ArgumentError("SparseLowerTriangular: entry above the diagonal");
      if (t > begin && c <= cols_[static_cast<std::size_t>(t - 1)]) {
        throw ArgumentError("SparseLowerTriangular: columns not strictly increasing");
      }
    }
    if (cols_[static_cast<std::size_t>(end - 1)] != i || !(values_[static_cast<std::size_t>(end - 1)] > 0.0)) {
      throw ArgumentError("SparseLowerTriangular: row " + std::to_string(i) + " lacks a positive diagonal");
    }
  }
}

Eigen::MatrixXd SparseLowerTriangular::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim_, dim_);
  for (Index i = 0; i < dim_; ++i) {
    for (Index t = row_ptr_[static_cast<std::size_t>(i)]; t < row_ptr_[static_cast<std::size_t>(i) + 1]; ++t) {
      dense(i, cols_[static_cast<std::size_t>(t)]) = values_[static_cast<std::size_t>(t)];
    }
  }
  return dense;
}

Eigen::VectorXd sparse_tri_apply(const SparseLowerTriangular& G, const Eigen::VectorXd& v, bool transpose) {
  if (v.size() != G.dim()) throw ArgumentError("sparse_tri_apply: dimension mismatch");
  const auto& ptr = G.row_ptr();
  const auto& cols = G.cols();
  const auto& vals = G.values();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(G.dim());
  if (!transpose) {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < G.dim(); ++i) {
      double acc = 0.0;
      for (Index t = ptr[static_cast<std::size_t>(i)]; t < ptr[static_cast<std::size_t>(i) + 1]; ++t) {
        acc += vals[static_cast<std::size_t>(t)] * v[cols[static_cast<std::size_t>(t)]];
      }
      out[i] = acc;
    }
  } else {
    for (Index i = 0; i < G.dim(); ++i) {
      const double vi = v[i];
      for (Index t = ptr[static_cast<std::size_t>(i)]; t < ptr[static_cast<std::size_t>(i) + 1]; ++t) {
        out[cols[static_cast<std::size_t>(t)]] += vals[static_cast<std::size_t>(t)] * vi;
      }
    }
  }
  return out;
}

PcgResult pcg(const LinearOperator& apply_A, const Eigen::VectorXd& b, const LinearOperator& apply_Minv,
              const PcgOptions& options) {
  if (!(options.tol > 0.0)) throw ArgumentError("pcg: tolerance must be positive");
  if (options.maxit < 0) throw ArgumentError("pcg: maxit must be >= 0");
  const auto start = std::chrono::steady_clock::now();

  PcgResult result;
  auto& report = result.report;
  const Index n = b.size();
  result.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.rel_residual_history.push_back(0.0);
    report.converged = true;
    return result;
  }

  auto precondition = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return apply_Minv ? apply_Minv(r) : r;
  };

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precondition(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  report.rel_residual_history.push_back(1.0);

  for (Index it = 1; it <= options.maxit; ++it) {
    const Eigen::VectorXd Ap = apply_A(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0) || !std::isfinite(pAp)) {
      throw NumericError("pcg: breakdown (p^T A p = " + std::to_string(pAp) + ") at iteration " +
                         std::to_string(it));
    }
    const double alpha = rz / pAp;
    result.x += alpha * p;
    r -= alpha * Ap;

    const double rel = (b - apply_A(result.x)).norm() / bnorm;
    report.rel_residual_history.push_back(rel);
    report.iterations = it;
    if (options.on_iterate) options.on_iterate(it, result.x);
    if (rel <= options.tol) {
      report.converged = true;
      break;
    }

    z = precondition(r);
    const double rz_next = r.dot(z);
    if (!(rz_next > 0.0) || !std::isfinite(rz_next)) {
      throw NumericError("pcg: preconditioner breakdown (r^T z = " + std::to_string(rz_next) +
                         ") at iteration " + std::to_string(it));
    }
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  report.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace kpc
