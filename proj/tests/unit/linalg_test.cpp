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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kpc/errors.hpp"
#include "kpc/linalg.hpp"
#include "support/oracles.hpp"

namespace kpc {
namespace {

Eigen::VectorXd random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

LinearOperator dense_op(const Eigen::MatrixXd& A) {
  return [A](const Eigen::VectorXd& v) { return Eigen::VectorXd(A * v); };
}

const LinearOperator kIdentity = [](const Eigen::VectorXd& v) { return v; };

SparseLowerTriangular from_dense_lower(const Eigen::MatrixXd& L) {
  std::vector<Index> ptr{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < L.rows(); ++i) {
    for (Index j = 0; j <= i; ++j) {
      if (L(i, j) != 0.0 || j == i) {
        cols.push_back(j);
        vals.push_back(L(i, j));
      }
    }
    ptr.push_back(static_cast<Index>(cols.size()));
  }
  return SparseLowerTriangular(L.rows(), ptr, cols, vals);
}

TEST(Cholesky, IdentityAndHandExample) {
  const CholeskyFactor I = cholesky(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_EQ(I.L, Eigen::MatrixXd::Identity(4, 4));
  EXPECT_EQ(I.jitter_applied, 0.0);
  Eigen::MatrixXd A(2, 2);
  A << 4, 2, 2, 5;
  const CholeskyFactor f = cholesky(A);
  Eigen::MatrixXd L(2, 2);
  L << 2, 0, 1, 2;
  EXPECT_LE((f.L - L).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(f.jitter_applied, 0.0);
}

TEST(Cholesky, ZeroMatrixNeedsJitter) {
  const CholeskyFactor f = cholesky(Eigen::MatrixXd::Zero(3, 3));
  EXPECT_GT(f.jitter_applied, 0.0);
  EXPECT_LE((f.L - std::sqrt(f.jitter_applied) * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-22);
}

TEST(Cholesky, IndefiniteMatrixFails) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  A(2, 2) = -1.0;
  try {
    cholesky(A);
    FAIL() << "expected a factorization error";
  } catch (const FactorizationError& e) {
    EXPECT_EQ(e.pivot(), 2);
  }
  EXPECT_THROW(cholesky(Eigen::MatrixXd::Zero(2, 3)), ArgumentError);
}

TEST(Cholesky, ReconstructsRandomSpd) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 5 + static_cast<Index>(rng() % 80);
    const Eigen::MatrixXd A = testing::random_spd(m, 1e6, rng);
    const CholeskyFactor f = cholesky(A);
    EXPECT_TRUE((f.L.diagonal().array() > 0.0).all());
    EXPECT_TRUE(f.L.isLowerTriangular());
    EXPECT_LE((f.L * f.L.transpose() - A).norm(), 1e-10 * A.norm());
  }
}

TEST(TriSolve, Examples) {
  const CholeskyFactor I = cholesky(Eigen::MatrixXd::Identity(3, 3));
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0);
  EXPECT_EQ(tri_solve(I, b, TriangularMode::Lower), b);
  EXPECT_EQ(tri_solve(I, b, TriangularMode::Upper), b);
  Eigen::MatrixXd A(2, 2);
  A << 4, 2, 2, 5;
  const CholeskyFactor f = cholesky(A);
  const Eigen::VectorXd y = tri_solve(f, Eigen::Vector2d(2.0, 3.0), TriangularMode::Lower);
  EXPECT_NEAR(y[0], 1.0, 1e-15);
  EXPECT_NEAR(y[1], 1.0, 1e-15);
  EXPECT_THROW(tri_solve(f, b, TriangularMode::Lower), ArgumentError);
}

TEST(TriSolve, RoundTrip) {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd A = testing::random_spd(40, 100.0, rng);
  const CholeskyFactor f = cholesky(A);
  const Eigen::VectorXd x = random_vector(40, rng);
  const Eigen::VectorXd b = f.L * (f.L.transpose() * x);
  EXPECT_LE((cholesky_solve(f, b) - x).norm(), 1e-12 * x.norm());
}

TEST(SymEig, Examples) {
  const SymmetricEigen d = sym_eig(Eigen::Vector2d(1.0, 3.0).asDiagonal().toDenseMatrix());
  EXPECT_NEAR(d.values[0], 3.0, 1e-15);
  EXPECT_NEAR(d.values[1], 1.0, 1e-15);
  EXPECT_NEAR(std::abs(d.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(d.vectors(0, 1)), 1.0, 1e-15);
  const Eigen::Vector3d v(1.0, 2.0, 2.0);
  const SymmetricEigen r = sym_eig(v * v.transpose());
  EXPECT_NEAR(r.values[0], 9.0, 1e-13);
  EXPECT_LE(r.values.tail(2).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(sym_eig(Eigen::MatrixXd::Identity(3, 3), 2), SizeError);
  EXPECT_THROW(sym_eigenvalues(Eigen::MatrixXd::Identity(3, 3), 2), SizeError);
}

TEST(SymEig, ReconstructsRandomSpd) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const Index m = 10 + static_cast<Index>(rng() % 90);
    const Eigen::MatrixXd A = testing::random_spd(m, 1e3, rng);
    const SymmetricEigen e = sym_eig(A);
    for (Index i = 1; i < m; ++i) EXPECT_LE(e.values[i], e.values[i - 1]);
    const double norm = testing::dense_norm2(A);
    EXPECT_LE((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - A).norm(), 1e-9 * norm);
    EXPECT_LE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(m, m)).norm(), 1e-10);
    EXPECT_LE((sym_eigenvalues(A) - e.values).cwiseAbs().maxCoeff(), 1e-10 * norm);
  }
}

TEST(SpectralNorm, MatchesDenseEigenvalues) {
  std::mt19937_64 rng(14);
  const Eigen::MatrixXd B = testing::random_spd(60, 50.0, rng);
  const Eigen::VectorXd v = random_vector(60, rng).normalized();
  const Eigen::MatrixXd A = B + 100.0 * v * v.transpose();
  const double ref = testing::dense_norm2(A);
  const double got = symmetric_spectral_norm(A, 1e-10);
  EXPECT_NEAR(got, ref, 1e-6 * ref);
  EXPECT_LE(got, ref * (1.0 + 1e-12));
  EXPECT_LE(symmetric_spectral_norm(B), testing::dense_norm2(B) * (1.0 + 1e-12));
  EXPECT_EQ(symmetric_spectral_norm(Eigen::MatrixXd::Zero(4, 4)), 0.0);
}

TEST(SparseLowerTriangular, RejectsBadStorage) {
  EXPECT_THROW(SparseLowerTriangular(2, {0, 1, 2}, {0, 0}, {1.0, 1.0}), ArgumentError);
  EXPECT_THROW(SparseLowerTriangular(2, {0, 1, 3}, {0, 1, 0}, {1.0, 1.0, 1.0}), ArgumentError);
  EXPECT_THROW(SparseLowerTriangular(2, {0, 1, 3}, {1, 0, 1}, {1.0, 1.0, 1.0}), ArgumentError);
  EXPECT_THROW(SparseLowerTriangular(1, {0, 1}, {0}, {-1.0}), ArgumentError);
  EXPECT_NO_THROW(SparseLowerTriangular(2, {0, 1, 3}, {0, 0, 1}, {1.0, 0.5, 2.0}));
}

TEST(SparseTriApply, DiagonalScales) {
  const SparseLowerTriangular G(3, {0, 1, 2, 3}, {0, 1, 2}, {2.0, 3.0, 4.0});
  const Eigen::Vector3d v(1.0, 1.0, 2.0);
  EXPECT_EQ(sparse_tri_apply(G, v, false), Eigen::Vector3d(2.0, 3.0, 8.0));
  EXPECT_EQ(sparse_tri_apply(G, v, true), Eigen::Vector3d(2.0, 3.0, 8.0));
  EXPECT_THROW(sparse_tri_apply(G, Eigen::Vector2d(1.0, 1.0), false), ArgumentError);
}

TEST(SparseTriApply, DenseOracleAndAdjoint) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 3 + static_cast<Index>(rng() % 60);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < i; ++j) {
        if (rng() % 3 == 0) L(i, j) = u(rng);
      }
      L(i, i) = 1.0 + std::abs(u(rng));
    }
    const SparseLowerTriangular G = from_dense_lower(L);
    EXPECT_EQ(G.to_dense(), L);
    for (Index i = 0; i < m; ++i) EXPECT_EQ(G.diagonal(i), L(i, i));
    const Eigen::VectorXd v = random_vector(m, rng);
    const Eigen::VectorXd w = random_vector(m, rng);
    EXPECT_LE((sparse_tri_apply(G, v, false) - L * v).norm(), 1e-13 * (L * v).norm());
    EXPECT_LE((sparse_tri_apply(G, v, true) - L.transpose() * v).norm(), 1e-13 * (L.transpose() * v).norm());
    const double lhs = sparse_tri_apply(G, v, false).dot(w);
    const double rhs = v.dot(sparse_tri_apply(G, w, true));
    EXPECT_NEAR(lhs, rhs, 1e-13 * (std::abs(lhs) + 1.0));
  }
}

TEST(Pcg, IdentityConvergesInOneIteration) {
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(7, -1.0, 2.0);
  const PcgResult r = pcg(dense_op(Eigen::MatrixXd::Identity(7, 7)), b, kIdentity);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
  EXPECT_LE((r.x - b).norm(), 1e-15);
}

TEST(Pcg, ExactPreconditionerConvergesInOneIteration) {
  std::mt19937_64 rng(16);
  const Eigen::MatrixXd A = testing::random_spd(50, 1e5, rng);
  const Eigen::MatrixXd Ainv = A.inverse();
  PcgOptions opt;
  opt.tol = 1e-8;
  const PcgResult r = pcg(dense_op(A), random_vector(50, rng), dense_op(Ainv), opt);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
}

TEST(Pcg, FiniteTerminationOnTenEigenvalues) {
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(10, 1.0, 10.0);
  PcgOptions opt;
  opt.tol = 1e-10;
  const PcgResult r = pcg(dense_op(d.asDiagonal().toDenseMatrix()), Eigen::VectorXd::Ones(10), kIdentity, opt);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, 10);
  EXPECT_LE((r.x - d.cwiseInverse()).norm(), 1e-9);
}

TEST(Pcg, ReportInvariants) {
  std::mt19937_64 rng(17);
  const Eigen::MatrixXd A = testing::random_spd(80, 1e4, rng);
  const Eigen::VectorXd b = random_vector(80, rng);
  for (Index maxit : {0, 3, 500}) {
    PcgOptions opt;
    opt.tol = 1e-6;
    opt.maxit = maxit;
    const PcgResult r = pcg(dense_op(A), b, kIdentity, opt);
    ASSERT_FALSE(r.report.rel_residual_history.empty());
    EXPECT_EQ(static_cast<Index>(r.report.rel_residual_history.size()), r.report.iterations + 1);
    EXPECT_LE(r.report.iterations, maxit);
    EXPECT_EQ(r.report.final_residual() <= opt.tol, r.report.converged);
    EXPECT_NEAR(r.report.final_residual(), (b - A * r.x).norm() / b.norm(), 1e-12);
  }
  const PcgResult zero = pcg(dense_op(A), Eigen::VectorXd::Zero(80), kIdentity);
  EXPECT_TRUE(zero.report.converged);
  EXPECT_EQ(zero.report.iterations, 0);
  PcgOptions bad;
  bad.tol = 0.0;
  EXPECT_THROW(pcg(dense_op(A), b, kIdentity, bad), ArgumentError);
}

TEST(Pcg, EnergyErrorIsMonotone) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 5; ++trial) {
    const Index m = 60;
    const Eigen::MatrixXd A = testing::random_spd(m, 1e4, rng);
    const Eigen::VectorXd x_true = random_vector(m, rng);
    const Eigen::VectorXd b = A * x_true;
    const Eigen::VectorXd dinv = A.diagonal().cwiseInverse();
    std::vector<double> errors;
    PcgOptions opt;
    opt.tol = 1e-12;
    opt.maxit = 200;
    opt.on_iterate = [&](Index, const Eigen::VectorXd& x) {
      const Eigen::VectorXd e = x - x_true;
      errors.push_back(std::sqrt(e.dot(A * e)));
    };
    const LinearOperator jacobi = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(dinv.cwiseProduct(v)); };
    pcg(dense_op(A), b, jacobi, opt);
    ASSERT_FALSE(errors.empty());
    const double e0 = std::sqrt(x_true.dot(A * x_true));
    EXPECT_LE(errors.front(), e0 * (1.0 + 1e-12));
    for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_LE(errors[i], errors[i - 1] * (1.0 + 1e-10) + 1e-12 * e0);
  }
}

TEST(Pcg, IndefiniteOperatorBreaksDown) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  A(1, 1) = -1.0;
  EXPECT_THROW(pcg(dense_op(A), Eigen::Vector2d(0.0, 1.0), kIdentity), NumericError);
}

}  // namespace
}  // namespace kpc
