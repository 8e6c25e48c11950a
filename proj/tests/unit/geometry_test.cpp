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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "kpc/errors.hpp"
#include "kpc/geometry.hpp"
#include "support/oracles.hpp"

namespace kpc {
namespace {

PointSet line(std::vector<double> xs) {
  Eigen::MatrixXd X(1, static_cast<Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) X(0, static_cast<Index>(i)) = xs[i];
  return PointSet(std::move(X));
}

std::vector<Index> prefix(const LandmarkSelection& sel, std::size_t j) {
  return {sel.indices.begin(), sel.indices.begin() + static_cast<std::ptrdiff_t>(j)};
}

TEST(PointSet, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(PointSet(Eigen::MatrixXd(2, 0)), ArgumentError);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2, 2);
  X(1, 1) = std::nan("");
  EXPECT_THROW(PointSet(std::move(X)), ArgumentError);
  EXPECT_THROW(PointSet::from_rows({{1.0, 2.0}, {3.0}}), ArgumentError);
}

TEST(PointSet, SubsetAndScale) {
  const PointSet ps = PointSet::from_rows({{0.0, 1.0}, {2.0, 3.0}, {4.0, 5.0}});
  EXPECT_EQ(ps.size(), 3);
  EXPECT_EQ(ps.dim(), 2);
  const std::vector<Index> ids{2, 0};
  const PointSet sub = ps.subset(ids);
  EXPECT_EQ(sub.size(), 2);
  EXPECT_EQ(sub.point(0)[0], 4.0);
  EXPECT_EQ(sub.point(1)[1], 1.0);
  EXPECT_EQ(ps.scaled(0.5).point(2)[1], 2.5);
  const std::vector<Index> bad{3};
  EXPECT_THROW(ps.subset(bad), ArgumentError);
}

TEST(Distance, DimensionMismatchThrows) {
  const std::vector<double> a{0.0, 0.0};
  const std::vector<double> b{3.0};
  EXPECT_THROW(distance(a, b), ArgumentError);
  const std::vector<double> c{3.0, 4.0};
  EXPECT_DOUBLE_EQ(distance(a, c), 5.0);
}

TEST(Fps, OneDimensionalOrder) {
  const LandmarkSelection sel = fps_sample(line({0.0, 1.0, 10.0}), 3, 0);
  EXPECT_EQ(sel.indices, (std::vector<Index>{0, 2, 1}));
  EXPECT_EQ(sel.method, SamplingMethod::FPS);
}

TEST(Fps, SingleLandmarkTraceIsMaxDistance) {
  const PointSet ps = line({0.0, 1.0, 10.0, 4.0});
  const LandmarkSelection sel = fps_sample(ps, 1, 3);
  ASSERT_EQ(sel.indices, std::vector<Index>{3});
  EXPECT_DOUBLE_EQ(sel.fill_trace[0], 6.0);
}

TEST(Fps, ArgumentErrors) {
  const PointSet ps = line({0.0, 1.0});
  EXPECT_THROW(fps_sample(ps, 3, 0), ArgumentError);
  EXPECT_THROW(fps_sample(ps, 0, 0), ArgumentError);
  EXPECT_THROW(fps_sample(ps, 1, 2), ArgumentError);
  EXPECT_THROW(fps_sample(ps, 1, -1), ArgumentError);
}

TEST(Fps, TiesGoToSmallestId) {
  const LandmarkSelection sel = fps_sample(line({-1.0, 0.0, 1.0}), 2, 1);
  EXPECT_EQ(sel.indices[1], 0);
}

TEST(Fps, DefaultSeedIsCentroid) {
  const PointSet ps = line({0.0, 4.0, 5.0, 10.0});
  EXPECT_EQ(centroid_seed(ps), 2);
  EXPECT_EQ(fps_sample(ps, 2).indices.front(), 2);
}

TEST(Fps, TwoDimensionalSelectionIsSeparated) {
  std::mt19937_64 rng(31);
  const PointSet ps = testing::random_cube(400, 2, 1.0, rng);
  const LandmarkSelection sel = fps_sample(ps, 30);
  const double h = sel.fill_trace.back();
  for (std::size_t a = 0; a < sel.indices.size(); ++a) {
    for (std::size_t b = a + 1; b < sel.indices.size(); ++b) {
      EXPECT_GE(distance(ps.point(sel.indices[a]), ps.point(sel.indices[b])), h * (1.0 - 1e-12));
    }
  }
}

TEST(FillDistance, HandExamples) {
  const PointSet ps = line({0.0, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(fill_distance(ps, std::vector<Index>{0}), 2.0);
  EXPECT_DOUBLE_EQ(fill_distance(ps, std::vector<Index>{1}), 1.0);
  EXPECT_DOUBLE_EQ(fill_distance(ps, std::vector<Index>{0, 1, 2}), 0.0);
  EXPECT_THROW(fill_distance(ps, std::vector<Index>{}), ArgumentError);
}

TEST(SeparationDistance, HandExamples) {
  const PointSet ps = line({0.0, 1.0, 3.0, 3.0});
  EXPECT_DOUBLE_EQ(separation_distance(ps, std::vector<Index>{0, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(separation_distance(ps, std::vector<Index>{2, 3}), 0.0);
  EXPECT_THROW(separation_distance(ps, std::vector<Index>{0}), ArgumentError);
}

TEST(KnnPattern, Examples) {
  const PointSet ps = line({0.0, 1.0, 2.0, 3.0});
  const std::vector<Index> order{0, 1, 2, 3};
  const SparsityPattern diag = knn_pattern(ps, order, 1);
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(diag.rows[static_cast<std::size_t>(i)], std::vector<Index>{i});
  const SparsityPattern two = knn_pattern(ps, order, 2);
  EXPECT_EQ(two.rows[0], std::vector<Index>{0});
  EXPECT_EQ(two.rows[3], (std::vector<Index>{2, 3}));
  EXPECT_EQ(two.nnz(), 7);
  EXPECT_THROW(knn_pattern(ps, order, 0), ArgumentError);
}

TEST(KnnPattern, FollowsTheOrdering) {
  const PointSet ps = line({0.0, 1.0, 2.0, 3.0});
  const SparsityPattern p = knn_pattern(ps, std::vector<Index>{3, 0, 2, 1}, 2);
  // Position 3 holds x = 1; its earlier positions hold 3, 0, 2; 0 and 2 tie, the smaller position wins.
  EXPECT_EQ(p.rows[3], (std::vector<Index>{1, 3}));
}

TEST(KnnPattern, MatchesBruteForceOracle) {
  std::mt19937_64 rng(5);
  const PointSet ps = testing::random_cube(120, 3, 2.0, rng);
  std::vector<Index> order(120);
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const Index w = 9;
  const SparsityPattern p = knn_pattern(ps, order, w);
  for (Index i = 0; i < 120; ++i) {
    std::vector<std::pair<double, Index>> cand;
    for (Index j = 0; j < i; ++j) {
      cand.emplace_back((ps.coords().col(order[static_cast<std::size_t>(i)]) -
                         ps.coords().col(order[static_cast<std::size_t>(j)])).norm(), j);
    }
    std::sort(cand.begin(), cand.end());
    std::vector<Index> expect;
    for (std::size_t t = 0; t < std::min<std::size_t>(cand.size(), w - 1); ++t) expect.push_back(cand[t].second);
    expect.push_back(i);
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(p.rows[static_cast<std::size_t>(i)], expect) << "row " << i;
  }
}

TEST(BruteForce, Examples) {
  const PointSet ps = line({0.0, 1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(brute_force_optimal_fill(ps, 2).value, 1.0);
  EXPECT_DOUBLE_EQ(brute_force_optimal_fill(ps, 4).value, 0.0);
  EXPECT_DOUBLE_EQ(brute_force_optimal_separation(ps, 2).value, 3.0);
  EXPECT_EQ(brute_force_optimal_separation(ps, 2).subset, (std::vector<Index>{0, 3}));
}

TEST(BruteForce, RefusesLargeInstances) {
  std::mt19937_64 rng(1);
  const PointSet ps = testing::random_cube(kMaxBruteForcePoints + 1, 2, 1.0, rng);
  EXPECT_THROW(brute_force_optimal_fill(ps, 2), SizeError);
  EXPECT_THROW(brute_force_optimal_separation(ps, 2), SizeError);
}

TEST(BruteForce, AgreesWithExhaustiveOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 4 + static_cast<Index>(rng() % 7);
    const Index k = 2 + static_cast<Index>(rng() % 3);
    const PointSet ps = testing::random_cube(n, 2, 1.0, rng);
    const auto [fill, sep] = testing::exhaustive_optima(ps, k);
    EXPECT_DOUBLE_EQ(brute_force_optimal_fill(ps, k).value, fill);
    EXPECT_DOUBLE_EQ(brute_force_optimal_separation(ps, k).value, sep);
  }
}

TEST(UniformSample, DistinctNestedDeterministic) {
  std::mt19937_64 rng(2);
  const PointSet ps = testing::random_cube(300, 2, 1.0, rng);
  const LandmarkSelection big = uniform_sample(ps, 50, 9);
  EXPECT_EQ(big.method, SamplingMethod::UniformRandom);
  EXPECT_EQ(std::set<Index>(big.indices.begin(), big.indices.end()).size(), 50u);
  for (Index j : {1, 7, 49}) EXPECT_EQ(uniform_sample(ps, j, 9).indices, prefix(big, static_cast<std::size_t>(j)));
  EXPECT_EQ(uniform_sample(ps, 50, 9).indices, big.indices);
  EXPECT_NE(uniform_sample(ps, 50, 10).indices, big.indices);
  for (std::size_t j = 0; j < big.indices.size(); ++j) {
    EXPECT_DOUBLE_EQ(big.fill_trace[j], testing::naive_fill(ps, prefix(big, j + 1)));
  }
}

// Randomized properties over point sets of varying size, dimension and seed.

TEST(FpsProperty, FillAtMostSeparation) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 150; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 300);
    const Index d = 1 + static_cast<Index>(rng() % 4);
    PointSet ps = testing::random_cube(n, d, 1.0 + static_cast<double>(rng() % 10), rng);
    const Index k = 2 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 1));
    const Index seed = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    const LandmarkSelection sel = fps_sample(ps, k, seed);
    const double h = fill_distance(ps, sel);
    const double q = separation_distance(ps, sel);
    EXPECT_LE(h, q * (1.0 + 1e-12)) << "trial " << trial;
  }
}

TEST(FpsProperty, NearOptimalAgainstExhaustiveSearch) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 3 + static_cast<Index>(rng() % 10);
    const Index k = 2 + static_cast<Index>(rng() % static_cast<std::uint64_t>(std::min<Index>(n - 1, 4)));
    const PointSet ps = testing::random_cube(n, 2, 1.0, rng);
    const auto [hstar, qstar] = testing::exhaustive_optima(ps, k);
    for (Index seed = 0; seed < n; ++seed) {
      const LandmarkSelection sel = fps_sample(ps, k, seed);
      EXPECT_LE(fill_distance(ps, sel), 2.0 * hstar + 1e-12);
      EXPECT_GE(separation_distance(ps, sel), 0.5 * qstar - 1e-12);
    }
  }
}

TEST(FpsProperty, TraceMonotoneNestedAndMatchesOracle) {
  std::mt19937_64 rng(4321);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 20 + static_cast<Index>(rng() % 200);
    const PointSet ps = testing::random_cube(n, 3, 1.0, rng);
    const Index seed = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    const LandmarkSelection sel = fps_sample(ps, n, seed);
    EXPECT_EQ(sel.indices.front(), seed);
    EXPECT_EQ(std::set<Index>(sel.indices.begin(), sel.indices.end()).size(), static_cast<std::size_t>(n));
    EXPECT_EQ(sel.fill_trace.back(), 0.0);
    for (std::size_t j = 1; j < sel.fill_trace.size(); ++j) EXPECT_LE(sel.fill_trace[j], sel.fill_trace[j - 1]);
    for (std::size_t j : {std::size_t{1}, std::size_t{5}, std::size_t{17}}) {
      EXPECT_DOUBLE_EQ(sel.fill_trace[j - 1], testing::naive_fill(ps, prefix(sel, j)));
      EXPECT_EQ(fps_sample(ps, static_cast<Index>(j), seed).indices, prefix(sel, j));
    }
    EXPECT_EQ(fps_sample(ps, n, seed).indices, sel.indices);
  }
}

TEST(FpsProperty, UnitBallBounds) {
  std::mt19937_64 rng(8);
  for (Index d : {2, 3}) {
    const PointSet ps = testing::random_unit_ball(d == 2 ? 2000 : 3000, d, rng);
    const double cq = std::pow(2.0, static_cast<double>(d + 1) / static_cast<double>(d));
    for (Index k : {2, 5, 20, 60}) {
      const double scale = std::pow(static_cast<double>(k), -1.0 / static_cast<double>(d));
      const LandmarkSelection f = fps_sample(ps, k);
      const LandmarkSelection u = uniform_sample(ps, k, static_cast<std::uint64_t>(k));
      EXPECT_LE(separation_distance(ps, f), cq * scale);
      EXPECT_LE(separation_distance(ps, u), cq * scale);
      EXPECT_GE(testing::naive_fill(ps, f.indices), scale);
      EXPECT_GE(testing::naive_fill(ps, u.indices), scale);
    }
  }
}

TEST(FpsProperty, DuplicatePointsGiveZeroSeparation) {
  const PointSet ps = line({1.0, 1.0, 1.0});
  const LandmarkSelection sel = fps_sample(ps, 2, 0);
  EXPECT_EQ(sel.indices, (std::vector<Index>{0, 1}));
  EXPECT_EQ(separation_distance(ps, sel), 0.0);
  EXPECT_EQ(fill_distance(ps, sel), 0.0);
}

}  // namespace
}  // namespace kpc
