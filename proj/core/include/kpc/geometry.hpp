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

// Point sets, landmark selection (farthest point sampling and uniform
// sampling), fill / separation distances and nearest-neighbor sparsity
// patterns for lower-triangular factors.

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace kpc {

using Index = Eigen::Index;

/// n points in R^d, stored column-wise (one column per point). Immutable.
class PointSet {
 public:
  /// `coords` is d x n. Throws ArgumentError if empty or non-finite.
  explicit PointSet(Eigen::MatrixXd coords);

  /// Builds from row-major nested vectors (one inner vector per point).
  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  Index size() const noexcept { return coords_.cols(); }
  Index dim() const noexcept { return coords_.rows(); }

  std::span<const double> point(Index id) const {
    return {coords_.data() + id * coords_.rows(), static_cast<std::size_t>(coords_.rows())};
  }
  const Eigen::MatrixXd& coords() const noexcept { return coords_; }

  /// Points `ids` in the given order, re-numbered 0..|ids|-1.
  PointSet subset(std::span<const Index> ids) const;
  PointSet scaled(double factor) const;

 private:
  Eigen::MatrixXd coords_;
};

/// Squared Euclidean distance, accumulated coordinate by coordinate.
double squared_distance(std::span<const double> x, std::span<const double> y);
double distance(std::span<const double> x, std::span<const double> y);

enum class SamplingMethod { FPS, UniformRandom };

const char* to_string(SamplingMethod method);

/// Ordered landmark ids. fill_trace[j] is the fill distance of the first
/// j + 1 landmarks over the whole set, so the last entry is the final fill
/// distance.
struct LandmarkSelection {
  std::vector<Index> indices;
  std::vector<double> fill_trace;
  SamplingMethod method = SamplingMethod::FPS;

  Index size() const noexcept { return static_cast<Index>(indices.size()); }
};

/// The point closest to the coordinate centroid (smallest id on ties).
Index centroid_seed(const PointSet& ps);

/// Farthest point sampling from `seed_index`. Ties go to the smallest id.
LandmarkSelection fps_sample(const PointSet& ps, Index k, Index seed_index);
LandmarkSelection fps_sample(const PointSet& ps, Index k);

/// k distinct ids drawn uniformly (sequential partial Fisher-Yates, so the
/// first j ids of a k-selection equal the j-selection for the same seed).
LandmarkSelection uniform_sample(const PointSet& ps, Index k, std::uint64_t seed);

/// max over x in X \ X_k of dist(x, X_k); 0 when X_k = X.
double fill_distance(const PointSet& ps, const LandmarkSelection& sel);
double fill_distance(const PointSet& ps, std::span<const Index> landmarks);

/// Smallest pairwise distance among the landmarks. Needs at least two.
double separation_distance(const PointSet& ps, const LandmarkSelection& sel);
double separation_distance(const PointSet& ps, std::span<const Index> landmarks);

/// Lower-triangular pattern over positions 0..m-1 of an ordering. Each row
/// holds sorted column positions and always ends with its own diagonal.
struct SparsityPattern {
  std::vector<std::vector<Index>> rows;

  Index size() const noexcept { return static_cast<Index>(rows.size()); }
  Index nnz() const noexcept;
};

/// Row i holds position i plus the min(w - 1, i) nearest earlier positions
/// of `ordering` (Euclidean, ties to the smaller position).
SparsityPattern knn_pattern(const PointSet& ps, std::span<const Index> ordering, Index w);

/// Exhaustive optimum over all k-subsets. Used as a test oracle; refuses
/// n > kMaxBruteForcePoints.
struct SubsetOptimum {
  std::vector<Index> subset;
  double value = 0.0;
};

inline constexpr Index kMaxBruteForcePoints = 16;

SubsetOptimum brute_force_optimal_fill(const PointSet& ps, Index k);
SubsetOptimum brute_force_optimal_separation(const PointSet& ps, Index k);

}  // namespace kpc
