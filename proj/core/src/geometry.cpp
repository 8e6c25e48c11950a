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

#include "kpc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "kpc/errors.hpp"

namespace kpc {

PointSet::PointSet(Eigen::MatrixXd coords) : coords_(std::move(coords)) {
  if (coords_.rows() < 1 || coords_.cols() < 1) {
    throw ArgumentError("PointSet needs n >= 1 and d >= 1");
  }
  if (!coords_.allFinite()) throw ArgumentError("PointSet coordinates must be finite");
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ArgumentError("PointSet needs n >= 1 and d >= 1");
  const auto d = static_cast<Index>(rows.front().size());
  Eigen::MatrixXd coords(d, static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (static_cast<Index>(rows[j].size()) != d) {
      throw ArgumentError("ragged point rows: point " + std::to_string(j) + " has dimension " +
                          std::to_string(rows[j].size()));
    }
    for (Index i = 0; i < d; ++i) coords(i, static_cast<Index>(j)) = rows[j][static_cast<std::size_t>(i)];
  }
  return PointSet(std::move(coords));
}

PointSet PointSet::subset(std::span<const Index> ids) const {
  Eigen::MatrixXd out(dim(), static_cast<Index>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] < 0 || ids[j] >= size()) throw ArgumentError("subset id out of range");
    out.col(static_cast<Index>(j)) = coords_.col(ids[j]);
  }
  return PointSet(std::move(out));
}

PointSet PointSet::scaled(double factor) const { return PointSet(coords_ * factor); }

double squared_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("dimension mismatch in distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    acc += diff * diff;
  }
  return acc;
}

double distance(std::span<const double> x, std::span<const double> y) {
  return std::sqrt(squared_distance(x, y));
}

const char* to_string(SamplingMethod method) {
  return method == SamplingMethod::FPS ? "fps" : "uniform";
}

Index centroid_seed(const PointSet& ps) {
  const Eigen::VectorXd centroid = ps.coords().rowwise().mean();
  const std::span<const double> c(centroid.data(), static_cast<std::size_t>(centroid.size()));
  Index best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ps.size(); ++i) {
    const double d2 = squared_distance(ps.point(i), c);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

namespace {

// Running min-distance to the selected set; shared by FPS and by the fill
// trace of uniformly sampled landmarks.
class CoverageTracker {
 public:
  explicit CoverageTracker(const PointSet& ps)
      : ps_(ps),
        min_d2_(static_cast<std::size_t>(ps.size()), std::numeric_limits<double>::infinity()),
        selected_(static_cast<std::size_t>(ps.size()), 0) {}

  void add(Index id) {
    selected_[static_cast<std::size_t>(id)] = 1;
    const auto p = ps_.point(id);
    const Index n = ps_.size();
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      const double d2 = squared_distance(ps_.point(i), p);
      auto& slot = min_d2_[static_cast<std::size_t>(i)];
      if (d2 < slot) slot = d2;
    }
  }

  // Farthest unselected point (smallest id on ties) and its squared distance;
  // (-1, 0) when every point is selected.
  std::pair<Index, double> farthest() const {
    Index best = -1;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < min_d2_.size(); ++i) {
      if (selected_[i]) continue;
      if (min_d2_[i] > best_d2) {
        best_d2 = min_d2_[i];
        best = static_cast<Index>(i);
      }
    }
    if (best < 0) return {-1, 0.0};
    return {best, best_d2};
  }

 private:
  const PointSet& ps_;
  std::vector<double> min_d2_;
  std::vector<char> selected_;
};

void check_k(const PointSet& ps, Index k) {
  if (k < 1 || k > ps.size()) {
    throw ArgumentError("landmark count " + std::to_string(k) + " outside [1, " +
                        std::to_string(ps.size()) + "]");
  }
}

void check_ids(const PointSet& ps, std::span<const Index> ids) {
  std::vector<char> seen(static_cast<std::size_t>(ps.size()), 0);
  for (Index id : ids) {
    if (id < 0 || id >= ps.size()) throw ArgumentError("point id " + std::to_string(id) + " out of range");
    if (seen[static_cast<std::size_t>(id)]) throw ArgumentError("duplicate point id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = 1;
  }
}

}  // namespace

LandmarkSelection fps_sample(const PointSet& ps, Index k, Index seed_index) {
  check_k(ps, k);
  if (seed_index < 0 || seed_index >= ps.size()) throw ArgumentError("FPS seed index out of range");

  LandmarkSelection sel;
  sel.method = SamplingMethod::FPS;
  sel.indices.reserve(static_cast<std::size_t>(k));
  sel.fill_trace.reserve(static_cast<std::size_t>(k));

  CoverageTracker tracker(ps);
  Index next = seed_index;
  for (Index j = 0; j < k; ++j) {
    sel.indices.push_back(next);
    tracker.add(next);
    const auto [far, far_d2] = tracker.farthest();
    sel.fill_trace.push_back(std::sqrt(far_d2));
    next = far;
  }
  return sel;
}

LandmarkSelection fps_sample(const PointSet& ps, Index k) { return fps_sample(ps, k, centroid_seed(ps)); }

LandmarkSelection uniform_sample(const PointSet& ps, Index k, std::uint64_t seed) {
  check_k(ps, k);
  std::vector<Index> ids(static_cast<std::size_t>(ps.size()));
  std::iota(ids.begin(), ids.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index j = 0; j < k; ++j) {
    std::uniform_int_distribution<Index> pick(j, ps.size() - 1);
    std::swap(ids[static_cast<std::size_t>(j)], ids[static_cast<std::size_t>(pick(rng))]);
  }
  ids.resize(static_cast<std::size_t>(k));

  LandmarkSelection sel;
  sel.method = SamplingMethod::UniformRandom;
  sel.indices = std::move(ids);
  CoverageTracker tracker(ps);
  for (Index id : sel.indices) {
    tracker.add(id);
    sel.fill_trace.push_back(std::sqrt(tracker.farthest().second));
  }
  return sel;
}

double fill_distance(const PointSet& ps, std::span<const Index> landmarks) {
  if (landmarks.empty()) throw ArgumentError("fill distance of an empty selection");
  check_ids(ps, landmarks);
  std::vector<char> is_landmark(static_cast<std::size_t>(ps.size()), 0);
  for (Index id : landmarks) is_landmark[static_cast<std::size_t>(id)] = 1;

  double worst = 0.0;
  const Index n = ps.size();
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (Index i = 0; i < n; ++i) {
    if (is_landmark[static_cast<std::size_t>(i)]) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (Index id : landmarks) nearest = std::min(nearest, squared_distance(ps.point(i), ps.point(id)));
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

double fill_distance(const PointSet& ps, const LandmarkSelection& sel) {
  return fill_distance(ps, std::span<const Index>(sel.indices));
}

double separation_distance(const PointSet& ps, std::span<const Index> landmarks) {
  if (landmarks.size() < 2) throw ArgumentError("separation distance needs at least two landmarks");
  check_ids(ps, landmarks);
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < landmarks.size(); ++a) {
    for (std::size_t b = a + 1; b < landmarks.size(); ++b) {
      closest = std::min(closest, squared_distance(ps.point(landmarks[a]), ps.point(landmarks[b])));
    }
  }
  return std::sqrt(closest);
}

double separation_distance(const PointSet& ps, const LandmarkSelection& sel) {
  return separation_distance(ps, std::span<const Index>(sel.indices));
}

Index SparsityPattern::nnz() const noexcept {
  Index total = 0;
  for (const auto& row : rows) total += static_cast<Index>(row.size());
  return total;
}

SparsityPattern knn_pattern(const PointSet& ps, std::span<const Index> ordering, Index w) {
  if (w < 1) throw ArgumentError("pattern size w must be >= 1");
  check_ids(ps, ordering);

  const auto m = static_cast<Index>(ordering.size());
  SparsityPattern pattern;
  pattern.rows.resize(static_cast<std::size_t>(m));

#pragma omp parallel
  {
    std::vector<std::pair<double, Index>> candidates;
#pragma omp for schedule(dynamic, 64)
    for (Index i = 0; i < m; ++i) {
      auto& row = pattern.rows[static_cast<std::size_t>(i)];
      const Index take = std::min(w - 1, i);
      if (take > 0) {
        const auto xi = ps.point(ordering[static_cast<std::size_t>(i)]);
        candidates.clear();
        for (Index j = 0; j < i; ++j) {
          candidates.emplace_back(squared_distance(xi, ps.point(ordering[static_cast<std::size_t>(j)])), j);
        }
        if (take < i) {
          std::nth_element(candidates.begin(), candidates.begin() + take, candidates.end());
        }
        row.reserve(static_cast<std::size_t>(take + 1));
        for (Index t = 0; t < take; ++t) row.push_back(candidates[static_cast<std::size_t>(t)].second);
        std::sort(row.begin(), row.end());
      }
      row.push_back(i);
    }
  }
  return pattern;
}

namespace {

template <typename Visit>
void for_each_subset(Index n, Index k, Visit&& visit) {
  std::vector<Index> subset(static_cast<std::size_t>(k));
  std::iota(subset.begin(), subset.end(), Index{0});
  while (true) {
    visit(subset);
    Index pos = k - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) return;
    ++subset[static_cast<std::size_t>(pos)];
    for (Index t = pos + 1; t < k; ++t) {
      subset[static_cast<std::size_t>(t)] = subset[static_cast<std::size_t>(t - 1)] + 1;
    }
  }
}

void check_brute_force(const PointSet& ps, Index k, Index min_k) {
  if (ps.size() > kMaxBruteForcePoints) {
    throw SizeError("brute-force subset search refuses n = " + std::to_string(ps.size()) +
                    " > " + std::to_string(kMaxBruteForcePoints));
  }
  if (k < min_k || k > ps.size()) throw ArgumentError("subset size out of range");
}

}  // namespace

SubsetOptimum brute_force_optimal_fill(const PointSet& ps, Index k) {
  check_brute_force(ps, k, 1);
  const Index n = ps.size();
  Eigen::MatrixXd dist(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) dist(a, b) = (ps.coords().col(a) - ps.coords().col(b)).norm();
  }

  SubsetOptimum best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<char> member(static_cast<std::size_t>(n));
  for_each_subset(n, k, [&](const std::vector<Index>& subset) {
    std::fill(member.begin(), member.end(), 0);
    for (Index id : subset) member[static_cast<std::size_t>(id)] = 1;
    double h = 0.0;
    for (Index x = 0; x < n; ++x) {
      if (member[static_cast<std::size_t>(x)]) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (Index id : subset) nearest = std::min(nearest, dist(x, id));
      h = std::max(h, nearest);
    }
    if (h < best.value) {
      best.value = h;
      best.subset = subset;
    }
  });
  return best;
}

SubsetOptimum brute_force_optimal_separation(const PointSet& ps, Index k) {
  check_brute_force(ps, k, 2);
  const Index n = ps.size();
  SubsetOptimum best;
  best.value = -1.0;
  for_each_subset(n, k, [&](const std::vector<Index>& subset) {
    double q = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < subset.size(); ++a) {
      for (std::size_t b = a + 1; b < subset.size(); ++b) {
        q = std::min(q, (ps.coords().col(subset[a]) - ps.coords().col(subset[b])).norm());
      }
    }
    if (q > best.value) {
      best.value = q;
      best.subset = subset;
    }
  });
  return best;
}

}  // namespace kpc
