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

// Plot-ready tables (x column followed by series columns).

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kpc/geometry.hpp"
#include "kpc/kernel.hpp"

namespace kpc {

struct FigureTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Missing values are written as `nan`.
void write_figure_csv(std::ostream& out, const FigureTable& table);

enum class FigureKind { Spectrum, FillVsError, Histogram, SubsampleMatch };

const char* to_string(FigureKind kind);
FigureKind parse_figure_kind(std::string_view name);

/// Largest n accepted by the dense figure builders.
inline constexpr Index kFigureDenseLimit = 4000;

/// Descending eigenvalues of K + mu I, one column per length scale.
FigureTable spectrum_figure(const KernelSpec& base, const PointSet& ps, const std::vector<double>& length_scales,
                            const std::vector<std::string>& labels);

/// Nystrom error and fill distance of FPS and uniform landmarks at each k.
/// Errors are relative spectral norms; k = n gives exactly 0.
FigureTable fill_vs_error_figure(const KernelSpec& spec, const PointSet& ps, const std::vector<Index>& ks,
                                 std::uint64_t seed);

struct MagnitudeHistogram {
  int min_exponent = -16;
  std::vector<Index> counts;  // counts[i]: |a| / max|a| in [10^(min_exponent + i), 10^(min_exponent + i + 1))
  Index underflow = 0;        // zeros and magnitudes below 10^min_exponent
  Index total = 0;
};

/// Entries scaled so the largest magnitude is 1, binned by floor(log10).
MagnitudeHistogram magnitude_histogram(const Eigen::MatrixXd& A, int min_exponent = -16);

/// Fraction of entries with |a| / max|a| < threshold.
double fraction_below(const Eigen::MatrixXd& A, double threshold);

struct ScreeningMatrices {
  Eigen::MatrixXd K22;    // K22 + mu I
  Eigen::MatrixXd schur;  // K22 + mu I - K12^T (K11 + mu I)^{-1} K12
  Eigen::MatrixXd schur_inverse;
};

ScreeningMatrices screening_matrices(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& landmarks);

/// Columns: log10 bin (-inf for underflow), then the fraction of entries of
/// K22 + mu I, the Schur complement and its inverse in each bin.
FigureTable histogram_figure(const KernelSpec& spec, const PointSet& ps, Index k, int min_exponent = -16);

struct SubsampleMatch {
  Index n = 0;
  Index m = 0;
  std::vector<double> full_curve;       // FPS order on the full set
  std::vector<double> subsample_curve;  // FPS order on the rescaled subsample
  Index full_crossing = 0;              // first rank below tol, 0 if never
  Index subsample_crossing = 0;
  Index rescaled_crossing = 0;          // round-half-up(subsample_crossing * n / m)
};

/// Both error curves are computed until they first drop below `tol`.
SubsampleMatch subsample_match(const KernelSpec& spec, const PointSet& ps, Index m, std::uint64_t seed,
                               double tol = 0.1);

/// Columns: rank on the full-set scale, full curve, subsample curve placed
/// at its rescaled ranks (nan elsewhere).
FigureTable subsample_match_figure(const SubsampleMatch& match);

/// First 1-based position with curve[r-1] < tol, or 0.
Index first_crossing(const std::vector<double>& curve, double tol);

}  // namespace kpc
