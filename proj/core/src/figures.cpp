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

#include "kpc/figures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpc/adaptive.hpp"
#include "kpc/dataset.hpp"
#include "kpc/errors.hpp"
#include "kpc/linalg.hpp"

namespace kpc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_dense(const PointSet& ps, const char* what) {
  if (ps.size() > kFigureDenseLimit) {
    throw SizeError(std::string(what) + ": n = " + std::to_string(ps.size()) + " exceeds the dense limit " +
                    std::to_string(kFigureDenseLimit));
  }
}

}  // namespace

void write_figure_csv(std::ostream& out, const FigureTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << (std::isnan(row[c]) ? std::string("nan") : format_double(row[c]));
    }
    out << '\n';
  }
}

const char* to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::Spectrum: return "spectrum";
    case FigureKind::FillVsError: return "fill_vs_error";
    case FigureKind::Histogram: return "histogram";
    case FigureKind::SubsampleMatch: return "subsample_match";
  }
  return "?";
}

FigureKind parse_figure_kind(std::string_view name) {
  for (FigureKind k : {FigureKind::Spectrum, FigureKind::FillVsError, FigureKind::Histogram,
                       FigureKind::SubsampleMatch}) {
    if (name == to_string(k)) return k;
  }
  throw ArgumentError("unknown figure kind '" + std::string(name) + "'");
}

FigureTable spectrum_figure(const KernelSpec& base, const PointSet& ps, const std::vector<double>& length_scales,
                            const std::vector<std::string>& labels) {
  check_dense(ps, "spectrum_figure");
  if (length_scales.empty()) throw ArgumentError("spectrum_figure: no length scales");
  if (labels.size() != length_scales.size()) throw ArgumentError("spectrum_figure: one label per length scale");
  const Index n = ps.size();
  FigureTable t;
  t.columns.push_back("index");
  t.columns.insert(t.columns.end(), labels.begin(), labels.end());
  t.rows.assign(static_cast<std::size_t>(n), std::vector<double>(length_scales.size() + 1));
  for (Index i = 0; i < n; ++i) t.rows[static_cast<std::size_t>(i)][0] = static_cast<double>(i + 1);
  for (std::size_t s = 0; s < length_scales.size(); ++s) {
    KernelSpec spec = base;
    spec.length_scale = length_scales[s];
    spec.validate();
    Eigen::MatrixXd K = kernel_matrix(spec, ps);
    K.diagonal().array() += spec.mu;
    const Eigen::VectorXd eig = sym_eigenvalues(K, kFigureDenseLimit);
    for (Index i = 0; i < n; ++i) t.rows[static_cast<std::size_t>(i)][s + 1] = eig[i];
  }
  return t;
}

FigureTable fill_vs_error_figure(const KernelSpec& spec, const PointSet& ps, const std::vector<Index>& ks,
                                 std::uint64_t seed) {
  check_dense(ps, "fill_vs_error_figure");
  spec.validate();
  if (ks.empty()) throw ArgumentError("fill_vs_error_figure: no k values");
  const Index n = ps.size();
  for (Index k : ks) {
    if (k < 1 || k > n) throw ArgumentError("fill_vs_error_figure: k must lie in [1, n]");
  }
  const Index kmax = *std::max_element(ks.begin(), ks.end());
  const LandmarkSelection fps = fps_sample(ps, kmax);
  const LandmarkSelection rnd = uniform_sample(ps, kmax, seed);
  const Eigen::MatrixXd K = kernel_matrix(spec, ps);
  const std::vector<double> err_fps = nystrom_error_curve(K, fps.indices, 0.0);
  const std::vector<double> err_rnd = nystrom_error_curve(K, rnd.indices, 0.0);

  auto at = [](const std::vector<double>& curve, Index k) {
    return static_cast<std::size_t>(k) <= curve.size() ? curve[static_cast<std::size_t>(k - 1)] : kNaN;
  };
  FigureTable t;
  t.columns = {"k", "fill_fps", "error_fps", "fill_random", "error_random"};
  for (Index k : ks) {
    t.rows.push_back({static_cast<double>(k), fps.fill_trace[static_cast<std::size_t>(k - 1)], at(err_fps, k),
                      rnd.fill_trace[static_cast<std::size_t>(k - 1)], at(err_rnd, k)});
  }
  return t;
}

MagnitudeHistogram magnitude_histogram(const Eigen::MatrixXd& A, int min_exponent) {
  if (min_exponent >= 0) throw ArgumentError("magnitude_histogram: min_exponent must be negative");
  MagnitudeHistogram h;
  h.min_exponent = min_exponent;
  h.counts.assign(static_cast<std::size_t>(1 - min_exponent), 0);
  h.total = A.size();
  const double scale = A.size() > 0 ? A.cwiseAbs().maxCoeff() : 0.0;
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      const double y = scale > 0.0 ? std::abs(A(i, j)) / scale : 0.0;
      const int e = y > 0.0 ? static_cast<int>(std::floor(std::log10(y))) : min_exponent - 1;
      if (e < min_exponent) {
        ++h.underflow;
      } else {
        ++h.counts[static_cast<std::size_t>(std::min(e, 0) - min_exponent)];
      }
    }
  }
  return h;
}

double fraction_below(const Eigen::MatrixXd& A, double threshold) {
  if (A.size() == 0) throw ArgumentError("fraction_below: empty matrix");
  const double scale = A.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return 1.0;
  const auto count = (A.cwiseAbs().array() / scale < threshold).count();
  return static_cast<double>(count) / static_cast<double>(A.size());
}

ScreeningMatrices screening_matrices(const KernelSpec& spec, const PointSet& ps, const LandmarkSelection& landmarks) {
  check_dense(ps, "screening_matrices");
  spec.validate();
  const Index n = ps.size();
  std::vector<char> is_landmark(static_cast<std::size_t>(n), 0);
  for (Index id : landmarks.indices) {
    if (id < 0 || id >= n) throw ArgumentError("screening_matrices: landmark out of range");
    is_landmark[static_cast<std::size_t>(id)] = 1;
  }
  std::vector<Index> rest;
  for (Index i = 0; i < n; ++i) {
    if (!is_landmark[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  if (rest.empty()) throw ArgumentError("screening_matrices: every point is a landmark");

  Eigen::MatrixXd K11 = kernel_matrix(spec, ps, landmarks.indices, landmarks.indices);
  K11.diagonal().array() += spec.mu;
  const CholeskyFactor L = cholesky(K11);
  const Eigen::MatrixXd K12 = kernel_matrix(spec, ps, landmarks.indices, rest);
  const Eigen::MatrixXd V = L.L.triangularView<Eigen::Lower>().solve(K12);

  ScreeningMatrices out;
  out.K22 = kernel_matrix(spec, ps, rest, rest);
  out.K22.diagonal().array() += spec.mu;
  out.schur = out.K22 - V.transpose() * V;
  out.schur = 0.5 * (out.schur + out.schur.transpose()).eval();
  const CholeskyFactor S = cholesky(out.schur);
  const Eigen::MatrixXd Linv =
      S.L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(S.size(), S.size()));
  out.schur_inverse = Linv.transpose() * Linv;
  return out;
}

FigureTable histogram_figure(const KernelSpec& spec, const PointSet& ps, Index k, int min_exponent) {
  const ScreeningMatrices mats = screening_matrices(spec, ps, fps_sample(ps, k));
  const MagnitudeHistogram hk = magnitude_histogram(mats.K22, min_exponent);
  const MagnitudeHistogram hs = magnitude_histogram(mats.schur, min_exponent);
  const MagnitudeHistogram hi = magnitude_histogram(mats.schur_inverse, min_exponent);
  auto frac = [](Index c, const MagnitudeHistogram& h) { return static_cast<double>(c) / static_cast<double>(h.total); };

  FigureTable t;
  t.columns = {"log10_bin", "k22", "schur", "schur_inverse"};
  t.rows.push_back({-std::numeric_limits<double>::infinity(), frac(hk.underflow, hk), frac(hs.underflow, hs),
                    frac(hi.underflow, hi)});
  for (std::size_t b = 0; b < hk.counts.size(); ++b) {
    t.rows.push_back({static_cast<double>(min_exponent + static_cast<int>(b)), frac(hk.counts[b], hk),
                      frac(hs.counts[b], hs), frac(hi.counts[b], hi)});
  }
  return t;
}

Index first_crossing(const std::vector<double>& curve, double tol) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i] < tol) return static_cast<Index>(i) + 1;
  }
  return 0;
}

SubsampleMatch subsample_match(const KernelSpec& spec, const PointSet& ps, Index m, std::uint64_t seed, double tol) {
  check_dense(ps, "subsample_match");
  SubsampleMatch out;
  out.n = ps.size();
  out.m = m;

  RankEstimateOptions opts;
  opts.error_tol = tol;
  opts.refine_below = 0;
  const RankEstimate est = estimate_rank(spec, ps, m, seed, opts);
  for (const auto& [rank, err] : est.error_curve) out.subsample_curve.push_back(err);
  out.subsample_crossing = first_crossing(out.subsample_curve, tol);
  if (out.subsample_crossing > 0) out.rescaled_crossing = rescale_rank(out.subsample_crossing, out.n, m);

  const LandmarkSelection order = fps_sample(ps, out.n);
  out.full_curve = nystrom_error_curve(kernel_matrix(spec, ps), order.indices, tol);
  out.full_crossing = first_crossing(out.full_curve, tol);
  return out;
}

FigureTable subsample_match_figure(const SubsampleMatch& match) {
  Index rows = static_cast<Index>(match.full_curve.size());
  for (std::size_t j = 1; j <= match.subsample_curve.size(); ++j) {
    rows = std::max(rows, rescale_rank(static_cast<Index>(j), match.n, match.m));
  }
  FigureTable t;
  t.columns = {"rank", "full", "subsample"};
  t.rows.assign(static_cast<std::size_t>(rows), {kNaN, kNaN, kNaN});
  for (Index r = 1; r <= rows; ++r) {
    auto& row = t.rows[static_cast<std::size_t>(r - 1)];
    row[0] = static_cast<double>(r);
    if (static_cast<std::size_t>(r) <= match.full_curve.size()) row[1] = match.full_curve[static_cast<std::size_t>(r - 1)];
  }
  for (std::size_t j = 1; j <= match.subsample_curve.size(); ++j) {
    const Index r = rescale_rank(static_cast<Index>(j), match.n, match.m);
    if (r >= 1) t.rows[static_cast<std::size_t>(r - 1)][2] = match.subsample_curve[j - 1];
  }
  return t;
}

}  // namespace kpc
