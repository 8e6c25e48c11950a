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

#include "kpc/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string_view>
#include <vector>

#include "kpc/errors.hpp"

namespace kpc {

PointSet gen_synthetic(Index n, Index d, double edge, std::uint64_t seed) {
  if (n < 1 || d < 1) throw ArgumentError("gen_synthetic: need n >= 1 and d >= 1");
  if (!(edge > 0.0) || !std::isfinite(edge)) throw ArgumentError("gen_synthetic: edge must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, edge);
  Eigen::MatrixXd coords(d, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < d; ++i) coords(i, j) = coord(rng);
  }
  return PointSet(std::move(coords));
}

double default_edge(Index n, Index d) {
  return std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  return in;
}

}  // namespace

PointSet parse_points_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      const std::string_view field = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
      double value = 0.0;
      if (!parse_double(field, value)) {
        throw ParseError("non-numeric field '" + std::string(field) + "'", line_no, start + 1);
      }
      if (!std::isfinite(value)) throw ParseError("non-finite coordinate", line_no, start + 1);
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged row: expected " + std::to_string(rows.front().size()) + " fields, got " +
                           std::to_string(row.size()),
                       line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no points in input", line_no == 0 ? 1 : line_no);
  return PointSet::from_rows(rows);
}

PointSet load_points_csv(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_points_csv(in);
}

PointSet parse_points_sparse_text(std::istream& in, std::optional<Index> dim) {
  if (dim && *dim < 1) throw ArgumentError("sparse text: declared dimension must be >= 1");
  struct Entry {
    Index index;
    double value;
  };
  std::vector<std::vector<Entry>> points;
  Index max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;

    std::vector<Entry> entries;
    std::size_t pos = 0;
    bool label_seen = false;
    Index previous = 0;
    while (pos < text.size()) {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
      if (pos >= text.size()) break;
      std::size_t end = pos;
      while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
      const std::string_view token = text.substr(pos, end - pos);
      const std::size_t column = pos + 1;
      if (!label_seen) {
        label_seen = true;  // the label is discarded
      } else {
        const std::size_t colon = token.find(':');
        if (colon == std::string_view::npos) throw ParseError("expected index:value", line_no, column);
        Index index = 0;
        const auto idx_text = token.substr(0, colon);
        const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
        if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || index < 1) {
          throw ParseError("invalid feature index '" + std::string(idx_text) + "'", line_no, column);
        }
        if (index <= previous) throw ParseError("feature indices must be strictly increasing", line_no, column);
        if (dim && index > *dim) {
          throw ParseError("feature index " + std::to_string(index) + " exceeds dimension " + std::to_string(*dim),
                           line_no, column);
        }
        double value = 0.0;
        if (!parse_double(token.substr(colon + 1), value) || !std::isfinite(value)) {
          throw ParseError("invalid feature value", line_no, column + colon + 1);
        }
        previous = index;
        max_index = std::max(max_index, index);
        entries.push_back({index, value});
      }
      pos = end;
    }
    points.push_back(std::move(entries));
  }
  if (points.empty()) throw ParseError("no points in input", line_no == 0 ? 1 : line_no);
  const Index d = dim ? *dim : std::max<Index>(max_index, 1);
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(d, static_cast<Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    for (const Entry& e : points[j]) coords(e.index - 1, static_cast<Index>(j)) = e.value;
  }
  return PointSet(std::move(coords));
}

PointSet load_points_sparse_text(const std::string& path, std::optional<Index> dim) {
  auto in = open_or_throw(path);
  return parse_points_sparse_text(in, dim);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_points_csv(std::ostream& out, const PointSet& ps) {
  for (Index j = 0; j < ps.size(); ++j) {
    for (Index i = 0; i < ps.dim(); ++i) {
      if (i > 0) out << ',';
      out << format_double(ps.coords()(i, j));
    }
    out << '\n';
  }
}

}  // namespace kpc
