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

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "kpc/geometry.hpp"

namespace kpc {

/// n i.i.d. uniform points in [0, edge]^d.
PointSet gen_synthetic(Index n, Index d, double edge, std::uint64_t seed);

/// Edge length n^(1/d), which keeps the point density at one per unit volume.
double default_edge(Index n, Index d);

/// One point per line, comma separated, blank lines skipped.
PointSet load_points_csv(const std::string& path);
PointSet parse_points_csv(std::istream& in);

/// `label index:value ...` lines with 1-based, strictly increasing indices.
/// Labels are dropped and missing indices are zero. Without `dim` the
/// dimension is the largest index seen.
PointSet load_points_sparse_text(const std::string& path, std::optional<Index> dim = std::nullopt);
PointSet parse_points_sparse_text(std::istream& in, std::optional<Index> dim = std::nullopt);

/// Writes points as CSV with 17 significant digits.
void write_points_csv(std::ostream& out, const PointSet& ps);

/// Decimal with 17 significant digits ("%.17g" semantics),
/// independent of the global locale.
std::string format_double(double value);

}  // namespace kpc
