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

#include "kpc/errors.hpp"

namespace kpc {

FactorizationError::FactorizationError(const std::string& what, std::ptrdiff_t pivot)
    : NumericError(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}

static std::string with_location(const std::string& what, std::size_t line,
                                 std::size_t column) {
  std::string out = "line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out + ": " + what;
}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(with_location(what, line, column)), line_(line), column_(column) {}

}  // namespace kpc
