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

#include "kpc/results.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "kpc/dataset.hpp"
#include "kpc/errors.hpp"

namespace kpc {

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::Csv;
  if (name == "json") return ResultFormat::Json;
  throw ArgumentError("unknown result format '" + std::string(name) + "' (expected csv or json)");
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
T parse_number(const std::string& field, std::size_t line_no, std::size_t column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("invalid number '" + field + "'", line_no, column);
  }
  return value;
}

}  // namespace

void emit_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const ResultRow& r : rows) {
    out << csv_field(r.kernel) << ',' << csv_field(r.family) << ',' << format_double(r.param) << ','
        << format_double(r.mu) << ',' << csv_field(r.method) << ',' << r.k << ',' << r.iters << ','
        << (r.converged ? 1 : 0) << ',' << format_double(r.setup_s) << ',' << format_double(r.solve_s) << ','
        << format_double(r.relres) << ',' << r.seed << '\n';
  }
}

void emit_results_json(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << '[';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& r = rows[i];
    out << (i == 0 ? "\n" : ",\n") << "  {\"kernel\": " << json_string(r.kernel)
        << ", \"family\": " << json_string(r.family) << ", \"param\": " << json_number(r.param)
        << ", \"mu\": " << json_number(r.mu) << ", \"method\": " << json_string(r.method) << ", \"k\": " << r.k
        << ", \"iters\": " << r.iters << ", \"converged\": " << (r.converged ? "true" : "false")
        << ", \"setup_s\": " << json_number(r.setup_s) << ", \"solve_s\": " << json_number(r.solve_s)
        << ", \"relres\": " << json_number(r.relres) << ", \"seed\": " << r.seed << '}';
  }
  out << (rows.empty() ? "]\n" : "\n]\n");
}

void emit_results(std::ostream& out, const std::vector<ResultRow>& rows, ResultFormat format) {
  if (format == ResultFormat::Csv) {
    emit_results_csv(out, rows);
  } else {
    emit_results_json(out, rows);
  }
}

void write_results(const std::string& path, const std::vector<ResultRow>& rows, ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  emit_results(out, rows, format);
  if (!out) throw ArgumentError("write to '" + path + "' failed");
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultHeader) throw ParseError("unexpected header '" + line + "'", 1);

  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line, line_no);
    if (f.size() != 12) {
      throw ParseError("expected 12 fields, got " + std::to_string(f.size()), line_no);
    }
    ResultRow r;
    r.kernel = f[0];
    r.family = f[1];
    r.param = parse_number<double>(f[2], line_no, 3);
    r.mu = parse_number<double>(f[3], line_no, 4);
    r.method = f[4];
    r.k = parse_number<Index>(f[5], line_no, 6);
    r.iters = parse_number<Index>(f[6], line_no, 7);
    if (f[7] != "0" && f[7] != "1") throw ParseError("converged must be 0 or 1", line_no, 8);
    r.converged = f[7] == "1";
    r.setup_s = parse_number<double>(f[8], line_no, 9);
    r.solve_s = parse_number<double>(f[9], line_no, 10);
    r.relres = parse_number<double>(f[10], line_no, 11);
    r.seed = parse_number<std::uint64_t>(f[11], line_no, 12);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SeedAverage> average_over_seeds(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, double, double, std::string>;
  std::map<Key, std::size_t> slot;
  std::vector<SeedAverage> out;
  for (const ResultRow& r : rows) {
    const Key key{r.kernel, r.family, r.param, r.mu, r.method};
    auto [it, inserted] = slot.emplace(key, out.size());
    if (inserted) {
      SeedAverage a;
      a.kernel = r.kernel;
      a.family = r.family;
      a.param = r.param;
      a.mu = r.mu;
      a.method = r.method;
      out.push_back(std::move(a));
    }
    SeedAverage& a = out[it->second];
    ++a.runs;
    if (r.converged) ++a.converged_runs;
    a.mean_k += static_cast<double>(r.k);
    a.mean_iters += static_cast<double>(r.iters);
    a.mean_setup_s += r.setup_s;
    a.mean_solve_s += r.solve_s;
    a.mean_relres += r.relres;
  }
  for (SeedAverage& a : out) {
    const auto n = static_cast<double>(a.runs);
    a.mean_k /= n;
    a.mean_iters /= n;
    a.mean_setup_s /= n;
    a.mean_solve_s /= n;
    a.mean_relres /= n;
  }
  return out;
}

}  // namespace kpc
