#pragma once

// Latent position matrices and the positions TSV format:
//
//   # dim r=<r>
//   # geometry <hyperbolic|euclidean>
//   <node_id>\t<c0>\t<c1>...
//
// Hyperbolic rows carry r+1 Lorentz coordinates, Euclidean rows r coordinates,
// each printed with 17 significant digits.

#include <charconv>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hyperloom/errors.hpp"
#include "hyperloom/geometry.hpp"

namespace hyperloom {

enum class Geometry { hyperbolic, euclidean };

inline std::string to_string(Geometry g) { return g == Geometry::hyperbolic ? "hyperbolic" : "euclidean"; }

inline Geometry parse_geometry(std::string_view s) {
  if (s == "hyperbolic") return Geometry::hyperbolic;
  if (s == "euclidean") return Geometry::euclidean;
  throw ConfigurationError("unknown geometry '" + std::string(s) + "'");
}

/// Number of stored coordinates per node for latent dimension r.
inline std::size_t coordinate_count(Geometry g, std::size_t r) { return g == Geometry::hyperbolic ? r + 1 : r; }

class PositionMatrix {
 public:
  PositionMatrix() = default;
  PositionMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  const double* row_ptr(std::size_t i) const noexcept { return data_.data() + i * cols_; }
  double* row_ptr(std::size_t i) noexcept { return data_.data() + i * cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  friend bool operator==(const PositionMatrix&, const PositionMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline PositionMatrix positions_from_points(std::span<const LorentzPoint> points) {
  if (points.empty()) return {};
  PositionMatrix m(points.size(), points[0].coords().size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = points[i].coords();
    if (c.size() != m.cols()) throw DimensionError("positions_from_points: mixed dimensions");
    std::copy(c.begin(), c.end(), m.row(i).begin());
  }
  return m;
}

inline LorentzPoint point_at(const PositionMatrix& m, std::size_t i) {
  const auto r = m.row(i);
  return LorentzPoint(std::vector<double>(r.begin(), r.end()));
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest representation that round-trips (at most 17 significant digits).
inline std::string format_shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
  return v;
}

template <class Int>
Int parse_integer(std::string_view tok, std::size_t line) {
  Int v{};
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  return v;
}

inline std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

struct PositionsFile {
  PositionMatrix positions;
  std::size_t r = 2;
  Geometry geometry = Geometry::hyperbolic;
};

inline void write_positions(std::ostream& out, const PositionMatrix& m, std::size_t r, Geometry g) {
  if (m.rows() > 0 && m.cols() != coordinate_count(g, r)) throw DimensionError("write_positions: column count does not match r");
  out << "# dim r=" << r << '\n' << "# geometry " << to_string(g) << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << i;
    for (double v : m.row(i)) out << '\t' << format_g17(v);
    out << '\n';
  }
  if (!out) throw Error(ErrorClass::data, "write_positions: write failed");
}

inline PositionsFile read_positions(std::istream& in) {
  PositionsFile f;
  bool have_dim = false;
  std::vector<double> values;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      auto toks = split_whitespace(sv.substr(1));
      if (toks.size() == 2 && toks[0] == "dim" && toks[1].starts_with("r=")) {
        f.r = parse_integer<std::size_t>(toks[1].substr(2), lineno);
        have_dim = true;
      } else if (toks.size() == 2 && toks[0] == "geometry") {
        try {
          f.geometry = parse_geometry(toks[1]);
        } catch (const ConfigurationError&) {
          throw ParseError(lineno, "unknown geometry");
        }
      }
      continue;
    }
    if (!have_dim) throw ParseError(lineno, "missing '# dim r=<r>' header");
    auto toks = split_whitespace(sv);
    const std::size_t cols = coordinate_count(f.geometry, f.r);
    if (toks.size() != cols + 1) throw ParseError(lineno, "expected node id and " + std::to_string(cols) + " coordinates");
    if (parse_integer<std::size_t>(toks[0], lineno) != n) throw ParseError(lineno, "node ids must be 0..N-1 in order");
    const std::size_t start = values.size();
    for (std::size_t c = 0; c < cols; ++c) values.push_back(parse_double(toks[c + 1], lineno));
    if (f.geometry == Geometry::hyperbolic) {
      std::span<const double> row(values.data() + start, cols);
      if (!(row[0] > 0.0) || manifold_defect(row) > 1e-8) throw ParseError(lineno, "row is not on the hyperboloid");
    }
    ++n;
  }
  if (!have_dim) throw ParseError(lineno, "missing '# dim r=<r>' header");
  f.positions = PositionMatrix(n, coordinate_count(f.geometry, f.r));
  std::copy(values.begin(), values.end(), f.positions.row_ptr(0));
  return f;
}

}  // namespace hyperloom
