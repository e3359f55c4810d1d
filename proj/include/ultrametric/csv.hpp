#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "ultrametric/changevar.hpp"
#include "ultrametric/operator.hpp"
#include "ultrametric/rational.hpp"
#include "ultrametric/tree.hpp"
#include "ultrametric/wavelet.hpp"

namespace umw::csv {

/// Malformed CSV input; carries the 1-based line number.
class CsvError : public std::invalid_argument {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::invalid_argument("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kGridHeader = "leaf_address,re,im";
inline constexpr std::string_view kCoefficientHeader = "vertex_address,j,re,im";
inline constexpr std::string_view kKernelHeader = "vertex_address,value";
inline constexpr std::string_view kSpectrumHeader = "vertex_address,lambda,lambda_integral,diff";
inline constexpr std::string_view kPiecewiseHeader = "t_left,t_right,re,im,t_left_exact,t_right_exact";
inline constexpr std::string_view kRhoHeader = "leaf_address,t_exact,t_decimal";
inline constexpr std::string_view kMeanToken = "MEAN";

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Data rows (line number, fields), skipping blank lines, '#' comments and a
/// leading header row.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(std::istream& in,
                                                                               std::string_view header,
                                                                               std::size_t min_fields) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    auto fields = split(line);
    if (first) {
      first = false;
      if (split(header).front() == fields.front()) continue;
    }
    if (fields.size() < min_fields)
      throw CsvError(number, "expected " + std::to_string(min_fields) + " fields, got " + std::to_string(fields.size()));
    rows.emplace_back(number, std::move(fields));
  }
  return rows;
}

template <class F>
auto at_line(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const CsvError&) {
    throw;
  } catch (const std::exception& e) {
    throw CsvError(line, e.what());
  }
}

// GridFunction: leaf_address,re,im

inline void write_grid_function(std::ostream& out, const UltrametricTree& tree, const GridFunction& f) {
  check_size(tree, f);
  out << kGridHeader << '\n';
  for (std::size_t i = 0; i < f.size(); ++i)
    out << tree.format(tree.leaf_vertex(i)) << ',' << format_double(f[i].real()) << ',' << format_double(f[i].imag())
        << '\n';
}

/// Every leaf must appear exactly once; row order is free.
inline GridFunction read_grid_function(std::istream& in, const UltrametricTree& tree) {
  GridFunction f(tree);
  std::vector<bool> seen(tree.leaf_count(), false);
  for (const auto& [line, fields] : read_rows(in, kGridHeader, 3)) {
    at_line(line, [&, &fields = fields, &line = line] {
      const VertexId v = tree.require_leaf(tree.parse(fields[0]));
      const auto i = tree.leaf_index(v);
      if (seen[i]) throw CsvError(line, "duplicate leaf " + fields[0]);
      seen[i] = true;
      f[i] = Complex(parse_double(fields[1]), parse_double(fields[2]));
    });
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw std::invalid_argument("function file has " + std::to_string(std::count(seen.begin(), seen.end(), true)) +
                                  " leaves, tree has " + std::to_string(tree.leaf_count()) + " (missing " +
                                  tree.format(tree.leaf_vertex(i)) + ")");
  return f;
}

// WaveletCoefficients: vertex_address,j,re,im plus MEAN,0,re,im

inline void write_coefficients(std::ostream& out, const UltrametricTree& tree, const WaveletCoefficients& c) {
  out << kCoefficientHeader << '\n';
  out << kMeanToken << ",0," << format_double(c.mean().real()) << ',' << format_double(c.mean().imag()) << '\n';
  for (const auto& idx : basis_indices(tree)) {
    const Complex& v = c.at(tree, idx);
    out << tree.format(idx.vertex) << ',' << idx.j << ',' << format_double(v.real()) << ',' << format_double(v.imag())
        << '\n';
  }
}

/// Every wavelet index and the MEAN row must appear exactly once.
inline WaveletCoefficients read_coefficients(std::istream& in, const UltrametricTree& tree) {
  WaveletCoefficients c(tree);
  std::vector<bool> seen(tree.wavelet_count(), false);
  bool mean_seen = false;
  for (const auto& [line, fields] : read_rows(in, kCoefficientHeader, 4)) {
    at_line(line, [&, &fields = fields, &line = line] {
      const Complex value(parse_double(fields[2]), parse_double(fields[3]));
      if (fields[0] == kMeanToken) {
        if (mean_seen) throw CsvError(line, "duplicate MEAN row");
        mean_seen = true;
        c.mean() = value;
        return;
      }
      const auto j = static_cast<std::uint32_t>(std::stoul(fields[1]));
      const WaveletIndex idx = wavelet_index(tree, tree.parse(fields[0]), j);
      const auto slot = WaveletCoefficients::slot(tree, idx);
      if (seen[slot]) throw CsvError(line, "duplicate coefficient " + fields[0] + "," + fields[1]);
      seen[slot] = true;
      c.wavelets()[slot] = value;
    });
  }
  if (!mean_seen) throw std::invalid_argument("coefficient file has no MEAN row");
  for (const auto& idx : basis_indices(tree))
    if (!seen[WaveletCoefficients::slot(tree, idx)])
      throw std::invalid_argument("missing coefficient for vertex " + tree.format(idx.vertex) +
                                  " j=" + std::to_string(idx.j));
  return c;
}

// Kernel: vertex_address,value

inline ExplicitKernel read_kernel(std::istream& in, const UltrametricTree& tree) {
  ExplicitKernel k;
  for (const auto& [line, fields] : read_rows(in, kKernelHeader, 2)) {
    at_line(line, [&, &fields = fields, &line = line] {
      const TreeAddress a = tree.parse(fields[0]);
      const VertexId v = tree.require(a);
      if (tree.is_leaf(v)) throw CsvError(line, "kernel coefficient on leaf " + fields[0]);
      const double value = parse_double(fields[1]);
      if (!(value >= 0.0)) throw CsvError(line, "negative kernel coefficient at " + fields[0]);
      if (!k.values.emplace(a, value).second) throw CsvError(line, "duplicate vertex " + fields[0]);
    });
  }
  return k;
}

inline void write_kernel(std::ostream& out, const UltrametricTree& tree, const RadialKernel& kernel) {
  out << kKernelHeader << '\n';
  for (VertexId v = 0; v < tree.vertex_count(); ++v)
    if (!tree.is_leaf(v)) out << tree.format(v) << ',' << format_double(kernel[v]) << '\n';
}

/// `constant:<c>`, `power:<alpha>`, or a path to a kernel CSV file.
inline KernelKind parse_kernel_spec(const std::string& spec, const UltrametricTree& tree) {
  auto after = [&](std::string_view prefix) -> std::optional<std::string> {
    if (spec.rfind(prefix, 0) == 0) return spec.substr(prefix.size());
    return std::nullopt;
  };
  if (auto v = after("constant:")) {
    const double c = parse_double(*v);
    if (!(c >= 0.0)) throw std::invalid_argument("kernel constant must be >= 0");
    return ConstantKernel{c};
  }
  if (auto v = after("power:")) return PowerLawKernel{parse_double(*v)};
  std::string path = after("file:").value_or(spec);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("kernel spec '" + spec + "' is neither constant:, power: nor a readable file");
  return read_kernel(in, tree);
}

// Spectrum: vertex_address,lambda,lambda_integral,diff

inline void write_spectrum(std::ostream& out, const UltrametricTree& tree, const std::vector<double>& series,
                           const std::vector<double>& integral) {
  out << kSpectrumHeader << '\n';
  for (VertexId v = 0; v < tree.vertex_count(); ++v) {
    if (tree.is_leaf(v)) continue;
    out << tree.format(v) << ',' << format_double(series[v]) << ',' << format_double(integral[v]) << ','
        << format_double(series[v] - integral[v]) << '\n';
  }
}

// Piecewise function: t_left,t_right,re,im,t_left_exact,t_right_exact

inline void write_piecewise(std::ostream& out, const PiecewiseConstantFn& fn, unsigned precision, bool header = true) {
  if (header) out << kPiecewiseHeader << '\n';
  const auto& b = fn.breakpoints();
  for (std::size_t k = 0; k < fn.pieces(); ++k)
    out << format_decimal(b[k], precision) << ',' << format_decimal(b[k + 1], precision) << ','
        << format_double(fn.values()[k].real()) << ',' << format_double(fn.values()[k].imag()) << ','
        << format_rational(b[k]) << ',' << format_rational(b[k + 1]) << '\n';
}

/// Reads the exact columns back; decimal columns are ignored.
inline PiecewiseConstantFn read_piecewise(std::istream& in) {
  std::vector<Rational> breaks;
  std::vector<Complex> values;
  for (const auto& [line, fields] : read_rows(in, kPiecewiseHeader, 6)) {
    at_line(line, [&, &fields = fields, &line = line] {
      Rational left = parse_rational(fields[4]);
      Rational right = parse_rational(fields[5]);
      if (breaks.empty())
        breaks.push_back(left);
      else if (breaks.back() != left)
        throw CsvError(line, "pieces are not contiguous");
      breaks.push_back(right);
      values.emplace_back(parse_double(fields[2]), parse_double(fields[3]));
    });
  }
  return PiecewiseConstantFn(std::move(breaks), std::move(values));
}

// rho map: leaf_address,t_exact,t_decimal

inline void write_rho_map(std::ostream& out, const UltrametricTree& tree, unsigned precision) {
  out << kRhoHeader << '\n';
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
    const VertexId v = tree.leaf_vertex(i);
    const Rational t = rho_of(tree, v);
    out << tree.format(v) << ',' << format_rational(t) << ',' << format_decimal(t, precision) << '\n';
  }
}

}  // namespace umw::csv
