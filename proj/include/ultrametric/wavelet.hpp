#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ultrametric/metric.hpp"
#include "ultrametric/tree.hpp"

namespace umw {

using Complex = std::complex<double>;

/// Function that is constant on every leaf ball; values follow the
/// lexicographic leaf order of the tree.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(std::size_t leaf_count) : values_(leaf_count) {}
  explicit GridFunction(std::vector<Complex> values) : values_(std::move(values)) {}
  explicit GridFunction(const UltrametricTree& tree) : values_(tree.leaf_count()) {}

  std::size_t size() const { return values_.size(); }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }

 private:
  std::vector<Complex> values_;
};

inline void check_size(const UltrametricTree& tree, const GridFunction& f) {
  if (f.size() != tree.leaf_count())
    throw std::invalid_argument("function has " + std::to_string(f.size()) + " values, tree has " +
                                std::to_string(tree.leaf_count()) + " leaves");
}

/// ⟨f, g⟩ = Σ conj(f) g μ(leaf); exact integral of leaf-constant functions.
inline Complex inner_product(const UltrametricTree& tree, const GridFunction& f, const GridFunction& g) {
  check_size(tree, f);
  check_size(tree, g);
  Complex s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i] * tree.measure_value(tree.leaf_vertex(i));
  return s;
}

inline double norm_squared(const UltrametricTree& tree, const GridFunction& f) {
  return inner_product(tree, f, f).real();
}

inline double max_abs_difference(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Wavelet ψ_{Ij}: internal vertex I and frequency 1 ≤ j ≤ p_I − 1.
struct WaveletIndex {
  VertexId vertex = 0;
  std::uint32_t j = 1;

  friend bool operator==(const WaveletIndex&, const WaveletIndex&) = default;
};

inline void validate(const UltrametricTree& tree, const WaveletIndex& idx) {
  if (idx.vertex >= tree.vertex_count()) throw std::invalid_argument("wavelet vertex out of range");
  const auto p = tree.branching(idx.vertex);
  if (p == 0) throw std::invalid_argument("wavelet vertex " + tree.format(idx.vertex) + " is a leaf");
  if (idx.j < 1 || idx.j >= p)
    throw std::invalid_argument("wavelet frequency j=" + std::to_string(idx.j) + " outside [1, " +
                                std::to_string(p - 1) + "] at vertex " + tree.format(idx.vertex));
}

inline WaveletIndex wavelet_index(const UltrametricTree& tree, const TreeAddress& vertex, std::uint32_t j) {
  WaveletIndex idx{tree.require(vertex), j};
  validate(tree, idx);
  return idx;
}

/// All wavelet indices in coefficient-slot order (vertex id, then j).
inline std::vector<WaveletIndex> basis_indices(const UltrametricTree& tree) {
  std::vector<WaveletIndex> out;
  out.reserve(tree.wavelet_count());
  for (VertexId v = 0; v < tree.vertex_count(); ++v)
    for (std::uint32_t j = 1; j < tree.branching(v); ++j) out.push_back({v, j});
  return out;
}

/// Spectral representation: one coefficient per wavelet plus the
/// coefficient of the normalized top-ball indicator.
class WaveletCoefficients {
 public:
  WaveletCoefficients() = default;
  explicit WaveletCoefficients(const UltrametricTree& tree) : wavelets_(tree.wavelet_count()) {}

  Complex& at(const UltrametricTree& tree, const WaveletIndex& idx) { return wavelets_[slot(tree, idx)]; }
  const Complex& at(const UltrametricTree& tree, const WaveletIndex& idx) const {
    return wavelets_[slot(tree, idx)];
  }

  Complex& mean() { return mean_; }
  const Complex& mean() const { return mean_; }
  std::vector<Complex>& wavelets() { return wavelets_; }
  const std::vector<Complex>& wavelets() const { return wavelets_; }

  double energy() const {
    double e = std::norm(mean_);
    for (const auto& c : wavelets_) e += std::norm(c);
    return e;
  }

  static std::size_t slot(const UltrametricTree& tree, const WaveletIndex& idx) {
    validate(tree, idx);
    return tree.vertex(idx.vertex).coefficient_offset + idx.j - 1;
  }

 private:
  std::vector<Complex> wavelets_;
  Complex mean_{0.0, 0.0};
};

namespace detail {

/// e^{2πi m/p} for m = 0..p−1, with the angle reduced before evaluation.
class UnitRoots {
 public:
  const std::vector<Complex>& operator()(std::uint32_t p) {
    auto it = cache_.find(p);
    if (it != cache_.end()) return it->second;
    std::vector<Complex> roots(p);
    for (std::uint32_t m = 0; m < p; ++m)
      roots[m] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(p));
    return cache_.emplace(p, std::move(roots)).first->second;
  }

 private:
  std::map<std::uint32_t, std::vector<Complex>> cache_;
};

}  // namespace detail

/// ψ_{Ij}(x) = exp(2πi j x_I / p_I) Ω_I(x) / √μ(D_I), with x_I the digit of
/// x just below I. Non-leaf addresses are read as their all-zero continuation.
inline Complex evaluate_wavelet(const UltrametricTree& tree, const WaveletIndex& idx, const TreeAddress& x) {
  validate(tree, idx);
  const VertexId leaf = point_of(tree, x);
  if (!tree.is_ancestor_or_self(idx.vertex, leaf)) return 0.0;
  const auto p = tree.branching(idx.vertex);
  const auto digit = tree.vertex(tree.ancestor_at_depth(leaf, tree.depth(idx.vertex) + 1)).digit;
  const auto m = static_cast<double>((static_cast<std::uint64_t>(idx.j) * digit) % p);
  return std::polar(1.0, 2.0 * std::numbers::pi * m / p) / std::sqrt(tree.measure_value(idx.vertex));
}

/// Samples ψ_{Ij} on every leaf.
inline GridFunction synthesize_wavelet(const UltrametricTree& tree, const WaveletIndex& idx) {
  validate(tree, idx);
  GridFunction f(tree);
  const auto [begin, end] = tree.leaf_range(idx.vertex);
  const auto p = tree.branching(idx.vertex);
  const double scale = 1.0 / std::sqrt(tree.measure_value(idx.vertex));
  for (auto i = begin; i < end; ++i) {
    const auto digit = tree.vertex(tree.ancestor_at_depth(tree.leaf_vertex(i), tree.depth(idx.vertex) + 1)).digit;
    const auto m = static_cast<double>((static_cast<std::uint64_t>(idx.j) * digit) % p);
    f[i] = std::polar(scale, 2.0 * std::numbers::pi * m / p);
  }
  return f;
}

/// Normalized indicator of the top ball, the basis slot completing the
/// wavelets on the truncated space.
inline GridFunction mean_function(const UltrametricTree& tree) {
  GridFunction f(tree);
  const double v = 1.0 / std::sqrt(tree.measure_value(tree.top()));
  for (auto& x : f.values()) x = v;
  return f;
}

/// Coefficients ⟨ψ_{Ij}, f⟩ and ⟨Ω_top/√μ, f⟩. Ball integrals are accumulated
/// bottom-up, then each internal vertex applies a length-p_I DFT to its
/// children's integrals. Cost O(Σ p_I²).
inline WaveletCoefficients forward(const UltrametricTree& tree, const GridFunction& f) {
  check_size(tree, f);
  std::vector<Complex> integral(tree.vertex_count());
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
    const VertexId v = tree.leaf_vertex(i);
    integral[v] = f[i] * tree.measure_value(v);
  }
  WaveletCoefficients out(tree);
  detail::UnitRoots roots;
  for (VertexId v = static_cast<VertexId>(tree.vertex_count()); v-- > 0;) {
    const auto p = tree.branching(v);
    if (p == 0) continue;
    const auto first = tree.vertex(v).first_child;
    Complex sum = 0;
    for (std::uint32_t k = 0; k < p; ++k) sum += integral[first + k];
    integral[v] = sum;

    const auto& w = roots(p);
    const double scale = 1.0 / std::sqrt(tree.measure_value(v));
    Complex* slot = out.wavelets().data() + tree.vertex(v).coefficient_offset;
    for (std::uint32_t j = 1; j < p; ++j) {
      Complex c = 0;
      for (std::uint32_t k = 0; k < p; ++k) c += std::conj(w[(static_cast<std::uint64_t>(j) * k) % p]) * integral[first + k];
      slot[j - 1] = c * scale;
    }
  }
  out.mean() = integral[tree.top()] / std::sqrt(tree.measure_value(tree.top()));
  return out;
}

/// Reconstruction Σ c_{Ij} ψ_{Ij} + mean · Ω_top/√μ, accumulated top-down.
inline GridFunction inverse(const UltrametricTree& tree, const WaveletCoefficients& coeffs) {
  if (coeffs.wavelets().size() != tree.wavelet_count())
    throw std::invalid_argument("coefficient set has " + std::to_string(coeffs.wavelets().size()) +
                                " wavelet entries, tree needs " + std::to_string(tree.wavelet_count()));
  std::vector<Complex> value(tree.vertex_count());
  value[tree.top()] = coeffs.mean() / std::sqrt(tree.measure_value(tree.top()));
  detail::UnitRoots roots;
  for (VertexId v = 0; v < tree.vertex_count(); ++v) {
    const auto p = tree.branching(v);
    if (p == 0) continue;
    const auto first = tree.vertex(v).first_child;
    const auto& w = roots(p);
    const double scale = 1.0 / std::sqrt(tree.measure_value(v));
    const Complex* slot = coeffs.wavelets().data() + tree.vertex(v).coefficient_offset;
    for (std::uint32_t k = 0; k < p; ++k) {
      Complex s = 0;
      for (std::uint32_t j = 1; j < p; ++j) s += slot[j - 1] * w[(static_cast<std::uint64_t>(j) * k) % p];
      value[first + k] = value[v] + s * scale;
    }
  }
  GridFunction f(tree);
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) f[i] = value[tree.leaf_vertex(i)];
  return f;
}

inline constexpr std::size_t kMaxGramLeaves = 1024;

/// Inner products among an explicit list of functions.
inline Eigen::MatrixXcd gram_of(const UltrametricTree& tree, const std::vector<GridFunction>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto leaves = static_cast<Eigen::Index>(tree.leaf_count());
  Eigen::MatrixXcd samples(leaves, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    check_size(tree, basis[static_cast<std::size_t>(b)]);
    for (Eigen::Index i = 0; i < leaves; ++i)
      samples(i, b) = basis[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] *
                      std::sqrt(tree.measure_value(tree.leaf_vertex(static_cast<std::size_t>(i))));
  }
  return samples.adjoint() * samples;
}

/// Every wavelet in slot order followed by the mean function.
inline std::vector<GridFunction> basis_functions(const UltrametricTree& tree) {
  std::vector<GridFunction> basis;
  basis.reserve(tree.leaf_count());
  for (const auto& idx : basis_indices(tree)) basis.push_back(synthesize_wavelet(tree, idx));
  basis.push_back(mean_function(tree));
  return basis;
}

/// N×N Gram matrix of the full basis by direct summation; verification path
/// limited to N ≤ 1024 leaves.
inline Eigen::MatrixXcd gram_matrix(const UltrametricTree& tree) {
  if (tree.leaf_count() > kMaxGramLeaves)
    throw std::length_error("gram_matrix is limited to " + std::to_string(kMaxGramLeaves) + " leaves");
  return gram_of(tree, basis_functions(tree));
}

}  // namespace umw
