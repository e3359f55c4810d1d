#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ultrametric/metric.hpp"
#include "ultrametric/tree.hpp"
#include "ultrametric/wavelet.hpp"

namespace umw {

/// Radial kernel T(x, y) = T^(I) with I the merge vertex of x and y.
/// One nonnegative coefficient per internal vertex; leaf slots stay zero.
class RadialKernel {
 public:
  explicit RadialKernel(const UltrametricTree& tree) : coefficients_(tree.vertex_count(), 0.0) {}

  double operator[](VertexId v) const { return coefficients_[v]; }
  const std::vector<double>& coefficients() const { return coefficients_; }

  void set(const UltrametricTree& tree, VertexId v, double value) {
    if (v >= coefficients_.size()) throw std::invalid_argument("kernel vertex out of range");
    if (tree.is_leaf(v)) throw std::invalid_argument("kernel coefficient on leaf " + tree.format(v));
    if (!(value >= 0.0) || !std::isfinite(value))
      throw std::invalid_argument("kernel coefficient at " + tree.format(v) + " must be finite and >= 0");
    coefficients_[v] = value;
  }

 private:
  std::vector<double> coefficients_;
};

struct ConstantKernel {
  double c = 1.0;
};

/// T^(I) = μ(D_I)^−(1+α).
struct PowerLawKernel {
  double alpha = 1.0;
};

/// Coefficients by vertex address; internal vertices not listed get 0.
struct ExplicitKernel {
  std::map<TreeAddress, double> values;
};

using KernelKind = std::variant<ConstantKernel, PowerLawKernel, ExplicitKernel>;

inline RadialKernel make_kernel(const UltrametricTree& tree, const KernelKind& kind) {
  RadialKernel k(tree);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantKernel>) {
          if (!(s.c >= 0.0)) throw std::invalid_argument("constant kernel must be >= 0");
          for (VertexId v = 0; v < tree.vertex_count(); ++v)
            if (!tree.is_leaf(v)) k.set(tree, v, s.c);
        } else if constexpr (std::is_same_v<S, PowerLawKernel>) {
          if (!std::isfinite(s.alpha)) throw std::invalid_argument("power-law exponent must be finite");
          for (VertexId v = 0; v < tree.vertex_count(); ++v)
            if (!tree.is_leaf(v)) k.set(tree, v, std::pow(tree.measure_value(v), -(1.0 + s.alpha)));
        } else {
          for (const auto& [addr, value] : s.values) k.set(tree, tree.require(addr), value);
        }
      },
      kind);
  return k;
}

/// Kernel between two distinct points (leaf ids).
inline double kernel_between(const UltrametricTree& tree, const RadialKernel& kernel, VertexId x, VertexId y) {
  if (x == y) throw std::invalid_argument("kernel is not evaluated on the diagonal");
  return kernel[tree.meet(x, y)];
}

inline double kernel_eval(const UltrametricTree& tree, const RadialKernel& kernel, const TreeAddress& x,
                          const TreeAddress& y) {
  return kernel_between(tree, kernel, point_of(tree, x), point_of(tree, y));
}

inline constexpr std::size_t kMaxDenseLeaves = 4096;

inline void check_dense_size(const UltrametricTree& tree) {
  if (tree.leaf_count() > kMaxDenseLeaves)
    throw std::length_error("dense operator paths are limited to " + std::to_string(kMaxDenseLeaves) + " leaves");
}

/// (Tf)(x) = Σ_{y≠x} T(x,y) (f(x) − f(y)) μ(y): exact quadrature of the
/// integral operator for leaf-constant f. O(N²).
inline GridFunction apply_dense(const UltrametricTree& tree, const RadialKernel& kernel, const GridFunction& f) {
  check_size(tree, f);
  check_dense_size(tree);
  const std::size_t n = tree.leaf_count();
  GridFunction out(tree);
  for (std::size_t i = 0; i < n; ++i) {
    const VertexId x = tree.leaf_vertex(i);
    Complex s = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const VertexId y = tree.leaf_vertex(k);
      s += kernel_between(tree, kernel, x, y) * (f[i] - f[k]) * tree.measure_value(y);
    }
    out[i] = s;
  }
  return out;
}

/// Operator matrix in the orthonormal leaf basis e_x / √μ(x); symmetric
/// whenever the kernel is.
inline Eigen::MatrixXd operator_matrix(const UltrametricTree& tree, const RadialKernel& kernel) {
  check_dense_size(tree);
  const auto n = static_cast<Eigen::Index>(tree.leaf_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const VertexId x = tree.leaf_vertex(static_cast<std::size_t>(i));
    double diag = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const VertexId y = tree.leaf_vertex(static_cast<std::size_t>(k));
      const double t = kernel_between(tree, kernel, x, y);
      diag += t * tree.measure_value(y);
      m(i, k) = -t * std::sqrt(tree.measure_value(x) * tree.measure_value(y));
    }
    m(i, i) = diag;
  }
  return m;
}

/// λ_I = T^(I) μ(D_I) + Σ_{J>I} T^(J) μ(D_J)(1 − 1/p_J), J running up to the
/// top vertex. The truncated sum is finite, so no convergence condition is
/// needed.
inline double eigenvalue_series_at(const UltrametricTree& tree, const RadialKernel& kernel, VertexId v) {
  if (tree.is_leaf(v)) throw std::invalid_argument("eigenvalues are indexed by internal vertices");
  double lambda = kernel[v] * tree.measure_value(v);
  for (VertexId j = tree.parent(v); j != kNoVertex; j = tree.parent(j)) {
    const auto p = tree.branching(j);
    lambda += kernel[j] * to_double(tree.measure(j) * Rational(p - 1, p));
  }
  return lambda;
}

inline double eigenvalue_series(const UltrametricTree& tree, const RadialKernel& kernel, const TreeAddress& vertex) {
  return eigenvalue_series_at(tree, kernel, tree.require(vertex));
}

/// Series eigenvalue with exact rational kernel coefficients (indexed by
/// vertex id), for symbolic identities.
inline Rational exact_eigenvalue_series(const UltrametricTree& tree, const std::vector<Rational>& coefficients,
                                        VertexId v) {
  if (tree.is_leaf(v)) throw std::invalid_argument("eigenvalues are indexed by internal vertices");
  if (coefficients.size() != tree.vertex_count()) throw std::invalid_argument("one coefficient per vertex expected");
  Rational lambda = coefficients[v] * tree.measure(v);
  for (VertexId j = tree.parent(v); j != kNoVertex; j = tree.parent(j)) {
    const auto p = tree.branching(j);
    lambda += coefficients[j] * tree.measure(j) * Rational(p - 1, p);
  }
  return lambda;
}

/// λ_I = ∫_{|Iy|>|I|} T(I,y) dμ(y) + T(I, I1) μ(D_I), where the point I is the
/// all-zero continuation of vertex I and I1 that of its child 1. The integral
/// is a finite sum over leaves outside D_I.
inline double eigenvalue_integral_at(const UltrametricTree& tree, const RadialKernel& kernel, VertexId v) {
  if (tree.is_leaf(v)) throw std::invalid_argument("eigenvalues are indexed by internal vertices");
  const VertexId point = tree.zero_extension(v);
  const VertexId point1 = tree.zero_extension(tree.child(v, 1));
  const Rational radius = distance_between(tree, point, point1);

  double integral = 0;
  for (std::size_t k = 0; k < tree.leaf_count(); ++k) {
    const VertexId y = tree.leaf_vertex(k);
    if (distance_between(tree, point, y) > radius) integral += kernel_between(tree, kernel, point, y) * tree.measure_value(y);
  }

  const double on_sphere = kernel_between(tree, kernel, point, point1);
  // Radial kernels take one value on the sphere |Iy| = |I|; the last child is another representative.
  const VertexId other = tree.zero_extension(tree.child(v, tree.branching(v) - 1));
  if (kernel_between(tree, kernel, point, other) != on_sphere)
    throw std::logic_error("kernel is not radial on the sphere around " + tree.format(v));
  return integral + on_sphere * tree.measure_value(v);
}

inline double eigenvalue_integral(const UltrametricTree& tree, const RadialKernel& kernel, const TreeAddress& vertex) {
  return eigenvalue_integral_at(tree, kernel, tree.require(vertex));
}

/// One eigenvalue per internal vertex (shared by all its frequencies j);
/// the mean slot has eigenvalue 0.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> lambda) : lambda_(std::move(lambda)) {}

  double operator[](VertexId v) const { return lambda_[v]; }
  double mean() const { return 0.0; }
  const std::vector<double>& values() const { return lambda_; }

 private:
  std::vector<double> lambda_;
};

/// Series eigenvalues of every internal vertex in one top-down pass.
inline Spectrum spectrum(const UltrametricTree& tree, const RadialKernel& kernel) {
  std::vector<double> above(tree.vertex_count(), 0.0);
  std::vector<double> lambda(tree.vertex_count(), 0.0);
  for (VertexId v = 0; v < tree.vertex_count(); ++v) {
    const auto p = tree.branching(v);
    if (p == 0) continue;
    lambda[v] = kernel[v] * tree.measure_value(v) + above[v];
    const double carried = above[v] + kernel[v] * to_double(tree.measure(v) * Rational(p - 1, p));
    const auto first = tree.vertex(v).first_child;
    for (std::uint32_t k = 0; k < p; ++k) above[first + k] = carried;
  }
  return Spectrum(std::move(lambda));
}

/// Diagonal action λ ⊙ coefficients; the mean coefficient is annihilated.
inline WaveletCoefficients apply_in_basis(const UltrametricTree& tree, const Spectrum& spec, WaveletCoefficients c) {
  for (VertexId v = 0; v < tree.vertex_count(); ++v) {
    const auto p = tree.branching(v);
    if (p == 0) continue;
    Complex* slot = c.wavelets().data() + tree.vertex(v).coefficient_offset;
    for (std::uint32_t j = 1; j < p; ++j) slot[j - 1] *= spec[v];
  }
  c.mean() *= spec.mean();
  return c;
}

inline GridFunction apply_spectral(const UltrametricTree& tree, const RadialKernel& kernel, const GridFunction& f) {
  return inverse(tree, apply_in_basis(tree, spectrum(tree, kernel), forward(tree, f)));
}

}  // namespace umw
