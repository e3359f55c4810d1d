#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <iterator>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ultrametric/metric.hpp"
#include "ultrametric/rational.hpp"
#include "ultrametric/tree.hpp"
#include "ultrametric/wavelet.hpp"

namespace umw {

/// Step function on the half-line: value k on [t_k, t_{k+1}), zero outside
/// [t_0, t_m). Breakpoints are exact.
class PiecewiseConstantFn {
 public:
  PiecewiseConstantFn(std::vector<Rational> breakpoints, std::vector<Complex> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() < 2) throw std::invalid_argument("need at least two breakpoints");
    if (values_.size() + 1 != breakpoints_.size())
      throw std::invalid_argument("need one value per interval");
    for (std::size_t k = 1; k < breakpoints_.size(); ++k)
      if (!(breakpoints_[k - 1] < breakpoints_[k])) throw std::invalid_argument("breakpoints must increase strictly");
  }

  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Complex>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }
  const Rational& left() const { return breakpoints_.front(); }
  const Rational& right() const { return breakpoints_.back(); }

  Complex operator()(const Rational& t) const {
    if (t < left() || !(t < right())) return 0.0;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
  }

 private:
  std::vector<Rational> breakpoints_;
  std::vector<Complex> values_;
};

/// ∫ conj(a) b dt over the merged breakpoint grid.
inline Complex inner_product(const PiecewiseConstantFn& a, const PiecewiseConstantFn& b) {
  std::vector<Rational> grid;
  grid.reserve(a.breakpoints().size() + b.breakpoints().size());
  std::merge(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(), b.breakpoints().end(),
             std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  Complex s = 0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const Rational& t = grid[k];
    const Complex va = a(t);
    const Complex vb = b(t);
    if (va == 0.0 || vb == 0.0) continue;
    s += std::conj(va) * vb * to_double(grid[k + 1] - t);
  }
  return s;
}

inline Rational rho_of(const UltrametricTree& tree, VertexId v) {
  Rational t = 0;
  for (; tree.parent(v) != kNoVertex; v = tree.parent(v))
    if (tree.vertex(v).digit != 0) t += tree.measure(v) * tree.vertex(v).digit;
  return t;
}

/// Ultrametric change of variable ρ(x) = Σ_k x_k μ(ball entered by digit k).
/// Vertices map like their all-zero continuation. Image of the top ball is
/// [0, top_measure].
inline Rational rho(const UltrametricTree& tree, const TreeAddress& x) { return rho_of(tree, tree.require(x)); }

/// [ρ(I), ρ(I) + μ(D_I)], the image of the ball D_I up to finitely many points.
inline std::pair<Rational, Rational> ball_interval(const UltrametricTree& tree, const TreeAddress& vertex) {
  const VertexId v = tree.require(vertex);
  Rational left = rho_of(tree, v);
  Rational right = left + tree.measure(v);
  return {std::move(left), std::move(right)};
}

/// Leaf whose half-open image [ρ, ρ + μ) contains t; t on a shared boundary
/// goes to the right-hand (terminating) address, and t = top_measure to the
/// last leaf.
inline TreeAddress rho_preimage(const UltrametricTree& tree, const Rational& t) {
  if (t < 0 || t > tree.top_measure())
    throw std::out_of_range("t = " + format_rational(t) + " outside [0, " + format_rational(tree.top_measure()) + "]");
  VertexId v = tree.top();
  Rational offset = t;
  while (!tree.is_leaf(v)) {
    const auto p = tree.branching(v);
    const Rational width = tree.measure(v) / p;
    Rational q = offset / width;
    BigInt k = boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q);
    if (k >= p) k = p - 1;
    const auto digit = k.convert_to<std::uint32_t>();
    offset -= width * digit;
    v = tree.child(v, digit);
  }
  return tree.address(v);
}

/// Image Ψ_{Ij} = ψ_{Ij} ∘ ρ⁻¹: p_I pieces over the children's intervals with
/// value exp(2πi j k / p_I) / √μ(D_I) on the k-th.
inline PiecewiseConstantFn export_wavelet(const UltrametricTree& tree, const WaveletIndex& idx) {
  validate(tree, idx);
  const auto p = tree.branching(idx.vertex);
  const Rational left = rho_of(tree, idx.vertex);
  const Rational width = tree.measure(idx.vertex) / p;
  const double scale = 1.0 / std::sqrt(tree.measure_value(idx.vertex));
  std::vector<Rational> breaks;
  std::vector<Complex> values;
  breaks.reserve(p + 1);
  for (std::uint32_t k = 0; k <= p; ++k) breaks.push_back(left + width * k);
  for (std::uint32_t k = 0; k < p; ++k) {
    const auto m = static_cast<double>((static_cast<std::uint64_t>(idx.j) * k) % p);
    values.push_back(std::polar(scale, 2.0 * std::numbers::pi * m / p));
  }
  return PiecewiseConstantFn(std::move(breaks), std::move(values));
}

/// The normalized indicator of [0, top_measure], image of the mean slot.
inline PiecewiseConstantFn export_mean(const UltrametricTree& tree) {
  return PiecewiseConstantFn({Rational(0), tree.top_measure()},
                             {Complex(1.0 / std::sqrt(tree.measure_value(tree.top())), 0.0)});
}

struct HolderGap {
  Rational real_gap;
  Rational ultrametric;
};

/// Both sides of |ρ(x) − ρ(y)| ≤ |xy|. The ultrametric side is the diameter
/// of the merge ball, the metric in which ball measure equals diameter (it
/// coincides with distance() when R is the top vertex and top_measure is 1).
inline HolderGap holder_gap(const UltrametricTree& tree, const TreeAddress& x, const TreeAddress& y) {
  const VertexId px = point_of(tree, x);
  const VertexId py = point_of(tree, y);
  if (px == py) return {Rational(0), Rational(0)};
  Rational gap = rho_of(tree, px) - rho_of(tree, py);
  if (gap < 0) gap = -gap;
  return {std::move(gap), tree.measure(tree.meet(px, py))};
}

}  // namespace umw
