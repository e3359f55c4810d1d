#pragma once

#include "ultrametric/rational.hpp"
#include "ultrametric/tree.hpp"

namespace umw {

/// A ball D_I of the truncated space. Its diameter equals its measure.
struct Ball {
  TreeAddress vertex;
  Rational measure;

  const Rational& diameter() const { return measure; }
  bool contains(const TreeAddress& x) const { return vertex.is_prefix_of(x); }
};

/// Resolves an address to a point: vertices are identified with the leaf
/// reached from them by all-zero digits.
inline VertexId point_of(const UltrametricTree& tree, const TreeAddress& x) {
  return tree.zero_extension(tree.require(x));
}

/// Distance between two points (leaf ids) as the product of branching
/// indices along the directed path from the root R to the merge vertex:
/// +1 exponent on edges going up toward infinity, −1 on edges going down.
/// Each edge carries the branching index of its upper vertex.
inline Rational distance_between(const UltrametricTree& tree, VertexId x, VertexId y) {
  if (x == y) return Rational(0);
  const VertexId merge = tree.meet(x, y);
  const VertexId sup = tree.meet(tree.root(), merge);
  Rational d = 1;
  for (VertexId v = tree.root(); v != sup;) {
    v = tree.parent(v);
    d *= tree.branching(v);
  }
  for (VertexId v = merge; v != sup;) {
    v = tree.parent(v);
    d /= tree.branching(v);
  }
  return d;
}

inline Rational distance(const UltrametricTree& tree, const TreeAddress& x, const TreeAddress& y) {
  return distance_between(tree, point_of(tree, x), point_of(tree, y));
}

inline Rational ball_measure(const UltrametricTree& tree, const TreeAddress& vertex) {
  return tree.measure(tree.require(vertex));
}

inline bool ball_contains(const UltrametricTree& tree, const TreeAddress& vertex, const TreeAddress& x) {
  tree.require(vertex);
  tree.require(x);
  return vertex.is_prefix_of(x);
}

inline Ball ball(const UltrametricTree& tree, const TreeAddress& vertex) {
  return Ball{vertex, ball_measure(tree, vertex)};
}

}  // namespace umw
