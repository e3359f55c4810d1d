#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ultrametric/address.hpp"
#include "ultrametric/rational.hpp"

namespace umw {

/// Every vertex has `p` children down to `depth` levels.
struct Homogeneous {
  unsigned p = 2;
  unsigned depth = 1;
};

/// Level k (top = level 0) has branching index `p[k]`.
struct PerLevel {
  std::vector<unsigned> p;
};

/// Recursive description; a node without children is a leaf.
struct ExplicitNode {
  std::vector<ExplicitNode> children;
};

using BranchingSpec = std::variant<Homogeneous, PerLevel, ExplicitNode>;

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// Finite truncation of a directed tree: one top ball subdivided down to the
/// leaf balls, with a designated root vertex R for the distance.
///
/// Vertices are stored so that the children of every internal vertex occupy
/// a contiguous id block and every child id is larger than its parent id.
/// Leaves are numbered in lexicographic address order, so every ball covers
/// a contiguous leaf range. Immutable after construction.
class UltrametricTree {
 public:
  struct Vertex {
    VertexId parent = kNoVertex;
    TreeAddress::Digit digit = 0;  // index among the parent's children
    std::uint32_t depth = 0;
    VertexId first_child = kNoVertex;
    std::uint32_t branching = 0;  // 0 for leaves
    std::uint32_t leaf_begin = 0;
    std::uint32_t leaf_end = 0;
    std::uint32_t coefficient_offset = 0;  // first slot of (vertex, j = 1)
  };

  static UltrametricTree build(const BranchingSpec& spec, std::optional<TreeAddress> root = std::nullopt,
                               Rational top_measure = 1) {
    if (top_measure <= 0) throw std::invalid_argument("top_measure must be positive");
    UltrametricTree t;
    t.top_measure_ = top_measure;
    t.vertices_.push_back(Vertex{});
    t.measures_.push_back(top_measure);

    std::visit(
        [&t](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Homogeneous>) {
            if (s.depth < 1) throw std::invalid_argument("depth must be >= 1");
            check_branching(s.p);
            t.grow_levels(0, [&](std::uint32_t level) { return level < s.depth ? s.p : 0u; });
          } else if constexpr (std::is_same_v<S, PerLevel>) {
            if (s.p.empty()) throw std::invalid_argument("per-level spec needs at least one level");
            for (unsigned p : s.p) check_branching(p);
            t.grow_levels(0, [&](std::uint32_t level) { return level < s.p.size() ? s.p[level] : 0u; });
          } else {
            if (s.children.empty()) throw std::invalid_argument("explicit tree needs at least one level");
            t.grow_explicit(0, s);
          }
        },
        spec);

    t.finish();
    if (root) {
      auto id = t.find(*root);
      if (!id) throw std::invalid_argument("root address " + t.format(*root) + " is not a vertex of the tree");
      t.root_ = *id;
    }
    return t;
  }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t leaf_count() const { return leaves_.size(); }
  std::size_t internal_count() const { return vertices_.size() - leaves_.size(); }
  /// Number of wavelets, Σ (p_I − 1) over internal vertices; always N − 1.
  std::size_t wavelet_count() const { return wavelet_count_; }
  std::uint32_t depth() const { return depth_; }
  std::uint32_t max_branching() const { return max_branching_; }

  VertexId top() const { return 0; }
  VertexId root() const { return root_; }
  const Rational& top_measure() const { return top_measure_; }

  const Vertex& vertex(VertexId v) const { return vertices_.at(v); }
  VertexId parent(VertexId v) const { return vertices_[v].parent; }
  std::uint32_t depth(VertexId v) const { return vertices_[v].depth; }
  std::uint32_t branching(VertexId v) const { return vertices_[v].branching; }
  bool is_leaf(VertexId v) const { return vertices_[v].branching == 0; }
  VertexId child(VertexId v, TreeAddress::Digit k) const {
    if (k >= vertices_[v].branching) throw std::out_of_range("child digit out of range");
    return vertices_[v].first_child + k;
  }

  const Rational& measure(VertexId v) const { return measures_[v]; }
  double measure_value(VertexId v) const { return measure_values_[v]; }

  VertexId leaf_vertex(std::size_t leaf) const { return leaves_.at(leaf); }
  std::pair<std::uint32_t, std::uint32_t> leaf_range(VertexId v) const {
    return {vertices_[v].leaf_begin, vertices_[v].leaf_end};
  }
  std::uint32_t leaf_index(VertexId v) const {
    if (!is_leaf(v)) throw std::invalid_argument("vertex is not a leaf");
    return vertices_[v].leaf_begin;
  }

  std::optional<VertexId> find(const TreeAddress& a) const {
    VertexId v = top();
    for (auto d : a.digits()) {
      if (d >= vertices_[v].branching) return std::nullopt;
      v = vertices_[v].first_child + d;
    }
    return v;
  }

  VertexId require(const TreeAddress& a) const {
    auto v = find(a);
    if (!v) throw std::invalid_argument("address " + format(a) + " is not a vertex of the tree");
    return *v;
  }

  VertexId require_leaf(const TreeAddress& a) const {
    VertexId v = require(a);
    if (!is_leaf(v)) throw std::invalid_argument("address " + format(a) + " is not a leaf");
    return v;
  }

  TreeAddress address(VertexId v) const {
    std::vector<TreeAddress::Digit> digits(vertices_[v].depth);
    for (auto k = digits.size(); k > 0; --k) {
      digits[k - 1] = vertices_[v].digit;
      v = vertices_[v].parent;
    }
    return TreeAddress(std::move(digits));
  }

  VertexId ancestor_at_depth(VertexId v, std::uint32_t d) const {
    while (vertices_[v].depth > d) v = vertices_[v].parent;
    return v;
  }

  /// True when `a` lies on the path from `v` to the top (a ≥ v in the order toward infinity).
  bool is_ancestor_or_self(VertexId a, VertexId v) const {
    return vertices_[a].depth <= vertices_[v].depth && ancestor_at_depth(v, vertices_[a].depth) == a;
  }

  VertexId meet(VertexId a, VertexId b) const {
    while (vertices_[a].depth > vertices_[b].depth) a = vertices_[a].parent;
    while (vertices_[b].depth > vertices_[a].depth) b = vertices_[b].parent;
    while (a != b) {
      a = vertices_[a].parent;
      b = vertices_[b].parent;
    }
    return a;
  }

  /// The leaf reached from `v` by all-zero digits.
  VertexId zero_extension(VertexId v) const {
    while (!is_leaf(v)) v = vertices_[v].first_child;
    return v;
  }

  /// Addresses use dot separators once some branching index exceeds 10.
  bool separated_addresses() const { return max_branching_ > 10; }
  std::string format(const TreeAddress& a) const { return format_address(a, separated_addresses()); }
  std::string format(VertexId v) const { return format(address(v)); }
  TreeAddress parse(std::string_view text) const { return parse_address(text, separated_addresses()); }

 private:
  UltrametricTree() = default;

  static void check_branching(unsigned p) {
    if (p < 2) throw std::invalid_argument("branching index must be >= 2, got " + std::to_string(p));
  }

  VertexId add_children(VertexId v, std::uint32_t p) {
    const auto first = static_cast<VertexId>(vertices_.size());
    vertices_[v].first_child = first;
    vertices_[v].branching = p;
    const Rational child_measure = measures_[v] / p;
    for (std::uint32_t k = 0; k < p; ++k) {
      Vertex c;
      c.parent = v;
      c.digit = k;
      c.depth = vertices_[v].depth + 1;
      vertices_.push_back(c);
      measures_.push_back(child_measure);
    }
    return first;
  }

  template <class LevelFn>
  void grow_levels(VertexId v, LevelFn&& branching_at) {
    vertices_[v].leaf_begin = static_cast<std::uint32_t>(leaves_.size());
    const std::uint32_t p = branching_at(vertices_[v].depth);
    if (p == 0) {
      leaves_.push_back(v);
    } else {
      const VertexId first = add_children(v, p);
      for (std::uint32_t k = 0; k < p; ++k) grow_levels(first + k, branching_at);
    }
    vertices_[v].leaf_end = static_cast<std::uint32_t>(leaves_.size());
  }

  void grow_explicit(VertexId v, const ExplicitNode& node) {
    vertices_[v].leaf_begin = static_cast<std::uint32_t>(leaves_.size());
    if (node.children.empty()) {
      leaves_.push_back(v);
    } else {
      const auto p = static_cast<std::uint32_t>(node.children.size());
      if (p < 2)
        throw std::invalid_argument("explicit vertex at depth " + std::to_string(vertices_[v].depth) +
                                    " has a single child; branching index must be >= 2");
      const VertexId first = add_children(v, p);
      for (std::uint32_t k = 0; k < p; ++k) grow_explicit(first + k, node.children[k]);
    }
    vertices_[v].leaf_end = static_cast<std::uint32_t>(leaves_.size());
  }

  void finish() {
    measure_values_.reserve(measures_.size());
    for (const auto& m : measures_) measure_values_.push_back(to_double(m));
    std::uint32_t offset = 0;
    for (auto& v : vertices_) {
      depth_ = std::max(depth_, v.depth);
      max_branching_ = std::max(max_branching_, v.branching);
      v.coefficient_offset = offset;
      if (v.branching > 0) offset += v.branching - 1;
    }
    wavelet_count_ = offset;
  }

  std::vector<Vertex> vertices_;
  std::vector<Rational> measures_;
  std::vector<double> measure_values_;
  std::vector<VertexId> leaves_;
  VertexId root_ = 0;
  Rational top_measure_ = 1;
  std::uint32_t depth_ = 0;
  std::uint32_t max_branching_ = 0;
  std::size_t wavelet_count_ = 0;
};

inline UltrametricTree build_tree(const BranchingSpec& spec, std::optional<TreeAddress> root = std::nullopt,
                                  Rational top_measure = 1) {
  return UltrametricTree::build(spec, std::move(root), std::move(top_measure));
}

/// Deepest vertex whose ball contains both addresses: their longest common prefix.
inline TreeAddress meet(const UltrametricTree& tree, const TreeAddress& x, const TreeAddress& y) {
  tree.require(x);
  tree.require(y);
  return common_prefix(x, y);
}

/// u ≤ v in the order toward infinity: v's address is a prefix of u's.
inline bool leq(const UltrametricTree& tree, const TreeAddress& u, const TreeAddress& v) {
  tree.require(u);
  tree.require(v);
  return v.is_prefix_of(u);
}

inline std::vector<TreeAddress> enumerate_leaves(const UltrametricTree& tree) {
  std::vector<TreeAddress> out;
  out.reserve(tree.leaf_count());
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) out.push_back(tree.address(tree.leaf_vertex(i)));
  return out;
}

}  // namespace umw
