#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ultrametric/tree.hpp"
#include "ultrametric/tree_io.hpp"

namespace {

using umw::build_tree;
using umw::Homogeneous;
using umw::PerLevel;
using umw::Rational;
using umw::TreeAddress;

TEST(Tree, HomogeneousBinaryCounts) {
  const auto t = build_tree(Homogeneous{2, 3});
  EXPECT_EQ(t.leaf_count(), 8u);
  EXPECT_EQ(t.internal_count(), 7u);
  EXPECT_EQ(t.depth(), 3u);
  EXPECT_EQ(t.wavelet_count(), t.leaf_count() - 1);
}

TEST(Tree, TernaryLeafMeasures) {
  const auto t = build_tree(Homogeneous{3, 2});
  ASSERT_EQ(t.leaf_count(), 9u);
  for (std::size_t i = 0; i < t.leaf_count(); ++i) EXPECT_EQ(t.measure(t.leaf_vertex(i)), Rational(1, 9));
}

TEST(Tree, PerLevelMeasures) {
  const auto t = build_tree(PerLevel{{2, 3}});
  EXPECT_EQ(t.leaf_count(), 6u);
  EXPECT_EQ(t.measure(t.require(TreeAddress{0})), Rational(1, 2));
  EXPECT_EQ(t.measure(t.require(TreeAddress{1})), Rational(1, 2));
  for (std::size_t i = 0; i < t.leaf_count(); ++i) EXPECT_EQ(t.measure(t.leaf_vertex(i)), Rational(1, 6));
}

TEST(Tree, RejectsInvalidSpecs) {
  EXPECT_THROW(build_tree(Homogeneous{1, 3}), std::invalid_argument);
  EXPECT_THROW(build_tree(Homogeneous{2, 0}), std::invalid_argument);
  EXPECT_THROW(build_tree(PerLevel{{2, 1}}), std::invalid_argument);
  EXPECT_THROW(build_tree(PerLevel{{}}), std::invalid_argument);
  EXPECT_THROW(build_tree(Homogeneous{2, 2}, TreeAddress{0, 2}), std::invalid_argument);
  EXPECT_THROW(build_tree(Homogeneous{2, 2}, TreeAddress{0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(build_tree(Homogeneous{2, 2}, std::nullopt, Rational(0)), std::invalid_argument);
  umw::ExplicitNode single{{umw::ExplicitNode{}}};
  EXPECT_THROW(build_tree(single), std::invalid_argument);
}

TEST(Tree, MeetExamples) {
  const auto t = build_tree(Homogeneous{2, 3});
  EXPECT_EQ(umw::meet(t, {0, 0, 0}, {0, 0, 1}), (TreeAddress{0, 0}));
  EXPECT_EQ(umw::meet(t, {0, 1, 1}, {0, 1, 1}), (TreeAddress{0, 1, 1}));
  EXPECT_EQ(umw::meet(t, {0, 1, 1}, {1, 0, 0}), TreeAddress{});
  EXPECT_THROW(umw::meet(t, {0, 2}, {0}), std::invalid_argument);
}

TEST(Tree, LeqExamples) {
  const auto t = build_tree(Homogeneous{2, 3});
  EXPECT_TRUE(umw::leq(t, {0, 0, 1}, {0, 0}));
  EXPECT_FALSE(umw::leq(t, {0, 0}, {0, 0, 1}));
  EXPECT_FALSE(umw::leq(t, {0, 1}, {1, 0}));
  EXPECT_FALSE(umw::leq(t, {1, 0}, {0, 1}));
}

TEST(Tree, EnumerateLeavesLexicographic) {
  using V = std::vector<TreeAddress>;
  EXPECT_EQ(umw::enumerate_leaves(build_tree(Homogeneous{2, 2})), (V{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  EXPECT_EQ(umw::enumerate_leaves(build_tree(Homogeneous{3, 1})), (V{{0}, {1}, {2}}));
  EXPECT_EQ(umw::enumerate_leaves(build_tree(PerLevel{{2, 3}})),
            (V{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}}));
}

TEST(Tree, ExplicitUnbalanced) {
  umw::ExplicitNode leaf;
  umw::ExplicitNode spec{{leaf, umw::ExplicitNode{{leaf, leaf, leaf}}}};
  const auto t = build_tree(spec);
  EXPECT_EQ(t.leaf_count(), 4u);
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_EQ(t.measure(t.require({0})), Rational(1, 2));
  EXPECT_EQ(t.measure(t.require({1, 2})), Rational(1, 6));
  EXPECT_EQ(umw::enumerate_leaves(t), oracle::leaves(t));
}

// Exhaustive partial-order laws and meet laws on every vertex of small trees.
TEST(Tree, PrefixOrderIsPartialOrderAndMeetIsLattice) {
  std::vector<umw::UltrametricTree> trees;
  trees.push_back(build_tree(Homogeneous{2, 3}));
  trees.push_back(build_tree(PerLevel{{3, 2, 2}}));
  trees.push_back(build_tree(PerLevel{{5, 2}}));
  for (const auto& t : trees) {
    ASSERT_LE(t.vertex_count(), 100u);
    std::vector<TreeAddress> vs;
    for (umw::VertexId v = 0; v < t.vertex_count(); ++v) vs.push_back(t.address(v));
    for (const auto& a : vs) {
      EXPECT_TRUE(umw::leq(t, a, a));
      for (const auto& b : vs) {
        if (umw::leq(t, a, b) && umw::leq(t, b, a)) {
          EXPECT_EQ(a, b);
        }
        EXPECT_EQ(umw::meet(t, a, b), umw::meet(t, b, a));
        const auto m = umw::meet(t, a, b);
        EXPECT_TRUE(umw::leq(t, a, m));
        EXPECT_TRUE(umw::leq(t, b, m));
        for (const auto& c : vs) {
          if (umw::leq(t, a, b) && umw::leq(t, b, c)) {
            EXPECT_TRUE(umw::leq(t, a, c));
          }
          // Any common upper bound is above the meet.
          if (umw::leq(t, a, c) && umw::leq(t, b, c)) {
            EXPECT_TRUE(umw::leq(t, m, c));
          }
        }
      }
    }
  }
}

TEST(Tree, MeetAssociativeOnRandomTriples) {
  const auto t = build_tree(PerLevel{{2, 3, 2, 5}});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, t.vertex_count() - 1);
  for (int i = 0; i < 2000; ++i) {
    const auto a = t.address(static_cast<umw::VertexId>(pick(rng)));
    const auto b = t.address(static_cast<umw::VertexId>(pick(rng)));
    const auto c = t.address(static_cast<umw::VertexId>(pick(rng)));
    EXPECT_EQ(umw::meet(t, umw::meet(t, a, b), c), umw::meet(t, a, umw::meet(t, b, c)));
  }
}

TEST(Tree, ChildCountsEqualBranching) {
  const auto t = build_tree(PerLevel{{3, 2, 4}});
  for (umw::VertexId v = 0; v < t.vertex_count(); ++v) {
    if (t.is_leaf(v)) continue;
    const auto a = t.address(v);
    EXPECT_TRUE(t.find(a.child(t.branching(v) - 1)).has_value());
    EXPECT_FALSE(t.find(a.child(t.branching(v))).has_value());
    for (std::uint32_t k = 0; k < t.branching(v); ++k) EXPECT_EQ(t.parent(t.child(v, k)), v);
  }
}

TEST(Tree, AddressRoundTripThroughIds) {
  const auto t = build_tree(PerLevel{{2, 12, 3}});
  EXPECT_TRUE(t.separated_addresses());
  for (umw::VertexId v = 0; v < t.vertex_count(); ++v) {
    EXPECT_EQ(t.require(t.address(v)), v);
    EXPECT_EQ(t.parse(t.format(v)), t.address(v));
  }
  EXPECT_EQ(t.format(TreeAddress{0, 11, 2}), "0.11.2");
}

TEST(TreeSpec, ParsesAllForms) {
  auto h = umw::build_tree(umw::parse_tree_spec(R"({"homogeneous":{"p":2,"depth":3}})"));
  EXPECT_EQ(h.leaf_count(), 8u);
  auto l = umw::build_tree(umw::parse_tree_spec(R"({"per_level":[2,3,2],"root":"01","top_measure":"3/2"})"));
  EXPECT_EQ(l.leaf_count(), 12u);
  EXPECT_EQ(l.address(l.root()), (TreeAddress{0, 1}));
  EXPECT_EQ(l.top_measure(), Rational(3, 2));
  auto e = umw::build_tree(umw::parse_tree_spec(R"({"explicit":[0,[[],[]],3]})"));
  EXPECT_EQ(e.leaf_count(), 6u);
  EXPECT_EQ(e.branching(e.require({2})), 3u);
}

TEST(TreeSpec, DiagnosticsNameTheField) {
  auto message = [](const std::string& text) {
    try {
      umw::parse_tree_spec(text);
    } catch (const umw::SpecError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"homogeneous":{"p":1,"depth":3}})").find("homogeneous.p"), std::string::npos);
  EXPECT_NE(message(R"({"per_level":[2,"x"]})").find("per_level[1]"), std::string::npos);
  EXPECT_NE(message(R"({"explicit":[[],[[]]]})").find("explicit[1]"), std::string::npos);
  EXPECT_NE(message(R"({"per_level":[2],"top_measure":"-1"})").find("top_measure"), std::string::npos);
  EXPECT_NE(message(R"({"homogeneous":{"p":2,"depth":3})").find("JSON"), std::string::npos);
  EXPECT_NE(message(R"({"bogus":1,"per_level":[2]})").find("bogus"), std::string::npos);
  EXPECT_NE(message(R"({"per_level":[2],"homogeneous":{"p":2,"depth":1}})").find("exactly one"), std::string::npos);
}

}  // namespace
