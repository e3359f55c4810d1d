#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ultrametric/tree.hpp"

namespace umw {

/// Raised for malformed tree-spec text; the message names the offending field.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parsed tree-spec file: branching description plus optional root and
/// top-ball measure.
struct TreeSpec {
  BranchingSpec branching;
  std::optional<std::string> root;
  Rational top_measure = 1;
};

namespace detail {

inline unsigned json_branching(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 2)
    throw SpecError("field '" + field + "': branching index must be an integer >= 2");
  return v.get<unsigned>();
}

// An explicit node is an array of child nodes ([] is a leaf) or an integer
// k: 0 for a leaf, k >= 2 for a vertex with k leaf children.
inline ExplicitNode json_explicit(const nlohmann::json& v, const std::string& field) {
  ExplicitNode node;
  if (v.is_number_integer()) {
    auto k = v.get<long long>();
    if (k == 0) return node;
    if (k < 2) throw SpecError("field '" + field + "': child count must be 0 or >= 2");
    node.children.resize(static_cast<std::size_t>(k));
    return node;
  }
  if (!v.is_array()) throw SpecError("field '" + field + "': expected an array of children or an integer");
  if (v.size() == 1) throw SpecError("field '" + field + "': a vertex needs at least two children");
  for (std::size_t k = 0; k < v.size(); ++k)
    node.children.push_back(json_explicit(v[k], field + "[" + std::to_string(k) + "]"));
  return node;
}

inline unsigned max_branching(const ExplicitNode& n) {
  unsigned m = static_cast<unsigned>(n.children.size());
  for (const auto& c : n.children) m = std::max(m, max_branching(c));
  return m;
}

}  // namespace detail

inline unsigned max_branching(const BranchingSpec& spec) {
  if (auto* h = std::get_if<Homogeneous>(&spec)) return h->p;
  if (auto* l = std::get_if<PerLevel>(&spec)) return l->p.empty() ? 0u : *std::max_element(l->p.begin(), l->p.end());
  return detail::max_branching(std::get<ExplicitNode>(spec));
}

inline TreeSpec parse_tree_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("tree spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SpecError("tree spec must be a JSON object");

  TreeSpec spec;
  int kinds = 0;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    if (key == "homogeneous") {
      ++kinds;
      if (!v.is_object() || !v.contains("p") || !v.contains("depth"))
        throw SpecError("field 'homogeneous': expected {\"p\":..,\"depth\":..}");
      const auto& d = v["depth"];
      if (!d.is_number_integer() || d.get<long long>() < 1)
        throw SpecError("field 'homogeneous.depth': must be an integer >= 1");
      spec.branching = Homogeneous{detail::json_branching(v["p"], "homogeneous.p"), d.get<unsigned>()};
    } else if (key == "per_level") {
      ++kinds;
      if (!v.is_array() || v.empty()) throw SpecError("field 'per_level': expected a non-empty array");
      PerLevel pl;
      for (std::size_t k = 0; k < v.size(); ++k)
        pl.p.push_back(detail::json_branching(v[k], "per_level[" + std::to_string(k) + "]"));
      spec.branching = std::move(pl);
    } else if (key == "explicit") {
      ++kinds;
      auto node = detail::json_explicit(v, "explicit");
      if (node.children.empty()) throw SpecError("field 'explicit': the top vertex needs children");
      spec.branching = std::move(node);
    } else if (key == "root") {
      if (!v.is_string()) throw SpecError("field 'root': expected an address string");
      spec.root = v.get<std::string>();
    } else if (key == "top_measure") {
      try {
        if (v.is_string())
          spec.top_measure = parse_rational(v.get<std::string>());
        else if (v.is_number_integer())
          spec.top_measure = Rational(v.get<long long>());
        else
          throw SpecError("expected a rational string such as \"3/2\"");
      } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("field 'top_measure': ") + e.what());
      }
      if (spec.top_measure <= 0) throw SpecError("field 'top_measure': must be positive");
    } else {
      throw SpecError("unknown field '" + key + "'");
    }
  }
  if (kinds != 1) throw SpecError("tree spec needs exactly one of 'homogeneous', 'per_level', 'explicit'");
  return spec;
}

inline UltrametricTree build_tree(const TreeSpec& spec) {
  std::optional<TreeAddress> root;
  if (spec.root) root = parse_address(*spec.root, max_branching(spec.branching) > 10);
  return build_tree(spec.branching, root, spec.top_measure);
}

/// Loads a spec from a file path, or parses the argument itself when it
/// starts with '{'.
inline TreeSpec load_tree_spec(const std::string& path_or_inline) {
  if (!path_or_inline.empty() && path_or_inline.front() == '{') return parse_tree_spec(path_or_inline);
  std::ifstream in(path_or_inline);
  if (!in) throw SpecError("cannot open tree spec '" + path_or_inline + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree_spec(ss.str());
}

}  // namespace umw
