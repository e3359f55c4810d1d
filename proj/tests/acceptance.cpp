// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <limits>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ultrametric/ultrametric.hpp"

namespace {

using umw::build_tree;
using umw::Complex;
using umw::Homogeneous;
using umw::PerLevel;
using umw::Rational;
using umw::TreeAddress;
using umw::UltrametricTree;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<UltrametricTree> gram_trees() {
  umw::ExplicitNode leaf;
  umw::ExplicitNode uneven{{leaf, umw::ExplicitNode{{leaf, leaf, leaf}}, umw::ExplicitNode{{umw::ExplicitNode{{leaf, leaf}}, leaf}}}};
  std::vector<UltrametricTree> t;
  t.push_back(build_tree(Homogeneous{2, 3}));
  t.push_back(build_tree(Homogeneous{2, 10}));  // N = 1024
  t.push_back(build_tree(Homogeneous{3, 2}));
  t.push_back(build_tree(Homogeneous{3, 6}));  // N = 729
  t.push_back(build_tree(Homogeneous{5, 2}));
  t.push_back(build_tree(Homogeneous{5, 4}));  // N = 625
  t.push_back(build_tree(PerLevel{{2, 3, 2}}));
  t.push_back(build_tree(PerLevel{{5, 2}}));
  t.push_back(build_tree(PerLevel{{2, 3, 2}}, TreeAddress{0, 1}, Rational(3, 2)));
  t.push_back(build_tree(PerLevel{{2, 3, 2, 5, 2}}));
  t.push_back(build_tree(PerLevel{{4, 4, 4, 4}}, std::nullopt, Rational(1, 3)));
  t.push_back(build_tree(PerLevel{{7, 11, 13}}));  // N = 1001
  t.push_back(build_tree(uneven, TreeAddress{2, 0}));
  return t;
}

Outcome orthonormality() {
  const auto t0 = Clock::now();
  const auto trees = gram_trees();
  double worst = 0;
  std::size_t largest = 0;
  for (const auto& t : trees) {
    const auto g = umw::gram_matrix(t);
    worst = std::max(worst, (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
    largest = std::max(largest, t.leaf_count());
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 30.0, std::to_string(trees.size()) + " trees, N <= " + std::to_string(largest) +
                                             ", max |G - I| = " + sci(worst) + ", " + sci(secs) + " s"};
}

Outcome parseval() {
  double worst = 0;
  std::size_t count = 0;
  for (const auto& t : gram_trees()) {
    for (umw::VertexId v = 0; v < t.vertex_count(); ++v) {
      umw::GridFunction ind(t);
      const auto [b, e] = t.leaf_range(v);
      const double scale = 1.0 / std::sqrt(t.measure_value(v));
      for (auto i = b; i < e; ++i) ind[i] = scale;
      worst = std::max(worst, std::abs(umw::forward(t, ind).energy() - 1.0));
      ++count;
    }
  }
  return {worst <= 1e-12, std::to_string(count) + " normalized ball indicators, max |energy - 1| = " + sci(worst)};
}

std::vector<UltrametricTree> operator_trees() {
  std::vector<UltrametricTree> t;
  t.push_back(build_tree(Homogeneous{2, 8}));  // 256
  t.push_back(build_tree(Homogeneous{3, 4}));  // 81
  t.push_back(build_tree(Homogeneous{5, 3}));  // 125
  t.push_back(build_tree(PerLevel{{2, 3, 2}}));
  t.push_back(build_tree(PerLevel{{5, 2}}, TreeAddress{3}, Rational(5, 4)));
  t.push_back(build_tree(PerLevel{{2, 3, 2, 4}}));  // 48
  t.push_back(build_tree(PerLevel{{4, 2, 2, 2, 2, 2}}, TreeAddress{1, 0}));  // 128
  return t;
}

Outcome diagonalization() {
  std::mt19937_64 rng(3);
  double worst = 0;
  std::size_t checks = 0;
  for (const auto& t : operator_trees()) {
    std::vector<umw::RadialKernel> kernels{umw::make_kernel(t, umw::ConstantKernel{2.0}),
                                           umw::make_kernel(t, umw::PowerLawKernel{0.5}),
                                           umw::make_kernel(t, umw::PowerLawKernel{1.0}), oracle::random_kernel(t, rng)};
    for (const auto& k : kernels) {
      const auto spec = umw::spectrum(t, k);
      for (const auto& idx : umw::basis_indices(t)) {
        const auto psi = umw::synthesize_wavelet(t, idx);
        const auto tpsi = umw::apply_dense(t, k, psi);
        const double lambda = umw::eigenvalue_series_at(t, k, idx.vertex);
        for (std::size_t i = 0; i < psi.size(); ++i) worst = std::max(worst, std::abs(tpsi[i] - lambda * psi[i]));
        worst = std::max(worst, std::abs(spec[idx.vertex] - lambda));
        ++checks;
      }
    }
  }
  return {worst <= 1e-10, std::to_string(checks) + " (wavelet, kernel) pairs, max |T psi - lambda psi| = " + sci(worst)};
}

Outcome eigenvalue_formulas() {
  std::vector<UltrametricTree> trees;
  trees.push_back(build_tree(Homogeneous{2, 5}));
  trees.push_back(build_tree(PerLevel{{3, 2, 5}}, TreeAddress{1, 1}));
  trees.push_back(build_tree(PerLevel{{2, 3, 2}}, std::nullopt, Rational(7, 2)));
  trees.push_back(build_tree(Homogeneous{3, 3}, TreeAddress{2}));
  trees.push_back(build_tree(PerLevel{{5, 2, 2}}));
  std::mt19937_64 rng(4);
  double worst = 0;
  std::size_t kernels = 0;
  std::size_t vertices = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto& t = trees[static_cast<std::size_t>(rep) % trees.size()];
    const auto k = oracle::random_kernel(t, rng);
    for (umw::VertexId v = 0; v < t.vertex_count(); ++v) {
      if (t.is_leaf(v)) continue;
      const double series = umw::eigenvalue_series_at(t, k, v);
      const double integral = umw::eigenvalue_integral_at(t, k, v);
      worst = std::max(worst, std::abs(series - integral) / std::abs(series));
      ++vertices;
    }
    ++kernels;
  }
  return {worst < 1e-12, std::to_string(kernels) + " random kernels, " + std::to_string(vertices) +
                             " vertex evaluations, max relative difference = " + sci(worst)};
}

Outcome dense_vs_spectral() {
  std::vector<UltrametricTree> trees;
  trees.push_back(build_tree(PerLevel{{2, 3, 2, 4}}));  // 48
  trees.push_back(build_tree(Homogeneous{2, 6}));  // 64
  trees.push_back(build_tree(PerLevel{{4, 4, 4, 4}}, TreeAddress{3, 1}));  // 256
  std::mt19937_64 rng(5);
  double worst = 0;
  for (const auto& t : trees) {
    const auto k = oracle::random_kernel(t, rng);
    for (int rep = 0; rep < 100; ++rep) {
      const auto f = oracle::random_function(t, rng);
      worst = std::max(worst, umw::max_abs_difference(umw::apply_dense(t, k, f), umw::apply_spectral(t, k, f)));
    }
  }
  return {worst <= 1e-10, "N in {48, 64, 256}, 100 functions each, max |dense - spectral| = " + sci(worst)};
}

// Matrix of T in the orthonormal leaf basis, assembled column by column from
// apply_dense, then checked for symmetry and spectrum with a dense solver.
Outcome self_adjointness() {
  std::vector<UltrametricTree> trees;
  trees.push_back(build_tree(Homogeneous{2, 7}));  // 128
  trees.push_back(build_tree(PerLevel{{5, 3, 2}}, TreeAddress{0}));
  trees.push_back(build_tree(PerLevel{{2, 3, 2}}, std::nullopt, Rational(2, 3)));
  std::mt19937_64 rng(6);
  double asym = 0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& t : trees) {
    for (const auto& k : {oracle::random_kernel(t, rng), umw::make_kernel(t, umw::PowerLawKernel{1.0})}) {
      const auto n = static_cast<Eigen::Index>(t.leaf_count());
      Eigen::MatrixXcd m(n, n);
      std::vector<umw::GridFunction> basis;
      for (Eigen::Index i = 0; i < n; ++i) {
        umw::GridFunction e(t);
        e[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(t.measure_value(t.leaf_vertex(static_cast<std::size_t>(i))));
        basis.push_back(std::move(e));
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto col = umw::apply_dense(t, k, basis[static_cast<std::size_t>(c)]);
        for (Eigen::Index r = 0; r < n; ++r) m(r, c) = umw::inner_product(t, basis[static_cast<std::size_t>(r)], col);
      }
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      asym = std::max(asym, (m - m.adjoint()).cwiseAbs().maxCoeff() / scale);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
  }
  return {asym <= 1e-12 && min_eig >= -1e-10,
          "N <= 128, max |M - M^H| (relative) = " + sci(asym) + ", min eigenvalue = " + sci(min_eig)};
}

struct RootedTree {
  umw::BranchingSpec spec;
  TreeAddress root;
};

Outcome ultrametricity() {
  // Distance cases: merge strictly above R, at or below R, incomparable with R.
  std::array<std::size_t, 3> cases{};
  auto classify = [&](const UltrametricTree& t, const TreeAddress& x, const TreeAddress& y) {
    if (x == y) return;
    const auto I = umw::common_prefix(x, y);
    const auto R = t.address(t.root());
    if (I.is_prefix_of(R) && I != R)
      ++cases[0];
    else if (R.is_prefix_of(I))
      ++cases[1];
    else
      ++cases[2];
  };

  std::size_t triples = 0;
  bool ok = true;
  const std::vector<RootedTree> small{{Homogeneous{2, 6}, {}},          {Homogeneous{2, 6}, {0, 1, 1}},
                                      {Homogeneous{4, 3}, {3}},         {PerLevel{{2, 3, 2, 5}}, {1, 2}},
                                      {PerLevel{{5, 3, 2}}, {4, 0, 1}}, {Homogeneous{3, 3}, {1, 0}}};
  for (const auto& c : small) {
    const auto t = build_tree(c.spec, c.root);
    const auto leaves = umw::enumerate_leaves(t);
    const std::size_t n = leaves.size();
    if (n > 64) return {false, "exhaustive tree too large"};
    std::vector<Rational> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        d[i * n + j] = umw::distance(t, leaves[i], leaves[j]);
        if (d[i * n + j] != oracle::distance(t, leaves[i], leaves[j])) ok = false;
        classify(t, leaves[i], leaves[j]);
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (d[i * n + j] > std::max(d[i * n + k], d[j * n + k])) ok = false;
          ++triples;
        }
  }

  std::mt19937_64 rng(7);
  const std::vector<RootedTree> large{{Homogeneous{2, 12}, {1, 0, 1}}, {PerLevel{{3, 2, 5, 2, 3, 2}}, {2, 1, 4}}};
  for (const auto& c : large) {
    const auto t = build_tree(c.spec, c.root);
    std::uniform_int_distribution<std::size_t> pick(0, t.leaf_count() - 1);
    for (int r = 0; r < 10000; ++r) {
      const auto x = t.address(t.leaf_vertex(pick(rng)));
      const auto y = t.address(t.leaf_vertex(pick(rng)));
      const auto z = t.address(t.leaf_vertex(pick(rng)));
      classify(t, x, y);
      if (umw::distance(t, x, y) > std::max(umw::distance(t, x, z), umw::distance(t, y, z))) ok = false;
      ++triples;
    }
  }
  ok = ok && cases[0] > 0 && cases[1] > 0 && cases[2] > 0;
  return {ok, std::to_string(triples) + " triples (exhaustive N <= 64, 2 x 10^4 random on rooted trees), cases " +
                  std::to_string(cases[0]) + "/" + std::to_string(cases[1]) + "/" + std::to_string(cases[2])};
}

Outcome change_of_variable() {
  bool ok = true;
  std::ostringstream note;

  // Hölder, exact.
  std::mt19937_64 rng(8);
  std::size_t pairs = 0;
  for (const auto& t : {build_tree(PerLevel{{3, 2, 5, 2, 2}}), build_tree(Homogeneous{2, 10})}) {
    std::uniform_int_distribution<std::size_t> pick(0, t.leaf_count() - 1);
    for (int r = 0; r < 5000; ++r) {
      const auto x = t.address(t.leaf_vertex(pick(rng)));
      const auto y = t.address(t.leaf_vertex(pick(rng)));
      const auto g = umw::holder_gap(t, x, y);
      if (g.real_gap > g.ultrametric) ok = false;
      ++pairs;
    }
  }
  note << pairs << " Holder pairs";

  // Tiling and lengths, exact.
  std::size_t intervals = 0;
  const std::vector<UltrametricTree> tiled{build_tree(PerLevel{{2, 3, 2, 5}}, TreeAddress{1}, Rational(5, 3)),
                                           build_tree(Homogeneous{3, 4})};
  for (const auto& t : tiled) {
    if (umw::ball_interval(t, {}) != std::make_pair(Rational(0), t.top_measure())) ok = false;
    for (umw::VertexId v = 0; v < t.vertex_count(); ++v) {
      const auto [l, r] = umw::ball_interval(t, t.address(v));
      if (r - l != t.measure(v)) ok = false;
      ++intervals;
      if (t.is_leaf(v)) continue;
      Rational cursor = l;
      for (std::uint32_t k = 0; k < t.branching(v); ++k) {
        const auto [cl, cr] = umw::ball_interval(t, t.address(t.child(v, k)));
        if (cl != cursor) ok = false;
        cursor = cr;
      }
      if (cursor != r) ok = false;
    }
  }
  note << ", " << intervals << " intervals tiled";

  // Exported basis orthonormal in L2 of the half-line.
  double worst = 0;
  for (const auto& t : {build_tree(PerLevel{{2, 3, 2}}, std::nullopt, Rational(3, 2)), build_tree(Homogeneous{5, 2}),
                        build_tree(PerLevel{{4, 2, 3}})}) {
    std::vector<umw::PiecewiseConstantFn> fns;
    for (const auto& idx : umw::basis_indices(t)) fns.push_back(umw::export_wavelet(t, idx));
    fns.push_back(umw::export_mean(t));
    for (std::size_t a = 0; a < fns.size(); ++a)
      for (std::size_t b = 0; b < fns.size(); ++b)
        worst = std::max(worst, std::abs(umw::inner_product(fns[a], fns[b]) - (a == b ? 1.0 : 0.0)));
  }
  if (worst > 1e-12) ok = false;
  note << ", export gram error " << sci(worst);

  // Binary tree: Haar functions 2^{n/2} h(2^n t - k), one unimodular factor each.
  const auto h = build_tree(Homogeneous{2, 6});
  std::size_t haar = 0;
  for (const auto& idx : umw::basis_indices(h)) {
    const auto f = umw::export_wavelet(h, idx);
    const unsigned n = h.depth(idx.vertex);
    const Rational width(1, umw::BigInt(1) << n);
    const Rational left = umw::rho(h, h.address(idx.vertex));
    const Rational k = left / width;
    if (boost::multiprecision::denominator(k) != 1) ok = false;
    const std::vector<Rational> expected{left, left + width / 2, left + width};
    if (f.breakpoints() != expected) ok = false;
    const double amp = std::sqrt(static_cast<double>(1u << n));
    const Complex phase = f.values()[0] / amp;
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) ok = false;
    if (std::abs(f.values()[0] - phase * amp) > 1e-12 || std::abs(f.values()[1] + phase * amp) > 1e-12) ok = false;
    ++haar;
  }
  note << ", " << haar << " Haar functions matched";
  return {ok, note.str()};
}

Outcome constant_kernel() {
  bool ok = true;
  std::size_t checks = 0;
  const std::vector<UltrametricTree> trees{build_tree(Homogeneous{2, 6}),
                                           build_tree(PerLevel{{2, 3, 5}}, std::nullopt, Rational(7, 3)),
                                           build_tree(PerLevel{{5, 2, 3, 2}}, TreeAddress{1, 1}),
                                           build_tree(Homogeneous{3, 4}, std::nullopt, Rational(11, 10))};
  for (const auto& t : trees)
    for (const Rational c : {Rational(1), Rational(5, 2), Rational(3, 7)}) {
      std::vector<Rational> coeffs(t.vertex_count(), Rational(0));
      for (umw::VertexId v = 0; v < t.vertex_count(); ++v)
        if (!t.is_leaf(v)) coeffs[v] = c;
      for (umw::VertexId v = 0; v < t.vertex_count(); ++v) {
        if (t.is_leaf(v)) continue;
        if (umw::exact_eigenvalue_series(t, coeffs, v) != c * t.top_measure()) ok = false;
        ++checks;
      }
    }
  return {ok, std::to_string(checks) + " exact rational identities"};
}

Outcome performance() {
  const auto t = build_tree(Homogeneous{2, 16});
  std::mt19937_64 rng(10);
  const auto f = oracle::random_function(t, rng);
  const auto t0 = Clock::now();
  const auto back = umw::inverse(t, umw::forward(t, f));
  const double secs = seconds_since(t0);
  const double err = umw::max_abs_difference(back, f);
  bool guarded = false;
  try {
    umw::apply_dense(t, umw::make_kernel(t, umw::ConstantKernel{1.0}), f);
  } catch (const std::length_error&) {
    guarded = true;
  }
  return {secs < 1.0 && guarded && err <= 1e-12, "N = 65536 forward + inverse " + sci(secs) + " s, round-trip error " +
                                                     sci(err) + ", dense guard " + (guarded ? "active" : "missing")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"orthonormality", orthonormality},       {"parseval", parseval},
      {"diagonalization", diagonalization},     {"eigenvalue formulas", eigenvalue_formulas},
      {"dense vs spectral", dense_vs_spectral}, {"self-adjointness", self_adjointness},
      {"ultrametricity", ultrametricity},       {"change of variable", change_of_variable},
      {"constant kernel", constant_kernel},     {"performance", performance},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2zu %-20s %s [%.2fs]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
