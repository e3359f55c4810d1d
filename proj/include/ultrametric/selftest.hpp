#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ultrametric/csv.hpp"
#include "ultrametric/changevar.hpp"
#include "ultrametric/metric.hpp"
#include "ultrametric/operator.hpp"
#include "ultrametric/tree.hpp"
#include "ultrametric/wavelet.hpp"

namespace umw::selftest {

struct Options {
  std::uint64_t seed = 20240601;
  double tol = 1e-12;        // exact-path comparisons
  double dense_tol = 1e-10;  // dense vs spectral
  bool perturb_phase = false;
  bool large = false;  // N = 2^16, fast paths only
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::string trees;
  double tolerance = 0;
  double worst = 0;  // largest observed deviation (0 for exact suites)
  std::string detail;
};

struct NamedTree {
  std::string label;
  UltrametricTree tree;
};

inline std::vector<NamedTree> default_trees() {
  std::vector<NamedTree> out;
  out.push_back({"p2d3", build_tree(Homogeneous{2, 3})});
  out.push_back({"p3d2", build_tree(Homogeneous{3, 2})});
  out.push_back({"p5d2", build_tree(Homogeneous{5, 2})});
  out.push_back({"lv232", build_tree(PerLevel{{2, 3, 2}})});
  out.push_back({"lv52", build_tree(PerLevel{{5, 2}})});
  out.push_back({"lv232@R=01,mu=3/2", build_tree(PerLevel{{2, 3, 2}}, TreeAddress{0, 1}, Rational(3, 2))});
  ExplicitNode unbalanced{{ExplicitNode{}, ExplicitNode{{ExplicitNode{}, ExplicitNode{}, ExplicitNode{}}},
                           ExplicitNode{{ExplicitNode{{ExplicitNode{}, ExplicitNode{}}}, ExplicitNode{}}}}};
  out.push_back({"explicit@R=20", build_tree(unbalanced, TreeAddress{2, 0})});
  return out;
}

inline std::string labels(const std::vector<NamedTree>& trees) {
  std::string s;
  for (const auto& t : trees) {
    if (!s.empty()) s += ' ';
    s += t.label + "(N=" + std::to_string(t.tree.leaf_count()) + ")";
  }
  return s;
}

inline GridFunction random_function(const UltrametricTree& tree, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  GridFunction f(tree);
  for (auto& v : f.values()) v = Complex(g(rng), g(rng));
  return f;
}

inline RadialKernel random_kernel(const UltrametricTree& tree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  RadialKernel k(tree);
  for (VertexId v = 0; v < tree.vertex_count(); ++v)
    if (!tree.is_leaf(v)) k.set(tree, v, u(rng));
  return k;
}

inline SuiteResult suite_ultrametric(const std::vector<NamedTree>& trees) {
  SuiteResult r{"ultrametric (strong triangle, symmetry, meet diameter)", true, labels(trees), 0, 0, {}};
  for (const auto& [label, tree] : trees) {
    const auto n = tree.leaf_count();
    std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) d[i][k] = distance_between(tree, tree.leaf_vertex(i), tree.leaf_vertex(k));
    std::optional<Rational> ratio;
    for (std::size_t i = 0; i < n && r.passed; ++i)
      for (std::size_t k = 0; k < n && r.passed; ++k) {
        if (d[i][k] != d[k][i]) r.passed = false, r.detail = label + ": asymmetric distance";
        if (i == k) continue;
        Rational q = d[i][k] / tree.measure(tree.meet(tree.leaf_vertex(i), tree.leaf_vertex(k)));
        if (!ratio) ratio = q;
        if (*ratio != q) r.passed = false, r.detail = label + ": distance/measure(meet) not constant";
        for (std::size_t z = 0; z < n; ++z)
          if (d[i][k] > std::max(d[i][z], d[k][z])) {
            r.passed = false;
            r.detail = label + ": strong triangle inequality violated";
            break;
          }
      }
  }
  return r;
}

inline SuiteResult suite_orthonormality(const std::vector<NamedTree>& trees, const Options& opt) {
  SuiteResult r{"orthonormality (Gram matrix == identity)", true, labels(trees), opt.tol, 0, {}};
  for (const auto& [label, tree] : trees) {
    auto basis = basis_functions(tree);
    if (opt.perturb_phase) {
      const auto leaf = tree.leaf_range(basis_indices(tree).front().vertex).first;
      basis.front()[leaf] *= std::polar(1.0, 1e-3);
    }
    const Eigen::MatrixXcd g = gram_of(tree, basis);
    const auto n = g.rows();
    const double err = (g - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    r.worst = std::max(r.worst, err);
  }
  r.passed = r.worst <= opt.tol;
  if (opt.perturb_phase) r.detail = "one wavelet phase perturbed by 1e-3 rad";
  return r;
}

inline SuiteResult suite_parseval(const std::vector<NamedTree>& trees, const Options& opt) {
  SuiteResult r{"parseval (ball indicators, wavelet + mean energy == 1)", true, labels(trees), opt.tol, 0, {}};
  for (const auto& [label, tree] : trees) {
    for (VertexId j = 0; j < tree.vertex_count(); ++j) {
      GridFunction ind(tree);
      const auto [b, e] = tree.leaf_range(j);
      for (auto i = b; i < e; ++i) ind[i] = 1.0 / std::sqrt(tree.measure_value(j));
      r.worst = std::max(r.worst, std::abs(forward(tree, ind).energy() - 1.0));
    }
  }
  r.passed = r.worst <= opt.tol;
  return r;
}

inline SuiteResult suite_transform(const std::vector<NamedTree>& trees, const Options& opt, std::mt19937_64& rng) {
  SuiteResult r{"transform (fast vs brute force, round trip, unitarity)", true, labels(trees), opt.tol, 0, {}};
  for (const auto& [label, tree] : trees) {
    for (int rep = 0; rep < 5; ++rep) {
      const GridFunction f = random_function(tree, rng);
      const WaveletCoefficients c = forward(tree, f);
      for (const auto& idx : basis_indices(tree))
        r.worst = std::max(r.worst, std::abs(c.at(tree, idx) - inner_product(tree, synthesize_wavelet(tree, idx), f)));
      r.worst = std::max(r.worst, std::abs(c.mean() - inner_product(tree, mean_function(tree), f)));
      r.worst = std::max(r.worst, max_abs_difference(inverse(tree, c), f));
      const double nf = norm_squared(tree, f);
      r.worst = std::max(r.worst, std::abs(c.energy() - nf) / nf);
    }
  }
  r.passed = r.worst <= opt.tol;
  return r;
}

inline SuiteResult suite_operator(const std::vector<NamedTree>& trees, const Options& opt, std::mt19937_64& rng) {
  SuiteResult r{"operator (diagonalization, eigenvalue formulas, dense == spectral)", true, labels(trees),
                opt.dense_tol, 0, {}};
  double formula = 0;
  for (const auto& [label, tree] : trees) {
    std::vector<RadialKernel> kernels{make_kernel(tree, ConstantKernel{1.0}), make_kernel(tree, PowerLawKernel{0.5}),
                                      make_kernel(tree, PowerLawKernel{1.0}), random_kernel(tree, rng)};
    for (const auto& k : kernels) {
      const Spectrum s = spectrum(tree, k);
      for (const auto& idx : basis_indices(tree)) {
        const GridFunction psi = synthesize_wavelet(tree, idx);
        GridFunction expected = psi;
        for (auto& v : expected.values()) v *= s[idx.vertex];
        r.worst = std::max(r.worst, max_abs_difference(apply_dense(tree, k, psi), expected));
      }
      for (VertexId v = 0; v < tree.vertex_count(); ++v) {
        if (tree.is_leaf(v)) continue;
        const double a = eigenvalue_series_at(tree, k, v);
        const double b = eigenvalue_integral_at(tree, k, v);
        const double scale = std::max(std::abs(a), 1e-300);
        if (a != 0 || b != 0) formula = std::max(formula, std::abs(a - b) / scale);
      }
      const GridFunction f = random_function(tree, rng);
      r.worst = std::max(r.worst, max_abs_difference(apply_dense(tree, k, f), apply_spectral(tree, k, f)));
    }
  }
  r.passed = r.worst <= opt.dense_tol && formula <= opt.tol;
  std::ostringstream os;
  os << "max relative eigenvalue formula gap " << formula << " (tol " << opt.tol << ")";
  r.detail = os.str();
  return r;
}

inline SuiteResult suite_positivity(const std::vector<NamedTree>& trees, const Options& opt, std::mt19937_64& rng) {
  SuiteResult r{"self-adjointness and positivity (dense matrix)", true, labels(trees), opt.tol, 0, {}};
  double min_eig = 0;
  for (const auto& [label, tree] : trees) {
    const RadialKernel k = random_kernel(tree, rng);
    const Eigen::MatrixXd m = operator_matrix(tree, k);
    r.worst = std::max(r.worst, (m - m.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  r.passed = r.worst <= opt.tol && min_eig >= -opt.dense_tol;
  r.detail = "min eigenvalue " + csv::format_double(min_eig);
  return r;
}

inline SuiteResult suite_constant_kernel(const std::vector<NamedTree>& trees) {
  SuiteResult r{"constant kernel closed form (exact rationals)", true, labels(trees), 0, 0, {}};
  const Rational c(7, 3);
  for (const auto& [label, tree] : trees) {
    std::vector<Rational> coeff(tree.vertex_count(), c);
    for (VertexId v = 0; v < tree.vertex_count(); ++v)
      if (!tree.is_leaf(v) && exact_eigenvalue_series(tree, coeff, v) != c * tree.top_measure()) {
        r.passed = false;
        r.detail = label + ": lambda at " + tree.format(v) + " differs from c * mu(top)";
      }
  }
  return r;
}

inline SuiteResult suite_changevar(const std::vector<NamedTree>& trees, const Options& opt) {
  SuiteResult r{"change of variable (Holder, tiling, exported orthonormality, Haar)", true, labels(trees), opt.tol, 0,
                {}};
  auto fail = [&](std::string why) {
    if (r.passed) r.detail = std::move(why);
    r.passed = false;
  };
  for (const auto& [label, tree] : trees) {
    for (std::size_t i = 0; i < tree.leaf_count(); ++i)
      for (std::size_t k = 0; k < tree.leaf_count(); ++k) {
        const auto x = tree.address(tree.leaf_vertex(i));
        const auto y = tree.address(tree.leaf_vertex(k));
        const HolderGap h = holder_gap(tree, x, y);
        if (h.real_gap > h.ultrametric) fail(label + ": Holder inequality violated");
      }
    for (VertexId v = 0; v < tree.vertex_count(); ++v) {
      const auto [lo, hi] = ball_interval(tree, tree.address(v));
      if (hi - lo != tree.measure(v)) fail(label + ": interval length != measure");
      if (tree.is_leaf(v)) continue;
      Rational cursor = lo;
      for (std::uint32_t k = 0; k < tree.branching(v); ++k) {
        const auto [clo, chi] = ball_interval(tree, tree.address(tree.child(v, k)));
        if (clo != cursor) fail(label + ": child intervals do not tile");
        cursor = chi;
      }
      if (cursor != hi) fail(label + ": child intervals do not cover the parent");
    }
    std::vector<PiecewiseConstantFn> exported;
    for (const auto& idx : basis_indices(tree)) exported.push_back(export_wavelet(tree, idx));
    exported.push_back(export_mean(tree));
    for (std::size_t a = 0; a < exported.size(); ++a)
      for (std::size_t b = 0; b < exported.size(); ++b) {
        const Complex g = inner_product(exported[a], exported[b]);
        r.worst = std::max(r.worst, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
  }
  if (r.worst > opt.tol) fail("exported basis not orthonormal in L2(R+)");

  // Haar system on [0,1] against the homogeneous p = 2 export.
  const UltrametricTree haar_tree = build_tree(Homogeneous{2, 4});
  for (const auto& idx : basis_indices(haar_tree)) {
    const PiecewiseConstantFn fn = export_wavelet(haar_tree, idx);
    const int level = static_cast<int>(haar_tree.depth(idx.vertex));
    const Rational scale = Rational(1, BigInt(1) << level);
    const Rational shift = rho_of(haar_tree, idx.vertex) / scale;
    const double amp = std::pow(2.0, level / 2.0);
    std::optional<Complex> phase;
    for (std::size_t k = 0; k < fn.pieces(); ++k) {
      const Rational mid = (fn.breakpoints()[k] + fn.breakpoints()[k + 1]) / 2;
      const Rational u = mid / scale - shift;
      const double haar = (u >= 0 && u < Rational(1, 2)) ? amp : (u >= Rational(1, 2) && u < 1 ? -amp : 0.0);
      const Complex ratio = fn.values()[k] / haar;
      if (!phase) phase = ratio;
      if (std::abs(std::abs(ratio) - 1.0) > opt.tol || std::abs(ratio - *phase) > opt.tol)
        fail("p=2 export differs from the Haar system beyond a unimodular factor");
    }
  }
  return r;
}

inline SuiteResult suite_large(const Options& opt, std::mt19937_64& rng) {
  SuiteResult r{"large tree fast paths (N = 65536, dense oracles skipped)", true, "p2d16", opt.tol, 0, {}};
  const UltrametricTree tree = build_tree(Homogeneous{2, 16});
  const GridFunction f = random_function(tree, rng);
  const auto t0 = std::chrono::steady_clock::now();
  const WaveletCoefficients c = forward(tree, f);
  const GridFunction back = inverse(tree, c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double nf = norm_squared(tree, f);
  r.worst = std::max(max_abs_difference(back, f), std::abs(c.energy() - nf) / nf);
  const GridFunction tf = apply_spectral(tree, make_kernel(tree, ConstantKernel{1.0}), mean_function(tree));
  double zero = 0;
  for (const auto& v : tf.values()) zero = std::max(zero, std::abs(v));
  r.worst = std::max(r.worst, zero);
  r.passed = r.worst <= opt.tol && secs < 1.0;
  r.detail = "forward+inverse " + std::to_string(secs) + " s";
  return r;
}

inline std::vector<SuiteResult> run(const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  std::vector<SuiteResult> out;
  if (opt.large) {
    out.push_back(suite_large(opt, rng));
    return out;
  }
  const auto trees = default_trees();
  out.push_back(suite_ultrametric(trees));
  out.push_back(suite_orthonormality(trees, opt));
  out.push_back(suite_parseval(trees, opt));
  out.push_back(suite_transform(trees, opt, rng));
  out.push_back(suite_operator(trees, opt, rng));
  out.push_back(suite_positivity(trees, opt, rng));
  out.push_back(suite_constant_kernel(trees));
  out.push_back(suite_changevar(trees, opt));
  return out;
}

}  // namespace umw::selftest
