// Command-line frontend: tree summaries, wavelet transforms, operator
// application, change of variable and the invariant self-test.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ultrametric/selftest.hpp"
#include "ultrametric/ultrametric.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInvariant = 2;

struct RunConfig {
  std::string tree = R"({"homogeneous":{"p":2,"depth":3}})";
  std::string kernel = "constant:1";
  std::string in;
  std::string out;
  std::string mode;
  std::string index;
  double tol = 1e-12;
  double dense_tol = 1e-10;
  std::uint64_t seed = 20240601;
  unsigned precision = 12;
  bool perturb = false;
  bool large = false;
};

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::invalid_argument("cannot open output '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--in is required for this mode");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input '" + path + "'");
  return in;
}

umw::UltrametricTree load_tree(const RunConfig& cfg) { return umw::build_tree(umw::load_tree_spec(cfg.tree)); }

int cmd_tree(const RunConfig& cfg) {
  const auto tree = load_tree(cfg);
  std::cout << tree.leaf_count() << " leaves, " << tree.internal_count() << " internal, top_measure "
            << umw::format_rational(tree.top_measure()) << '\n'
            << "depth " << tree.depth() << ", root " << tree.format(tree.root()) << ", " << tree.vertex_count()
            << " vertices\n";
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
    const auto v = tree.leaf_vertex(i);
    std::cout << "  " << tree.format(v) << "  " << umw::format_rational(tree.measure(v)) << '\n';
  }
  if (cfg.out.empty()) return kExitOk;
  Output out(cfg.out);
  auto& os = out.stream();
  os << "vertex_address,depth,branching,measure\n";
  for (umw::VertexId v = 0; v < tree.vertex_count(); ++v)
    os << tree.format(v) << ',' << tree.depth(v) << ',' << tree.branching(v) << ','
       << umw::format_rational(tree.measure(v)) << '\n';
  return kExitOk;
}

int cmd_transform(const RunConfig& cfg) {
  const auto tree = load_tree(cfg);
  Output out(cfg.out);
  if (cfg.mode == "fwd") {
    auto in = open_input(cfg.in);
    umw::csv::write_coefficients(out.stream(), tree, umw::forward(tree, umw::csv::read_grid_function(in, tree)));
    return kExitOk;
  }
  if (cfg.mode == "inv") {
    auto in = open_input(cfg.in);
    umw::csv::write_grid_function(out.stream(), tree, umw::inverse(tree, umw::csv::read_coefficients(in, tree)));
    return kExitOk;
  }
  if (cfg.mode == "roundtrip") {
    auto in = open_input(cfg.in);
    const auto f = umw::csv::read_grid_function(in, tree);
    std::stringstream coeffs;
    umw::csv::write_coefficients(coeffs, tree, umw::forward(tree, f));
    const auto back = umw::inverse(tree, umw::csv::read_coefficients(coeffs, tree));
    const double err = umw::max_abs_difference(back, f);
    out.stream() << "max_abs_error," << umw::csv::format_double(err) << '\n';
    return err <= cfg.tol ? kExitOk : kExitInvariant;
  }
  throw std::invalid_argument("transform --mode must be fwd, inv or roundtrip");
}

umw::GridFunction input_or_random(const RunConfig& cfg, const umw::UltrametricTree& tree) {
  if (!cfg.in.empty()) {
    auto in = open_input(cfg.in);
    return umw::csv::read_grid_function(in, tree);
  }
  std::mt19937_64 rng(cfg.seed);
  return umw::selftest::random_function(tree, rng);
}

int cmd_operator(const RunConfig& cfg) {
  const auto tree = load_tree(cfg);
  const auto kernel = umw::make_kernel(tree, umw::csv::parse_kernel_spec(cfg.kernel, tree));
  Output out(cfg.out);
  if (cfg.mode == "dense") {
    umw::csv::write_grid_function(out.stream(), tree, umw::apply_dense(tree, kernel, input_or_random(cfg, tree)));
    return kExitOk;
  }
  if (cfg.mode == "spectral") {
    umw::csv::write_grid_function(out.stream(), tree, umw::apply_spectral(tree, kernel, input_or_random(cfg, tree)));
    return kExitOk;
  }
  if (cfg.mode == "compare") {
    const auto f = input_or_random(cfg, tree);
    const double diff = umw::max_abs_difference(umw::apply_dense(tree, kernel, f), umw::apply_spectral(tree, kernel, f));
    out.stream() << "max_abs_diff," << umw::csv::format_double(diff) << '\n';
    return diff <= cfg.dense_tol ? kExitOk : kExitInvariant;
  }
  if (cfg.mode == "spectrum") {
    const auto s = umw::spectrum(tree, kernel);
    std::vector<double> integral(tree.vertex_count(), 0.0);
    bool ok = true;
    for (umw::VertexId v = 0; v < tree.vertex_count(); ++v) {
      if (tree.is_leaf(v)) continue;
      integral[v] = umw::eigenvalue_integral_at(tree, kernel, v);
      if (std::abs(integral[v] - s[v]) > cfg.tol * std::abs(s[v])) ok = false;
    }
    umw::csv::write_spectrum(out.stream(), tree, s.values(), integral);
    return ok ? kExitOk : kExitInvariant;
  }
  throw std::invalid_argument("op --mode must be dense, spectral, compare or spectrum");
}

// "<vertex>:<j>", e.g. "top:1" or "01:2".
umw::WaveletIndex parse_index(const std::string& text, const umw::UltrametricTree& tree) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("--index must look like <vertex>:<j>");
  const auto j = std::stoul(text.substr(colon + 1));
  return umw::wavelet_index(tree, tree.parse(text.substr(0, colon)), static_cast<std::uint32_t>(j));
}

int cmd_rho(const RunConfig& cfg) {
  const auto tree = load_tree(cfg);
  Output out(cfg.out);
  if (cfg.mode == "map") {
    umw::csv::write_rho_map(out.stream(), tree, cfg.precision);
    return kExitOk;
  }
  if (cfg.mode == "export") {
    if (cfg.index.empty() || cfg.index == "all") {
      out.stream() << "vertex_address,j," << umw::csv::kPiecewiseHeader << '\n';
      for (const auto& idx : umw::basis_indices(tree)) {
        std::stringstream rows;
        umw::csv::write_piecewise(rows, umw::export_wavelet(tree, idx), cfg.precision, false);
        std::string line;
        while (std::getline(rows, line)) out.stream() << tree.format(idx.vertex) << ',' << idx.j << ',' << line << '\n';
      }
      return kExitOk;
    }
    umw::csv::write_piecewise(out.stream(), umw::export_wavelet(tree, parse_index(cfg.index, tree)), cfg.precision);
    return kExitOk;
  }
  throw std::invalid_argument("rho --mode must be map or export");
}

int cmd_selftest(const RunConfig& cfg) {
  umw::selftest::Options opt;
  opt.seed = cfg.seed;
  opt.tol = cfg.tol;
  opt.dense_tol = cfg.dense_tol;
  opt.perturb_phase = cfg.perturb;
  opt.large = cfg.large;
  Output out(cfg.out);
  auto& os = out.stream();
  bool all = true;
  os << "seed " << opt.seed << ", tol " << opt.tol << ", dense tol " << opt.dense_tol << '\n';
  for (const auto& r : umw::selftest::run(opt)) {
    all = all && r.passed;
    os << (r.passed ? "PASS " : "FAIL ") << r.name << "\n     trees: " << r.trees;
    if (r.tolerance > 0) os << "\n     worst deviation " << r.worst << " (tol " << r.tolerance << ")";
    if (!r.detail.empty()) os << "\n     " << r.detail;
    os << '\n';
  }
  os << (all ? "all suites passed" : "invariant failure") << '\n';
  return all ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrametric wavelets, radial pseudodifferential operators and the change of variable to the half-line"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_tree = [&](CLI::App* sub) {
    sub->add_option("--tree", cfg.tree, "tree spec file or inline JSON")->capture_default_str();
  };
  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--in", cfg.in, "input CSV");
    sub->add_option("--out", cfg.out, "output CSV (stdout when omitted)");
  };

  auto* tree_cmd = app.add_subcommand("tree", "summarize a tree: vertices, depths, branching, measures");
  add_tree(tree_cmd);
  tree_cmd->add_option("--out", cfg.out, "vertex table CSV");

  auto* transform_cmd = app.add_subcommand("transform", "forward/inverse wavelet transform of CSV data");
  add_tree(transform_cmd);
  add_io(transform_cmd);
  transform_cmd->add_option("--mode", cfg.mode, "fwd | inv | roundtrip")->required();
  transform_cmd->add_option("--tol", cfg.tol, "round-trip tolerance")->capture_default_str();

  auto* op_cmd = app.add_subcommand("op", "apply the radial operator or list its spectrum");
  add_tree(op_cmd);
  add_io(op_cmd);
  op_cmd->add_option("--kernel", cfg.kernel, "constant:<c> | power:<alpha> | <kernel.csv>")->capture_default_str();
  op_cmd->add_option("--mode", cfg.mode, "dense | spectral | compare | spectrum")->required();
  op_cmd->add_option("--tol", cfg.tol, "eigenvalue formula tolerance (relative)")->capture_default_str();
  op_cmd->add_option("--dense-tol", cfg.dense_tol, "dense vs spectral tolerance")->capture_default_str();
  op_cmd->add_option("--seed", cfg.seed, "seed for the random input when --in is omitted")->capture_default_str();

  auto* rho_cmd = app.add_subcommand("rho", "change of variable onto the half-line");
  add_tree(rho_cmd);
  rho_cmd->add_option("--out", cfg.out, "output CSV (stdout when omitted)");
  rho_cmd->add_option("--mode", cfg.mode, "map | export")->required();
  rho_cmd->add_option("--index", cfg.index, "wavelet <vertex>:<j> for export, or 'all'");
  rho_cmd->add_option("--precision", cfg.precision, "decimal digits for rendered rationals")->capture_default_str();

  auto* self_cmd = app.add_subcommand("selftest", "run the invariant suites");
  self_cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  self_cmd->add_option("--tol", cfg.tol, "exact-path tolerance")->capture_default_str();
  self_cmd->add_option("--dense-tol", cfg.dense_tol, "dense vs spectral tolerance")->capture_default_str();
  self_cmd->add_flag("--perturb", cfg.perturb, "perturb one wavelet phase (negative control)");
  self_cmd->add_flag("--large", cfg.large, "N = 2^16 fast-path suites only");
  self_cmd->add_option("--out", cfg.out, "report file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*tree_cmd) return cmd_tree(cfg);
    if (*transform_cmd) return cmd_transform(cfg);
    if (*op_cmd) return cmd_operator(cfg);
    if (*rho_cmd) return cmd_rho(cfg);
    if (*self_cmd) return cmd_selftest(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
