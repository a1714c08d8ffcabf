#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperfix/diagnostics.hpp"
#include "hyperfix/hyperreal_linalg.hpp"
#include "hyperfix/io.hpp"
#include "hyperfix/iterate.hpp"
#include "hyperfix/psi.hpp"
#include "hyperfix/scenario.hpp"

namespace {

using namespace hyperfix;

std::string default_out_dir() {
  const char* env = std::getenv("HYPERFIX_OUT");
  return env && *env ? env : "out";
}

// "a,b;c,d" -> rows of series literals
HyperrealMatrix parse_matrix_arg(const std::string& text, int window) {
  HyperrealMatrix rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find(';', start);
    const std::string row_text =
        text.substr(start, end == std::string::npos ? end : end - start);
    HyperrealVector row;
    std::size_t cell_start = 0;
    while (cell_start <= row_text.size()) {
      const std::size_t cell_end = row_text.find(',', cell_start);
      row.push_back(parse_hyperreal(
          row_text.substr(cell_start, cell_end == std::string::npos
                                          ? cell_end
                                          : cell_end - cell_start),
          window));
      if (cell_end == std::string::npos) break;
      cell_start = cell_end + 1;
    }
    rows.push_back(std::move(row));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return rows;
}

HyperrealVector parse_vector_arg(const std::string& text, int window) {
  HyperrealMatrix m = parse_matrix_arg(text, window);
  if (m.size() == 1) return m[0];
  HyperrealVector out;
  for (auto& row : m) {
    if (row.size() != 1)
      throw Error("expected a vector, got a matrix: " + text);
    out.push_back(std::move(row[0]));
  }
  return out;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for_active_exception();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperfix: fixed-point iteration laboratory"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a scenario config");
  std::string config_path;
  std::string out_dir = default_out_dir();
  std::uint64_t seed_value = 0;
  bool timings = false;
  run->add_option("file", config_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run->add_option("--seed", seed_value, "seed override");
  run->add_flag("--timings", timings,
                "add wall-clock columns (breaks byte-identical reruns)");

  // psi check
  auto* psi_cmd = app.add_subcommand("psi", "norm-generating functions");
  auto* psi_check = psi_cmd->add_subcommand("check", "validate a psi function");
  double psi_p = 0.0;
  std::string psi_table;
  std::size_t psi_grid = 1000;
  auto* p_opt = psi_check->add_option("--p", psi_p, "l_p generator, p >= 1");
  auto* table_opt =
      psi_check->add_option("--table", psi_table, "tabulated psi CSV");
  psi_check->add_option("--grid", psi_grid, "strictness grid size");
  p_opt->excludes(table_opt);

  // modulus
  auto* modulus_cmd =
      app.add_subcommand("modulus", "uniform-monotonicity modulus");
  double mod_p = 2.0, mod_eps = 0.1;
  std::size_t mod_grid = 200;
  modulus_cmd->add_option("--p", mod_p, "l_p generator")->required();
  modulus_cmd->add_option("--eps", mod_eps, "eps > 0")->required();
  modulus_cmd->add_option("--grid", mod_grid, "grid points per axis");

  // ggld
  auto* ggld_cmd = app.add_subcommand("ggld", "double-limsup diagnostic");
  std::string ggld_input;
  std::size_t ggld_window = 0;
  double ggld_norm_tol = 1e-6;
  ggld_cmd->add_option("--input", ggld_input, "sample CSV")->required();
  ggld_cmd->add_option("--window", ggld_window, "tail window (default N/4)");
  ggld_cmd->add_option("--norm-tol", ggld_norm_tol, "norm tolerance");

  // symbolic
  auto* symbolic_cmd =
      app.add_subcommand("symbolic", "series fixed point of an affine map");
  std::string arg_a, arg_b, arg_u;
  int order = Hyperreal::kDefaultWindow;
  symbolic_cmd->add_option("--A", arg_a, "matrix, rows ';' entries ','")
      ->required();
  symbolic_cmd->add_option("--b", arg_b, "offset vector")->required();
  symbolic_cmd->add_option("--u", arg_u, "anchor vector")->required();
  symbolic_cmd->add_option("--order", order, "series window");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    RunOptions opts;
    opts.out_dir = out_dir;
    opts.timings = timings;
    if (seed_opt->count() > 0) opts.seed = seed_value;
    return run_cli(config_path, opts);
  }

  if (*psi_check) {
    return guarded([&] {
      if (p_opt->count() == 0 && table_opt->count() == 0)
        throw ConfigError("psi check", "need --p or --table");
      const PsiFunction psi = table_opt->count() > 0 ? load_psi_table(psi_table)
                                                     : PsiFunction::lp(psi_p);
      std::cout << "in_class: yes\n";
      std::cout << "strictly_monotone: "
                << (is_strictly_monotone(psi, psi_grid) ? "yes" : "no") << '\n';
      std::cout << "psi(0.5)=" << format_double(psi(0.5)) << '\n';
      return 0;
    });
  }

  if (*modulus_cmd) {
    return guarded([&] {
      const double delta =
          uniform_monotonicity_modulus(PsiFunction::lp(mod_p), mod_eps, mod_grid);
      std::cout << "delta(" << format_double(mod_eps)
                << ")=" << format_double(delta) << " grid=" << mod_grid << '\n';
      return 0;
    });
  }

  if (*ggld_cmd) {
    return guarded([&] {
      SequenceSample probe = load_sample(ggld_input, 2);
      const std::size_t window =
          ggld_window > 0 ? ggld_window : std::max<std::size_t>(probe.size() / 4, 2);
      const SequenceSample sample = load_sample(ggld_input, window);
      const GgldReport report = ggld_check(sample, ggld_norm_tol);
      std::cout << "double_limsup=" << format_double(report.double_limsup)
                << '\n';
      std::cout << "norm_limit=" << format_double(report.norm_limit) << '\n';
      std::cout << "verdict="
                << (report.verdict == GgldVerdict::Passes
                        ? "passes"
                        : report.verdict == GgldVerdict::Fails ? "fails"
                                                               : "inconclusive")
                << '\n';
      return 0;
    });
  }

  if (*symbolic_cmd) {
    return guarded([&] {
      const HyperrealMatrix a = parse_matrix_arg(arg_a, order);
      const HyperrealVector b = parse_vector_arg(arg_b, order);
      const HyperrealVector u = parse_vector_arg(arg_u, order);
      const SymbolicFixedPoint result = symbolic_fixed_point_series(a, b, u);
      for (std::size_t i = 0; i < result.z.size(); ++i)
        std::cout << "z[" << i << "] = " << to_string(result.z[i]) << '\n';
      std::cout << "shadow = (";
      for (std::size_t i = 0; i < result.shadow.dim(); ++i) {
        if (i) std::cout << ", ";
        std::cout << format_double(result.shadow.coords[i]);
      }
      std::cout << ")\n";
      return 0;
    });
  }

  return 0;
}
