#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hyperfix/io.hpp"
#include "hyperfix/scenario.hpp"
#include "hyperfix/svg.hpp"

using namespace hyperfix;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hyperfix_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("double formatting round trips") {
  for (double v : {0.0, 1.0, -4.0, 0.1, 1e-300, 3.141592653589793,
                   std::sqrt(2.0), 1e300}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("trace csv layout") {
  IterationTrace trace;
  trace.iterations = {0, 1};
  trace.points = {SpacePoint{{1.0, 0.0}, 2.0}, SpacePoint{{0.5, 0.25}, 2.0}};
  trace.residuals = {0.5, 0.25};
  trace.steps = {0.5, std::numeric_limits<double>::quiet_NaN()};
  const std::string csv = trace_to_csv(trace);
  CHECK(csv ==
        "iter,eps,residual,step,coord_0,coord_1\n"
        "0,,0.5,0.5,1,0\n"
        "1,,0.25,,0.5,0.25\n");

  trace.eps_schedule = {0.1, 0.05};
  CHECK(trace_to_csv(trace).find("0,0.1,0.5,0.5,1,0\n") != std::string::npos);
}

TEST_CASE("psi table round trip and row-level rejection") {
  const fs::path dir = temp_dir("psi");
  const fs::path table = dir / "psi.csv";
  write_file_atomic(table.string(), psi_table_to_csv(PsiFunction::lp(2), 200));
  const PsiFunction loaded = load_psi_table(table.string());
  for (double t : {0.0, 0.25, 0.5, 0.775, 1.0})
    CHECK(loaded(t) ==
          doctest::Approx(PsiFunction::lp(2)(t)).epsilon(1e-6));

  write(dir / "bad.csv", "t,psi\n0,1\n0.5,1.4\n1,1\n");
  try {
    load_psi_table((dir / "bad.csv").string());
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("sample csv round trips") {
  const fs::path dir = temp_dir("samples");
  {
    std::vector<SpacePoint> pts;
    for (int i = 0; i < 8; ++i)
      pts.push_back(SpacePoint{{0.5 * i, 1.0 - 0.1 * i}, 2.0});
    const SequenceSample sample(pts, 3);
    write_file_atomic((dir / "plain.csv").string(), sample_to_csv(sample));
    const SequenceSample loaded = load_sample((dir / "plain.csv").string(), 3);
    CHECK_FALSE(loaded.is_direct_sum());
    CHECK(loaded.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(loaded.coord(i, j) == sample.coord(i, j));
  }
  {
    std::vector<SpacePoint> pts;
    for (int i = 0; i < 6; ++i)
      pts.push_back(SpacePoint{{1.0 * i, -2.0 * i}, kInfiniteP});
    write_file_atomic((dir / "linf.csv").string(),
                      sample_to_csv(SequenceSample(pts, 2)));
    const SequenceSample loaded = load_sample((dir / "linf.csv").string(), 2);
    CHECK(loaded.plain_points()[0].p == kInfiniteP);
  }
  {
    std::vector<DirectSumPoint> pts;
    for (int i = 0; i < 6; ++i)
      pts.push_back(DirectSumPoint{SpacePoint{{1.0 * i, 0.0, 0.5}, 2.0},
                                   SpacePoint{{-0.25 * i}, 1.0},
                                   PsiFunction::lp(1.5)});
    write_file_atomic((dir / "sum.csv").string(),
                      sample_to_csv(SequenceSample(pts, 2)));
    const SequenceSample loaded = load_sample((dir / "sum.csv").string(), 2);
    CHECK(loaded.is_direct_sum());
    CHECK(loaded.sum_points()[0].x.dim() == 3);
    CHECK(loaded.sum_points()[0].y.dim() == 1);
    CHECK(loaded.sum_points()[0].y.p == 1.0);
    CHECK(loaded.sum_points()[0].psi.p() == doctest::Approx(1.5));
    CHECK(loaded.norm(3) == doctest::Approx(direct_sum_norm(pts[3])));
  }
}

TEST_CASE("psi spec and exponent parsing") {
  CHECK(parse_psi_spec("max").kind() == PsiFunction::Kind::Max);
  CHECK(parse_psi_spec("lp:1.5").p() == doctest::Approx(1.5));
  CHECK_THROWS_AS(parse_psi_spec("nope"), Error);
  CHECK(parse_p("inf") == kInfiniteP);
  CHECK(parse_p("2.5") == 2.5);
}

TEST_CASE("svg plot is well formed") {
  IterationTrace trace;
  for (std::size_t i = 0; i < 50; ++i) {
    trace.iterations.push_back(i);
    trace.points.push_back(SpacePoint{{0.0, 0.0}, 2.0});
    trace.residuals.push_back(std::pow(0.8, static_cast<double>(i)));
    trace.steps.push_back(0.1);
  }
  const std::string svg = residual_plot_svg(trace, "decay");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("scenario: regularized rotation run writes its artifacts") {
  const fs::path dir = temp_dir("scenario_rot");
  const fs::path config = dir / "rot.json";
  write(config, R"({
    "name": "rot_mini",
    "kind": "nonstandard_picard",
    "space": {"dim": 2, "p": 2},
    "domain": {"type": "ball", "center": [0, 0], "radius": 1},
    "map": {"kind": "rotation", "theta": 1.5707963267948966, "center": [0, 0]},
    "x0": [1, 0],
    "u": [1, 0],
    "schedule": {"eps0": 0.1, "gamma": 0.5, "j_max": 8}
  })");

  RunOptions opts;
  opts.out_dir = (dir / "out").string();
  const auto outcomes = run_scenario_file(config.string(), opts);
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].kind == "nonstandard_picard");
  CHECK(outcomes[0].final_residual <= 2e-3);
  CHECK(fs::exists(dir / "out" / "rot_mini" / "trace.csv"));
  CHECK(fs::exists(dir / "out" / "rot_mini" / "ladder.csv"));
  CHECK(fs::exists(dir / "out" / "rot_mini" / "plot.svg"));
  CHECK(fs::exists(dir / "out" / "summary.csv"));

  // byte-identical rerun
  RunOptions opts2 = opts;
  opts2.out_dir = (dir / "out2").string();
  run_scenario_file(config.string(), opts2);
  CHECK(read_file((dir / "out" / "rot_mini" / "trace.csv").string()) ==
        read_file((dir / "out2" / "rot_mini" / "trace.csv").string()));
  CHECK(read_file((dir / "out" / "summary.csv").string()) ==
        read_file((dir / "out2" / "summary.csv").string()));
}

TEST_CASE("scenario: missing fields report their path") {
  const fs::path dir = temp_dir("scenario_bad");
  const fs::path config = dir / "bad.json";
  write(config, R"({"kind": "contraction", "space": {"dim": 1, "p": 2},
                    "domain": {"type": "box", "lo": [0], "hi": [4]},
                    "x0": [0]})");
  try {
    run_scenario_file(config.string(), RunOptions{(dir / "out").string()});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field_path() == "map");
  }
}

TEST_CASE("scenario: exit codes classify failures") {
  const fs::path dir = temp_dir("scenario_exit");
  {
    write(dir / "bad.json", "{ nope");
    CHECK(run_cli((dir / "bad.json").string(),
                  RunOptions{(dir / "o1").string()}) == 1);
  }
  {
    write(dir / "nomap.json", R"({"kind": "contraction",
      "space": {"dim": 1, "p": 2},
      "domain": {"type": "box", "lo": [0], "hi": [4]}, "x0": [0]})");
    CHECK(run_cli((dir / "nomap.json").string(),
                  RunOptions{(dir / "o4").string()}) == 1);
  }
  {
    write(dir / "modulus_max.json", R"({
      "kind": "modulus", "psi": {"kind": "max"}, "eps": 0.1, "grid": 50
    })");
    CHECK(run_cli((dir / "modulus_max.json").string(),
                  RunOptions{(dir / "o2").string()}) == 3);
  }
  {
    write(dir / "capped.json", R"({
      "kind": "contraction", "space": {"dim": 1, "p": 2},
      "domain": {"type": "box", "lo": [-2], "hi": [2]},
      "map": {"kind": "affine", "A": [[0.99]], "b": [0]},
      "x0": [1], "tol": 1e-12, "cap": 5
    })");
    CHECK(run_cli((dir / "capped.json").string(),
                  RunOptions{(dir / "o5").string()}) == 2);
  }
  {
    write(dir / "ok.json", R"({
      "kind": "modulus", "psi": {"kind": "lp", "p": 1}, "eps": 0.1, "grid": 50
    })");
    CHECK(run_cli((dir / "ok.json").string(),
                  RunOptions{(dir / "o3").string()}) == 0);
    const std::string csv =
        read_file((dir / "o3" / "ok" / "modulus.csv").string());
    CHECK(csv.find("0.1,") != std::string::npos);
  }
}

TEST_CASE("scenario: symbolic kind renders series") {
  const fs::path dir = temp_dir("scenario_sym");
  write(dir / "sym.json", R"({
    "kind": "symbolic",
    "A": [[0.5]], "b": [1], "u": [0], "order": 3
  })");
  CHECK(run_cli((dir / "sym.json").string(),
                RunOptions{(dir / "out").string()}) == 0);
  const std::string csv =
      read_file((dir / "out" / "sym" / "symbolic.csv").string());
  CHECK(csv.find("2 + -4*h^1 + 4*h^2 + -4*h^3") != std::string::npos);
}

TEST_CASE("scenario: ggld generate and batch summary") {
  const fs::path dir = temp_dir("scenario_ggld");
  write(dir / "batch.json", R"({
    "scenarios": [
      {"name": "l2", "kind": "ggld",
       "generate": {"kind": "lp_basis", "n": 40, "p": 2}, "window": 10},
      {"name": "linf", "kind": "ggld",
       "generate": {"kind": "lp_basis", "n": 40, "p": "inf"}, "window": 10}
    ]
  })");
  RunOptions opts{(dir / "out").string()};
  const auto outcomes = run_scenario_file((dir / "batch.json").string(), opts);
  CHECK(outcomes.size() == 2);
  CHECK(read_file((dir / "out" / "l2" / "ggld.csv").string())
            .find("verdict,passes") != std::string::npos);
  CHECK(read_file((dir / "out" / "linf" / "ggld.csv").string())
            .find("verdict,fails") != std::string::npos);
  const std::string summary = read_file((dir / "out" / "summary.csv").string());
  CHECK(summary.find("l2,ggld,") != std::string::npos);
  CHECK(summary.find("linf,ggld,") != std::string::npos);
}

namespace {

// compare.csv rows: method,map_evals,final_residual,dist_to_reference
struct CompareRow {
  std::string method;
  double evals, residual, dist_ref;
};

std::vector<CompareRow> read_compare(const fs::path& file) {
  std::istringstream in(read_file(file.string()));
  std::string line;
  std::getline(in, line);  // header
  std::vector<CompareRow> rows;
  while (std::getline(in, line) && line.rfind('#', 0) != 0) {
    CompareRow row;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, row.method, ',');
    std::getline(cells, cell, ',');
    row.evals = std::stod(cell);
    std::getline(cells, cell, ',');
    row.residual = std::stod(cell);
    std::getline(cells, cell, ',');
    row.dist_ref = std::stod(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("scenario: matched-budget comparison on the quarter turn") {
  const fs::path dir = temp_dir("scenario_cmp_rot");
  write(dir / "cmp.json", R"({
    "name": "cmp",
    "kind": "compare_all",
    "space": {"dim": 2, "p": 2},
    "domain": {"type": "ball", "center": [0, 0], "radius": 1},
    "map": {"kind": "rotation", "theta": 1.5707963267948966, "center": [0, 0]},
    "x0": [1, 0], "u": [1, 0],
    "schedule": {"eps0": 0.1, "gamma": 0.5, "j_max": 30},
    "budget": 10000
  })");
  RunOptions opts{(dir / "out").string()};
  run_scenario_file((dir / "cmp.json").string(), opts);
  const auto rows = read_compare(dir / "out" / "cmp" / "compare.csv");
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.evals <= 10000 + 40);  // per-stage residual probes
    CHECK(row.residual <= 1e-1);
  }
}

TEST_CASE("scenario: all methods agree on a contraction's fixed point") {
  const fs::path dir = temp_dir("scenario_cmp_con");
  write(dir / "cmp.json", R"({
    "name": "cmp",
    "kind": "compare_all",
    "space": {"dim": 2, "p": 2},
    "domain": {"type": "box", "lo": [-2, -2], "hi": [2, 2]},
    "map": {"kind": "affine", "A": [[0.5, 0.0], [0.0, 0.5]], "b": [0.25, 0.25]},
    "x0": [1.5, -1.0], "u": [0.2, 0.2],
    "schedule": {"eps0": 0.1, "gamma": 0.5, "j_max": 30},
    "budget": 2000000
  })");
  RunOptions opts{(dir / "out").string()};
  run_scenario_file((dir / "cmp.json").string(), opts);
  const auto rows = read_compare(dir / "out" / "cmp" / "compare.csv");
  REQUIRE(rows.size() == 3);
  // reference is the symbolic shadow of the affine map; everyone lands on it
  for (const auto& row : rows) CHECK(row.dist_ref <= 1e-6);
}

TEST_CASE("scenario: lemma4 generate reports a consistent verdict") {
  const fs::path dir = temp_dir("scenario_lemma4");
  write(dir / "lemma4.json", R"({
    "kind": "lemma4",
    "generate": {"kind": "direct_basis", "n": 120, "psi": {"kind": "lp", "p": 2},
                 "y_mode": "decay", "y_scale": 1.0},
    "window": 30
  })");
  RunOptions opts{(dir / "out").string()};
  const auto outcomes =
      run_scenario_file((dir / "lemma4.json").string(), opts);
  CHECK(outcomes.size() == 1);
  const std::string csv =
      read_file((dir / "out" / "lemma4" / "lemma4.csv").string());
  CHECK(csv.find("verdict,consistent") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "lemma4" / "y_tail.csv"));
}
