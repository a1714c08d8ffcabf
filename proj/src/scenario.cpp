#include "hyperfix/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <set>

#include <json.hpp>

#include "hyperfix/diagnostics.hpp"
#include "hyperfix/hyperreal_linalg.hpp"
#include "hyperfix/io.hpp"
#include "hyperfix/iterate.hpp"
#include "hyperfix/svg.hpp"

namespace hyperfix {

using nlohmann::json;

namespace {

// -- config access with field-path error reporting ---------------------------

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json& require(const json& j, const std::string& base,
                    const std::string& key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(join_path(base, key), "missing required field");
  return j.at(key);
}

double require_number(const json& j, const std::string& base,
                      const std::string& key) {
  const json& v = require(j, base, key);
  if (!v.is_number()) throw ConfigError(join_path(base, key), "expected a number");
  return v.get<double>();
}

std::size_t require_count(const json& j, const std::string& base,
                          const std::string& key) {
  const json& v = require(j, base, key);
  if (!v.is_number_unsigned())
    throw ConfigError(join_path(base, key), "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::string require_string(const json& j, const std::string& base,
                           const std::string& key) {
  const json& v = require(j, base, key);
  if (!v.is_string()) throw ConfigError(join_path(base, key), "expected a string");
  return v.get<std::string>();
}

double number_or(const json& j, const std::string& base, const std::string& key,
                 double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return require_number(j, base, key);
}

std::size_t count_or(const json& j, const std::string& base,
                     const std::string& key, std::size_t fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return require_count(j, base, key);
}

std::vector<double> require_vector(const json& j, const std::string& base,
                                   const std::string& key) {
  const json& v = require(j, base, key);
  if (!v.is_array() || v.empty())
    throw ConfigError(join_path(base, key), "expected a nonempty array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number())
      throw ConfigError(join_path(base, key), "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// -- domain objects from config ----------------------------------------------

double parse_p_field(const json& j, const std::string& path) {
  if (j.is_string()) return parse_p(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw ConfigError(path, "expected a number or \"inf\"");
}

struct SpaceSpec {
  std::size_t dim;
  double p;
};

SpaceSpec parse_space(const json& scenario, const std::string& base) {
  const json& space = require(scenario, base, "space");
  const std::string path = join_path(base, "space");
  SpaceSpec out{};
  out.dim = require_count(space, path, "dim");
  if (out.dim == 0) throw ConfigError(join_path(path, "dim"), "dim must be >= 1");
  out.p = space.contains("p") ? parse_p_field(space.at("p"), join_path(path, "p"))
                              : 2.0;
  if (!(out.p >= 1.0)) throw ConfigError(join_path(path, "p"), "p must be >= 1");
  return out;
}

ConvexSet parse_domain(const json& scenario, const std::string& base,
                       const SpaceSpec& space) {
  const json& dom = require(scenario, base, "domain");
  const std::string path = join_path(base, "domain");
  const std::string type = require_string(dom, path, "type");
  try {
    if (type == "ball") {
      std::vector<double> center = require_vector(dom, path, "center");
      return ConvexSet::ball(SpacePoint{std::move(center), space.p},
                             require_number(dom, path, "radius"));
    }
    if (type == "box") {
      return ConvexSet::box(require_vector(dom, path, "lo"),
                            require_vector(dom, path, "hi"), space.p);
    }
    if (type == "polytope") {
      const json& verts = require(dom, path, "vertices");
      if (!verts.is_array() || verts.empty())
        throw ConfigError(join_path(path, "vertices"), "expected an array");
      std::vector<SpacePoint> points;
      for (const auto& v : verts) {
        std::vector<double> coords;
        for (const auto& c : v) coords.push_back(c.get<double>());
        points.push_back(SpacePoint{std::move(coords), space.p});
      }
      return ConvexSet::polytope(std::move(points));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join_path(path, "type"),
                    "unknown domain type '" + type + "'");
}

MapDescriptor parse_map(const json& scenario, const std::string& base,
                        const ConvexSet& domain) {
  const json& map = require(scenario, base, "map");
  const std::string path = join_path(base, "map");
  const std::string kind = require_string(map, path, "kind");
  try {
    if (kind == "affine") {
      const json& rows = require(map, path, "A");
      std::vector<std::vector<double>> a;
      for (const auto& row : rows) {
        std::vector<double> r;
        for (const auto& c : row) r.push_back(c.get<double>());
        a.push_back(std::move(r));
      }
      return MapDescriptor::affine(std::move(a),
                                   require_vector(map, path, "b"), domain);
    }
    if (kind == "rotation") {
      std::vector<double> center = require_vector(map, path, "center");
      return MapDescriptor::rotation(
          require_number(map, path, "theta"),
          SpacePoint{std::move(center), domain.ambient_p()}, domain);
    }
    if (kind == "proj_composition") {
      const json& sets = require(map, path, "sets");
      if (!sets.is_array() || sets.empty())
        throw ConfigError(join_path(path, "sets"), "expected an array");
      std::vector<ConvexSet> parsed;
      SpaceSpec space{domain.dim(), domain.ambient_p()};
      for (std::size_t i = 0; i < sets.size(); ++i) {
        json wrapper;
        wrapper["domain"] = sets[i];
        parsed.push_back(parse_domain(
            wrapper, join_path(path, "sets[" + std::to_string(i) + "]"),
            space));
      }
      return MapDescriptor::proj_composition(std::move(parsed), domain);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainViolation&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join_path(path, "kind"), "unknown map kind '" + kind +
                                                 "' (custom maps are "
                                                 "code-only)");
}

SpacePoint parse_point(const json& scenario, const std::string& base,
                       const std::string& key, const SpaceSpec& space) {
  std::vector<double> coords = require_vector(scenario, base, key);
  if (coords.size() != space.dim)
    throw ConfigError(join_path(base, key), "dimension mismatch with space");
  return SpacePoint{std::move(coords), space.p};
}

RegularizationSchedule parse_schedule(const json& scenario,
                                      const std::string& base) {
  RegularizationSchedule sched;
  if (!scenario.contains("schedule")) return sched;
  const json& s = scenario.at("schedule");
  const std::string path = join_path(base, "schedule");
  sched.eps0 = number_or(s, path, "eps0", sched.eps0);
  sched.gamma = number_or(s, path, "gamma", sched.gamma);
  sched.j_max = count_or(s, path, "j_max", sched.j_max);
  sched.inner_tol_coeff =
      number_or(s, path, "inner_tol_coeff", sched.inner_tol_coeff);
  try {
    sched.validate();
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return sched;
}

AlphaSchedule parse_alphas(const json& scenario, const std::string& base,
                           const std::string& key,
                           const AlphaSchedule& fallback) {
  if (!scenario.contains(key)) return fallback;
  const json& a = scenario.at(key);
  const std::string path = join_path(base, key);
  const std::string kind = require_string(a, path, "kind");
  if (kind == "constant") return constant_alpha(require_number(a, path, "value"));
  if (kind == "harmonic") return harmonic_alpha();
  throw ConfigError(join_path(path, "kind"),
                    "unknown alpha kind '" + kind + "'");
}

PsiFunction parse_psi(const json& scenario, const std::string& base) {
  const json& psi = require(scenario, base, "psi");
  const std::string path = join_path(base, "psi");
  const std::string kind = require_string(psi, path, "kind");
  try {
    if (kind == "lp") return PsiFunction::lp(require_number(psi, path, "p"));
    if (kind == "max") return PsiFunction::max_norm();
    if (kind == "table")
      return load_psi_table(require_string(psi, path, "file"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join_path(path, "kind"), "unknown psi kind '" + kind + "'");
}

SequenceSample parse_sample(const json& scenario, const std::string& base,
                            std::size_t tail_window) {
  if (scenario.contains("input")) {
    return load_sample(require_string(scenario, base, "input"), tail_window);
  }
  const json& gen = require(scenario, base, "generate");
  const std::string path = join_path(base, "generate");
  const std::string kind = require_string(gen, path, "kind");
  const std::size_t n = require_count(gen, path, "n");
  if (n < 4) throw ConfigError(join_path(path, "n"), "need n >= 4");

  if (kind == "lp_basis") {
    const double p = gen.contains("p")
                         ? parse_p_field(gen.at("p"), join_path(path, "p"))
                         : 2.0;
    std::vector<SpacePoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> coords(n, 0.0);
      coords[i] = 1.0;
      pts.push_back(SpacePoint{std::move(coords), p});
    }
    return SequenceSample(std::move(pts), tail_window);
  }
  if (kind == "direct_basis") {
    json psi_holder;
    psi_holder["psi"] = gen.contains("psi") ? gen.at("psi")
                                            : json{{"kind", "lp"}, {"p", 2.0}};
    const PsiFunction psi = parse_psi(psi_holder, path);
    const double px = gen.contains("px")
                          ? parse_p_field(gen.at("px"), join_path(path, "px"))
                          : 2.0;
    const double py = gen.contains("py")
                          ? parse_p_field(gen.at("py"), join_path(path, "py"))
                          : 2.0;
    const std::size_t y_dim = count_or(gen, path, "y_dim", 2);
    const double y_scale = number_or(gen, path, "y_scale", 1.0);
    const std::string y_mode = gen.contains("y_mode")
                                   ? require_string(gen, path, "y_mode")
                                   : "decay";
    std::vector<DirectSumPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(n, 0.0);
      x[i] = 1.0;
      std::vector<double> y(y_dim, 0.0);
      if (y_mode == "decay")
        y[0] = y_scale / static_cast<double>((i + 1) * (i + 1));
      else if (y_mode == "constant")
        y[0] = y_scale;
      else if (y_mode != "zero")
        throw ConfigError(join_path(path, "y_mode"),
                          "expected zero|decay|constant");
      pts.push_back(DirectSumPoint{SpacePoint{std::move(x), px},
                                   SpacePoint{std::move(y), py}, psi});
    }
    return SequenceSample(std::move(pts), tail_window);
  }
  throw ConfigError(join_path(path, "kind"),
                    "unknown generator kind '" + kind + "'");
}

// -- scenario bodies -----------------------------------------------------------

namespace fs = std::filesystem;

struct Artifacts {
  fs::path dir;
  void write(const std::string& file, const std::string& content) const {
    write_file_atomic((dir / file).string(), content);
  }
};

struct Context {
  std::string name;
  std::string base;  // field-path prefix for errors
  Artifacts out;
  std::uint64_t seed;
};

double residual_at(const MapDescriptor& t, const SpacePoint& x) {
  return dist(t.apply(x), x);
}

ScenarioOutcome run_contraction(const json& j, const Context& ctx) {
  const SpaceSpec space = parse_space(j, ctx.base);
  const ConvexSet domain = parse_domain(j, ctx.base, space);
  const MapDescriptor map = parse_map(j, ctx.base, domain);
  const SpacePoint x0 = parse_point(j, ctx.base, "x0", space);
  const double tol = number_or(j, ctx.base, "tol", 1e-10);
  const auto cap = count_or(j, ctx.base, "cap", 50'000'000);

  const PicardResult result = picard_contraction(map, x0, tol, cap);
  ctx.out.write("trace.csv", trace_to_csv(result.trace));
  ctx.out.write("plot.svg", residual_plot_svg(result.trace, ctx.name));
  return {ctx.name, "contraction", result.trace.final_residual(),
          result.trace.total_iterations, 0.0};
}

std::string ladder_to_csv(const std::vector<LadderStage>& ladder) {
  std::string out =
      "stage,eps,inner_iterations,inner_tol,achieved_tol,t_residual,"
      "residual_bound,bound_ok\n";
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const LadderStage& s = ladder[j];
    out += std::to_string(j) + ',' + format_double(s.eps) + ',' +
           std::to_string(s.inner_iterations) + ',' +
           format_double(s.inner_tol) + ',' + format_double(s.achieved_tol) +
           ',' + format_double(s.t_residual) + ',' +
           format_double(s.residual_bound) + ',' +
           (s.t_residual <= s.residual_bound ? "1" : "0") + '\n';
  }
  return out;
}

ScenarioOutcome run_nonstandard_picard(const json& j, const Context& ctx) {
  const SpaceSpec space = parse_space(j, ctx.base);
  const ConvexSet domain = parse_domain(j, ctx.base, space);
  const MapDescriptor map = parse_map(j, ctx.base, domain);
  const SpacePoint x0 = parse_point(j, ctx.base, "x0", space);
  const SpacePoint u = parse_point(j, ctx.base, "u", space);
  const RegularizationSchedule sched = parse_schedule(j, ctx.base);

  const NonstandardPicardResult result = nonstandard_picard(map, u, x0, sched);
  const SpacePoint projected = project(domain, result.z);
  ctx.out.write("trace.csv", trace_to_csv(result.trace));
  ctx.out.write("ladder.csv", ladder_to_csv(result.ladder));
  ctx.out.write("plot.svg", residual_plot_svg(result.trace, ctx.name));

  std::string extra = "key,value\n";
  extra += "dist_to_domain," + format_double(dist(projected, result.z)) + "\n";
  extra += "projected_residual," + format_double(residual_at(map, projected)) +
           "\n";
  ctx.out.write("projection.csv", extra);

  return {ctx.name, "nonstandard_picard",
          result.ladder.empty() ? 0.0 : result.ladder.back().t_residual,
          result.trace.total_iterations, 0.0};
}

ScenarioOutcome run_mann_halpern(const json& j, const Context& ctx,
                                 bool halpern) {
  const SpaceSpec space = parse_space(j, ctx.base);
  const ConvexSet domain = parse_domain(j, ctx.base, space);
  const MapDescriptor map = parse_map(j, ctx.base, domain);
  const SpacePoint x0 = parse_point(j, ctx.base, "x0", space);
  const auto steps = count_or(j, ctx.base, "steps", 10'000);
  const AlphaSchedule alphas = parse_alphas(
      j, ctx.base, "alphas",
      halpern ? harmonic_alpha() : constant_alpha(0.5));

  IterationTrace trace;
  if (halpern) {
    const SpacePoint u = parse_point(j, ctx.base, "u", space);
    trace = halpern_iterate(map, u, x0, alphas, steps);
  } else {
    trace = mann_iterate(map, x0, alphas, steps);
  }
  ctx.out.write("trace.csv", trace_to_csv(trace));
  ctx.out.write("plot.svg", residual_plot_svg(trace, ctx.name));
  return {ctx.name, halpern ? "halpern" : "mann", trace.final_residual(),
          trace.total_iterations, 0.0};
}

ScenarioOutcome run_compare_all(const json& j, const Context& ctx) {
  const SpaceSpec space = parse_space(j, ctx.base);
  const ConvexSet domain = parse_domain(j, ctx.base, space);
  const MapDescriptor map = parse_map(j, ctx.base, domain);
  const SpacePoint x0 = parse_point(j, ctx.base, "x0", space);
  const SpacePoint u = parse_point(j, ctx.base, "u", space);
  const RegularizationSchedule sched = parse_schedule(j, ctx.base);
  const auto budget = count_or(j, ctx.base, "budget", 10'000);
  const AlphaSchedule mann_alphas =
      parse_alphas(j, ctx.base, "mann_alphas", constant_alpha(0.5));
  const AlphaSchedule halpern_alphas =
      parse_alphas(j, ctx.base, "halpern_alphas", harmonic_alpha());

  const NonstandardPicardResult reg =
      nonstandard_picard(map, u, x0, sched, budget);
  const IterationTrace mann =
      mann_iterate(map, x0, mann_alphas, budget > 0 ? budget - 1 : 0);
  const IterationTrace halp = halpern_iterate(map, u, x0, halpern_alphas,
                                              budget > 0 ? budget - 1 : 0);

  // Reference point: the symbolic shadow for affine maps, otherwise the
  // best-residual final iterate.
  SpacePoint reference;
  std::string ref_kind;
  const SpacePoint mann_final = mann.points.back();
  const SpacePoint halp_final = halp.points.back();
  if (map.affine_data()) {
    reference = symbolic_fixed_point(map, u).shadow;
    ref_kind = "symbolic_shadow";
  } else {
    reference = reg.z;
    double best = residual_at(map, reg.z);
    for (const SpacePoint* cand : {&mann_final, &halp_final}) {
      const double r = residual_at(map, *cand);
      if (r < best) {
        best = r;
        reference = *cand;
      }
    }
    ref_kind = "best_residual";
  }

  std::string csv = "method,map_evals,final_residual,dist_to_reference\n";
  const auto row = [&](const std::string& method, std::size_t evals,
                       double res, const SpacePoint& final_pt) {
    csv += method + ',' + std::to_string(evals) + ',' + format_double(res) +
           ',' + format_double(dist(final_pt, reference)) + '\n';
  };
  const double reg_res = residual_at(map, reg.z);
  row("regularized", reg.trace.map_evals, reg_res, reg.z);
  row("mann", mann.map_evals, mann.final_residual(), mann_final);
  row("halpern", halp.map_evals, halp.final_residual(), halp_final);
  csv += "# reference," + ref_kind + '\n';
  ctx.out.write("compare.csv", csv);
  ctx.out.write("trace_regularized.csv", trace_to_csv(reg.trace));
  ctx.out.write("trace_mann.csv", trace_to_csv(mann));
  ctx.out.write("trace_halpern.csv", trace_to_csv(halp));
  ctx.out.write("plot_regularized.svg",
                residual_plot_svg(reg.trace, ctx.name + " (regularized)"));
  ctx.out.write("plot_mann.svg", residual_plot_svg(mann, ctx.name + " (mann)"));
  ctx.out.write("plot_halpern.svg",
                residual_plot_svg(halp, ctx.name + " (halpern)"));

  const double best = std::min({reg_res, mann.final_residual(),
                                halp.final_residual()});
  return {ctx.name, "compare_all", best,
          reg.trace.total_iterations + mann.total_iterations +
              halp.total_iterations,
          0.0};
}

ScenarioOutcome run_psi_scan(const json& j, const Context& ctx) {
  const PsiFunction psi = parse_psi(j, ctx.base);
  const auto grid = count_or(j, ctx.base, "grid", 1000);
  std::string csv = "t,psi,psi_inf,margin\n";
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid);
    const double v = psi(t);
    const double envelope = std::max(1.0 - t, t);
    if (i > 0 && i < grid) min_margin = std::min(min_margin, v - envelope);
    csv += format_double(t) + ',' + format_double(v) + ',' +
           format_double(envelope) + ',' + format_double(v - envelope) + '\n';
  }
  ctx.out.write("psi.csv", csv);
  std::string report = "key,value\n";
  report += std::string("strictly_monotone,") +
            (is_strictly_monotone(psi, grid) ? "1" : "0") + "\n";
  report += "min_interior_margin," + format_double(min_margin) + "\n";
  ctx.out.write("report.csv", report);
  return {ctx.name, "psi_scan", min_margin, grid, 0.0};
}

ScenarioOutcome run_modulus(const json& j, const Context& ctx) {
  const PsiFunction psi = parse_psi(j, ctx.base);
  const auto grid = count_or(j, ctx.base, "grid", 200);
  std::vector<double> eps_values;
  const json& eps = require(j, ctx.base, "eps");
  if (eps.is_array())
    for (const auto& e : eps) eps_values.push_back(e.get<double>());
  else
    eps_values.push_back(eps.get<double>());

  std::string csv = "eps,delta,grid\n";
  double last = 0.0;
  for (double e : eps_values) {
    last = uniform_monotonicity_modulus(psi, e, grid);
    csv += format_double(e) + ',' + format_double(last) + ',' +
           std::to_string(grid) + '\n';
  }
  ctx.out.write("modulus.csv", csv);
  return {ctx.name, "modulus", last, grid, 0.0};
}

ScenarioOutcome run_ggld(const json& j, const Context& ctx) {
  const auto declared_n =
      j.contains("generate") ? count_or(j.at("generate"), ctx.base, "n", 40)
                             : 40;
  const auto window = count_or(j, ctx.base, "window", declared_n / 4);
  const SequenceSample sample = parse_sample(j, ctx.base, window);
  const double norm_tol = number_or(j, ctx.base, "norm_tol", 1e-6);
  const GgldReport report = ggld_check(sample, norm_tol);

  std::string csv = "key,value\n";
  csv += std::string("verdict,") +
         (report.verdict == GgldVerdict::Passes
              ? "passes"
              : report.verdict == GgldVerdict::Fails ? "fails"
                                                     : "inconclusive") +
         "\n";
  csv += "double_limsup," + format_double(report.double_limsup) + "\n";
  csv += "norm_limit," + format_double(report.norm_limit) + "\n";
  csv += std::string("weak_null,") + (report.weak_null ? "1" : "0") + "\n";
  csv += std::string("norms_stable,") + (report.norms_stable ? "1" : "0") + "\n";
  ctx.out.write("ggld.csv", csv);
  return {ctx.name, "ggld", report.double_limsup, sample.size(), 0.0};
}

ScenarioOutcome run_lemma4(const json& j, const Context& ctx) {
  const auto declared_n =
      j.contains("generate") ? count_or(j.at("generate"), ctx.base, "n", 40)
                             : 40;
  const auto window = count_or(j, ctx.base, "window", declared_n / 4);
  const SequenceSample sample = parse_sample(j, ctx.base, window);
  const Lemma4Report report = lemma4_check(sample);

  std::string csv = "key,value\n";
  csv += std::string("verdict,") +
         (report.verdict == Lemma4Verdict::Consistent
              ? "consistent"
              : report.verdict == Lemma4Verdict::InconsistentHypotheses
                    ? "inconsistent_hypotheses"
                    : "inconsistent") +
         "\n";
  csv += "double_limit," + format_double(report.double_limit) + "\n";
  csv += "norm_limit," + format_double(report.norm_limit) + "\n";
  csv += std::string("weak_null,") + (report.weak_null ? "1" : "0") + "\n";
  csv += std::string("limits_match,") + (report.limits_match ? "1" : "0") + "\n";
  csv += "failed_hypothesis," + report.failed_hypothesis + "\n";
  ctx.out.write("lemma4.csv", csv);

  std::string tail = "tail_index,y_norm\n";
  for (std::size_t i = 0; i < report.y_norm_tail.size(); ++i)
    tail += std::to_string(sample.tail_begin() + i) + ',' +
            format_double(report.y_norm_tail[i]) + '\n';
  ctx.out.write("y_tail.csv", tail);

  return {ctx.name, "lemma4",
          report.y_norm_tail.empty() ? 0.0 : report.y_norm_tail.back(),
          sample.size(), 0.0};
}

Hyperreal parse_series_entry(const json& v, const std::string& path,
                             int window) {
  try {
    if (v.is_number()) return Hyperreal::constant(v.get<double>(), window);
    if (v.is_string()) return parse_hyperreal(v.get<std::string>(), window);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected a number or series literal");
}

ScenarioOutcome run_symbolic(const json& j, const Context& ctx) {
  const int window = static_cast<int>(count_or(j, ctx.base, "order", 8));
  const json& rows = require(j, ctx.base, "A");
  if (!rows.is_array() || rows.empty())
    throw ConfigError(join_path(ctx.base, "A"), "expected a matrix");
  HyperrealMatrix a;
  for (const auto& row : rows) {
    HyperrealVector r;
    for (const auto& entry : row)
      r.push_back(parse_series_entry(entry, join_path(ctx.base, "A"), window));
    a.push_back(std::move(r));
  }
  const json& bj = require(j, ctx.base, "b");
  const json& uj = require(j, ctx.base, "u");
  HyperrealVector b, u;
  for (const auto& entry : bj)
    b.push_back(parse_series_entry(entry, join_path(ctx.base, "b"), window));
  for (const auto& entry : uj)
    u.push_back(parse_series_entry(entry, join_path(ctx.base, "u"), window));

  const SymbolicFixedPoint result = symbolic_fixed_point_series(a, b, u);
  std::string csv = "component,series,shadow\n";
  for (std::size_t i = 0; i < result.z.size(); ++i)
    csv += std::to_string(i) + ",\"" + to_string(result.z[i]) + "\"," +
           format_double(result.shadow.coords[i]) + '\n';
  ctx.out.write("symbolic.csv", csv);
  return {ctx.name, "symbolic", 0.0, result.z.size(), 0.0};
}

ScenarioOutcome run_one(const json& j, const std::string& base,
                        const RunOptions& opts, const std::string& name) {
  const std::string kind = require_string(j, base, "kind");
  Context ctx{name, base,
              Artifacts{fs::path(opts.out_dir) / name},
              opts.seed.value_or(count_or(j, base, "seed", 0))};

  const auto start = std::chrono::steady_clock::now();
  ScenarioOutcome outcome;
  if (kind == "contraction")
    outcome = run_contraction(j, ctx);
  else if (kind == "nonstandard_picard")
    outcome = run_nonstandard_picard(j, ctx);
  else if (kind == "mann")
    outcome = run_mann_halpern(j, ctx, false);
  else if (kind == "halpern")
    outcome = run_mann_halpern(j, ctx, true);
  else if (kind == "compare_all")
    outcome = run_compare_all(j, ctx);
  else if (kind == "psi_scan")
    outcome = run_psi_scan(j, ctx);
  else if (kind == "modulus")
    outcome = run_modulus(j, ctx);
  else if (kind == "ggld")
    outcome = run_ggld(j, ctx);
  else if (kind == "lemma4")
    outcome = run_lemma4(j, ctx);
  else if (kind == "symbolic")
    outcome = run_symbolic(j, ctx);
  else
    throw ConfigError(join_path(base, "kind"),
                      "unknown scenario kind '" + kind + "'");
  outcome.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return outcome;
}

}  // namespace

std::vector<ScenarioOutcome> run_scenario_file(const std::string& path,
                                               const RunOptions& opts) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("not valid JSON: ") + e.what());
  }

  std::vector<std::pair<std::string, json>> scenarios;
  const std::string stem = fs::path(path).stem().string();
  if (root.is_object() && root.contains("scenarios")) {
    const json& arr = root.at("scenarios");
    if (!arr.is_array() || arr.empty())
      throw ConfigError("scenarios", "expected a nonempty array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string base = "scenarios[" + std::to_string(i) + "]";
      std::string name = arr[i].contains("name")
                             ? require_string(arr[i], base, "name")
                             : stem + "_" + std::to_string(i);
      if (!seen.insert(name).second)
        throw ConfigError(join_path(base, "name"),
                          "duplicate scenario name '" + name + "'");
      scenarios.emplace_back(std::move(name), arr[i]);
    }
  } else if (root.is_object()) {
    scenarios.emplace_back(
        root.contains("name") ? require_string(root, "", "name") : stem, root);
  } else {
    throw ConfigError("", "expected a scenario object");
  }

  std::vector<ScenarioOutcome> outcomes;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::string base =
        scenarios.size() == 1 ? "" : "scenarios[" + std::to_string(i) + "]";
    outcomes.push_back(
        run_one(scenarios[i].second, base, opts, scenarios[i].first));
  }

  std::string summary = opts.timings
                            ? "scenario,kind,final_residual,iterations,wall_ms\n"
                            : "scenario,kind,final_residual,iterations\n";
  for (const auto& o : outcomes) {
    summary += o.name + ',' + o.kind + ',' + format_double(o.final_residual) +
               ',' + std::to_string(o.iterations);
    if (opts.timings) summary += ',' + format_double(o.wall_ms);
    summary += '\n';
  }
  write_file_atomic((fs::path(opts.out_dir) / "summary.csv").string(), summary);
  return outcomes;
}

int exit_code_for_active_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return 1;
  } catch (const NoConvergence&) {
    return 2;
  } catch (const IterationCapReached&) {
    return 2;
  } catch (const Error&) {
    return 3;  // remaining library errors are precondition violations
  } catch (const std::exception&) {
    return 2;
  }
}

int run_cli(const std::string& path, const RunOptions& opts) {
  try {
    const auto outcomes = run_scenario_file(path, opts);
    for (const auto& o : outcomes) {
      std::cout << o.name << " [" << o.kind
                << "]: final_residual=" << format_double(o.final_residual)
                << " iterations=" << o.iterations;
      if (opts.timings) std::cout << " wall_ms=" << format_double(o.wall_ms);
      std::cout << '\n';
    }
    std::cout << "wrote " << (fs::path(opts.out_dir) / "summary.csv").string()
              << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for_active_exception();
  }
}

}  // namespace hyperfix
