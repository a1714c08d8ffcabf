#include <doctest.h>

#include <cmath>

#include "hyperfix/iterate.hpp"
#include "hyperfix/rng.hpp"

using namespace hyperfix;

namespace {

SpacePoint pt(std::vector<double> coords, double p = 2.0) {
  return SpacePoint{std::move(coords), p};
}

MapDescriptor scalar_affine(double k, double b, ConvexSet domain) {
  return MapDescriptor::affine({{k}}, {b}, std::move(domain));
}

MapDescriptor quarter_turn(double radius = 1.0) {
  return MapDescriptor::rotation(
      3.14159265358979323846 / 2.0, pt({0, 0}),
      ConvexSet::ball(pt({0, 0}), radius));
}

}  // namespace

TEST_CASE("operator norm estimates") {
  CHECK(operator_norm({{0.9, 0}, {0, 0.2}}) == doctest::Approx(0.9));
  CHECK(operator_norm({{0, -1}, {1, 0}}) == doctest::Approx(1.0));
  CHECK(operator_norm({{2, 0}, {0, 0}}) == doctest::Approx(2.0));
}

TEST_CASE("map construction checks") {
  const ConvexSet box = ConvexSet::box({0}, {4});
  CHECK(scalar_affine(0.5, 1.0, box).nonexpansive());
  CHECK(scalar_affine(0.5, 1.0, box).lipschitz() == doctest::Approx(0.5));
  // an expansive shear that still maps its (asymmetric) box into itself
  const MapDescriptor shear = MapDescriptor::affine(
      {{0.0, 1.5}, {0.0, 0.0}}, {0, 0}, ConvexSet::box({-3, -2}, {3, 2}));
  CHECK_FALSE(shear.nonexpansive());
  CHECK(shear.lipschitz() == doctest::Approx(1.5));
  // a translation cannot be a self-map of a bounded set
  CHECK_THROWS_AS(scalar_affine(1.0, 1.0, ConvexSet::box({0}, {4})),
                  DomainViolation);
  CHECK(quarter_turn().lipschitz() == 1.0);
}

TEST_CASE("projection compositions are nonexpansive self-maps") {
  const ConvexSet domain = ConvexSet::ball(pt({0, 0}), 2.0);
  const MapDescriptor t = MapDescriptor::proj_composition(
      {ConvexSet::ball(pt({0.5, 0}), 1.0), ConvexSet::ball(pt({-0.5, 0}), 1.0)},
      domain);
  CHECK(t.lipschitz() == 1.0);
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const SpacePoint x = sample(domain, rng);
    const SpacePoint y = sample(domain, rng);
    CHECK(dist(t.apply(x), t.apply(y)) <= dist(x, y) + 1e-9);
  }
  // alternating projections settle in the intersection
  const PicardResult run = picard_contraction(
      regularized_map(t, pt({0, 0.1}), 1e-6), pt({1.5, 0.5}), 1e-8);
  CHECK(contains(ConvexSet::ball(pt({0.5, 0}), 1.0), run.fixed_point, 1e-3));
  CHECK(contains(ConvexSet::ball(pt({-0.5, 0}), 1.0), run.fixed_point, 1e-3));
}

TEST_CASE("nonexpansive maps do not expand random pairs") {
  Rng rng(19);
  const MapDescriptor rot = quarter_turn();
  const MapDescriptor aff = MapDescriptor::affine(
      {{0.6, 0.3}, {-0.3, 0.6}}, {0.05, 0.0}, ConvexSet::ball(pt({0, 0}), 1.0));
  const MapDescriptor blend = regularized_map(rot, pt({0.2, 0}), 0.25);
  for (const MapDescriptor* t : {&rot, &aff, &blend}) {
    for (int i = 0; i < 10000; ++i) {
      const SpacePoint x = sample(t->domain(), rng);
      const SpacePoint y = sample(t->domain(), rng);
      CHECK(dist(t->apply(x), t->apply(y)) <= dist(x, y) + 1e-9);
    }
  }
}

TEST_CASE("picard contraction: scalar fixed point") {
  const MapDescriptor t = scalar_affine(0.5, 1.0, ConvexSet::box({0}, {4}));
  const PicardResult run = picard_contraction(t, pt({0}), 1e-10);
  CHECK(std::fabs(run.fixed_point.coords[0] - 2.0) <= 1e-10);
  CHECK(run.trace.terminated_by == StopReason::Tolerance);
}

TEST_CASE("picard contraction: constant map converges in one step") {
  const MapDescriptor t =
      MapDescriptor::affine({{0.0, 0.0}, {0.0, 0.0}}, {0.25, -0.5},
                            ConvexSet::box({-1, -1}, {1, 1}));
  const PicardResult run = picard_contraction(t, pt({0.9, 0.9}), 1e-12);
  CHECK(run.fixed_point.coords[0] == 0.25);
  CHECK(run.fixed_point.coords[1] == -0.5);
  CHECK(run.trace.total_iterations <= 2);
}

TEST_CASE("picard contraction: geometric decay iteration count") {
  const MapDescriptor t = MapDescriptor::affine(
      {{0.9, 0.0}, {0.0, 0.9}}, {0, 0}, ConvexSet::box({-2, -2}, {2, 2}));
  const double tol = 1e-8;
  const PicardResult run = picard_contraction(t, pt({1, 1}), tol);
  CHECK(lp_norm(run.fixed_point) <= tol);
  // the n-th step norm is 0.9^(n-1) * 0.1 * sqrt(2); the orbit stops at the
  // first n where it reaches the a-posteriori threshold tol (1-k)/k
  const double threshold = tol * (1.0 - 0.9) / 0.9;
  const double predicted =
      1.0 + std::ceil(std::log(threshold / (0.1 * std::sqrt(2.0))) /
                      std::log(0.9));
  CHECK(std::fabs(static_cast<double>(run.trace.total_iterations) -
                  predicted) <= 2.0);
}

TEST_CASE("picard contraction rejects nonexpansive-only maps") {
  CHECK_THROWS_AS(picard_contraction(quarter_turn(), pt({1, 0}), 1e-6),
                  NotAContraction);
}

TEST_CASE("picard contraction respects its iteration cap") {
  const MapDescriptor t = MapDescriptor::affine(
      {{0.999999, 0}, {0, 0.999999}}, {0, 0}, ConvexSet::box({-2, -2}, {2, 2}));
  CHECK_THROWS_AS(picard_contraction(t, pt({1, 1}), 1e-12, 10),
                  IterationCapReached);
}

TEST_CASE("banach rate on affine maps with known fixed points") {
  for (double k : {0.3, 0.6, 0.9}) {
    const MapDescriptor t = MapDescriptor::affine(
        {{k, 0.0}, {0.0, k}}, {1.0 - k, 0.0}, ConvexSet::box({-2, -2}, {2, 2}));
    const SpacePoint star = pt({1, 0});
    std::vector<double> x = {-1, 1};
    const double e0 = dist(pt(x), star);
    std::vector<double> next(2);
    // checked while the geometric bound stays above the roundoff floor
    const int horizon =
        static_cast<int>(std::log(1e-12 / e0) / std::log(k));
    for (int n = 1; n <= horizon; ++n) {
      t.apply_into(x, next);
      x.swap(next);
      CHECK(dist(pt(x), star) <= std::pow(k, n) * e0 * 1.01);
    }
  }
}

TEST_CASE("regularized map: blend semantics and range check") {
  const ConvexSet ball = ConvexSet::ball(pt({0, 0}), 1.0);
  const MapDescriptor id =
      MapDescriptor::affine({{1, 0}, {0, 1}}, {0, 0}, ball);
  CHECK_THROWS_AS(regularized_map(id, pt({0, 0}), 1.0), EpsOutOfRange);
  CHECK_THROWS_AS(regularized_map(id, pt({0, 0}), 0.0), EpsOutOfRange);
  CHECK_THROWS_AS(regularized_map(id, pt({0, 0}), -0.5), EpsOutOfRange);

  const MapDescriptor s = regularized_map(id, pt({0, 0}), 0.5);
  const SpacePoint y = s.apply(pt({0.8, -0.4}));
  CHECK(y.coords[0] == doctest::Approx(0.4));
  CHECK(y.coords[1] == doctest::Approx(-0.2));
  CHECK(s.lipschitz() == doctest::Approx(0.5));

  // the blend scales distances by exactly (1 - eps) * Lip(T) for isometries
  const MapDescriptor rot_blend = regularized_map(quarter_turn(), pt({0.1, 0}), 0.3);
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const SpacePoint a = sample(rot_blend.domain(), rng);
    const SpacePoint b = sample(rot_blend.domain(), rng);
    CHECK(dist(rot_blend.apply(a), rot_blend.apply(b)) ==
          doctest::Approx(0.7 * dist(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("regularized ladder on the quarter turn") {
  RegularizationSchedule sched;
  sched.j_max = 14;
  const MapDescriptor t = quarter_turn();
  const SpacePoint anchor = pt({1, 0});
  const NonstandardPicardResult run =
      nonstandard_picard(t, anchor, anchor, sched);

  CHECK(run.ladder.size() == sched.j_max + 1);
  const double diam = 2.0;
  for (const LadderStage& stage : run.ladder) {
    CHECK(stage.t_residual <= stage.eps * diam + 2.0 * stage.achieved_tol +
                                  1e-12);
    CHECK(stage.t_residual <= stage.residual_bound);
  }
  // ladder steps shrink and the final gap obeys the empirical bound
  for (std::size_t j = 3; j + 1 < run.ladder.size(); ++j)
    CHECK(dist(run.ladder[j + 1].z, run.ladder[j].z) <=
          dist(run.ladder[j].z, run.ladder[j - 1].z) + 1e-9);
  const std::size_t last = run.ladder.size() - 1;
  CHECK(dist(run.ladder[last].z, run.ladder[last - 1].z) <=
        10.0 * run.ladder[last - 1].eps * diam);

  // the unique fixed point of the rotation is the center
  CHECK(lp_norm(run.z) <= 1e-5);
  CHECK(run.ladder.back().t_residual <= 1e-5);
  CHECK(run.trace.eps_schedule.size() == run.trace.points.size());
}

TEST_CASE("ladder is constant when the anchor is already fixed") {
  const ConvexSet ball = ConvexSet::ball(pt({0, 0}), 1.0);
  RegularizationSchedule sched;
  sched.j_max = 6;
  {
    // identity map: fix(S_eps) = u for every eps
    const MapDescriptor id =
        MapDescriptor::affine({{1, 0}, {0, 1}}, {0, 0}, ball);
    const SpacePoint u = pt({0.3, 0.1});
    const NonstandardPicardResult run =
        nonstandard_picard(id, u, pt({-0.5, 0.2}), sched);
    for (const LadderStage& stage : run.ladder)
      CHECK(dist(stage.z, u) <= 2.0 * stage.achieved_tol + 1e-12);
  }
  {
    // contraction with fixed point at the origin, anchored there
    const MapDescriptor half =
        MapDescriptor::affine({{0.5, 0}, {0, 0.5}}, {0, 0}, ball);
    const SpacePoint u = pt({0, 0});
    const NonstandardPicardResult run =
        nonstandard_picard(half, u, pt({0.9, 0}), sched);
    for (const LadderStage& stage : run.ladder)
      CHECK(lp_norm(stage.z) <= 2.0 * stage.achieved_tol + 1e-12);
  }
}

TEST_CASE("ladder truncates gracefully on an evaluation budget") {
  RegularizationSchedule sched;
  sched.j_max = 20;
  const NonstandardPicardResult run =
      nonstandard_picard(quarter_turn(), pt({1, 0}), pt({1, 0}), sched, 500);
  CHECK(run.trace.terminated_by == StopReason::IterationCap);
  CHECK(run.trace.map_evals <= 500 + run.ladder.size() + 1);
  CHECK(run.ladder.size() < sched.j_max + 1);
}

TEST_CASE("projected fixed point") {
  RegularizationSchedule sched;
  sched.j_max = 14;
  const ConvexSet ball = ConvexSet::ball(pt({0, 0}), 1.0);
  const SpacePoint fp = fixed_point_via_projection(quarter_turn(), pt({1, 0}),
                                                   pt({1, 0}), sched, ball);
  CHECK(lp_norm(fp) <= 1e-5);

  const MapDescriptor id = MapDescriptor::affine({{1, 0}, {0, 1}}, {0, 0}, ball);
  const SpacePoint u = pt({0.25, -0.1});
  CHECK(dist(fixed_point_via_projection(id, u, pt({0.5, 0.5}), sched, ball),
             u) <= 1e-6);

  const ConvexSet l1ball = ConvexSet::ball(pt({0, 0}, 1.0), 1.0);
  CHECK_THROWS_AS(fixed_point_via_projection(id, u, u, sched, l1ball), Error);
}

TEST_CASE("symbolic fixed point: frozen scalar series") {
  // T x = 0.5 x + 1, u = 0: z = 2(1-h)/(1+h) = 2 - 4h + 4h^2 - 4h^3 at K=3
  const SymbolicFixedPoint sym =
      symbolic_fixed_point({{0.5}}, {1.0}, pt({0}), 3);
  CHECK(sym.z[0] ==
        Hyperreal::from_terms({{0, 2}, {1, -4}, {2, 4}, {3, -4}}, 3));
  CHECK(sym.shadow.coords[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("symbolic fixed point: identity cancels the weight exactly") {
  const SymbolicFixedPoint sym = symbolic_fixed_point(
      {{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}, pt({1, 0}), 4);
  CHECK(sym.z[0] == Hyperreal::constant(1.0, 4));
  CHECK(sym.z[1] == Hyperreal(4));
  CHECK(sym.shadow.coords[0] == 1.0);
  CHECK(sym.shadow.coords[1] == 0.0);
}

TEST_CASE("symbolic fixed point: translations escape the bounded galaxy") {
  // T x = x + 1 has no fixed point; z = (1-h)/h has leading exponent -1
  CHECK_THROWS_AS(symbolic_fixed_point({{1.0}}, {1.0}, pt({0}), 3),
                  NotBounded);
}

TEST_CASE("symbolic fixed point via an affine map descriptor") {
  const MapDescriptor t = scalar_affine(0.5, 1.0, ConvexSet::box({0}, {4}));
  const SymbolicFixedPoint sym = symbolic_fixed_point(t, pt({0}));
  CHECK(sym.shadow.coords[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(symbolic_fixed_point(quarter_turn(), pt({0, 0})), Error);
}

TEST_CASE("symbolic and numeric routes agree on random contractions") {
  Rng rng(47);
  RegularizationSchedule sched;  // defaults: eps0 0.1, gamma 0.5, j_max 30
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::vector<double>> a(3, std::vector<double>(3));
    for (auto& row : a)
      for (double& v : row) v = rng.uniform(-0.5, 0.5);
    const double norm = operator_norm(a);
    for (auto& row : a)
      for (double& v : row) v *= 0.85 / std::max(norm, 0.85);
    std::vector<double> star = {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4),
                                rng.uniform(-0.4, 0.4)};
    std::vector<double> b(3);
    for (int i = 0; i < 3; ++i) {
      b[i] = star[i];
      for (int j = 0; j < 3; ++j) b[i] -= a[i][j] * star[j];
    }
    const ConvexSet domain = ConvexSet::ball(pt({0, 0, 0}), 3.0);
    const MapDescriptor t = MapDescriptor::affine(a, b, domain);
    const SpacePoint u = pt({0.1, -0.1, 0.05});

    const SymbolicFixedPoint sym = symbolic_fixed_point(t, u);
    const NonstandardPicardResult num = nonstandard_picard(t, u, u, sched);
    CHECK(dist(sym.shadow, num.z) <= 1e-6);
    CHECK(dist(t.apply(sym.shadow), sym.shadow) <= 1e-9);
    CHECK(dist(sym.shadow, pt(star)) <= 1e-9);
  }
}

TEST_CASE("mann iteration: degenerate step sizes") {
  const MapDescriptor t = scalar_affine(0.5, 1.0, ConvexSet::box({0}, {4}));
  // alpha = 1 is the plain picard orbit
  const IterationTrace plain = mann_iterate(t, pt({0}), constant_alpha(1.0), 8);
  double x = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(plain.points[k].coords[0] == doctest::Approx(x).epsilon(1e-15));
    x = 0.5 * x + 1.0;
  }
  // alpha = 0 never moves
  const IterationTrace frozen = mann_iterate(t, pt({3}), constant_alpha(0.0), 5);
  for (const SpacePoint& p : frozen.points) CHECK(p.coords[0] == 3.0);

  CHECK_THROWS_AS(mann_iterate(t, pt({0}), constant_alpha(1.5), 3),
                  AlphaOutOfRange);
}

TEST_CASE("mann iteration: averaging tames the quarter turn") {
  const IterationTrace trace =
      mann_iterate(quarter_turn(), pt({1, 0}), constant_alpha(0.5), 200);
  CHECK(trace.final_residual() <= 1e-2);
  for (std::size_t i = 0; i + 1 < trace.residuals.size(); ++i) {
    if (trace.residuals[i] < 1e-13) break;
    CHECK(trace.residuals[i + 1] <= trace.residuals[i] * (1.0 + 1e-9));
  }
}

TEST_CASE("halpern iteration: degenerate step sizes") {
  const ConvexSet box = ConvexSet::box({0}, {4});
  const MapDescriptor t = scalar_affine(0.5, 1.0, box);
  const SpacePoint u = pt({3});
  // alpha = 1 pins the orbit to the anchor from step 1 on
  const IterationTrace pinned =
      halpern_iterate(t, u, pt({0}), constant_alpha(1.0), 6);
  for (std::size_t k = 1; k < pinned.points.size(); ++k)
    CHECK(pinned.points[k].coords[0] == 3.0);
  // alpha = 0 is the picard orbit
  const IterationTrace plain =
      halpern_iterate(t, u, pt({0}), constant_alpha(0.0), 6);
  double x = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(plain.points[k].coords[0] == doctest::Approx(x).epsilon(1e-15));
    x = 0.5 * x + 1.0;
  }
}

TEST_CASE("halpern iteration approaches the rotation's fixed point") {
  const IterationTrace trace = halpern_iterate(
      quarter_turn(), pt({1, 0}), pt({1, 0}), harmonic_alpha(), 10000);
  CHECK(trace.final_residual() <= 5e-2);
  CHECK(lp_norm(trace.points.back()) <= 5e-2);
}

TEST_CASE("traces stay length-consistent and decimation keeps endpoints") {
  const MapDescriptor t = MapDescriptor::affine(
      {{0.999995, 0}, {0, 0.999995}}, {0, 0}, ConvexSet::box({-2, -2}, {2, 2}));
  const PicardResult run = picard_contraction(t, pt({1, 1}), 1e-6);
  const IterationTrace& trace = run.trace;
  CHECK(trace.points.size() == trace.residuals.size());
  CHECK(trace.points.size() == trace.steps.size());
  CHECK(trace.points.size() == trace.iterations.size());
  CHECK(trace.points.size() <= 32768);
  CHECK(trace.iterations.front() == 0);
  CHECK(trace.iterations.back() == trace.total_iterations);
  CHECK(std::isnan(trace.steps.back()));
  for (std::size_t i = 0; i + 1 < trace.iterations.size(); ++i)
    CHECK(trace.iterations[i] < trace.iterations[i + 1]);
  // decimation must not mangle any recorded point
  CHECK(trace.total_iterations > 32768);  // the run long enough to compact
  for (const SpacePoint& point : trace.points) CHECK(point.dim() == 2);
}
