#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hyperfix/diagnostics.hpp"
#include "hyperfix/iterate.hpp"
#include "hyperfix/rng.hpp"

using namespace hyperfix;

namespace {

SpacePoint pt(std::vector<double> coords, double p = 2.0) {
  return SpacePoint{std::move(coords), p};
}

std::vector<SpacePoint> basis(std::size_t n, double p) {
  std::vector<SpacePoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> coords(n, 0.0);
    coords[i] = 1.0;
    out.push_back(SpacePoint{std::move(coords), p});
  }
  return out;
}

// direct-sum sample with basis x-parts and a caller-chosen y norm profile
std::vector<DirectSumPoint> basis_sum(
    std::size_t n, const PsiFunction& psi, double x_scale,
    const std::function<double(std::size_t)>& y_norm) {
  std::vector<DirectSumPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(n, 0.0);
    x[i] = x_scale;
    std::vector<double> y = {y_norm(i), 0.0};
    out.push_back(DirectSumPoint{SpacePoint{std::move(x), 2.0},
                                 SpacePoint{std::move(y), 2.0}, psi});
  }
  return out;
}

}  // namespace

TEST_CASE("sample invariants") {
  CHECK_THROWS_AS(SequenceSample(basis(3, 2.0), 2), Error);
  CHECK_THROWS_AS(SequenceSample(basis(8, 2.0), 1), Error);
  CHECK_NOTHROW(SequenceSample(basis(4, 2.0), 2));
}

TEST_CASE("double limsup: constant, l2 basis, max basis") {
  std::vector<SpacePoint> constant(12, pt({0.3, -0.4}));
  CHECK(double_limsup(SequenceSample(constant, 4)) == 0.0);

  const SequenceSample l2(basis(40, 2.0), 10);
  CHECK(double_limsup(l2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const SequenceSample linf(basis(40, kInfiniteP), 10);
  CHECK(double_limsup(linf) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("double limsup: permutation invariance and scaling on the tail") {
  Rng rng(3);
  std::vector<SpacePoint> pts;
  for (int i = 0; i < 20; ++i)
    pts.push_back(pt({rng.uniform(-1, 1), rng.uniform(-1, 1)}));
  const double base = double_limsup(SequenceSample(pts, 8));

  std::vector<SpacePoint> shuffled = pts;
  // permute inside the tail window only
  std::swap(shuffled[13], shuffled[19]);
  std::swap(shuffled[14], shuffled[16]);
  CHECK(double_limsup(SequenceSample(shuffled, 8)) == base);

  std::vector<SpacePoint> scaled = pts;
  for (auto& x : scaled)
    for (double& c : x.coords) c *= 2.5;
  CHECK(double_limsup(SequenceSample(scaled, 8)) ==
        doctest::Approx(2.5 * base).epsilon(1e-12));
  CHECK(base >= 0.0);
}

TEST_CASE("ggld: l2 basis passes, max basis fails") {
  const GgldReport l2 = ggld_check(SequenceSample(basis(40, 2.0), 10));
  CHECK(l2.verdict == GgldVerdict::Passes);
  CHECK(l2.double_limsup == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(l2.weak_null);
  CHECK(l2.norms_stable);

  const GgldReport linf =
      ggld_check(SequenceSample(basis(40, kInfiniteP), 10));
  CHECK(linf.verdict == GgldVerdict::Fails);
  CHECK(linf.double_limsup == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ggld: verdicts are stable across tail windows") {
  for (std::size_t w : {10, 20, 50}) {
    CHECK(ggld_check(SequenceSample(basis(100, 2.0), w)).verdict ==
          GgldVerdict::Passes);
    CHECK(ggld_check(SequenceSample(basis(100, kInfiniteP), w)).verdict ==
          GgldVerdict::Fails);
  }
}

TEST_CASE("ggld: rescaling handles norm limits other than one") {
  std::vector<SpacePoint> scaled = basis(40, 2.0);
  for (auto& x : scaled)
    for (double& c : x.coords) c *= 3.0;
  const GgldReport r = ggld_check(SequenceSample(scaled, 10));
  CHECK(r.norm_limit == doctest::Approx(3.0));
  CHECK(r.verdict == GgldVerdict::Passes);
  CHECK(r.double_limsup == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("ggld: a sequence that is not weakly null is inconclusive") {
  std::vector<SpacePoint> constant(20, pt({1, 0}));
  const GgldReport r = ggld_check(SequenceSample(constant, 6));
  CHECK(r.verdict == GgldVerdict::Inconclusive);
  CHECK_FALSE(r.weak_null);
}

TEST_CASE("lemma4: vanishing y components are consistent") {
  // y identically zero
  const SequenceSample zero_y(
      basis_sum(40, PsiFunction::lp(2), 1.0, [](std::size_t) { return 0.0; }),
      10);
  const Lemma4Report r0 = lemma4_check(zero_y);
  CHECK(r0.verdict == Lemma4Verdict::Consistent);
  for (double v : r0.y_norm_tail) CHECK(v == 0.0);

  // ||y_n|| = 1/(n+1)^2 decays through the tail
  const SequenceSample decay_y(
      basis_sum(200, PsiFunction::lp(2), 1.0,
                [](std::size_t i) {
                  const double k = static_cast<double>(i + 1);
                  return 1.0 / (k * k);
                }),
      40);
  const Lemma4Report r1 = lemma4_check(decay_y);
  CHECK(r1.verdict == Lemma4Verdict::Consistent);
}

TEST_CASE("lemma4: basis y components flag the failing limit hypothesis") {
  // w_n = (e_n, e_n) / sqrt(2): every ||w_n|| is 1 but pairwise distances
  // are sqrt(2), so the diametral limit hypothesis fails while the y norms
  // stay at 1/sqrt(2)
  const double s = 1.0 / std::sqrt(2.0);
  const std::size_t n = 40;
  std::vector<DirectSumPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(n, 0.0), y(n, 0.0);
    x[i] = s;
    y[i] = s;
    pts.push_back(DirectSumPoint{SpacePoint{std::move(x), 2.0},
                                 SpacePoint{std::move(y), 2.0},
                                 PsiFunction::lp(2)});
  }
  const Lemma4Report r = lemma4_check(SequenceSample(std::move(pts), 10));
  CHECK(r.verdict == Lemma4Verdict::InconsistentHypotheses);
  CHECK(r.double_limit == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.norm_limit == doctest::Approx(1.0));
  CHECK_FALSE(r.limits_match);
  CHECK(r.weak_null);
  CHECK(r.failed_hypothesis.find("double limit") != std::string::npos);
  CHECK(r.y_norm_tail.back() == doctest::Approx(s));
}

TEST_CASE("lemma4: gate on strict monotonicity") {
  const SequenceSample sample(
      basis_sum(8, PsiFunction::max_norm(), 1.0,
                [](std::size_t) { return 0.0; }),
      2);
  CHECK_THROWS_AS(lemma4_check(sample), NotStrictlyMonotone);

  const SequenceSample plain(basis(8, 2.0), 2);
  CHECK_THROWS_AS(lemma4_check(plain), Error);
}

TEST_CASE("diametral check discriminates") {
  // basis scaled so pairwise distances equal 1: the diameter of the set
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<SpacePoint> pts = basis(20, 2.0);
  for (auto& x : pts)
    for (double& c : x.coords) c *= s;
  const SequenceSample sample(pts, 6);

  // the origin sees distance s, not 1: must fail
  const DiametralReport bad = diametral_check(
      sample, {pt(std::vector<double>(20, 0.0))}, 1.0, 1e-6);
  CHECK_FALSE(bad.pass);
  CHECK(bad.probes[0].estimate == doctest::Approx(s));

  // a tail member sees every other tail point at exactly the diameter
  const DiametralReport good = diametral_check(sample, {pts[17]}, 1.0, 1e-9);
  CHECK(good.pass);

  const DiametralReport vacuous = diametral_check(sample, {}, 1.0, 1e-9);
  CHECK(vacuous.pass);
  CHECK(vacuous.vacuous);
}

TEST_CASE("afps residuals: fixed point, picard decay, mann decay") {
  const ConvexSet box = ConvexSet::box({0}, {4});
  const MapDescriptor t = MapDescriptor::affine({{0.5}}, {1.0}, box);

  std::vector<SpacePoint> fixed(6, pt({2}));
  const AfpsReport at_fp = afps_residuals(t, SequenceSample(fixed, 3));
  for (double r : at_fp.residuals) CHECK(r == 0.0);

  // picard orbit residuals decay geometrically at rate k
  const PicardResult run = picard_contraction(t, pt({0}), 1e-9);
  std::vector<SpacePoint> orbit(run.trace.points.begin(),
                                run.trace.points.begin() + 20);
  const AfpsReport picard = afps_residuals(t, SequenceSample(orbit, 8));
  CHECK(picard.decreasing_fraction == 1.0);
  for (std::size_t i = 0; i + 1 < picard.residuals.size(); ++i) {
    if (picard.residuals[i] <= 1e-12) break;
    CHECK(picard.residuals[i + 1] ==
          doctest::Approx(0.5 * picard.residuals[i]).epsilon(1e-9));
  }

  // mann orbit on the quarter turn: residuals trend down
  const MapDescriptor rot =
      MapDescriptor::rotation(3.14159265358979323846 / 2.0, pt({0, 0}),
                              ConvexSet::ball(pt({0, 0}), 1.0));
  const IterationTrace mann =
      mann_iterate(rot, pt({1, 0}), constant_alpha(0.5), 40);
  const AfpsReport averaged =
      afps_residuals(rot, SequenceSample(mann.points, 10));
  CHECK(averaged.decreasing_fraction >= 0.95);
}

TEST_CASE("afps residuals reject points outside the domain") {
  const MapDescriptor t =
      MapDescriptor::affine({{0.5}}, {1.0}, ConvexSet::box({0}, {4}));
  std::vector<SpacePoint> outside(6, pt({9}));
  CHECK_THROWS_AS(afps_residuals(t, SequenceSample(outside, 2)),
                  DomainViolation);
}

TEST_CASE("afps residuals in the direct-sum norm") {
  // identity on the concatenated coordinates: residuals are exactly zero
  const ConvexSet dom = ConvexSet::box({-2, -2, -2, -2}, {2, 2, 2, 2});
  const MapDescriptor id = MapDescriptor::affine(
      {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}, {0, 0, 0, 0},
      dom);
  std::vector<DirectSumPoint> pts;
  for (int i = 0; i < 6; ++i)
    pts.push_back(DirectSumPoint{pt({0.1 * i, 0.2}), pt({0.3, -0.1 * i}),
                                 PsiFunction::lp(2)});
  const AfpsReport r = afps_residuals(id, SequenceSample(pts, 3));
  for (double v : r.residuals) CHECK(v == 0.0);
}
