#include "hyperfix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperfix {

namespace {

void check_shape(std::size_t n, std::size_t w) {
  if (w < 2 || n < 2 * w)
    throw Error("sample needs N >= 2W >= 4 (got N=" + std::to_string(n) +
                ", W=" + std::to_string(w) + ")");
}

}  // namespace

SequenceSample::SequenceSample(std::vector<SpacePoint> points,
                               std::size_t tail_window)
    : pts_(std::move(points)), tail_window_(tail_window) {
  check_shape(size(), tail_window_);
}

SequenceSample::SequenceSample(std::vector<DirectSumPoint> points,
                               std::size_t tail_window)
    : pts_(std::move(points)), tail_window_(tail_window) {
  check_shape(size(), tail_window_);
}

std::size_t SequenceSample::size() const {
  return std::visit([](const auto& v) { return v.size(); }, pts_);
}

bool SequenceSample::is_direct_sum() const {
  return std::holds_alternative<std::vector<DirectSumPoint>>(pts_);
}

double SequenceSample::dist(std::size_t i, std::size_t j) const {
  return std::visit(
      [&](const auto& v) { return hyperfix::dist(v[i], v[j]); }, pts_);
}

double SequenceSample::norm(std::size_t i) const {
  if (is_direct_sum()) return direct_sum_norm(sum_points()[i]);
  return lp_norm(plain_points()[i]);
}

std::size_t SequenceSample::coord_dim() const {
  if (is_direct_sum()) {
    const auto& w = sum_points()[0];
    return w.x.dim() + w.y.dim();
  }
  return plain_points()[0].dim();
}

double SequenceSample::coord(std::size_t i, std::size_t j) const {
  if (is_direct_sum()) {
    const auto& w = sum_points()[i];
    return j < w.x.dim() ? w.x.coords[j] : w.y.coords[j - w.x.dim()];
  }
  return plain_points()[i].coords[j];
}

const std::vector<SpacePoint>& SequenceSample::plain_points() const {
  return std::get<std::vector<SpacePoint>>(pts_);
}

const std::vector<DirectSumPoint>& SequenceSample::sum_points() const {
  return std::get<std::vector<DirectSumPoint>>(pts_);
}

SequenceSample SequenceSample::scaled(double factor) const {
  if (is_direct_sum()) {
    std::vector<DirectSumPoint> out = sum_points();
    for (auto& w : out) {
      for (double& c : w.x.coords) c *= factor;
      for (double& c : w.y.coords) c *= factor;
    }
    return SequenceSample(std::move(out), tail_window_);
  }
  std::vector<SpacePoint> out = plain_points();
  for (auto& x : out)
    for (double& c : x.coords) c *= factor;
  return SequenceSample(std::move(out), tail_window_);
}

double double_limsup(const SequenceSample& s) {
  double best = 0.0;
  for (std::size_t m = s.tail_begin(); m < s.size(); ++m)
    for (std::size_t n = m + 1; n < s.size(); ++n)
      best = std::max(best, s.dist(n, m));
  return best;
}

namespace {

// Weak-null proxy in finite dimensions: for every coordinate, the most
// optimistic tail estimate of its limit (the minimum of |value| over the
// tail) must vanish.
bool weak_null_tail(const SequenceSample& s, double threshold) {
  for (std::size_t j = 0; j < s.coord_dim(); ++j) {
    double lim = std::numeric_limits<double>::infinity();
    for (std::size_t i = s.tail_begin(); i < s.size(); ++i)
      lim = std::min(lim, std::fabs(s.coord(i, j)));
    if (lim > threshold) return false;
  }
  return true;
}

double tail_norm_mean(const SequenceSample& s) {
  double mean = 0.0;
  for (std::size_t i = s.tail_begin(); i < s.size(); ++i) mean += s.norm(i);
  return mean / static_cast<double>(s.tail_window());
}

}  // namespace

GgldReport ggld_check(const SequenceSample& s, double norm_tol) {
  GgldReport report{};
  report.weak_null = weak_null_tail(s, 1e-6);
  report.norm_limit = tail_norm_mean(s);

  double max_dev = 0.0;
  for (std::size_t i = s.tail_begin(); i < s.size(); ++i)
    max_dev = std::max(max_dev, std::fabs(s.norm(i) - report.norm_limit));
  report.norms_stable = max_dev <= norm_tol && report.norm_limit > norm_tol;

  if (!report.weak_null || !report.norms_stable) {
    report.verdict = GgldVerdict::Inconclusive;
    report.double_limsup = double_limsup(s);
    return report;
  }

  const double scale = 1.0 / report.norm_limit;
  report.double_limsup =
      scale == 1.0 ? double_limsup(s) : double_limsup(s.scaled(scale));
  report.verdict = report.double_limsup > 1.0 + norm_tol ? GgldVerdict::Passes
                                                         : GgldVerdict::Fails;
  return report;
}

Lemma4Report lemma4_check(const SequenceSample& s) {
  if (!s.is_direct_sum())
    throw Error("the direct-sum lemma needs a direct-sum sample");
  const PsiFunction& psi = s.sum_points()[0].psi;
  if (!is_strictly_monotone(psi)) throw NotStrictlyMonotone();

  Lemma4Report report{};
  report.double_limit = double_limsup(s);
  report.norm_limit = tail_norm_mean(s);
  const double slack = 2.0 / static_cast<double>(s.tail_window());
  report.limits_match =
      std::fabs(report.double_limit - report.norm_limit) <= slack;
  report.weak_null = weak_null_tail(s, 1e-6);

  for (std::size_t i = s.tail_begin(); i < s.size(); ++i)
    report.y_norm_tail.push_back(lp_norm(s.sum_points()[i].y));

  const double first = report.y_norm_tail.front();
  const double last = report.y_norm_tail.back();
  const bool y_vanishes = last <= 0.5 * first || last <= 1e-3;

  if (y_vanishes) {
    report.verdict = Lemma4Verdict::Consistent;
  } else if (!report.limits_match || !report.weak_null) {
    report.verdict = Lemma4Verdict::InconsistentHypotheses;
    report.failed_hypothesis = !report.limits_match
                                   ? "double limit != norm limit on the tail"
                                   : "sample does not tend weakly to 0";
  } else {
    report.verdict = Lemma4Verdict::Inconsistent;
    report.failed_hypothesis = "y tail does not vanish under valid hypotheses";
  }
  return report;
}

DiametralReport diametral_check(const SequenceSample& s,
                                const std::vector<SpacePoint>& probes,
                                double diam, double tol) {
  if (!(diam > 0.0)) throw Error("diametral check needs diam > 0");
  DiametralReport report{};
  report.vacuous = probes.empty();
  report.pass = true;

  for (const auto& probe : probes) {
    if (probe.dim() != s.coord_dim())
      throw Error("probe dimension does not match the sample");
    // Tail mean, skipping sample points identical to the probe: the limit in
    // n ignores the one index where the probe is the sequence member itself.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = s.tail_begin(); i < s.size(); ++i) {
      double d;
      if (s.is_direct_sum()) {
        const auto& w = s.sum_points()[i];
        DirectSumPoint probe_sum{
            SpacePoint{{probe.coords.begin(),
                        probe.coords.begin() + static_cast<long>(w.x.dim())},
                       w.x.p},
            SpacePoint{{probe.coords.begin() + static_cast<long>(w.x.dim()),
                        probe.coords.end()},
                       w.y.p},
            w.psi};
        d = dist(w, probe_sum);
      } else {
        SpacePoint q = probe;
        q.p = s.plain_points()[i].p;
        d = dist(s.plain_points()[i], q);
      }
      if (d > 0.0) {
        sum += d;
        ++count;
      }
    }
    const double estimate = count > 0 ? sum / static_cast<double>(count) : 0.0;
    DiametralProbe row{estimate, std::fabs(estimate - diam),
                       std::fabs(estimate - diam) <= tol};
    report.pass = report.pass && row.pass;
    report.probes.push_back(row);
  }
  return report;
}

AfpsReport afps_residuals(const MapDescriptor& t, const SequenceSample& s) {
  AfpsReport report{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<double> coords(s.coord_dim());
    for (std::size_t j = 0; j < coords.size(); ++j) coords[j] = s.coord(i, j);
    SpacePoint w{coords, t.domain().ambient_p()};
    if (!contains(t.domain(), w, 1e-7))
      throw DomainViolation("sample point " + std::to_string(i) +
                            " lies outside the map's domain");
    const SpacePoint tw = t.apply(w);
    double residual;
    if (s.is_direct_sum()) {
      const auto& wi = s.sum_points()[i];
      const std::size_t dx = wi.x.dim();
      std::vector<double> ddx(dx), ddy(tw.dim() - dx);
      for (std::size_t j = 0; j < dx; ++j)
        ddx[j] = tw.coords[j] - coords[j];
      for (std::size_t j = dx; j < tw.dim(); ++j)
        ddy[j - dx] = tw.coords[j] - coords[j];
      residual = norm_from_psi(wi.psi, lp_norm(ddx, wi.x.p),
                               lp_norm(ddy, wi.y.p));
    } else {
      residual = dist(tw, w);
    }
    report.residuals.push_back(residual);
  }

  std::size_t non_increasing = 0;
  for (std::size_t i = 0; i + 1 < report.residuals.size(); ++i)
    if (report.residuals[i + 1] <= report.residuals[i] + 1e-15)
      ++non_increasing;
  report.decreasing_fraction =
      report.residuals.size() < 2
          ? 1.0
          : static_cast<double>(non_increasing) /
                static_cast<double>(report.residuals.size() - 1);
  return report;
}

}  // namespace hyperfix
