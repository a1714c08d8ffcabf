#include "hyperfix/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperfix/detail/hyperreal_ops.hpp"
#include "hyperfix/hyperreal_linalg.hpp"

namespace hyperfix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm_of(const std::vector<double>& v, double p) {
  return lp_norm(v, p);
}

double step_norm(const std::vector<double>& a, const std::vector<double>& b,
                 double p) {
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return norm_of(diff, p);
}

/// Bounded-memory trace sink: keeps rows at a stride that doubles whenever
/// the buffer would overflow, so arbitrarily long runs stay recordable.
class TraceRecorder {
 public:
  TraceRecorder(IterationTrace& trace, double ambient_p, bool with_eps,
                std::size_t max_rows)
      : trace_(trace), p_(ambient_p), with_eps_(with_eps),
        max_rows_(std::max<std::size_t>(max_rows, 16)) {}

  bool wants(std::size_t iter) const { return iter % stride_ == 0; }

  void record(std::size_t iter, const std::vector<double>& coords,
              double residual, double step, double eps) {
    if (!trace_.iterations.empty() && trace_.iterations.back() == iter) return;
    trace_.iterations.push_back(iter);
    trace_.points.push_back(SpacePoint{coords, p_});
    trace_.residuals.push_back(residual);
    trace_.steps.push_back(step);
    if (with_eps_) trace_.eps_schedule.push_back(eps);
    if (trace_.points.size() >= max_rows_) compact();
  }

 private:
  void compact() {
    std::size_t keep = 0;
    for (std::size_t i = 0; i < trace_.points.size(); i += 2, ++keep) {
      if (keep == i) continue;  // self-move would clear the point
      trace_.iterations[keep] = trace_.iterations[i];
      trace_.points[keep] = std::move(trace_.points[i]);
      trace_.residuals[keep] = trace_.residuals[i];
      trace_.steps[keep] = trace_.steps[i];
      if (with_eps_) trace_.eps_schedule[keep] = trace_.eps_schedule[i];
    }
    trace_.iterations.resize(keep);
    trace_.points.resize(keep);
    trace_.residuals.resize(keep);
    trace_.steps.resize(keep);
    if (with_eps_) trace_.eps_schedule.resize(keep);
    stride_ *= 2;
  }

  IterationTrace& trace_;
  double p_;
  bool with_eps_;
  std::size_t max_rows_;
  std::size_t stride_ = 1;
};

struct LoopOutcome {
  std::size_t iters = 0;
  double last_step = 0.0;
  bool hit_tolerance = false;
  bool stalled = false;
  bool budget_out = false;
};

using ResidualFn = std::function<double(
    const std::vector<double>&, const std::vector<double>&, double)>;

// Picard orbit of `s` from x (in place) until the step norm reaches
// `threshold`. When accept_stall is set, a plateau in the step norms (the
// orbit cycling at double-precision resolution) also ends the loop; two
// consecutive windows whose minimum step does not halve count as a plateau.
LoopOutcome run_picard_loop(const MapDescriptor& s, std::vector<double>& x,
                            double p, double threshold, std::size_t cap,
                            bool accept_stall, double contraction,
                            TraceRecorder* rec, std::size_t& iter_counter,
                            double eps_mark, const ResidualFn& residual_fn,
                            std::size_t& evals,
                            const std::optional<std::size_t>& budget) {
  LoopOutcome out;
  std::vector<double> next(x.size());

  std::size_t window = 4096;
  if (contraction > 0.0 && contraction < 1.0)
    window = std::clamp<std::size_t>(
        static_cast<std::size_t>(4.0 / (1.0 - contraction)),
        static_cast<std::size_t>(4096), static_cast<std::size_t>(1) << 26);
  double window_min = std::numeric_limits<double>::infinity();
  double prev_window_min = std::numeric_limits<double>::infinity();
  std::size_t in_window = 0;

  while (out.iters < cap) {
    if (budget && evals >= *budget) {
      out.budget_out = true;
      break;
    }
    s.apply_into(x, next);
    ++evals;
    const double step = step_norm(next, x, p);
    if (rec && rec->wants(iter_counter))
      rec->record(iter_counter, x, residual_fn(x, next, step), step, eps_mark);
    x.swap(next);
    ++iter_counter;
    ++out.iters;
    out.last_step = step;

    if (step <= threshold) {
      out.hit_tolerance = true;
      break;
    }
    if (accept_stall) {
      window_min = std::min(window_min, step);
      if (++in_window >= window) {
        if (window_min >= 0.5 * prev_window_min) {
          out.stalled = true;
          break;
        }
        prev_window_min = window_min;
        window_min = std::numeric_limits<double>::infinity();
        in_window = 0;
      }
    }
  }
  return out;
}

void check_in_domain(const ConvexSet& c, const SpacePoint& x,
                     const char* what) {
  if (x.dim() != c.dim())
    throw Error(std::string(what) + ": dimension mismatch with the domain");
  if (!contains(c, x, 1e-7))
    throw DomainViolation(std::string(what) + " lies outside the domain");
}

}  // namespace

void RegularizationSchedule::validate() const {
  if (!(eps0 > 0.0) || !(eps0 < 1.0)) throw EpsOutOfRange(eps0);
  if (!(gamma > 0.0) || !(gamma < 1.0)) throw EpsOutOfRange(gamma);
  if (j_max == 0) throw Error("schedule needs j_max >= 1");
  if (!(inner_tol_coeff > 0.0))
    throw Error("inner tolerance coefficient must be positive");
}

double RegularizationSchedule::eps(std::size_t j) const {
  return eps0 * std::pow(gamma, static_cast<double>(j));
}

PicardResult picard_contraction(const MapDescriptor& t, const SpacePoint& x0,
                                double tol, std::size_t cap) {
  const double k = t.lipschitz();
  if (k >= 1.0) throw NotAContraction(k);
  if (!(tol > 0.0)) throw Error("tolerance must be positive");
  check_in_domain(t.domain(), x0, "starting point");

  const double p = t.domain().ambient_p();
  const double threshold =
      k > 0.0 ? tol * (1.0 - k) / k : std::numeric_limits<double>::max();

  PicardResult result;
  result.trace.terminated_by = StopReason::Tolerance;
  TraceRecorder rec(result.trace, p, /*with_eps=*/false, 32768);

  std::vector<double> x = x0.coords;
  std::size_t iter = 0, evals = 0;
  const auto plain_residual = [](const std::vector<double>&,
                                 const std::vector<double>&, double step) {
    return step;
  };
  const LoopOutcome out =
      run_picard_loop(t, x, p, threshold, cap, /*accept_stall=*/false, k, &rec,
                      iter, 0.0, plain_residual, evals, std::nullopt);
  if (!out.hit_tolerance)
    throw IterationCapReached(
        "picard iteration hit its cap of " + std::to_string(cap) +
        " steps; last step " + std::to_string(out.last_step));

  result.fixed_point = SpacePoint{x, p};
  std::vector<double> tx(x.size());
  t.apply_into(x, tx);
  ++evals;
  rec.record(iter, x, step_norm(tx, x, p), kNaN, 0.0);
  result.trace.total_iterations = iter;
  result.trace.map_evals = evals;
  return result;
}

NonstandardPicardResult nonstandard_picard(
    const MapDescriptor& t, const SpacePoint& u, const SpacePoint& x0,
    const RegularizationSchedule& sched, std::optional<std::size_t> budget) {
  sched.validate();
  if (!t.nonexpansive()) throw NotAContraction(t.lipschitz());
  check_in_domain(t.domain(), u, "anchor point");
  check_in_domain(t.domain(), x0, "starting point");

  const double p = t.domain().ambient_p();
  const double diam = diameter(t.domain());

  NonstandardPicardResult result;
  result.trace.terminated_by = StopReason::Tolerance;
  TraceRecorder rec(result.trace, p, /*with_eps=*/true, 32768);

  std::vector<double> x = x0.coords;
  std::vector<double> scratch(x.size());
  std::size_t iter = 0, evals = 0;
  double final_residual = 0.0;

  for (std::size_t j = 0; j <= sched.j_max; ++j) {
    const double eps = sched.eps(j);
    const MapDescriptor s = regularized_map(t, u, eps);
    const double kj = s.lipschitz();
    const double tol_j = sched.inner_tol_coeff * eps * eps;
    const double threshold =
        kj > 0.0 ? tol_j * (1.0 - kj) / kj : std::numeric_limits<double>::max();

    // Generous cap: the contraction reaches the threshold in about
    // ln(diam/threshold)/(1-k) steps; the plateau detector exits earlier
    // when double precision bottoms out.
    double cap_est = 1e6;
    if (kj > 0.0 && kj < 1.0)
      cap_est = 10.0 * std::log(std::max((diam + 1.0) / threshold, 2.0)) /
                (1.0 - kj);
    const auto cap = static_cast<std::size_t>(
        std::min(std::max(cap_est, 1e6), 4e9));

    const auto residual_fn = [&](const std::vector<double>& xc,
                                 const std::vector<double>& sx, double) {
      // T x - x = ((S x - x) - eps (u - x)) / (1 - eps)
      for (std::size_t i = 0; i < xc.size(); ++i)
        scratch[i] =
            ((sx[i] - xc[i]) - eps * (u.coords[i] - xc[i])) / (1.0 - eps);
      return norm_of(scratch, p);
    };

    const LoopOutcome out =
        run_picard_loop(s, x, p, threshold, cap, /*accept_stall=*/true, kj,
                        &rec, iter, eps, residual_fn, evals, budget);
    if (!out.hit_tolerance && !out.stalled && !out.budget_out)
      throw IterationCapReached("regularized stage " + std::to_string(j) +
                                " hit its iteration cap");

    double achieved = tol_j;
    if (!out.hit_tolerance && kj > 0.0 && kj < 1.0)
      achieved = std::max(tol_j, out.last_step * kj / (1.0 - kj));

    std::vector<double> tx(x.size());
    t.apply_into(x, tx);
    ++evals;
    final_residual = step_norm(tx, x, p);
    result.ladder.push_back(LadderStage{
        eps, SpacePoint{x, p}, final_residual,
        eps * diam + 2.0 * achieved + 64.0 * 2.2e-16 * (diam + 1.0), tol_j,
        achieved, out.iters});

    if (out.budget_out) {
      result.trace.terminated_by = StopReason::IterationCap;
      break;
    }
  }

  rec.record(iter, x, final_residual, kNaN,
             result.ladder.empty() ? 0.0 : result.ladder.back().eps);
  result.trace.total_iterations = iter;
  result.trace.map_evals = evals;
  result.z = SpacePoint{x, p};
  return result;
}

SpacePoint fixed_point_via_projection(const MapDescriptor& t,
                                      const SpacePoint& u,
                                      const SpacePoint& x0,
                                      const RegularizationSchedule& sched,
                                      const ConvexSet& c) {
  const double p = c.ambient_p();
  if (!(p > 1.0) || p == kInfiniteP)
    throw Error("projected fixed point requires a p in (1, inf) space");
  const NonstandardPicardResult run = nonstandard_picard(t, u, x0, sched);
  return project(c, run.z);
}

SymbolicFixedPoint symbolic_fixed_point_series(
    const std::vector<std::vector<Hyperreal>>& a,
    const std::vector<Hyperreal>& b, const std::vector<Hyperreal>& u,
    double ambient_p) {
  const std::size_t n = b.size();
  if (a.size() != n || u.size() != n)
    throw Error("symbolic system: shape mismatch");
  const int window = b.empty() ? Hyperreal::kDefaultWindow : b[0].window();
  const Hyperreal one = Hyperreal::constant(1.0, window);
  const Hyperreal eta = Hyperreal::eta(window);
  const Hyperreal weight = one - eta;  // 1 - h

  std::vector<std::vector<double>> std_a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) std_a[i][j] = standard_part(a[i][j]);
  if (operator_norm(std_a) > 1.0 + 1e-9)
    throw Error("affine part must be nonexpansive");

  HyperrealMatrix m(n, HyperrealVector(n, Hyperreal(window)));
  HyperrealVector rhs(n, Hyperreal(window));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Hyperreal delta =
          (i == j) ? one : Hyperreal(window);
      m[i][j] = delta - weight * a[i][j];
    }
    rhs[i] = weight * b[i] + eta * u[i];
  }

  HyperrealVector z = solve_linear(m, rhs);
  for (std::size_t i = 0; i < n; ++i)
    if (classify(z[i]) == Magnitude::Unbounded) throw NotBounded(i);

  // T z - z must be infinitesimal. The classification only depends on the
  // leading exponent, so the product may drop above-window terms; roundoff
  // from the elimination can also leave stray coefficients around 1e-16,
  // so snap those before classifying.
  double scale = 1.0;
  for (const auto& zi : z)
    for (const auto& [e, c] : zi.terms()) scale = std::max(scale, std::fabs(c));
  for (std::size_t i = 0; i < n; ++i) {
    Hyperreal r = b[i] - z[i];
    for (std::size_t j = 0; j < n; ++j)
      r = r + HyperrealOps::mul_truncating(a[i][j], z[j], nullptr);
    std::vector<std::pair<int, double>> kept;
    for (const auto& [e, c] : r.terms())
      if (std::fabs(c) > 1e-11 * scale) kept.emplace_back(e, c);
    if (classify(Hyperreal::from_terms(kept, window)) !=
        Magnitude::Infinitesimal)
      throw Error("symbolic residual of component " + std::to_string(i) +
                  " is not infinitesimal");
  }

  SymbolicFixedPoint out{std::move(z), SpacePoint{}};
  out.shadow = SpacePoint{shadow(out.z), ambient_p};
  return out;
}

SymbolicFixedPoint symbolic_fixed_point(
    const std::vector<std::vector<double>>& a, const std::vector<double>& b,
    const SpacePoint& u, int window) {
  const std::size_t n = b.size();
  std::vector<std::vector<Hyperreal>> ah(n);
  std::vector<Hyperreal> bh(n, Hyperreal(window)), uh(n, Hyperreal(window));
  for (std::size_t i = 0; i < n; ++i) {
    ah[i].reserve(n);
    for (std::size_t j = 0; j < a[i].size(); ++j)
      ah[i].push_back(Hyperreal::constant(a[i][j], window));
    bh[i] = Hyperreal::constant(b[i], window);
    uh[i] = Hyperreal::constant(u.coords[i], window);
  }
  return symbolic_fixed_point_series(ah, bh, uh, u.p);
}

SymbolicFixedPoint symbolic_fixed_point(const MapDescriptor& t,
                                        const SpacePoint& u, int window) {
  const auto* aff = t.affine_data();
  if (!aff) throw Error("symbolic fixed point requires an affine map");
  if (!t.nonexpansive()) throw NotAContraction(t.lipschitz());
  SpacePoint anchor = u;
  anchor.p = t.domain().ambient_p();
  return symbolic_fixed_point(aff->a, aff->b, anchor, window);
}

AlphaSchedule constant_alpha(double value) {
  return [value](std::size_t) { return value; };
}

AlphaSchedule harmonic_alpha() {
  return [](std::size_t k) { return 1.0 / static_cast<double>(k + 1); };
}

namespace {

IterationTrace averaged_iteration(const MapDescriptor& t,
                                  const SpacePoint* anchor,
                                  const SpacePoint& x0,
                                  const AlphaSchedule& alphas, std::size_t n) {
  check_in_domain(t.domain(), x0, "starting point");
  if (anchor) check_in_domain(t.domain(), *anchor, "anchor point");
  const double p = t.domain().ambient_p();

  IterationTrace trace;
  trace.terminated_by = StopReason::IterationCap;
  TraceRecorder rec(trace, p, /*with_eps=*/false, 32768);

  std::vector<double> x = x0.coords, tx(x.size()), next(x.size());
  std::size_t evals = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double alpha = alphas(k);
    if (!(alpha >= 0.0) || !(alpha <= 1.0)) throw AlphaOutOfRange(alpha, k);
    t.apply_into(x, tx);
    ++evals;
    const double residual = step_norm(tx, x, p);
    if (anchor) {
      for (std::size_t i = 0; i < x.size(); ++i)
        next[i] = alpha * anchor->coords[i] + (1.0 - alpha) * tx[i];
    } else {
      for (std::size_t i = 0; i < x.size(); ++i)
        next[i] = (1.0 - alpha) * x[i] + alpha * tx[i];
    }
    const double step = step_norm(next, x, p);
    if (rec.wants(k)) rec.record(k, x, residual, step, 0.0);
    x.swap(next);
  }
  t.apply_into(x, tx);
  ++evals;
  rec.record(n, x, step_norm(tx, x, p), kNaN, 0.0);
  trace.total_iterations = n;
  trace.map_evals = evals;
  return trace;
}

}  // namespace

IterationTrace mann_iterate(const MapDescriptor& t, const SpacePoint& x0,
                            const AlphaSchedule& alphas, std::size_t n) {
  return averaged_iteration(t, nullptr, x0, alphas, n);
}

IterationTrace halpern_iterate(const MapDescriptor& t, const SpacePoint& u,
                               const SpacePoint& x0,
                               const AlphaSchedule& alphas, std::size_t n) {
  return averaged_iteration(t, &u, x0, alphas, n);
}

}  // namespace hyperfix
