#include "hyperfix/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hyperfix {

ConvexSet ConvexSet::ball(SpacePoint center, double radius) {
  if (!(radius > 0.0)) throw Error("ball radius must be positive");
  return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::box(std::vector<double> lo, std::vector<double> hi,
                         double p) {
  if (lo.size() != hi.size() || lo.empty())
    throw Error("box bounds must be nonempty and of equal dimension");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw Error("box bounds must satisfy lo <= hi");
  if (!(p >= 1.0)) throw Error("ambient exponent must satisfy p >= 1");
  return ConvexSet(Box{std::move(lo), std::move(hi), p});
}

ConvexSet ConvexSet::polytope(std::vector<SpacePoint> vertices) {
  if (vertices.empty()) throw Error("polytope needs at least one vertex");
  for (const auto& v : vertices)
    if (v.dim() != vertices[0].dim() || v.p != vertices[0].p)
      throw Error("polytope vertices must share dimension and norm");
  return ConvexSet(Polytope{std::move(vertices)});
}

ConvexSet ConvexSet::oracle(
    std::function<SpacePoint(const SpacePoint&)> project, std::size_t dim,
    double p, double diameter_bound) {
  if (!project) throw Error("projection oracle callback is required");
  if (dim == 0) throw Error("oracle dimension must be positive");
  if (!(diameter_bound > 0.0))
    throw Error("oracle diameter bound must be positive");
  return ConvexSet(Oracle{std::move(project), dim, p, diameter_bound});
}

std::size_t ConvexSet::dim() const {
  return visit([](const auto& s) -> std::size_t {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, Ball>) return s.center.dim();
    if constexpr (std::is_same_v<T, Box>) return s.lo.size();
    if constexpr (std::is_same_v<T, Polytope>) return s.vertices[0].dim();
    if constexpr (std::is_same_v<T, Oracle>) return s.dim;
  });
}

double ConvexSet::ambient_p() const {
  return visit([](const auto& s) -> double {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, Ball>) return s.center.p;
    if constexpr (std::is_same_v<T, Box>) return s.p;
    if constexpr (std::is_same_v<T, Polytope>) return s.vertices[0].p;
    if constexpr (std::is_same_v<T, Oracle>) return s.p;
  });
}

std::vector<double> project_simplex(std::vector<double> w) {
  // Sort-based Euclidean projection onto {w >= 0, sum w = 1}.
  std::vector<double> u = w;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  std::size_t support = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumsum += u[i];
    const double cand = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - cand > 0.0) {
      support = i + 1;
      theta = cand;
    }
  }
  if (support == 0) {  // all mass below threshold; fall back to uniform
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (double& x : w) x = std::max(0.0, x - theta);
  return w;
}

namespace {

struct HullProblem {
  const std::vector<SpacePoint>* pts;
  std::vector<double> target;

  std::size_t n() const { return pts->size(); }
  std::size_t d() const { return target.size(); }

  void combine(const std::vector<double>& w, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < n(); ++i) {
      const auto& v = (*pts)[i].coords;
      for (std::size_t k = 0; k < d(); ++k) y[k] += w[i] * v[k];
    }
  }

  // residual r = V w - a, returns 0.5 ||r||^2
  double residual(const std::vector<double>& w, std::vector<double>& r) const {
    combine(w, r);
    double f = 0.0;
    for (std::size_t k = 0; k < d(); ++k) {
      r[k] -= target[k];
      f += r[k] * r[k];
    }
    return 0.5 * f;
  }

  void gradient(const std::vector<double>& r, std::vector<double>& g) const {
    for (std::size_t i = 0; i < n(); ++i) {
      const auto& v = (*pts)[i].coords;
      double dot = 0.0;
      for (std::size_t k = 0; k < d(); ++k) dot += v[k] * r[k];
      g[i] = dot;
    }
  }

  double scale_sq() const {
    double s = 1.0;
    for (double c : target) s = std::max(s, c * c);
    for (const auto& pt : *pts)
      for (double c : pt.coords) s = std::max(s, c * c);
    return s;
  }
};

// Dense Gaussian elimination with partial pivoting; returns false if a pivot
// vanishes.
bool solve_dense(std::vector<std::vector<double>>& m, std::vector<double>& rhs) {
  const std::size_t n = m.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-300) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) m[r][j] -= f * m[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= m[i][j] * rhs[j];
    rhs[i] = acc / m[i][i];
  }
  return true;
}

// Exact minimizer of ||V_S mu - a|| over the affine hull of the support S
// (KKT system with the sum-to-one constraint). Returns false when the system
// is too degenerate to use.
bool polish_support(const HullProblem& prob, const std::vector<double>& w,
                    std::vector<double>& out) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 1e-10) support.push_back(i);
  if (support.empty()) return false;
  const std::size_t s = support.size();

  std::vector<std::vector<double>> kkt(s + 1, std::vector<double>(s + 1, 0.0));
  std::vector<double> rhs(s + 1, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    const auto& vi = (*prob.pts)[support[i]].coords;
    for (std::size_t j = 0; j < s; ++j) {
      const auto& vj = (*prob.pts)[support[j]].coords;
      double dot = 0.0;
      for (std::size_t k = 0; k < prob.d(); ++k) dot += vi[k] * vj[k];
      kkt[i][j] = dot;
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < prob.d(); ++k) dot += vi[k] * prob.target[k];
    rhs[i] = dot;
    kkt[i][s] = 1.0;
    kkt[s][i] = 1.0;
  }
  rhs[s] = 1.0;

  auto sys = kkt;
  auto sol = rhs;
  if (!solve_dense(sys, sol)) {
    // affinely dependent support: damp and retry once
    double trace = 0.0;
    for (std::size_t i = 0; i < s; ++i) trace += kkt[i][i];
    sys = kkt;
    sol = rhs;
    for (std::size_t i = 0; i < s; ++i) sys[i][i] += 1e-12 * (trace + 1.0);
    if (!solve_dense(sys, sol)) return false;
  }

  double neg = 0.0;
  for (std::size_t i = 0; i < s; ++i) neg = std::min(neg, sol[i]);
  if (neg < -1e-9) return false;  // left the face; keep iterating instead

  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double v = std::max(0.0, sol[i]);
    out[support[i]] = v;
    total += v;
  }
  if (total <= 0.0) return false;
  for (double& v : out) v /= total;
  return true;
}

struct HullSolve {
  std::vector<double> weights;
  double distance;
  double lower_bound;  // certified lower bound on the true distance
  std::size_t iterations;
};

HullSolve hull_nearest(const HullProblem& prob, double stop_below,
                       double stop_above, std::size_t cap) {
  const std::size_t n = prob.n();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> r(prob.d()), g(n), y = w, w_prev = w, cand(n);
  const double scale_sq = prob.scale_sq();
  const double gap_floor = 8e-15 * scale_sq;

  // Lipschitz constant of the gradient: lambda_max(V^T V) by power iteration.
  double lip = 0.0;
  {
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> img(prob.d()), back(n);
    for (int it = 0; it < 128; ++it) {
      prob.combine(v, img);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& c = (*prob.pts)[i].coords;
        double dot = 0.0;
        for (std::size_t k = 0; k < prob.d(); ++k) dot += c[k] * img[k];
        back[i] = dot;
      }
      double norm = 0.0;
      for (double x : back) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-300) break;
      lip = norm;
      for (std::size_t i = 0; i < n; ++i) v[i] = back[i] / norm;
      // nudge away from an eigenvector of a smaller eigenvalue
      if (it == 0) v[0] += 1e-3;
    }
    lip = std::max(lip * 1.05, 1e-300);
  }

  double best_f = prob.residual(w, r);
  std::vector<double> best_w = w;
  double lower = 0.0;
  double t = 1.0;
  std::size_t it = 0;

  const auto evaluate = [&](const std::vector<double>& probe) {
    std::vector<double> rr(prob.d()), gg(n);
    const double f = prob.residual(probe, rr);
    prob.gradient(rr, gg);
    double gmin = std::numeric_limits<double>::infinity(), gdot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gmin = std::min(gmin, gg[i]);
      gdot += gg[i] * probe[i];
    }
    const double gap = std::max(0.0, gdot - gmin);
    if (f < best_f) {
      best_f = f;
      best_w = probe;
    }
    lower = std::max(lower, best_f - gap);
    return gap;
  };

  for (; it < cap; ++it) {
    // accelerated step with adaptive restart; residual() fills r for the
    // gradient evaluation at the look-ahead point y
    prob.residual(y, r);
    prob.gradient(r, g);
    w_prev = w;
    for (std::size_t i = 0; i < n; ++i) cand[i] = y[i] - g[i] / lip;
    w = project_simplex(cand);
    double momentum_dot = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      momentum_dot += (y[i] - w[i]) * (w[i] - w_prev[i]);
    if (momentum_dot > 0.0) {
      t = 1.0;
      y = w;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      for (std::size_t i = 0; i < n; ++i)
        y[i] = w[i] + beta * (w[i] - w_prev[i]);
      t = t_next;
    }

    if (it % 64 == 63 || it + 1 == cap) {
      const double gap = evaluate(w);
      if (polish_support(prob, best_w, cand)) evaluate(cand);
      const double dist_now = std::sqrt(2.0 * best_f);
      const double dist_low = std::sqrt(2.0 * std::max(0.0, lower));
      if (dist_now <= stop_below) break;
      if (dist_low > stop_above) break;
      if (gap <= gap_floor) break;
    }
  }
  evaluate(w);
  if (polish_support(prob, best_w, cand)) evaluate(cand);

  return HullSolve{best_w, std::sqrt(2.0 * best_f),
                   std::sqrt(2.0 * std::max(0.0, lower)), it};
}

}  // namespace

HullResult convex_hull_member(const SpacePoint& a,
                              const std::vector<SpacePoint>& pts, double tol) {
  if (pts.empty()) throw Error("hull membership needs a nonempty point set");
  for (const auto& p : pts)
    if (p.dim() != a.dim()) throw Error("dimension mismatch");
  HullProblem prob{&pts, a.coords};
  const HullSolve sol = hull_nearest(prob, tol, tol, 10000);
  if (sol.distance <= tol)
    return HullResult{true, sol.weights, sol.distance, sol.iterations};
  if (sol.lower_bound > tol)
    return HullResult{false, sol.weights, sol.distance, sol.iterations};
  throw NoConvergence(
      "hull membership undecided at tol " + std::to_string(tol) +
      ": achieved " + std::to_string(sol.distance) + ", certified lower bound " +
      std::to_string(sol.lower_bound));
}

namespace {

SpacePoint project_ball(const ConvexSet::Ball& ball, const SpacePoint& x) {
  const double p = ball.center.p;
  SpacePoint u = x - ball.center;
  const double norm = lp_norm(u);
  if (norm <= ball.radius) return x;

  double shrink;
  if (p == 2.0 || p == 1.0 || p == kInfiniteP) {
    shrink = ball.radius / norm;
  } else {
    // KKT stationarity for min ||u - d||_p s.t. ||d||_p <= r gives
    // |d_i| = |u_i| / (1 + mu); bisect the multiplier until ||d|| = r.
    double mu_lo = 0.0, mu_hi = 1.0;
    const auto norm_at = [&](double mu) {
      SpacePoint d = (1.0 / (1.0 + mu)) * u;
      return lp_norm(d);
    };
    while (norm_at(mu_hi) > ball.radius) mu_hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (mu_lo + mu_hi);
      (norm_at(mid) > ball.radius ? mu_lo : mu_hi) = mid;
      if (mu_hi - mu_lo < 1e-15 * (1.0 + mu_hi)) break;
    }
    shrink = 1.0 / (1.0 + 0.5 * (mu_lo + mu_hi));
  }
  return ball.center + shrink * u;
}

SpacePoint project_polytope(const ConvexSet::Polytope& poly,
                            const SpacePoint& x) {
  const double p = poly.vertices[0].p;
  if (p == 2.0) {
    HullProblem prob{&poly.vertices, x.coords};
    const HullSolve sol = hull_nearest(
        prob, 1e-13, std::numeric_limits<double>::infinity(), 10000);
    const double objective_gap =
        0.5 * (sol.distance * sol.distance -
               sol.lower_bound * sol.lower_bound);
    if (objective_gap > 1e-10 * prob.scale_sq())
      throw NoConvergence("polytope projection hit its iteration cap with "
                          "uncertified objective gap " +
                          std::to_string(objective_gap));
    std::vector<double> y(x.dim());
    prob.combine(sol.weights, y);
    return SpacePoint{std::move(y), p};
  }
  if (!(p > 1.0) || p == kInfiniteP)
    throw Error("polytope projection is implemented for p in (1, inf)");

  // Projected descent on f(w) = sum |(Vw - x)_i|^p with backtracking.
  const std::size_t n = poly.vertices.size();
  const std::size_t d = x.dim();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> res(d), grad(n), cand(n);
  const auto value = [&](const std::vector<double>& weights) {
    std::fill(res.begin(), res.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d; ++k)
        res[k] += weights[i] * poly.vertices[i].coords[k];
    double f = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      res[k] -= x.coords[k];
      f += std::pow(std::fabs(res[k]), p);
    }
    return f;
  };
  double f = value(w);
  double step = 1.0;
  bool settled = false;
  for (std::size_t it = 0; it < 10000; ++it) {
    // grad_i = p * sum_k |r_k|^{p-1} sgn(r_k) v_ik  (res holds r for w)
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double r = res[k];
        acc += std::pow(std::fabs(r), p - 1.0) *
               (r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0)) *
               poly.vertices[i].coords[k];
      }
      grad[i] = p * acc;
    }
    double gmin = std::numeric_limits<double>::infinity(), gdot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gmin = std::min(gmin, grad[i]);
      gdot += grad[i] * w[i];
    }
    if (gdot - gmin <= 1e-12 * (1.0 + std::fabs(f))) {
      settled = true;
      break;
    }

    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) cand[i] = w[i] - step * grad[i];
      cand = project_simplex(cand);
      const double fc = value(cand);
      if (fc < f) {
        w = cand;
        f = fc;
        step *= 1.25;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      settled = true;  // backtracking exhausted: at float resolution
      break;
    }
    value(w);  // refresh res for the next gradient
  }
  if (!settled)
    throw NoConvergence("polytope projection hit its iteration cap");
  std::vector<double> y(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      y[k] += w[i] * poly.vertices[i].coords[k];
  return SpacePoint{std::move(y), p};
}

}  // namespace

SpacePoint project(const ConvexSet& c, const SpacePoint& x) {
  return c.visit([&](const auto& s) -> SpacePoint {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, ConvexSet::Ball>) {
      return project_ball(s, x);
    } else if constexpr (std::is_same_v<T, ConvexSet::Box>) {
      SpacePoint y = x;
      y.p = s.p;
      for (std::size_t i = 0; i < y.coords.size(); ++i)
        y.coords[i] = std::clamp(y.coords[i], s.lo[i], s.hi[i]);
      return y;
    } else if constexpr (std::is_same_v<T, ConvexSet::Polytope>) {
      return project_polytope(s, x);
    } else {
      return s.project(x);
    }
  });
}

bool contains(const ConvexSet& c, const SpacePoint& x, double tol) {
  return c.visit([&](const auto& s) -> bool {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, ConvexSet::Ball>) {
      return lp_norm(x - s.center) <= s.radius + tol;
    } else if constexpr (std::is_same_v<T, ConvexSet::Box>) {
      for (std::size_t i = 0; i < x.coords.size(); ++i)
        if (x.coords[i] < s.lo[i] - tol || x.coords[i] > s.hi[i] + tol)
          return false;
      return true;
    } else if constexpr (std::is_same_v<T, ConvexSet::Polytope>) {
      return convex_hull_member(x, s.vertices, std::max(tol, 1e-9)).member;
    } else {
      return dist(s.project(x), x) <= tol;
    }
  });
}

double diameter(const ConvexSet& c) {
  return c.visit([&](const auto& s) -> double {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, ConvexSet::Ball>) {
      return 2.0 * s.radius;
    } else if constexpr (std::is_same_v<T, ConvexSet::Box>) {
      std::vector<double> diag(s.lo.size());
      for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = s.hi[i] - s.lo[i];
      return lp_norm(diag, s.p);
    } else if constexpr (std::is_same_v<T, ConvexSet::Polytope>) {
      double best = 0.0;
      for (std::size_t i = 0; i < s.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < s.vertices.size(); ++j)
          best = std::max(best, dist(s.vertices[i], s.vertices[j]));
      return best;
    } else {
      return s.diameter_bound;
    }
  });
}

SpacePoint sample(const ConvexSet& c, Rng& rng) {
  return c.visit([&](const auto& s) -> SpacePoint {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, ConvexSet::Ball>) {
      const std::size_t d = s.center.dim();
      SpacePoint dir = s.center;
      if (s.center.p == 2.0) {
        double norm = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          dir.coords[i] = rng.normal();
          norm += dir.coords[i] * dir.coords[i];
        }
        norm = std::sqrt(std::max(norm, 1e-300));
        const double radius =
            s.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
        for (std::size_t i = 0; i < d; ++i)
          dir.coords[i] = s.center.coords[i] + radius * dir.coords[i] / norm;
        return dir;
      }
      for (int attempt = 0; attempt < 256; ++attempt) {
        for (std::size_t i = 0; i < d; ++i)
          dir.coords[i] = rng.uniform(-s.radius, s.radius);
        if (lp_norm(dir) <= s.radius) {
          for (std::size_t i = 0; i < d; ++i)
            dir.coords[i] += s.center.coords[i];
          return dir;
        }
      }
      const double norm = lp_norm(dir);
      const double pull = 0.99 * s.radius * rng.uniform() / std::max(norm, 1e-300);
      for (std::size_t i = 0; i < d; ++i)
        dir.coords[i] = s.center.coords[i] + pull * dir.coords[i];
      return dir;
    } else if constexpr (std::is_same_v<T, ConvexSet::Box>) {
      SpacePoint out{std::vector<double>(s.lo.size()), s.p};
      for (std::size_t i = 0; i < s.lo.size(); ++i)
        out.coords[i] = rng.uniform(s.lo[i], s.hi[i]);
      return out;
    } else if constexpr (std::is_same_v<T, ConvexSet::Polytope>) {
      std::vector<double> w(s.vertices.size());
      double total = 0.0;
      for (double& x : w) {
        x = -std::log(std::max(1.0 - rng.uniform(), 1e-300));
        total += x;
      }
      SpacePoint out{std::vector<double>(s.vertices[0].dim(), 0.0),
                     s.vertices[0].p};
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t k = 0; k < out.coords.size(); ++k)
          out.coords[k] += (w[i] / total) * s.vertices[i].coords[k];
      return out;
    } else {
      SpacePoint probe{std::vector<double>(s.dim), s.p};
      for (double& x : probe.coords)
        x = rng.normal() * 0.5 * s.diameter_bound;
      return s.project(probe);
    }
  });
}

}  // namespace hyperfix
