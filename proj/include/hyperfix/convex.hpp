#ifndef HYPERFIX_CONVEX_HPP
#define HYPERFIX_CONVEX_HPP

#include <functional>
#include <variant>
#include <vector>

#include "hyperfix/rng.hpp"
#include "hyperfix/space.hpp"

namespace hyperfix {

/// A bounded closed convex set in a finite-dimensional l_p space. At this
/// scale weak and norm topologies coincide, so these sets stand in for the
/// weakly compact convex domains of the iteration theory.
class ConvexSet {
 public:
  struct Ball {
    SpacePoint center;
    double radius;
  };
  struct Box {
    std::vector<double> lo, hi;
    double p;
  };
  struct Polytope {
    std::vector<SpacePoint> vertices;
  };
  struct Oracle {
    std::function<SpacePoint(const SpacePoint&)> project;
    std::size_t dim;
    double p;
    double diameter_bound;  // required: no other way to size the set
  };

  static ConvexSet ball(SpacePoint center, double radius);
  static ConvexSet box(std::vector<double> lo, std::vector<double> hi,
                       double p = 2.0);
  static ConvexSet polytope(std::vector<SpacePoint> vertices);
  static ConvexSet oracle(std::function<SpacePoint(const SpacePoint&)> project,
                          std::size_t dim, double p, double diameter_bound);

  std::size_t dim() const;
  double ambient_p() const;

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  template <class Visitor>
  decltype(auto) visit(Visitor&& visitor) const {
    return std::visit(std::forward<Visitor>(visitor), v_);
  }

 private:
  explicit ConvexSet(std::variant<Ball, Box, Polytope, Oracle> v)
      : v_(std::move(v)) {}
  std::variant<Ball, Box, Polytope, Oracle> v_;
};

/// Metric projection: the nearest point of C in the ambient norm, within
/// 1e-10. Single-valued for p in (1, inf); for p in {1, inf} the returned
/// point is a valid minimizer but may not be the only one.
SpacePoint project(const ConvexSet& c, const SpacePoint& x);

bool contains(const ConvexSet& c, const SpacePoint& x, double tol = 1e-9);

/// Diameter in the ambient norm (an upper estimate for oracle sets).
double diameter(const ConvexSet& c);

/// A point of C, pseudo-randomly drawn. Used for spot-checks and scenario
/// starting points; makes no uniformity promise.
SpacePoint sample(const ConvexSet& c, Rng& rng);

/// Outcome of a hull-membership query: the optimal convex weights found,
/// the certified l2 distance they realize, and the verdict at the caller's
/// tolerance.
struct HullResult {
  bool member;
  std::vector<double> weights;
  double distance;
  std::size_t iterations;
};

/// Decides whether `a` lies within `tol` of conv(pts) by minimizing
/// ||sum_i w_i pts_i - a||_2 over the simplex (accelerated projected
/// gradient with an active-support refinement). Throws NoConvergence if the
/// optimizer cannot certify its answer.
HullResult convex_hull_member(const SpacePoint& a,
                              const std::vector<SpacePoint>& pts, double tol);

/// Euclidean projection of w onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> w);

}  // namespace hyperfix

#endif
