#ifndef HYPERFIX_MAPS_HPP
#define HYPERFIX_MAPS_HPP

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hyperfix/convex.hpp"

namespace hyperfix {

/// A self-map of a convex domain with Lipschitz metadata. Construction
/// estimates or fixes the Lipschitz constant and spot-checks on 1e3 random
/// domain points that the map sends the domain into itself (DomainViolation
/// otherwise). Instances are immutable; callbacks must be pure.
class MapDescriptor {
 public:
  struct Affine {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
  };
  struct Rotation {
    double theta;
    SpacePoint center;  // rotates the (0, 1)-coordinate plane about it
  };
  struct ProjComposition {
    std::vector<ConvexSet> sets;
  };
  struct Custom {
    std::function<SpacePoint(const SpacePoint&)> fn;
    double lipschitz_claim;
  };
  struct Blend {  // (1 - eps) * base + eps * anchor
    std::shared_ptr<const MapDescriptor> base;
    SpacePoint anchor;
    double eps;
  };

  /// x -> A x + b. The operator 2-norm of A is estimated by power iteration
  /// (tolerance 1e-8); the map counts as nonexpansive iff it is <= 1 + 1e-9.
  static MapDescriptor affine(std::vector<std::vector<double>> a,
                              std::vector<double> b, ConvexSet domain);

  /// Isometric rotation of the first two coordinates about `center`;
  /// Lipschitz constant exactly 1.
  static MapDescriptor rotation(double theta, SpacePoint center,
                                ConvexSet domain);

  /// Composition of metric projections, applied left to right. Nonexpansive
  /// by construction for p = 2 components.
  static MapDescriptor proj_composition(std::vector<ConvexSet> sets,
                                        ConvexSet domain);

  static MapDescriptor custom(std::function<SpacePoint(const SpacePoint&)> fn,
                              double lipschitz_claim, ConvexSet domain);

  SpacePoint apply(const SpacePoint& x) const;

  /// Allocation-free apply for iteration hot loops; `in` and `out` must be
  /// distinct buffers of the domain dimension.
  void apply_into(const std::vector<double>& in,
                  std::vector<double>& out) const;

  double lipschitz() const { return lipschitz_; }
  bool nonexpansive() const { return lipschitz_ <= 1.0 + 1e-9; }
  const ConvexSet& domain() const { return domain_; }
  std::string kind_name() const;

  /// Affine parameters, or nullptr for other kinds.
  const Affine* affine_data() const { return std::get_if<Affine>(&v_); }

  friend MapDescriptor regularized_map(const MapDescriptor& t,
                                       const SpacePoint& u, double eps);

 private:
  MapDescriptor(std::variant<Affine, Rotation, ProjComposition, Custom, Blend> v,
                ConvexSet domain, double lipschitz)
      : v_(std::move(v)), domain_(std::move(domain)), lipschitz_(lipschitz) {}
  void spot_check_self_map() const;

  std::variant<Affine, Rotation, ProjComposition, Custom, Blend> v_;
  ConvexSet domain_;
  double lipschitz_;
};

/// Blends a nonexpansive map with an anchor point u in its domain:
/// x -> (1 - eps) T x + eps u, a contraction with factor (1 - eps) * Lip(T).
/// Throws EpsOutOfRange for eps outside (0, 1).
MapDescriptor regularized_map(const MapDescriptor& t, const SpacePoint& u,
                              double eps);

/// Operator 2-norm estimate by power iteration on A^T A.
double operator_norm(const std::vector<std::vector<double>>& a,
                     double tol = 1e-8);

}  // namespace hyperfix

#endif
