#ifndef HYPERFIX_PSI_HPP
#define HYPERFIX_PSI_HPP

#include <functional>
#include <vector>

#include "hyperfix/errors.hpp"

namespace hyperfix {

/// A norm-generating function psi on [0, 1]: continuous, convex,
/// psi(0) = psi(1) = 1 and max{1-t, t} <= psi(t) <= 1. Each such psi is in
/// one-to-one correspondence with a monotone normalized norm on the plane
/// via psi(t) = ||(1-t, t)||.
class PsiFunction {
 public:
  enum class Kind { Lp, Max, Tabulated };

  /// Generator of the planar l_p norm, p in [1, inf).
  static PsiFunction lp(double p);

  /// Generator of the max norm, psi(t) = max{1-t, t}. The lower envelope of
  /// the whole class; never strictly monotone.
  static PsiFunction max_norm();

  /// Values on the uniform grid t = i/M, i = 0..M. Validates the class
  /// invariants (endpoints exactly 1, envelope bounds, discrete convexity
  /// with 1e-12 slack) and throws NotInPsiClass naming the first violation.
  static PsiFunction tabulated(std::vector<double> values);

  /// Evaluates psi(t) for t in [0, 1]; tabulated functions interpolate
  /// linearly, which preserves convexity and the envelope bounds.
  double operator()(double t) const;

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::vector<double>& grid() const { return grid_; }

 private:
  PsiFunction(Kind kind, double p, std::vector<double> grid)
      : kind_(kind), p_(p), grid_(std::move(grid)) {}
  Kind kind_;
  double p_ = 0.0;
  std::vector<double> grid_;  // tabulated values, empty otherwise
};

/// Tabulates psi(t) = norm2(1-t, t) on an (M+1)-point grid from a planar
/// norm callback and validates the result. Throws NotInPsiClass.
PsiFunction psi_from_norm(const std::function<double(double, double)>& norm2,
                          std::size_t grid_size = 1000);

/// The planar norm generated by psi:
/// (|x1| + |x2|) * psi(|x2| / (|x1| + |x2|)), and 0 at the origin.
double norm_from_psi(const PsiFunction& psi, double x1, double x2);

/// Strict inequality psi(t) > max{1-t, t} at every interior grid point,
/// tested with no tolerance.
bool is_strictly_monotone(const PsiFunction& psi, std::size_t grid_size = 1000);

/// Brute-force uniform-monotonicity modulus on an N^3 grid over triples
/// (a, b, c) with (a, b) and (a, c) in the nonnegative part of the unit ball:
/// the largest delta such that ||(a,b)|| < ||(a,c)|| + delta implies
/// b < c + eps on the grid. Throws NotStrictlyMonotone.
double uniform_monotonicity_modulus(const PsiFunction& psi, double eps,
                                    std::size_t grid_size = 200);

}  // namespace hyperfix

#endif
