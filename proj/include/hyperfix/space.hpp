#ifndef HYPERFIX_SPACE_HPP
#define HYPERFIX_SPACE_HPP

#include <limits>
#include <vector>

#include "hyperfix/psi.hpp"

namespace hyperfix {

constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

/// A coordinate vector in a finite-dimensional l_p space. `p` may be
/// infinity (max norm).
struct SpacePoint {
  std::vector<double> coords;
  double p = 2.0;

  std::size_t dim() const { return coords.size(); }
};

SpacePoint make_point(std::vector<double> coords, double p = 2.0);

double lp_norm(const SpacePoint& v);
double lp_norm(const std::vector<double>& coords, double p);

SpacePoint operator+(const SpacePoint& a, const SpacePoint& b);
SpacePoint operator-(const SpacePoint& a, const SpacePoint& b);
SpacePoint operator*(double s, const SpacePoint& a);

/// ||a - b|| in the points' ambient norm.
double dist(const SpacePoint& a, const SpacePoint& b);

/// A point of the psi-direct sum X (+)_psi Y, normed by
/// ||(x, y)|| = ||(||x||, ||y||)||_psi.
struct DirectSumPoint {
  SpacePoint x;
  SpacePoint y;
  PsiFunction psi;
};

double direct_sum_norm(const DirectSumPoint& w);
double dist(const DirectSumPoint& a, const DirectSumPoint& b);

}  // namespace hyperfix

#endif
