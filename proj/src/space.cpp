#include "hyperfix/space.hpp"

#include <cmath>

namespace hyperfix {

SpacePoint make_point(std::vector<double> coords, double p) {
  if (!(p >= 1.0)) throw Error("ambient exponent must satisfy p >= 1");
  for (double c : coords)
    if (!std::isfinite(c)) throw Error("coordinates must be finite");
  return SpacePoint{std::move(coords), p};
}

double lp_norm(const std::vector<double>& coords, double p) {
  if (p == kInfiniteP) {
    double m = 0.0;
    for (double c : coords) m = std::max(m, std::fabs(c));
    return m;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double c : coords) s += c * c;
    return std::sqrt(s);
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double c : coords) s += std::fabs(c);
    return s;
  }
  double s = 0.0;
  for (double c : coords) s += std::pow(std::fabs(c), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const SpacePoint& v) { return lp_norm(v.coords, v.p); }

namespace {
void check_dims(const SpacePoint& a, const SpacePoint& b) {
  if (a.dim() != b.dim()) throw Error("dimension mismatch");
}
}  // namespace

SpacePoint operator+(const SpacePoint& a, const SpacePoint& b) {
  check_dims(a, b);
  SpacePoint out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i)
    out.coords[i] += b.coords[i];
  return out;
}

SpacePoint operator-(const SpacePoint& a, const SpacePoint& b) {
  check_dims(a, b);
  SpacePoint out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i)
    out.coords[i] -= b.coords[i];
  return out;
}

SpacePoint operator*(double s, const SpacePoint& a) {
  SpacePoint out = a;
  for (double& c : out.coords) c *= s;
  return out;
}

double dist(const SpacePoint& a, const SpacePoint& b) {
  check_dims(a, b);
  return lp_norm(a - b);
}

double direct_sum_norm(const DirectSumPoint& w) {
  return norm_from_psi(w.psi, lp_norm(w.x), lp_norm(w.y));
}

double dist(const DirectSumPoint& a, const DirectSumPoint& b) {
  return norm_from_psi(a.psi, dist(a.x, b.x), dist(a.y, b.y));
}

}  // namespace hyperfix
