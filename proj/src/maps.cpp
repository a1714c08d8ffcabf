#include "hyperfix/maps.hpp"

#include <cmath>

namespace hyperfix {

double operator_norm(const std::vector<std::vector<double>>& a, double tol) {
  const std::size_t rows = a.size();
  if (rows == 0) return 0.0;
  const std::size_t cols = a[0].size();
  std::vector<double> v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
  if (cols > 1) v[0] += 0.125;  // avoid starting orthogonal to the top space
  std::vector<double> av(rows), atav(cols);

  double sigma_sq = 0.0;
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cols; ++j) acc += a[i][j] * v[j];
      av[i] = acc;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rows; ++i) acc += a[i][j] * av[i];
      atav[j] = acc;
    }
    double norm = 0.0;
    for (double x : atav) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-300) return 0.0;
    for (std::size_t j = 0; j < cols; ++j) v[j] = atav[j] / norm;
    const double prev = sigma_sq;
    sigma_sq = norm;
    if (it > 2 && std::fabs(sigma_sq - prev) <= tol * std::max(1.0, sigma_sq))
      break;
  }
  return std::sqrt(sigma_sq);
}

MapDescriptor MapDescriptor::affine(std::vector<std::vector<double>> a,
                                    std::vector<double> b, ConvexSet domain) {
  const std::size_t n = domain.dim();
  if (a.size() != n || b.size() != n)
    throw Error("affine map shape does not match the domain dimension");
  for (const auto& row : a)
    if (row.size() != n) throw Error("affine matrix is not square");
  const double lip = operator_norm(a);
  MapDescriptor m(Affine{std::move(a), std::move(b)}, std::move(domain), lip);
  m.spot_check_self_map();
  return m;
}

MapDescriptor MapDescriptor::rotation(double theta, SpacePoint center,
                                      ConvexSet domain) {
  if (domain.dim() < 2) throw Error("rotation needs dimension >= 2");
  if (center.dim() != domain.dim())
    throw Error("rotation center dimension mismatch");
  MapDescriptor m(Rotation{theta, std::move(center)}, std::move(domain), 1.0);
  m.spot_check_self_map();
  return m;
}

MapDescriptor MapDescriptor::proj_composition(std::vector<ConvexSet> sets,
                                              ConvexSet domain) {
  if (sets.empty()) throw Error("projection composition needs >= 1 set");
  for (const auto& s : sets)
    if (s.dim() != domain.dim())
      throw Error("projection composition dimension mismatch");
  MapDescriptor m(ProjComposition{std::move(sets)}, std::move(domain), 1.0);
  m.spot_check_self_map();
  return m;
}

MapDescriptor MapDescriptor::custom(
    std::function<SpacePoint(const SpacePoint&)> fn, double lipschitz_claim,
    ConvexSet domain) {
  if (!fn) throw Error("custom map callback is required");
  if (!(lipschitz_claim >= 0.0))
    throw Error("lipschitz claim must be nonnegative");
  MapDescriptor m(Custom{std::move(fn), lipschitz_claim}, std::move(domain),
                  lipschitz_claim);
  m.spot_check_self_map();
  return m;
}

MapDescriptor regularized_map(const MapDescriptor& t, const SpacePoint& u,
                              double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw EpsOutOfRange(eps);
  if (u.dim() != t.domain().dim())
    throw Error("anchor dimension does not match the domain");
  if (!contains(t.domain(), u, 1e-7))
    throw DomainViolation("anchor point lies outside the domain");
  // The blend of a self-map with an interior anchor stays inside the convex
  // domain, so no spot check is needed here.
  return MapDescriptor(
      MapDescriptor::Blend{std::make_shared<MapDescriptor>(t), u, eps},
      t.domain(), (1.0 - eps) * t.lipschitz());
}

void MapDescriptor::apply_into(const std::vector<double>& in,
                               std::vector<double>& out) const {
  if (const auto* aff = std::get_if<Affine>(&v_)) {
    const std::size_t n = aff->b.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = aff->b[i];
      const auto& row = aff->a[i];
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * in[j];
      out[i] = acc;
    }
    return;
  }
  if (const auto* rot = std::get_if<Rotation>(&v_)) {
    out = in;
    const double c = std::cos(rot->theta), s = std::sin(rot->theta);
    const double dx = in[0] - rot->center.coords[0];
    const double dy = in[1] - rot->center.coords[1];
    out[0] = rot->center.coords[0] + c * dx - s * dy;
    out[1] = rot->center.coords[1] + s * dx + c * dy;
    return;
  }
  if (const auto* blend = std::get_if<Blend>(&v_)) {
    blend->base->apply_into(in, out);
    const double eps = blend->eps;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (1.0 - eps) * out[i] + eps * blend->anchor.coords[i];
    return;
  }
  // projection compositions and custom callbacks keep the allocating path
  SpacePoint x{in, domain_.ambient_p()};
  out = apply(x).coords;
}

SpacePoint MapDescriptor::apply(const SpacePoint& x) const {
  if (const auto* proj = std::get_if<ProjComposition>(&v_)) {
    SpacePoint y = x;
    for (const auto& s : proj->sets) y = project(s, y);
    return y;
  }
  if (const auto* custom = std::get_if<Custom>(&v_)) return custom->fn(x);
  SpacePoint y = x;
  apply_into(x.coords, y.coords);
  return y;
}

std::string MapDescriptor::kind_name() const {
  if (std::holds_alternative<Affine>(v_)) return "affine";
  if (std::holds_alternative<Rotation>(v_)) return "rotation";
  if (std::holds_alternative<ProjComposition>(v_)) return "proj_composition";
  if (std::holds_alternative<Custom>(v_)) return "custom";
  return "regularized";
}

void MapDescriptor::spot_check_self_map() const {
  Rng rng(0x5eedcafe);  // fixed: construction must be deterministic
  for (int i = 0; i < 1000; ++i) {
    const SpacePoint x = sample(domain_, rng);
    const SpacePoint y = apply(x);
    if (!contains(domain_, y, 1e-7))
      throw DomainViolation(kind_name() +
                            " map sends a sampled domain point outside its "
                            "domain");
  }
}

}  // namespace hyperfix
