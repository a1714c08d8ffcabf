#include "hyperfix/psi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperfix {

PsiFunction PsiFunction::lp(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Error("lp generator requires p in [1, inf)");
  return PsiFunction(Kind::Lp, p, {});
}

PsiFunction PsiFunction::max_norm() {
  return PsiFunction(Kind::Max, std::numeric_limits<double>::infinity(), {});
}

PsiFunction PsiFunction::tabulated(std::vector<double> values) {
  const std::size_t m = values.empty() ? 0 : values.size() - 1;
  if (m < 2) throw Error("tabulated psi needs at least 3 grid points");
  if (values.front() != 1.0) throw NotInPsiClass("psi(0) != 1", 0);
  if (values.back() != 1.0) throw NotInPsiClass("psi(1) != 1", m);
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m);
    if (values[i] > 1.0 + 1e-12) throw NotInPsiClass("psi(t) > 1", i);
    if (values[i] < std::max(1.0 - t, t) - 1e-12)
      throw NotInPsiClass("psi(t) < max{1-t, t}", i);
  }
  for (std::size_t i = 1; i < m; ++i) {
    if (values[i - 1] + values[i + 1] < 2.0 * values[i] - 1e-12)
      throw NotInPsiClass("discrete convexity violated", i);
  }
  return PsiFunction(Kind::Tabulated, 0.0, std::move(values));
}

double PsiFunction::operator()(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  switch (kind_) {
    case Kind::Lp: {
      if (t == 0.0 || t == 1.0) return 1.0;
      return std::pow(std::pow(1.0 - t, p_) + std::pow(t, p_), 1.0 / p_);
    }
    case Kind::Max:
      return std::max(1.0 - t, t);
    case Kind::Tabulated: {
      const std::size_t m = grid_.size() - 1;
      const double pos = t * static_cast<double>(m);
      const std::size_t i =
          std::min(static_cast<std::size_t>(pos), m - 1);
      const double frac = pos - static_cast<double>(i);
      return grid_[i] + frac * (grid_[i + 1] - grid_[i]);
    }
  }
  return 1.0;  // unreachable
}

PsiFunction psi_from_norm(const std::function<double(double, double)>& norm2,
                          std::size_t grid_size) {
  if (grid_size < 2) throw Error("psi_from_norm needs grid_size >= 2");
  std::vector<double> values(grid_size + 1);
  for (std::size_t i = 0; i <= grid_size; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid_size);
    values[i] = norm2(1.0 - t, t);
  }
  return PsiFunction::tabulated(std::move(values));
}

double norm_from_psi(const PsiFunction& psi, double x1, double x2) {
  const double a = std::fabs(x1), b = std::fabs(x2);
  const double s = a + b;
  if (s == 0.0) return 0.0;
  return s * psi(b / s);
}

bool is_strictly_monotone(const PsiFunction& psi, std::size_t grid_size) {
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid_size);
    if (!(psi(t) > std::max(1.0 - t, t))) return false;
  }
  return true;
}

double uniform_monotonicity_modulus(const PsiFunction& psi, double eps,
                                    std::size_t grid_size) {
  if (!(eps > 0.0)) throw Error("modulus requires eps > 0");
  if (!is_strictly_monotone(psi)) throw NotStrictlyMonotone();

  const std::size_t n = grid_size;
  // Precomputed ||(i/n, j/n)||_psi table; the triple scan below only looks
  // at pairs inside the unit ball.
  std::vector<std::vector<double>> nrm(n + 1, std::vector<double>(n + 1));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      nrm[i][j] = norm_from_psi(psi, static_cast<double>(i) / n,
                                static_cast<double>(j) / n);

  // b >= c + eps on the grid: j - k >= ceil(eps * n).
  const auto gap = static_cast<std::size_t>(
      std::ceil(eps * static_cast<double>(n) - 1e-12));
  double delta = 1.0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = gap; j <= n; ++j) {
      if (nrm[i][j] > 1.0 + 1e-12) break;  // larger j only leaves the ball
      for (std::size_t k = 0; k + gap <= j; ++k)
        delta = std::min(delta, nrm[i][j] - nrm[i][k]);
    }
  }
  return std::max(delta, 0.0);
}

}  // namespace hyperfix
