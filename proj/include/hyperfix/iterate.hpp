#ifndef HYPERFIX_ITERATE_HPP
#define HYPERFIX_ITERATE_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include "hyperfix/hyperreal.hpp"
#include "hyperfix/maps.hpp"

namespace hyperfix {

enum class StopReason { Tolerance, IterationCap };

/// Record of one iteration run. Long runs are decimated to a bounded number
/// of rows with geometrically growing stride; `iterations` keeps the true
/// index of each recorded point, and the final iterate is always recorded.
struct IterationTrace {
  std::vector<std::size_t> iterations;
  std::vector<SpacePoint> points;
  std::vector<double> residuals;     // ||T x_n - x_n|| at each recorded point
  std::vector<double> steps;         // ||x_{n+1} - x_n||; NaN on the last row
  std::vector<double> eps_schedule;  // stage eps per point; empty if unused
  StopReason terminated_by = StopReason::Tolerance;
  std::size_t total_iterations = 0;
  std::size_t map_evals = 0;

  std::size_t rows() const { return points.size(); }
  double final_residual() const {
    return residuals.empty() ? 0.0 : residuals.back();
  }
};

struct PicardResult {
  SpacePoint fixed_point;
  IterationTrace trace;
};

/// Picard iteration of a contraction, stopping once the a-posteriori bound
/// ||x_n - x_{n-1}|| <= tol (1-k)/k guarantees ||x_n - x*|| <= tol.
/// Throws NotAContraction if Lip(T) >= 1, IterationCapReached if the cap is
/// hit first.
PicardResult picard_contraction(const MapDescriptor& t, const SpacePoint& x0,
                                double tol, std::size_t cap = 50'000'000);

/// Geometric schedule eps_j = eps0 * gamma^j standing in for one fixed
/// infinitesimal regularization weight; the inner solve at stage j is run to
/// tolerance inner_tol_coeff * eps_j^2 so ladder error is dominated by the
/// regularization bias, not solver noise.
struct RegularizationSchedule {
  double eps0 = 0.1;
  double gamma = 0.5;
  std::size_t j_max = 30;
  double inner_tol_coeff = 1.0;

  void validate() const;
  double eps(std::size_t j) const;
};

struct LadderStage {
  double eps;
  SpacePoint z;
  double t_residual;       // ||T z_j - z_j||
  double residual_bound;   // eps_j * diam + 2 tol_j (with achieved tol)
  double inner_tol;        // requested tolerance
  double achieved_tol;     // may be coarser when doubles bottom out
  std::size_t inner_iterations;
};

struct NonstandardPicardResult {
  SpacePoint z;
  std::vector<LadderStage> ladder;
  IterationTrace trace;
};

/// The regularized Picard scheme: for each stage j, the Picard orbit of
/// S_j = (1 - eps_j) T + eps_j u is run from the previous stage's limit until
/// ||z - fix(S_j)|| <= tol_j. Each stage satisfies
/// ||T z_j - z_j|| <= eps_j * diam + 2 tol_j.
/// `budget` optionally caps total map evaluations; when it runs out the
/// ladder is truncated and terminated_by is IterationCap.
NonstandardPicardResult nonstandard_picard(
    const MapDescriptor& t, const SpacePoint& u, const SpacePoint& x0,
    const RegularizationSchedule& sched,
    std::optional<std::size_t> budget = std::nullopt);

/// Ladder limit followed by the metric projection onto C (a near-identity
/// safeguard when the limit already lies in C). Requires C to be the map's
/// domain in a p in (1, inf) space.
SpacePoint fixed_point_via_projection(const MapDescriptor& t,
                                      const SpacePoint& u,
                                      const SpacePoint& x0,
                                      const RegularizationSchedule& sched,
                                      const ConvexSet& c);

struct SymbolicFixedPoint {
  std::vector<Hyperreal> z;
  SpacePoint shadow;
};

/// Solves (I - (1-h) A) z = (1-h) b + h u over the series field, i.e. the
/// regularized fixed point with the formal infinitesimal itself as the
/// weight. Verifies that every component of T z - z is infinitesimal and
/// returns z together with its shadow, a fixed point of T x = A x + b when
/// one exists. Throws NotBounded when z escapes the bounded galaxy (T has no
/// fixed point, e.g. a translation), SingularMatrix when the system is
/// degenerate.
SymbolicFixedPoint symbolic_fixed_point(
    const std::vector<std::vector<double>>& a, const std::vector<double>& b,
    const SpacePoint& u, int window = Hyperreal::kDefaultWindow);

/// Same, for an affine MapDescriptor.
SymbolicFixedPoint symbolic_fixed_point(const MapDescriptor& t,
                                        const SpacePoint& u,
                                        int window = Hyperreal::kDefaultWindow);

/// Series-entry core: entries of A, b, u may themselves be series (the CLI
/// accepts series literals). The affine part's standard parts must form a
/// nonexpansive matrix.
SymbolicFixedPoint symbolic_fixed_point_series(
    const std::vector<std::vector<Hyperreal>>& a,
    const std::vector<Hyperreal>& b, const std::vector<Hyperreal>& u,
    double ambient_p = 2.0);

using AlphaSchedule = std::function<double(std::size_t)>;

AlphaSchedule constant_alpha(double value);
AlphaSchedule harmonic_alpha();  // 1 / (k + 1)

/// x_{k+1} = (1 - a_k) x_k + a_k T x_k, run for n steps.
IterationTrace mann_iterate(const MapDescriptor& t, const SpacePoint& x0,
                            const AlphaSchedule& alphas, std::size_t n);

/// x_{k+1} = a_k u + (1 - a_k) T x_k, run for n steps.
IterationTrace halpern_iterate(const MapDescriptor& t, const SpacePoint& u,
                               const SpacePoint& x0,
                               const AlphaSchedule& alphas, std::size_t n);

}  // namespace hyperfix

#endif
