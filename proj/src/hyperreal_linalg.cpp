#include "hyperfix/hyperreal_linalg.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "hyperfix/detail/hyperreal_ops.hpp"

namespace hyperfix {

HyperrealVector solve_linear(const HyperrealMatrix& a,
                             const HyperrealVector& b) {
  const std::size_t n = a.size();
  if (n == 0 || b.size() != n) throw Error("solve_linear: shape mismatch");
  for (const auto& row : a)
    if (row.size() != n) throw Error("solve_linear: matrix is not square");

  const int window = b.empty() ? Hyperreal::kDefaultWindow : b[0].window();
  HyperrealMatrix m = a;
  HyperrealVector rhs = b;

  for (std::size_t col = 0; col < n; ++col) {
    // Pivot search: smallest leading exponent wins, then largest coefficient.
    std::size_t pivot = n;
    int best_exp = std::numeric_limits<int>::max();
    double best_coeff = 0.0;
    for (std::size_t row = col; row < n; ++row) {
      const auto lead = m[row][col].leading_exponent();
      if (!lead) continue;
      const double c = std::fabs(m[row][col].leading_coeff());
      if (*lead < best_exp || (*lead == best_exp && c > best_coeff)) {
        pivot = row;
        best_exp = *lead;
        best_coeff = c;
      }
    }
    if (pivot == n) throw SingularMatrix(col);
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);

    for (std::size_t row = col + 1; row < n; ++row) {
      if (m[row][col].is_zero()) continue;
      const Hyperreal factor = divide(m[row][col], m[col][col]).value;
      for (std::size_t j = col; j < n; ++j) {
        m[row][j] = m[row][j] -
                    HyperrealOps::mul_truncating(factor, m[col][j], nullptr);
      }
      m[row][col] = Hyperreal(window);  // eliminated by construction
      rhs[row] =
          rhs[row] - HyperrealOps::mul_truncating(factor, rhs[col], nullptr);
    }
  }

  HyperrealVector x(n, Hyperreal(window));
  for (std::size_t i = n; i-- > 0;) {
    Hyperreal acc = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j)
      acc = acc - HyperrealOps::mul_truncating(m[i][j], x[j], nullptr);
    x[i] = divide(acc, m[i][i]).value;
  }
  return x;
}

}  // namespace hyperfix
