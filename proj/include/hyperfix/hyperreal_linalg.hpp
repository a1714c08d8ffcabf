#ifndef HYPERFIX_HYPERREAL_LINALG_HPP
#define HYPERFIX_HYPERREAL_LINALG_HPP

#include <vector>

#include "hyperfix/hyperreal.hpp"

namespace hyperfix {

using HyperrealMatrix = std::vector<std::vector<Hyperreal>>;
using HyperrealVector = std::vector<Hyperreal>;

/// Solves A x = b over the series field by Gaussian elimination. The pivot in
/// each column is the entry of smallest leading exponent (the largest in the
/// order of magnitudes), ties broken by largest |leading coefficient|.
/// Row updates share division's truncation semantics: the solution matches
/// A x = b on every window-representable exponent up to the truncation order.
///
/// Throws SingularMatrix when a column has no nonzero pivot, WindowOverflow
/// when the result does not fit the window.
HyperrealVector solve_linear(const HyperrealMatrix& a,
                             const HyperrealVector& b);

}  // namespace hyperfix

#endif
