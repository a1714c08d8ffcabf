#ifndef HYPERFIX_DETAIL_HYPERREAL_OPS_HPP
#define HYPERFIX_DETAIL_HYPERREAL_OPS_HPP

#include <map>

#include "hyperfix/hyperreal.hpp"

namespace hyperfix {

// Backdoor for the linear solver and division internals. Not part of the
// public arithmetic surface: the truncating multiply would break the exact
// field laws if exposed.
struct HyperrealOps {
  static Hyperreal make(std::map<int, double> terms, int window);

  // Exact wide convolution, canonicalized (no zero coefficients).
  static std::map<int, double> convolve(const Hyperreal& a, const Hyperreal& b);

  // Drops exponents above the window (setting *truncated when it does);
  // exponents below the window still throw, since those dominate the value.
  static Hyperreal mul_truncating(const Hyperreal& a, const Hyperreal& b,
                                  bool* truncated);
};

}  // namespace hyperfix

#endif
