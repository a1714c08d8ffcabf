#ifndef HYPERFIX_HYPERREAL_HPP
#define HYPERFIX_HYPERREAL_HPP

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperfix/errors.hpp"

namespace hyperfix {

/// Order-of-magnitude classes of a series. The zero element counts as
/// infinitesimal.
enum class Magnitude { Infinitesimal, Appreciable, Unbounded };

/// A truncated Laurent series c_{-K} h^{-K} + ... + c_K h^K in a formal
/// infinitesimal h, with integer exponents restricted to [-window, window].
///
/// Addition, multiplication and comparison are exact; an operation whose
/// result needs an exponent outside the window throws WindowOverflow instead
/// of truncating. Division is the one operation that may truncate; it reports
/// the first dropped exponent in its result metadata.
///
/// Values are immutable after construction and safe to share across threads.
class Hyperreal {
 public:
  static constexpr int kDefaultWindow = 8;

  /// The zero series.
  explicit Hyperreal(int window = kDefaultWindow);

  /// A real constant (exponent-0 term).
  static Hyperreal constant(double value, int window = kDefaultWindow);

  /// The formal infinitesimal h itself.
  static Hyperreal eta(int window = kDefaultWindow);

  /// coeff * h^exponent.
  static Hyperreal monomial(double coeff, int exponent,
                            int window = kDefaultWindow);

  /// Builds a series from (exponent, coefficient) pairs, summing duplicates.
  static Hyperreal from_terms(const std::vector<std::pair<int, double>>& terms,
                              int window = kDefaultWindow);

  int window() const { return window_; }
  const std::map<int, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient at the given exponent (0 if absent).
  double coeff(int exponent) const;

  /// Exponent of the dominating term; nullopt for the zero series.
  std::optional<int> leading_exponent() const;
  double leading_coeff() const;

  /// Re-embeds into a different window. Throws WindowOverflow if a stored
  /// term does not fit.
  Hyperreal with_window(int window) const;

  Hyperreal operator-() const;
  Hyperreal operator+(const Hyperreal& rhs) const;
  Hyperreal operator-(const Hyperreal& rhs) const;
  Hyperreal operator*(const Hyperreal& rhs) const;
  Hyperreal operator*(double scalar) const;
  Hyperreal operator/(const Hyperreal& rhs) const;

  bool operator==(const Hyperreal& rhs) const;
  std::strong_ordering operator<=>(const Hyperreal& rhs) const;

 private:
  friend struct HyperrealOps;
  std::map<int, double> terms_;  // exponent -> nonzero coefficient
  int window_;
};

inline Hyperreal operator*(double scalar, const Hyperreal& h) {
  return h * scalar;
}

/// Division result; `truncated_from` is the smallest quotient exponent that
/// could not be represented (window + 1), or nullopt when the quotient is
/// exact.
struct DivResult {
  Hyperreal value;
  std::optional<int> truncated_from;
};

DivResult divide(const Hyperreal& num, const Hyperreal& den);

Magnitude classify(const Hyperreal& x);

/// Coefficient at exponent 0 of a non-unbounded value. Throws NotBounded.
double standard_part(const Hyperreal& x);

/// True iff x - y is infinitesimal.
bool same_monad(const Hyperreal& x, const Hyperreal& y);

/// True iff x - y is not unbounded.
bool same_galaxy(const Hyperreal& x, const Hyperreal& y);

/// Componentwise standard part. Throws NotBounded with the index of the
/// first unbounded component.
std::vector<double> shadow(const std::vector<Hyperreal>& v);

Hyperreal abs(const Hyperreal& x);

/// Renders terms in ascending exponent order as `c*h^e` joined by ` + `;
/// the exponent-0 term is rendered as a bare coefficient. Zero is "0".
std::string to_string(const Hyperreal& h);

/// Parses the to_string grammar (tolerating missing spaces and a bare or
/// signed `h^e` without coefficient).
Hyperreal parse_hyperreal(const std::string& text,
                          int window = Hyperreal::kDefaultWindow);

}  // namespace hyperfix

#endif
