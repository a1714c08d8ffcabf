#include "hyperfix/hyperreal.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "hyperfix/detail/hyperreal_ops.hpp"

namespace hyperfix {

namespace {

void check_same_window(const Hyperreal& a, const Hyperreal& b) {
  if (a.window() != b.window()) throw WindowMismatch(a.window(), b.window());
}

}  // namespace

Hyperreal HyperrealOps::make(std::map<int, double> terms, int window) {
  Hyperreal h(window);
  h.terms_ = std::move(terms);
  return h;
}

std::map<int, double> HyperrealOps::convolve(const Hyperreal& a,
                                             const Hyperreal& b) {
  std::map<int, double> out;
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) out[ea + eb] += ca * cb;
  for (auto it = out.begin(); it != out.end();)
    it = (it->second == 0.0) ? out.erase(it) : std::next(it);
  return out;
}

Hyperreal HyperrealOps::mul_truncating(const Hyperreal& a, const Hyperreal& b,
                                       bool* truncated) {
  check_same_window(a, b);
  const int k = a.window();
  std::map<int, double> out = convolve(a, b);
  for (auto it = out.begin(); it != out.end();) {
    if (it->first < -k) throw WindowOverflow(it->first, k);
    if (it->first > k) {
      if (truncated) *truncated = true;
      it = out.erase(it);
    } else {
      ++it;
    }
  }
  return make(std::move(out), k);
}

Hyperreal::Hyperreal(int window) : window_(window) {
  if (window < 1) throw Error("window must be a positive integer");
}

Hyperreal Hyperreal::constant(double value, int window) {
  return monomial(value, 0, window);
}

Hyperreal Hyperreal::eta(int window) { return monomial(1.0, 1, window); }

Hyperreal Hyperreal::monomial(double coeff, int exponent, int window) {
  Hyperreal h(window);
  if (exponent < -window || exponent > window)
    throw WindowOverflow(exponent, window);
  if (coeff != 0.0) h.terms_[exponent] = coeff;
  return h;
}

Hyperreal Hyperreal::from_terms(
    const std::vector<std::pair<int, double>>& terms, int window) {
  Hyperreal h(window);
  for (const auto& [e, c] : terms) {
    if (e < -window || e > window) throw WindowOverflow(e, window);
    h.terms_[e] += c;
  }
  for (auto it = h.terms_.begin(); it != h.terms_.end();)
    it = (it->second == 0.0) ? h.terms_.erase(it) : std::next(it);
  return h;
}

double Hyperreal::coeff(int exponent) const {
  const auto it = terms_.find(exponent);
  return it == terms_.end() ? 0.0 : it->second;
}

std::optional<int> Hyperreal::leading_exponent() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first;
}

double Hyperreal::leading_coeff() const {
  return terms_.empty() ? 0.0 : terms_.begin()->second;
}

Hyperreal Hyperreal::with_window(int window) const {
  Hyperreal out(window);
  for (const auto& [e, c] : terms_) {
    if (e < -window || e > window) throw WindowOverflow(e, window);
    out.terms_[e] = c;
  }
  return out;
}

Hyperreal Hyperreal::operator-() const {
  Hyperreal out(window_);
  for (const auto& [e, c] : terms_) out.terms_[e] = -c;
  return out;
}

Hyperreal Hyperreal::operator+(const Hyperreal& rhs) const {
  check_same_window(*this, rhs);
  Hyperreal out = *this;
  for (const auto& [e, c] : rhs.terms_) {
    auto [it, inserted] = out.terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) out.terms_.erase(it);
    } else if (c == 0.0) {
      out.terms_.erase(it);
    }
  }
  return out;
}

Hyperreal Hyperreal::operator-(const Hyperreal& rhs) const {
  return *this + (-rhs);
}

Hyperreal Hyperreal::operator*(const Hyperreal& rhs) const {
  check_same_window(*this, rhs);
  std::map<int, double> out = HyperrealOps::convolve(*this, rhs);
  // Overflow is judged after exact cancellation, so e.g. h^K * h^-K is fine.
  for (const auto& [e, c] : out)
    if (e < -window_ || e > window_) throw WindowOverflow(e, window_);
  return HyperrealOps::make(std::move(out), window_);
}

Hyperreal Hyperreal::operator*(double scalar) const {
  Hyperreal out(window_);
  if (scalar == 0.0) return out;
  for (const auto& [e, c] : terms_) {
    const double p = c * scalar;
    if (p != 0.0) out.terms_[e] = p;
  }
  return out;
}

Hyperreal Hyperreal::operator/(const Hyperreal& rhs) const {
  return divide(*this, rhs).value;
}

bool Hyperreal::operator==(const Hyperreal& rhs) const {
  check_same_window(*this, rhs);
  return terms_ == rhs.terms_;
}

std::strong_ordering Hyperreal::operator<=>(const Hyperreal& rhs) const {
  const Hyperreal diff = rhs - *this;
  if (diff.is_zero()) return std::strong_ordering::equal;
  return diff.leading_coeff() > 0.0 ? std::strong_ordering::less
                                    : std::strong_ordering::greater;
}

DivResult divide(const Hyperreal& num, const Hyperreal& den) {
  check_same_window(num, den);
  if (den.is_zero()) throw DivisionByZero();
  const int k = num.window();
  if (num.is_zero()) return {Hyperreal(k), std::nullopt};

  const int m = *den.leading_exponent();
  const double beta = den.leading_coeff();
  const int lead = *num.leading_exponent() - m;
  if (lead < -k || lead > k) throw WindowOverflow(lead, k);

  // Synthetic division: q_e = (a_{e+m} - sum_{j<e} q_j b_{e+m-j}) / beta.
  // Exponents above the window are the quotient's truncated tail.
  std::map<int, double> q;
  for (int e = lead; e <= k; ++e) {
    double acc = num.coeff(e + m);
    for (const auto& [eq, cq] : q) {
      const int eb = e + m - eq;
      const auto it = den.terms().find(eb);
      if (it != den.terms().end()) acc -= cq * it->second;
    }
    const double c = acc / beta;
    if (c != 0.0) q[e] = c;
  }

  Hyperreal quotient = HyperrealOps::make(q, k);

  // Exact iff the remainder vanishes (up to roundoff) on the wide product.
  std::map<int, double> prod = HyperrealOps::convolve(quotient, den);
  for (const auto& [e, c] : num.terms()) prod[e] -= c;
  double scale = 1.0;
  for (const auto& [e, c] : num.terms()) scale = std::max(scale, std::fabs(c));
  for (const auto& [e, c] : den.terms()) scale = std::max(scale, std::fabs(c));
  for (const auto& [e, c] : prod)
    if (std::fabs(c) > 1e-12 * scale)
      return {std::move(quotient), std::optional<int>(k + 1)};
  return {std::move(quotient), std::nullopt};
}

Magnitude classify(const Hyperreal& x) {
  const auto lead = x.leading_exponent();
  if (!lead || *lead > 0) return Magnitude::Infinitesimal;
  if (*lead == 0) return Magnitude::Appreciable;
  return Magnitude::Unbounded;
}

double standard_part(const Hyperreal& x) {
  if (classify(x) == Magnitude::Unbounded) throw NotBounded();
  return x.coeff(0);
}

bool same_monad(const Hyperreal& x, const Hyperreal& y) {
  return classify(x - y) == Magnitude::Infinitesimal;
}

bool same_galaxy(const Hyperreal& x, const Hyperreal& y) {
  return classify(x - y) != Magnitude::Unbounded;
}

std::vector<double> shadow(const std::vector<Hyperreal>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (classify(v[i]) == Magnitude::Unbounded) throw NotBounded(i);
    out.push_back(v[i].coeff(0));
  }
  return out;
}

Hyperreal abs(const Hyperreal& x) {
  return x.leading_coeff() < 0.0 ? -x : x;
}

namespace {

std::string format_coeff(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(const Hyperreal& h) {
  if (h.is_zero()) return "0";
  std::string out;
  for (const auto& [e, c] : h.terms()) {
    if (!out.empty()) out += " + ";
    out += format_coeff(c);
    if (e != 0) {
      out += "*h^";
      out += std::to_string(e);
    }
  }
  return out;
}

Hyperreal parse_hyperreal(const std::string& text, int window) {
  std::vector<std::pair<int, double>> terms;
  const char* p = text.c_str();
  const char* end = p + text.size();
  const auto skip_ws = [&] {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
  };

  skip_ws();
  if (p == end) throw Error("empty series literal");
  bool first = true;
  while (p < end) {
    if (!first) {
      if (*p != '+') throw Error("expected '+' in series literal: " + text);
      ++p;
      skip_ws();
    }
    first = false;

    double coeff = 1.0;
    bool have_coeff = false;
    if (*p == '-' && p + 1 < end && (p[1] == 'h')) {
      coeff = -1.0;
      ++p;
    } else if (*p != 'h') {
      double value = 0.0;
      const auto res = std::from_chars(p, end, value);
      if (res.ec != std::errc()) throw Error("bad coefficient in: " + text);
      p = res.ptr;
      coeff = value;
      have_coeff = true;
    }

    int exponent = 0;
    skip_ws();
    if (p < end && (*p == '*' || *p == 'h')) {
      if (*p == '*') {
        ++p;
        skip_ws();
      }
      if (p == end || *p != 'h')
        throw Error("expected 'h' after '*' in: " + text);
      ++p;
      if (p < end && *p == '^') {
        ++p;
        int value = 0;
        const auto res = std::from_chars(p, end, value);
        if (res.ec != std::errc()) throw Error("bad exponent in: " + text);
        p = res.ptr;
        exponent = value;
      } else {
        exponent = 1;
      }
    } else if (!have_coeff) {
      throw Error("expected term in: " + text);
    }
    terms.emplace_back(exponent, coeff);
    skip_ws();
  }
  return Hyperreal::from_terms(terms, window);
}

}  // namespace hyperfix
