#ifndef HYPERFIX_ERRORS_HPP
#define HYPERFIX_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperfix {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- series / hyperreal arithmetic ------------------------------------------

class WindowMismatch : public Error {
 public:
  WindowMismatch(int lhs, int rhs)
      : Error("exponent windows differ: " + std::to_string(lhs) + " vs " +
              std::to_string(rhs)) {}
};

class WindowOverflow : public Error {
 public:
  explicit WindowOverflow(int exponent, int window)
      : Error("exponent " + std::to_string(exponent) +
              " outside window [-" + std::to_string(window) + ", " +
              std::to_string(window) + "]") {}
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero series") {}
};

class NotBounded : public Error {
 public:
  NotBounded() : Error("value is unbounded; no standard part") {}
  explicit NotBounded(std::size_t component)
      : Error("component " + std::to_string(component) +
              " is unbounded; no standard part"),
        component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_ = static_cast<std::size_t>(-1);
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(std::size_t column)
      : Error("no usable pivot in column " + std::to_string(column)) {}
};

// -- norms and convex geometry -----------------------------------------------

class NotInPsiClass : public Error {
 public:
  NotInPsiClass(const std::string& violation, std::size_t grid_index)
      : Error("not a norm-generating function: " + violation +
              " at grid index " + std::to_string(grid_index)),
        grid_index_(grid_index) {}
  std::size_t grid_index() const { return grid_index_; }

 private:
  std::size_t grid_index_;
};

class NotStrictlyMonotone : public Error {
 public:
  NotStrictlyMonotone() : Error("norm is not strictly monotone") {}
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& what) : Error(what) {}
};

// -- iteration engines --------------------------------------------------------

class NotAContraction : public Error {
 public:
  explicit NotAContraction(double lipschitz)
      : Error("Lipschitz constant " + std::to_string(lipschitz) +
              " is not < 1") {}
};

class IterationCapReached : public Error {
 public:
  explicit IterationCapReached(const std::string& what) : Error(what) {}
};

class EpsOutOfRange : public Error {
 public:
  explicit EpsOutOfRange(double eps)
      : Error("regularization weight " + std::to_string(eps) +
              " outside (0, 1)") {}
};

class AlphaOutOfRange : public Error {
 public:
  AlphaOutOfRange(double alpha, std::size_t step)
      : Error("step size " + std::to_string(alpha) + " at iteration " +
              std::to_string(step) + " outside [0, 1]") {}
};

class DomainViolation : public Error {
 public:
  explicit DomainViolation(const std::string& what) : Error(what) {}
};

// -- configuration ------------------------------------------------------------

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field_path, const std::string& what)
      : Error("config error at '" + field_path + "': " + what),
        field_path_(field_path) {}
  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace hyperfix

#endif
