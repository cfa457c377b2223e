#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace platevi {

using Index = std::int32_t;
using Vector = std::vector<double>;

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad degree, n = 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative or direct solver could not deliver a solution.
class SolverError : public Error {
 public:
  enum class Kind { NotConverged, NotSpd, Singular };

  SolverError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A quadratic form that should be positive came out negative: the penalty
/// parameter is below the coercivity threshold for this mesh.
class CoercivityError : public Error {
 public:
  using Error::Error;
};

}  // namespace platevi
