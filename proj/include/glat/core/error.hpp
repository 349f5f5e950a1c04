#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace glat {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the parametric domain of a spline.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied shape or solver parameter is out of its valid range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A fit or composition could not reach the requested tolerance.
class ApproximationError : public Error {
 public:
  ApproximationError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Degenerate geometry: vanishing normals, inverted cells, zero-length struts.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra failures: singular systems, eigen-solver breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Aggregated configuration problems; carries every violation found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "configuration invalid:";
    for (const auto& s : issues) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> issues_;
};

}  // namespace glat
