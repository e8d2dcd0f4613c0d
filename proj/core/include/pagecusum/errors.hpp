#pragma once

#include <stdexcept>
#include <string>

namespace pagecusum {

/// Invalid parameters, configuration or input data. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Training sample with zero spread; sigma_hat cannot be formed.
class DegenerateTrainingError : public std::runtime_error {
 public:
  explicit DegenerateTrainingError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the range where a formula is defined (e.g. N(m, x) for too large x).
class OutOfRangeError : public std::out_of_range {
 public:
  explicit OutOfRangeError(const std::string& what) : std::out_of_range(what) {}
};

void require_gamma(double gamma);
void require_alpha(double alpha);

}  // namespace pagecusum
