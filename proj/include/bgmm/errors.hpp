#pragma once

#include <stdexcept>
#include <string>

namespace bgmm {

// Bad user input: malformed config/CSV, dimension mismatches, invalid options.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown inside an estimator or the sampler. Replication
// drivers catch this and count the run as failed instead of crashing.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Singular or hopelessly ill-conditioned matrix where an inverse was needed.
class SingularMatrixError : public NumericalError {
 public:
  explicit SingularMatrixError(const std::string& what) : NumericalError(what) {}
};

// The 2SLS starting value could not be computed (degenerate projection).
class InitializerError : public NumericalError {
 public:
  explicit InitializerError(const std::string& what) : NumericalError(what) {}
};

}  // namespace bgmm
