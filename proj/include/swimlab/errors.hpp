#pragma once

#include <stdexcept>
#include <string>

namespace swimlab {

/// Argument outside the mathematical domain of an operation (bad index,
/// interior evaluation point, shape parameter outside its box, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The quadrature rule cannot resolve the requested harmonic content.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Boundary data with no decaying exterior Stokes solution (net flux).
class IncompatibleDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A NaN/Inf appeared while integrating, or a singular matrix was met.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SignatureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoCertificateError : public std::runtime_error {
 public:
  NoCertificateError(const std::string& what, int best_rank)
      : std::runtime_error(what), best_rank_(best_rank) {}
  int best_rank() const { return best_rank_; }

 private:
  int best_rank_;
};

class SteeringError : public std::runtime_error {
 public:
  SteeringError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swimlab
