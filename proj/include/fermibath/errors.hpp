#pragma once

#include <stdexcept>
#include <string>

namespace fermibath {

enum class ErrorCode {
  invalid_argument,
  domain,
  degenerate_roots,
  resonance_pole,
  quadrature,
  numerical,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Quadrature did not meet its tolerance; carries the best estimate obtained.
class QuadratureFailure : public Error {
public:
  QuadratureFailure(const std::string& what, double best_estimate, double error_estimate)
      : Error(ErrorCode::quadrature, what), best_estimate_(best_estimate),
        error_estimate_(error_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

private:
  double best_estimate_;
  double error_estimate_;
};

// Integrand returned NaN or Inf.
class NonFiniteIntegrand : public Error {
public:
  NonFiniteIntegrand(const std::string& what, double w)
      : Error(ErrorCode::numerical, what), w_(w) {}
  double w() const noexcept { return w_; }

private:
  double w_;
};

}  // namespace fermibath
