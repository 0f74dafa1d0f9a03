#pragma once

#include <stdexcept>
#include <string>

namespace bose2d {

/// Argument outside the mathematical domain of a function (x <= 0 for Γ(0,x) etc).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Input is valid mathematically but outside the regime where the formula is meaningful.
class regime_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Result would underflow; the caller should switch to the exponentially scaled variant.
class underflow_error : public std::range_error {
public:
  using std::range_error::range_error;
};

/// An iterative method failed to reach its tolerance.
class convergence_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Implicit equation has no root in the admissible bracket.
class no_solution_error : public regime_error {
public:
  using regime_error::regime_error;
};

/// Not enough data points for a fit or extrapolation.
class insufficient_data_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A theory line was evaluated outside its stated validity window.
class validity_error : public regime_error {
public:
  validity_error(const std::string &what, double lo, double hi)
      : regime_error(what), lo_(lo), hi_(hi) {}
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

private:
  double lo_;
  double hi_;
};

/// Malformed configuration or data file.
class parse_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Stochastic simulation became unusable (population collapse/explosion).
class simulation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace bose2d
