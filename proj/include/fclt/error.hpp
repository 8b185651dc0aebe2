#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fclt {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument or model parameter is outside its admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// The volatility or ARMA recursion produced a non-finite or invalid state.
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// An ARMA autoregressive polynomial has a root inside or on the unit circle.
class CausalityError : public Error {
public:
  CausalityError(const std::string& what, double min_root_modulus)
      : Error(what), modulus_(min_root_modulus) {}
  double min_root_modulus() const noexcept { return modulus_; }

private:
  double modulus_;
};

/// Quadrature (or another numerical routine) failed to reach the tolerance.
class AccuracyError : public Error {
public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_; }

private:
  double achieved_;
};

/// Zero or negative density / singular matrix where an inverse is needed.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// A condition checker was handed a model from the other Lambda group.
class WrongGroupError : public Error {
public:
  using Error::Error;
};

/// The requested operation is not defined for this kind of model.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// File or format problems.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace fclt
