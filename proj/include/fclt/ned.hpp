#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fclt/parallel.hpp"
#include "fclt/process_spec.hpp"

namespace fclt {

/// Function of X_0 whose near-epoch dependence is measured.
struct Functional {
  enum class Kind { identity, abs_pow, indicator_leq };
  Kind kind = Kind::identity;
  int r = 1;         // abs_pow
  double x = 0.0;    // indicator_leq

  static Functional identity() { return {}; }
  static Functional abs_pow(int r) { return {Kind::abs_pow, r, 0.0}; }
  static Functional indicator_leq(double x) { return {Kind::indicator_leq, 1, x}; }
  /// "identity", "abs_pow:R" or "indicator_leq:X".
  static Functional parse(const std::string& s);

  double operator()(double v) const;
  std::string to_string() const;
};

struct NedOptions {
  std::size_t pre_window = 200;
  ExecPolicy exec;
};

/// Coupling estimate of nu(k) = || f(X_0) - E[f(X_0) | eps_{-k..0}] ||_2.
struct NedEstimate {
  std::size_t k = 0;
  double nu_hat = 0.0;     // raw: sqrt(mean (f - inner average)^2)
  double se = 0.0;
  double nu_hat_jk = 0.0;  // with the finite-R inflation removed
  double se_jk = 0.0;
};

/// Outer sample o draws its innovations from stream o and holds
/// eps_{-k..0}; the R redraws of everything older come from substreams of o.
/// Innovations are laid out from time 0 backwards, so scans over k share the
/// conditioning window (common random numbers).
NedEstimate estimate_ned(const ProcessSpec& spec, const Functional& f, std::size_t k,
                         std::size_t redraws, std::size_t samples, std::uint64_t seed,
                         const NedOptions& opt = {});

struct DecayFit {
  enum class Model { geometric, polynomial, degenerate };
  Model model = Model::degenerate;
  /// Geometric: rho in nu(k) ~ C rho^k. Polynomial: tau in nu(k) ~ C k^{-tau}.
  double rate = 0.0;
  double rate_se = 0.0;
  double r_squared = 0.0;
  double geometric_rate = 0.0;
  double geometric_r_squared = 0.0;
  double geometric_rate_se = 0.0;
  double polynomial_size = 0.0;
  double polynomial_r_squared = 0.0;
};
std::string to_string(DecayFit::Model m);

/// Least squares of log nu against k and against log k; the better R^2 wins.
/// All-zero input gives a degenerate fit; otherwise at least four positive
/// values are needed (ParameterError).
DecayFit fit_decay(std::span<const std::size_t> k, std::span<const double> nu);

struct NedScan {
  Functional functional;
  std::vector<std::size_t> k_values;
  std::vector<NedEstimate> estimates;
  std::size_t redraws = 0;
  std::size_t samples = 0;
  DecayFit fit;  // on the jackknife-corrected values
};

NedScan ned_scan(const ProcessSpec& spec, const Functional& f,
                 std::span<const std::size_t> k_values, std::size_t redraws,
                 std::size_t samples, std::uint64_t seed, const NedOptions& opt = {});

struct FunctionalComparison {
  NedScan identity;
  NedScan indicator;
  NedScan abs_pow;
  /// Functional scans decay no faster than the identity scan, up to 3
  /// standard errors of the fitted geometric rates.
  bool degradation_consistent = false;
};

FunctionalComparison functional_ned_comparison(const ProcessSpec& spec, double x_threshold,
                                               int r, std::span<const std::size_t> k_values,
                                               std::size_t redraws, std::size_t samples,
                                               std::uint64_t seed, const NedOptions& opt = {});

}  // namespace fclt
