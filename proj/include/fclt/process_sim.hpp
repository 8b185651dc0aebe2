#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fclt/process_spec.hpp"

namespace fclt {

/// One simulated realisation.
struct Path {
  std::vector<double> values;
  std::uint64_t spec_fingerprint = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t burn_in = 0;

  std::size_t size() const { return values.size(); }
  std::span<const double> view() const { return values; }
};

/// A spec compiled for repeated simulation: validation, causality and the
/// quadrature behind the recursion's starting point happen once here.
///
/// `filter` is the deterministic map from innovations to observations. The
/// first `presample()` innovations only feed lags; the rest line up with the
/// outputs. Recursion memory before the first innovation is the
/// mean-field fixed point for the volatility state and zero for ARMA terms.
class ProcessKernel {
public:
  explicit ProcessKernel(ProcessSpec spec);

  const ProcessSpec& spec() const { return spec_; }
  const InnovationDist& innovation() const { return driving_innovation(spec_); }
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::size_t presample() const;
  /// Starting value of Lambda(sigma^2) for GARCH-type specs.
  double lambda_start() const { return lambda_start_; }

  /// eps.size() must equal presample() + x.size(). Throws DivergenceError.
  void filter(std::span<const double> eps, std::span<double> x) const;

  Path simulate(std::size_t n, std::size_t burn_in, std::uint64_t seed,
                std::uint64_t stream = 0) const;

private:
  void filter_garch(std::span<const double> eps, std::span<double> x) const;
  void filter_arma(std::span<const double> eps, std::span<double> x) const;

  ProcessSpec spec_;
  std::uint64_t fingerprint_ = 0;
  std::optional<GarchFunctionals> garch_;
  double lambda_start_ = 0.0;
};

Path simulate_iid(const InnovationDist& dist, std::size_t n, std::uint64_t seed);
Path simulate_augmented_garch(const AugGarchSpec& spec, std::size_t n, std::size_t burn_in,
                              std::uint64_t seed);
/// Throws CausalityError for a non-causal spec.
Path simulate_arma(const ArmaSpec& spec, std::size_t n, std::size_t burn_in, std::uint64_t seed);
/// Dispatches on the spec; burn_in defaults to default_burn_in(spec).
Path simulate(const ProcessSpec& spec, std::size_t n, std::optional<std::size_t> burn_in,
              std::uint64_t seed);

/// psi_0..psi_K of the MA(infinity) form X_t = sum_j psi_j eps_{t-j}.
/// Throws CausalityError for a non-causal spec.
std::vector<double> causal_ma_coefficients(const ArmaSpec& spec, std::size_t K);

}  // namespace fclt
