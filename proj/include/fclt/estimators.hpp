#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fclt/double_double.hpp"

namespace fclt {

/// Sample quantile and r-th absolute centred sample moment of one sample.
struct EstimatePair {
  double q_hat = 0.0;
  double m_hat = 0.0;
  std::size_t n = 0;
  double p = 0.0;
  int r = 0;
};

/// ceil(n p), clamped to [1, n]. Products within 1e-12 relative of an
/// integer are treated as that integer, so 0.5 * 4 gives 2 and not 3.
std::size_t quantile_rank(std::size_t n, double p);

/// X_(ceil(np)) by partial selection on a copy. Throws ParameterError for
/// p outside (0,1) or an empty sample.
double sample_quantile(std::span<const double> x, double p);

/// Compensated (double-double) mean.
DoubleDouble mean_dd(std::span<const double> x);
double sample_mean(std::span<const double> x);

/// sum_i |x_i - centre|^r accumulated in double-double.
DoubleDouble abs_power_sum_dd(std::span<const double> x, int r, DoubleDouble centre);

/// (1/n) sum |x_i - xbar|^r.
double centred_abs_moment(std::span<const double> x, int r);
/// (1/n) sum |x_i - mu|^r.
double known_mean_abs_moment(std::span<const double> x, int r, double mu);

/// (1/n) #{i : x_i <= t}.
double empirical_cdf(std::span<const double> x, double t);

EstimatePair estimator_vector(std::span<const double> x, double p, int r);

/// floor(n t) with a 1e-9 guard against representation error in t.
std::size_t prefix_length(std::size_t n, double t);

/// estimator_vector on each prefix x[0, floor(n t)). The grid must be
/// strictly increasing within (0, 1]; an empty prefix is a ParameterError.
std::vector<EstimatePair> partial_sum_process(std::span<const double> x, double p, int r,
                                              std::span<const double> t_grid);

/// |v|^r for integer r >= 1.
double abs_pow(double v, int r);

}  // namespace fclt
