#include "fclt/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "fclt/error.hpp"

namespace fclt {

namespace {

void require_sample(std::span<const double> x) {
  if (x.empty()) throw ParameterError("estimators need a non-empty sample");
}

void require_order(int r) {
  if (r < 1) throw ParameterError("moment order r must be a positive integer");
}

}  // namespace

double abs_pow(double v, int r) {
  const double a = std::abs(v);
  switch (r) {
    case 1: return a;
    case 2: return a * a;
    case 3: return a * a * a;
    case 4: {
      const double a2 = a * a;
      return a2 * a2;
    }
    default: return std::pow(a, r);
  }
}

std::size_t quantile_rank(std::size_t n, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile level p must lie in (0,1)");
  if (n == 0) throw ParameterError("quantile of an empty sample");
  const double np = static_cast<double>(n) * p;
  const double nearest = std::round(np);
  double k = std::abs(np - nearest) <= 1e-12 * std::max(1.0, np) ? nearest : std::ceil(np);
  k = std::clamp(k, 1.0, static_cast<double>(n));
  return static_cast<std::size_t>(k);
}

double sample_quantile(std::span<const double> x, double p) {
  const std::size_t k = quantile_rank(x.size(), p);
  std::vector<double> work(x.begin(), x.end());
  auto kth = work.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(work.begin(), kth, work.end());
  return *kth;
}

DoubleDouble mean_dd(std::span<const double> x) {
  require_sample(x);
  DoubleDouble s;
  for (double v : x) s = s + v;
  return s / static_cast<double>(x.size());
}

double sample_mean(std::span<const double> x) { return mean_dd(x).value(); }

DoubleDouble abs_power_sum_dd(std::span<const double> x, int r, DoubleDouble centre) {
  require_order(r);
  DoubleDouble s;
  for (double v : x) {
    const DoubleDouble d = abs(DoubleDouble{v, 0.0} - centre);
    s = s + pow(d, r);
  }
  return s;
}

double centred_abs_moment(std::span<const double> x, int r) {
  require_sample(x);
  require_order(r);
  const double xbar = sample_mean(x);
  DoubleDouble s;
  for (double v : x) s = s + abs_pow(v - xbar, r);
  return (s / static_cast<double>(x.size())).value();
}

double known_mean_abs_moment(std::span<const double> x, int r, double mu) {
  require_sample(x);
  require_order(r);
  DoubleDouble s;
  for (double v : x) s = s + abs_pow(v - mu, r);
  return (s / static_cast<double>(x.size())).value();
}

double empirical_cdf(std::span<const double> x, double t) {
  require_sample(x);
  const auto count = std::count_if(x.begin(), x.end(), [t](double v) { return v <= t; });
  return static_cast<double>(count) / static_cast<double>(x.size());
}

EstimatePair estimator_vector(std::span<const double> x, double p, int r) {
  return {sample_quantile(x, p), centred_abs_moment(x, r), x.size(), p, r};
}

std::size_t prefix_length(std::size_t n, double t) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * t + 1e-9));
}

std::vector<EstimatePair> partial_sum_process(std::span<const double> x, double p, int r,
                                              std::span<const double> t_grid) {
  std::vector<EstimatePair> out;
  out.reserve(t_grid.size());
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t > prev && t <= 1.0))
      throw ParameterError("t_grid must be strictly increasing within (0, 1]");
    prev = t;
    const std::size_t len = prefix_length(x.size(), t);
    if (len == 0) throw ParameterError("prefix for t = " + std::to_string(t) + " is empty");
    out.push_back(estimator_vector(x.first(len), p, r));
  }
  return out;
}

}  // namespace fclt
