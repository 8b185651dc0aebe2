#include "fclt/kernels.hpp"

#include "fclt/error.hpp"

namespace fclt {

namespace {

void check(std::span<const double> a, std::span<const double> b, std::span<double> out,
           std::size_t max_lag) {
  if (a.size() != b.size()) throw ParameterError("cross products need equal-length series");
  if (out.size() < max_lag + 1) throw ParameterError("output needs max_lag + 1 slots");
}

double dot_shifted(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t t = 0; t < len; ++t) s += a[t] * b[t];
  return s;
}

}  // namespace

void lagged_cross_products_ref(std::span<const double> a, std::span<const double> b,
                               std::size_t max_lag, std::span<double> out) {
  check(a, b, out, max_lag);
  const std::size_t n = a.size();
  for (std::size_t h = 0; h <= max_lag; ++h) {
    double s = 0.0;
    for (std::size_t t = 0; t + h < n; ++t) s += a[t] * b[t + h];
    out[h] = s;
  }
}

void lagged_cross_products(std::span<const double> a, std::span<const double> b,
                           std::size_t max_lag, std::span<double> out, int threads) {
  check(a, b, out, max_lag);
  const std::size_t n = a.size();
  const auto lags = static_cast<long long>(max_lag + 1);
#pragma omp parallel for num_threads(threads > 0 ? threads : 1) schedule(static) if (threads > 1)
  for (long long k = 0; k < lags; ++k) {
    const auto h = static_cast<std::size_t>(k);
    out[h] = h < n ? dot_shifted(a.data(), b.data() + h, n - h) : 0.0;
  }
}

}  // namespace fclt
