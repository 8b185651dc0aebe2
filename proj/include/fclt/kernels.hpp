#pragma once

// Lagged cross-product sums, the inner loop of every long-run covariance
// estimate here:
//   out[h] = sum_{t=0}^{n-1-h} a[t] * b[t+h],   h = 0..max_lag.
// The reference version is a plain double loop; the OpenMP version splits
// the lags across threads and vectorises the inner sum.

#include <cstddef>
#include <span>

namespace fclt {

void lagged_cross_products_ref(std::span<const double> a, std::span<const double> b,
                               std::size_t max_lag, std::span<double> out);

void lagged_cross_products(std::span<const double> a, std::span<const double> b,
                           std::size_t max_lag, std::span<double> out, int threads = 1);

}  // namespace fclt
