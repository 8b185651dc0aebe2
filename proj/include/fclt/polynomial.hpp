#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fclt {

/// Roots of the lag polynomial 1 + c[0] z + ... + c[m-1] z^m via the
/// eigenvalues of its companion matrix. Trailing zeros lower the degree.
/// Throws AccuracyError if the eigen-solver does not converge.
std::vector<std::complex<double>> lag_polynomial_roots(std::span<const double> c);

/// Smallest root modulus; +inf for the constant polynomial.
double min_root_modulus(std::span<const double> c);

}  // namespace fclt
