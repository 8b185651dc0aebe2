#include "fclt/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "fclt/error.hpp"

namespace fclt {

std::vector<std::complex<double>> lag_polynomial_roots(std::span<const double> c) {
  // Trailing zero coefficients only lower the degree.
  while (!c.empty() && c.back() == 0.0) c = c.first(c.size() - 1);
  const auto m = static_cast<Eigen::Index>(c.size());
  if (m == 0) return {};
  const double lead = c.back();

  // Monic form z^m + a_{m-1} z^{m-1} + ... + a_0 with a_k = c_k / c_m,
  // where c_0 = 1 is the constant term.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double ck = (k == 0) ? 1.0 : c[static_cast<std::size_t>(k - 1)];
    companion(0, m - 1 - k) = -ck / lead;
  }
  for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw AccuracyError("companion-matrix eigenvalue iteration did not converge", 1.0);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return roots;
}

double min_root_modulus(std::span<const double> c) {
  const auto roots = lag_polynomial_roots(c);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : roots) best = std::min(best, std::abs(z));
  return best;
}

}  // namespace fclt
