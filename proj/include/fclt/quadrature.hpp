#pragma once

#include <functional>

#include "fclt/innovation.hpp"

namespace fclt {

using ScalarFn = std::function<double(double)>;

/// Relative accuracy every quadrature result is held to.
inline constexpr double kQuadratureRelTol = 1e-8;

/// E[h(eps)] under the innovation law: exact enumeration for the discrete law,
/// adaptive Gauss-Kronrod (split at 0) otherwise. Throws AccuracyError when
/// the relative tolerance is not met, which is also how divergent integrals
/// surface.
double expectation(const InnovationDist& dist, const ScalarFn& h);

/// E[h(eps) 1{eps <= upper}].
double expectation_below(const InnovationDist& dist, const ScalarFn& h, double upper);

/// E[exp(log_h(eps))], with the exponent combined with the log-density
/// before exponentiation.
double expectation_exp(const InnovationDist& dist, const ScalarFn& log_h);

/// E[|f(eps)|^s], s >= 1.
double moment_functional(const InnovationDist& dist, const ScalarFn& f, double s);

/// E|eps| by quadrature, except the closed form sqrt(2/pi) for the normal law.
double mean_abs_innovation(const InnovationDist& dist);

}  // namespace fclt
