#include "fclt/quadrature.hpp"

#include <cmath>
#include <memory>
#include <vector>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "fclt/error.hpp"

namespace fclt {

namespace {

constexpr std::size_t kWorkspace = 2000;

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

const bool kHandlerOff = [] {
  gsl_set_error_handler_off();
  return true;
}();

struct Integrand {
  const InnovationDist* dist;
  const ScalarFn* h;
};

double weighted(double x, void* params) {
  const auto* in = static_cast<Integrand*>(params);
  const double d = in->dist->pdf(x);
  if (d == 0.0) return 0.0;
  return (*in->h)(x) * d;
}

// exp(h(x) + log f(x)), so large h is only exponentiated after the density
// has pulled it down.
double exp_weighted(double x, void* params) {
  const auto* in = static_cast<Integrand*>(params);
  const double d = in->dist->pdf(x);
  if (d == 0.0) return 0.0;
  return std::exp((*in->h)(x) + std::log(d));
}

struct Piece {
  double value = 0.0;
  double err = 0.0;
  int status = GSL_SUCCESS;
};

enum class Range { lower_half_line, upper_half_line, bounded };

using Kernel = double (*)(double, void*);

Piece integrate(const InnovationDist& dist, const ScalarFn& h, Kernel kernel, Range range,
                double a, double b) {
  (void)kHandlerOff;
  Workspace ws(gsl_integration_workspace_alloc(kWorkspace));
  Integrand in{&dist, &h};
  gsl_function fn{kernel, &in};
  Piece out;
  const double epsrel = kQuadratureRelTol * 1e-2;
  switch (range) {
    case Range::lower_half_line:
      out.status = gsl_integration_qagil(&fn, b, 0.0, epsrel, kWorkspace, ws.get(),
                                         &out.value, &out.err);
      break;
    case Range::upper_half_line:
      out.status = gsl_integration_qagiu(&fn, a, 0.0, epsrel, kWorkspace, ws.get(),
                                         &out.value, &out.err);
      break;
    case Range::bounded:
      out.status = gsl_integration_qags(&fn, a, b, 0.0, epsrel, kWorkspace, ws.get(),
                                        &out.value, &out.err);
      break;
  }
  return out;
}

double integrate_all(const InnovationDist& dist, const ScalarFn& h, Kernel kernel) {
  Piece lo, hi;
  if (dist.kind == InnovationDist::Kind::uniform) {
    lo = integrate(dist, h, kernel, Range::bounded, dist.support_lo(), 0.0);
    hi = integrate(dist, h, kernel, Range::bounded, 0.0, dist.support_hi());
  } else {
    lo = integrate(dist, h, kernel, Range::lower_half_line, 0.0, 0.0);
    hi = integrate(dist, h, kernel, Range::upper_half_line, 0.0, 0.0);
  }
  const double value = lo.value + hi.value;
  const double err = lo.err + hi.err;
  const double scale = std::abs(lo.value) + std::abs(hi.value);
  const double achieved = scale > 0.0 ? err / scale : err;
  // GSL may flag round-off while still meeting the target; the error
  // estimate is what we hold it to.
  const bool diverged = lo.status == GSL_EDIVERGE || hi.status == GSL_EDIVERGE;
  if (diverged || !std::isfinite(value) || !std::isfinite(err) ||
      (achieved > kQuadratureRelTol && err > 1e-15)) {
    throw AccuracyError("quadrature did not reach relative tolerance " +
                            std::to_string(kQuadratureRelTol) + " (achieved " +
                            std::to_string(achieved) + ")",
                        achieved);
  }
  return value;
}

}  // namespace

double expectation(const InnovationDist& dist, const ScalarFn& h) {
  dist.validate();
  if (dist.discrete()) {
    const double v = 0.5 * h(-1.0) + 0.5 * h(1.0);
    if (!std::isfinite(v)) throw AccuracyError("expectation is not finite", INFINITY);
    return v;
  }
  return integrate_all(dist, h, &weighted);
}

double expectation_exp(const InnovationDist& dist, const ScalarFn& log_h) {
  dist.validate();
  if (dist.discrete()) {
    const double v = 0.5 * std::exp(log_h(-1.0)) + 0.5 * std::exp(log_h(1.0));
    if (!std::isfinite(v)) throw AccuracyError("expectation is not finite", INFINITY);
    return v;
  }
  return integrate_all(dist, log_h, &exp_weighted);
}

double expectation_below(const InnovationDist& dist, const ScalarFn& h, double upper) {
  dist.validate();
  if (dist.discrete()) {
    double v = 0.0;
    if (-1.0 <= upper) v += 0.5 * h(-1.0);
    if (1.0 <= upper) v += 0.5 * h(1.0);
    return v;
  }
  const double lo_edge = dist.support_lo();
  const double hi_edge = dist.support_hi();
  if (upper <= lo_edge) return 0.0;
  if (upper >= hi_edge) return expectation(dist, h);
  std::vector<Piece> pieces;
  const bool bounded = std::isfinite(lo_edge);
  if (upper <= 0.0) {
    pieces.push_back(bounded ? integrate(dist, h, &weighted, Range::bounded, lo_edge, upper)
                             : integrate(dist, h, &weighted, Range::lower_half_line, 0.0, upper));
  } else {
    pieces.push_back(bounded ? integrate(dist, h, &weighted, Range::bounded, lo_edge, 0.0)
                             : integrate(dist, h, &weighted, Range::lower_half_line, 0.0, 0.0));
    pieces.push_back(integrate(dist, h, &weighted, Range::bounded, 0.0, upper));
  }
  double value = 0.0, err = 0.0, scale = 0.0;
  bool diverged = false;
  for (const auto& pc : pieces) {
    value += pc.value;
    err += pc.err;
    scale += std::abs(pc.value);
    diverged = diverged || pc.status == GSL_EDIVERGE;
  }
  const double achieved = scale > 0.0 ? err / scale : err;
  if (diverged || !std::isfinite(value) || (achieved > kQuadratureRelTol && err > 1e-15))
    throw AccuracyError("truncated quadrature did not converge", achieved);
  return value;
}

double moment_functional(const InnovationDist& dist, const ScalarFn& f, double s) {
  if (!(s >= 1.0)) throw ParameterError("moment order s must be >= 1");
  if (s == 1.0) return expectation(dist, [&](double x) { return std::abs(f(x)); });
  if (s == 2.0)
    return expectation(dist, [&](double x) {
      const double v = f(x);
      return v * v;
    });
  return expectation(dist, [&](double x) { return std::pow(std::abs(f(x)), s); });
}

double mean_abs_innovation(const InnovationDist& dist) {
  if (dist.kind == InnovationDist::Kind::standard_normal)
    return std::sqrt(2.0 / std::numbers::pi);
  return expectation(dist, [](double x) { return std::abs(x); });
}

}  // namespace fclt
