#include "fclt/innovation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_randist.h>

#include "fclt/error.hpp"

namespace fclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt3 = std::sqrt(3.0);

double t_scale(double dof) { return std::sqrt((dof - 2.0) / dof); }

}  // namespace

void InnovationDist::validate() const {
  if (kind == Kind::student_t && !(dof > 2.0))
    throw ParameterError("student_t innovations need dof > 2 (got " +
                         std::to_string(dof) + ")");
}

double InnovationDist::sample(Rng& rng) const {
  switch (kind) {
    case Kind::standard_normal:
      return rng.normal();
    case Kind::student_t: {
      const double z = rng.normal();
      std::gamma_distribution<double> chi2(dof / 2.0, 2.0);
      const double v = chi2(rng);
      return z / std::sqrt(v / dof) * t_scale(dof);
    }
    case Kind::rademacher:
      return (rng() >> 63) ? 1.0 : -1.0;
    case Kind::uniform:
      return (2.0 * rng.uniform() - 1.0) * kSqrt3;
  }
  return 0.0;
}

double InnovationDist::pdf(double x) const {
  switch (kind) {
    case Kind::standard_normal:
      return gsl_ran_ugaussian_pdf(x);
    case Kind::student_t: {
      const double s = t_scale(dof);
      return gsl_ran_tdist_pdf(x / s, dof) / s;
    }
    case Kind::rademacher:
      return 0.0;
    case Kind::uniform:
      return std::abs(x) <= kSqrt3 ? 1.0 / (2.0 * kSqrt3) : 0.0;
  }
  return 0.0;
}

double InnovationDist::log_pdf(double x) const {
  switch (kind) {
    case Kind::standard_normal:
      return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    case Kind::student_t: {
      const double s = t_scale(dof);
      const double y = x / s;
      return std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
             0.5 * std::log(dof * std::numbers::pi) -
             0.5 * (dof + 1.0) * std::log1p(y * y / dof) - std::log(s);
    }
    case Kind::rademacher:
      return -kInf;
    case Kind::uniform:
      return std::abs(x) <= kSqrt3 ? -std::log(2.0 * kSqrt3) : -kInf;
  }
  return -kInf;
}

double InnovationDist::cdf(double x) const {
  switch (kind) {
    case Kind::standard_normal:
      return gsl_cdf_ugaussian_P(x);
    case Kind::student_t:
      return gsl_cdf_tdist_P(x / t_scale(dof), dof);
    case Kind::rademacher:
      return x < -1.0 ? 0.0 : (x < 1.0 ? 0.5 : 1.0);
    case Kind::uniform:
      if (x <= -kSqrt3) return 0.0;
      if (x >= kSqrt3) return 1.0;
      return (x + kSqrt3) / (2.0 * kSqrt3);
  }
  return 0.0;
}

double InnovationDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile level must lie in (0,1)");
  switch (kind) {
    case Kind::standard_normal:
      return gsl_cdf_ugaussian_Pinv(p);
    case Kind::student_t:
      return gsl_cdf_tdist_Pinv(p, dof) * t_scale(dof);
    case Kind::rademacher:
      return p <= 0.5 ? -1.0 : 1.0;
    case Kind::uniform:
      return (2.0 * p - 1.0) * kSqrt3;
  }
  return 0.0;
}

double InnovationDist::support_lo() const {
  switch (kind) {
    case Kind::rademacher: return -1.0;
    case Kind::uniform: return -kSqrt3;
    default: return -kInf;
  }
}

double InnovationDist::support_hi() const { return -support_lo(); }

double InnovationDist::abs_moment(double k) const {
  if (k == 0.0) return 1.0;
  if (k < 0.0) throw ParameterError("abs_moment needs a non-negative order");
  switch (kind) {
    case Kind::standard_normal:
      return std::pow(2.0, k / 2.0) * std::tgamma((k + 1.0) / 2.0) /
             std::sqrt(std::numbers::pi);
    case Kind::student_t: {
      if (k >= dof) return kInf;
      const double log_m = 0.5 * k * std::log(dof - 2.0) + std::lgamma((k + 1.0) / 2.0) +
                           std::lgamma((dof - k) / 2.0) - std::lgamma(dof / 2.0) -
                           0.5 * std::log(std::numbers::pi);
      return std::exp(log_m);
    }
    case Kind::rademacher:
      return 1.0;
    case Kind::uniform:
      return std::pow(3.0, k / 2.0) / (k + 1.0);
  }
  return 0.0;
}

std::string to_string(InnovationDist::Kind kind) {
  switch (kind) {
    case InnovationDist::Kind::standard_normal: return "standard_normal";
    case InnovationDist::Kind::student_t: return "student_t";
    case InnovationDist::Kind::rademacher: return "rademacher";
    case InnovationDist::Kind::uniform: return "uniform";
  }
  return "?";
}

InnovationDist::Kind innovation_kind_from_string(const std::string& s) {
  if (s == "standard_normal" || s == "normal") return InnovationDist::Kind::standard_normal;
  if (s == "student_t") return InnovationDist::Kind::student_t;
  if (s == "rademacher") return InnovationDist::Kind::rademacher;
  if (s == "uniform") return InnovationDist::Kind::uniform;
  throw ParameterError("unknown innovation kind '" + s + "'");
}

}  // namespace fclt
