#include "fclt/ned.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "fclt/error.hpp"
#include "fclt/estimators.hpp"
#include "fclt/process_sim.hpp"
#include "fclt/rng.hpp"

namespace fclt {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double ssr = std::max(0.0, syy - f.slope * sxy);
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.slope_se = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : INFINITY;
  return f;
}

}  // namespace

Functional Functional::parse(const std::string& s) {
  if (s == "identity") return identity();
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  if (colon == std::string::npos)
    throw ParameterError("functional '" + s + "' needs an argument (abs_pow:R, indicator_leq:X)");
  const std::string arg = s.substr(colon + 1);
  try {
    std::size_t used = 0;
    if (head == "abs_pow") {
      const int r = std::stoi(arg, &used);
      if (used != arg.size() || r < 1) throw ParameterError("abs_pow needs a positive integer");
      return abs_pow(r);
    }
    if (head == "indicator_leq") {
      const double x = std::stod(arg, &used);
      if (used != arg.size()) throw ParameterError("indicator_leq needs a number");
      return indicator_leq(x);
    }
  } catch (const std::logic_error&) {
    throw ParameterError("bad functional argument in '" + s + "'");
  }
  throw ParameterError("unknown functional '" + s + "'");
}

double Functional::operator()(double v) const {
  switch (kind) {
    case Kind::identity: return v;
    case Kind::abs_pow: return fclt::abs_pow(v, r);
    case Kind::indicator_leq: return v <= x ? 1.0 : 0.0;
  }
  return v;
}

std::string Functional::to_string() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::abs_pow: return "abs_pow:" + std::to_string(r);
    case Kind::indicator_leq: {
      std::ostringstream os;
      os << "indicator_leq:" << x;
      return os.str();
    }
  }
  return "?";
}

std::string to_string(DecayFit::Model m) {
  switch (m) {
    case DecayFit::Model::geometric: return "geometric";
    case DecayFit::Model::polynomial: return "polynomial";
    case DecayFit::Model::degenerate: return "degenerate";
  }
  return "?";
}

NedEstimate estimate_ned(const ProcessSpec& spec, const Functional& f, std::size_t k,
                         std::size_t redraws, std::size_t samples, std::uint64_t seed,
                         const NedOptions& opt) {
  if (redraws < 2) throw ParameterError("NED coupling needs at least 2 redraws");
  if (samples < 2) throw ParameterError("NED coupling needs at least 2 outer samples");
  std::optional<ProcessKernel> kernel;
  try {
    kernel.emplace(spec);
  } catch (const CausalityError& e) {
    throw UnsupportedError(std::string("NED coupling needs a causal spec: ") + e.what());
  }
  const auto& dist = kernel->innovation();
  const std::size_t outputs = k + opt.pre_window + 1;
  const std::size_t len = kernel->presample() + outputs;
  const std::size_t held = k + 1;

  // Per outer sample: d = (f0 - avg)^2 and the inner sample variance.
  std::vector<double> d(samples), s2(samples);
  parallel_for(samples, opt.exec, [&](std::size_t o) {
    Rng rng(seed, o);
    std::vector<double> eps(len), x(outputs);
    for (std::size_t m = 0; m < len; ++m) eps[len - 1 - m] = dist.sample(rng);
    kernel->filter(eps, x);
    const double f0 = f(x.back());
    // Deviations from f0, so a window that pins X_0 gives exactly zero.
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> dev(redraws);
    for (std::size_t j = 0; j < redraws; ++j) {
      Rng inner = rng.substream(j);
      for (std::size_t m = held; m < len; ++m) eps[len - 1 - m] = dist.sample(inner);
      kernel->filter(eps, x);
      dev[j] = f(x.back()) - f0;
      sum += dev[j];
    }
    const double avg = sum / static_cast<double>(redraws);
    for (double v : dev) sumsq += (v - avg) * (v - avg);
    d[o] = avg * avg;
    s2[o] = sumsq / static_cast<double>(redraws - 1);
  });

  const auto n = static_cast<double>(samples);
  const auto R = static_cast<double>(redraws);
  double md = 0, mjk = 0;
  for (std::size_t o = 0; o < samples; ++o) {
    md += d[o];
    mjk += d[o] - s2[o] / R;
  }
  md /= n;
  mjk /= n;
  double vd = 0, vjk = 0;
  for (std::size_t o = 0; o < samples; ++o) {
    vd += (d[o] - md) * (d[o] - md);
    const double c = d[o] - s2[o] / R;
    vjk += (c - mjk) * (c - mjk);
  }
  const double se_d = std::sqrt(vd / (n - 1.0) / n);
  const double se_c = std::sqrt(vjk / (n - 1.0) / n);

  NedEstimate est;
  est.k = k;
  est.nu_hat = std::sqrt(md);
  est.nu_hat_jk = std::sqrt(std::max(0.0, mjk));
  // Delta method for the square root; at 0 report the square root of the
  // variance-scale SE instead of dividing by zero.
  est.se = est.nu_hat > 0.0 ? se_d / (2.0 * est.nu_hat) : std::sqrt(se_d);
  est.se_jk = est.nu_hat_jk > 0.0 ? se_c / (2.0 * est.nu_hat_jk) : std::sqrt(se_c);
  return est;
}

DecayFit fit_decay(std::span<const std::size_t> k, std::span<const double> nu) {
  if (k.size() != nu.size()) throw ParameterError("k and nu must have equal length");
  std::vector<double> kg, lg, lk, lkp;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(nu[i] > 0.0)) continue;
    kg.push_back(static_cast<double>(k[i]));
    lg.push_back(std::log(nu[i]));
    if (k[i] >= 1) {
      lk.push_back(std::log(static_cast<double>(k[i])));
      lkp.push_back(std::log(nu[i]));
    }
  }
  DecayFit fit;
  if (kg.empty()) return fit;  // degenerate: finite dependence window
  if (kg.size() < 4) throw ParameterError("decay fit needs at least four positive values");
  const auto geo = least_squares(kg, lg);
  fit.geometric_rate = std::exp(geo.slope);
  fit.geometric_r_squared = geo.r_squared;
  fit.geometric_rate_se = fit.geometric_rate * geo.slope_se;
  if (lk.size() >= 4) {
    const auto poly = least_squares(lk, lkp);
    fit.polynomial_size = -poly.slope;
    fit.polynomial_r_squared = poly.r_squared;
  }
  if (lk.size() >= 4 && fit.polynomial_r_squared > fit.geometric_r_squared) {
    fit.model = DecayFit::Model::polynomial;
    fit.rate = fit.polynomial_size;
    fit.r_squared = fit.polynomial_r_squared;
  } else {
    fit.model = DecayFit::Model::geometric;
    fit.rate = fit.geometric_rate;
    fit.r_squared = fit.geometric_r_squared;
    fit.rate_se = fit.geometric_rate_se;
  }
  return fit;
}

NedScan ned_scan(const ProcessSpec& spec, const Functional& f,
                 std::span<const std::size_t> k_values, std::size_t redraws,
                 std::size_t samples, std::uint64_t seed, const NedOptions& opt) {
  NedScan scan;
  scan.functional = f;
  scan.redraws = redraws;
  scan.samples = samples;
  std::vector<double> nu;
  for (std::size_t k : k_values) {
    scan.k_values.push_back(k);
    scan.estimates.push_back(estimate_ned(spec, f, k, redraws, samples, seed, opt));
    nu.push_back(scan.estimates.back().nu_hat_jk);
  }
  std::size_t positive = std::count_if(nu.begin(), nu.end(), [](double v) { return v > 0.0; });
  if (positive == 0 || positive >= 4) scan.fit = fit_decay(scan.k_values, nu);
  return scan;
}

FunctionalComparison functional_ned_comparison(const ProcessSpec& spec, double x_threshold,
                                               int r, std::span<const std::size_t> k_values,
                                               std::size_t redraws, std::size_t samples,
                                               std::uint64_t seed, const NedOptions& opt) {
  FunctionalComparison cmp;
  cmp.identity = ned_scan(spec, Functional::identity(), k_values, redraws, samples, seed, opt);
  cmp.indicator = ned_scan(spec, Functional::indicator_leq(x_threshold), k_values, redraws,
                           samples, seed, opt);
  cmp.abs_pow = ned_scan(spec, Functional::abs_pow(r), k_values, redraws, samples, seed, opt);
  auto slower = [&](const DecayFit& g) {
    const auto& id = cmp.identity.fit;
    if (id.model == DecayFit::Model::degenerate) return true;
    if (g.model == DecayFit::Model::degenerate) return false;
    const double tol = 3.0 * std::hypot(g.geometric_rate_se, id.geometric_rate_se);
    return g.geometric_rate >= id.geometric_rate - tol;
  };
  cmp.degradation_consistent = slower(cmp.indicator.fit) && slower(cmp.abs_pow.fit);
  return cmp;
}

}  // namespace fclt
