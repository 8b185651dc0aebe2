#include "fclt/process_sim.hpp"

#include <algorithm>
#include <cmath>

#include "fclt/conditions.hpp"
#include "fclt/error.hpp"
#include "fclt/quadrature.hpp"

namespace fclt {

namespace {

const AugGarchSpec* garch_part(const ProcessSpec& spec) {
  if (const auto* g = std::get_if<AugGarchSpec>(&spec)) return g;
  if (const auto* a = std::get_if<ArmaSpec>(&spec))
    return std::get_if<AugGarchSpec>(&a->innovation);
  return nullptr;
}

void require_causal(const ArmaSpec& spec) {
  const auto report = check_causality(spec);
  if (!report.satisfied)
    throw CausalityError("AR polynomial has a root of modulus " +
                             std::to_string(report.computed_value) + " (needs > 1)",
                         report.computed_value);
}

// Lambda at the fixed point of the recursion with g_i, c_j replaced by their
// means. Falls back to the mean of g alone when the c-means sum to >= 1.
double mean_field_start(const GarchFunctionals& fn) {
  const auto& s = fn.spec();
  double mean_g = 0.0;
  double mean_c = 0.0;
  try {
    for (std::size_t i = 0; i < s.g_count(); ++i)
      mean_g += expectation(s.innovation, [&](double e) { return fn.g(i, e); });
    for (std::size_t j = 0; j < s.c_count(); ++j)
      mean_c += expectation(s.innovation, [&](double e) { return fn.c(j, e); });
  } catch (const AccuracyError&) {
    mean_c = INFINITY;
  }
  double start = mean_c < 1.0 ? mean_g / (1.0 - mean_c) : mean_g;
  if (!std::isfinite(start) || (s.polynomial() && !(start > 0.0))) start = 1.0;
  return start;
}

}  // namespace

ProcessKernel::ProcessKernel(ProcessSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  if (const auto* a = std::get_if<ArmaSpec>(&spec_)) require_causal(*a);
  if (const auto* g = garch_part(spec_)) {
    garch_.emplace(*g);
    lambda_start_ = mean_field_start(*garch_);
  }
  fingerprint_ = fclt::fingerprint(spec_);
}

std::size_t ProcessKernel::presample() const {
  return garch_ ? garch_->spec().max_lag() : 0;
}

void ProcessKernel::filter(std::span<const double> eps, std::span<double> x) const {
  if (eps.size() != presample() + x.size())
    throw ParameterError("filter needs presample() + n innovations");
  if (std::holds_alternative<IidSpec>(spec_)) {
    std::copy(eps.begin(), eps.end(), x.begin());
  } else if (std::holds_alternative<AugGarchSpec>(spec_)) {
    filter_garch(eps, x);
  } else {
    filter_arma(eps, x);
  }
}

void ProcessKernel::filter_garch(std::span<const double> eps, std::span<double> x) const {
  const auto& fn = *garch_;
  const auto& s = fn.spec();
  const std::size_t h = s.max_lag();
  const std::size_t gc = s.g_count();
  const std::size_t cc = s.c_count();
  const bool power = s.polynomial();
  // hist[j] holds Lambda(sigma^2_{t-1-j}).
  std::vector<double> hist(cc, lambda_start_);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const std::size_t now = h + t;
    double state = 0.0;
    for (std::size_t i = 0; i < gc; ++i) state += fn.g(i, eps[now - 1 - i]);
    for (std::size_t j = 0; j < cc; ++j) state += fn.c(j, eps[now - 1 - j]) * hist[j];
    if (!std::isfinite(state) || (power && !(state > 0.0)))
      throw DivergenceError("volatility recursion left its domain at step " +
                                std::to_string(t + 1) + " (burn-in included)",
                            t + 1);
    const double sigma = std::sqrt(fn.lambda_inverse(state));
    const double v = sigma * eps[now];
    if (!std::isfinite(v))
      throw DivergenceError("non-finite observation at step " + std::to_string(t + 1) +
                                " (burn-in included)",
                            t + 1);
    x[t] = v;
    if (cc > 0) {
      std::copy_backward(hist.begin(), hist.end() - 1, hist.end());
      hist[0] = state;
    }
  }
}

void ProcessKernel::filter_arma(std::span<const double> eps, std::span<double> x) const {
  const auto& a = std::get<ArmaSpec>(spec_);
  std::vector<double> eta;
  std::span<const double> in = eps;
  if (garch_) {
    eta.resize(x.size());
    filter_garch(eps, eta);
    in = eta;
  }
  const std::size_t p = a.phi.size();
  const std::size_t q = a.theta.size();
  for (std::size_t t = 0; t < x.size(); ++t) {
    double v = in[t];
    for (std::size_t j = 1; j <= q && j <= t; ++j) v += a.theta[j - 1] * in[t - j];
    for (std::size_t i = 1; i <= p && i <= t; ++i) v -= a.phi[i - 1] * x[t - i];
    if (!std::isfinite(v))
      throw DivergenceError("non-finite ARMA output at step " + std::to_string(t + 1), t + 1);
    x[t] = v;
  }
}

Path ProcessKernel::simulate(std::size_t n, std::size_t burn_in, std::uint64_t seed,
                             std::uint64_t stream) const {
  if (n == 0) throw ParameterError("path length n must be >= 1");
  Rng rng(seed, stream);
  const auto& dist = innovation();
  std::vector<double> eps(presample() + burn_in + n);
  for (auto& e : eps) e = dist.sample(rng);
  std::vector<double> x(burn_in + n);
  filter(eps, x);
  x.erase(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(burn_in));
  return Path{std::move(x), fingerprint_, seed, stream, burn_in};
}

Path simulate_iid(const InnovationDist& dist, std::size_t n, std::uint64_t seed) {
  return ProcessKernel(IidSpec{dist}).simulate(n, 0, seed);
}

Path simulate_augmented_garch(const AugGarchSpec& spec, std::size_t n, std::size_t burn_in,
                              std::uint64_t seed) {
  return ProcessKernel(spec).simulate(n, burn_in, seed);
}

Path simulate_arma(const ArmaSpec& spec, std::size_t n, std::size_t burn_in, std::uint64_t seed) {
  return ProcessKernel(spec).simulate(n, burn_in, seed);
}

Path simulate(const ProcessSpec& spec, std::size_t n, std::optional<std::size_t> burn_in,
              std::uint64_t seed) {
  return ProcessKernel(spec).simulate(n, burn_in.value_or(default_burn_in(spec)), seed);
}

std::vector<double> causal_ma_coefficients(const ArmaSpec& spec, std::size_t K) {
  spec.validate();
  require_causal(spec);
  const std::size_t p = spec.phi.size();
  const std::size_t q = spec.theta.size();
  std::vector<double> psi(K + 1, 0.0);
  psi[0] = 1.0;
  for (std::size_t j = 1; j <= K; ++j) {
    double v = j <= q ? spec.theta[j - 1] : 0.0;
    for (std::size_t i = 1; i <= std::min(j, p); ++i) v -= spec.phi[i - 1] * psi[j - i];
    psi[j] = v;
  }
  return psi;
}

}  // namespace fclt
