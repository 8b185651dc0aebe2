#include "fclt/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "fclt/conditions.hpp"
#include "fclt/error.hpp"
#include "fclt/estimators.hpp"
#include "fclt/kernels.hpp"
#include "fclt/process_sim.hpp"
#include "fclt/quadrature.hpp"

namespace fclt {

using nlohmann::json;

namespace {

constexpr double kNearSingular = 1e-8;

json matrix_json(const Matrix3& m) {
  json out = json::array();
  for (const auto& row : m) {
    json jr = json::array();
    for (double v : row) jr.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    out.push_back(jr);
  }
  return out;
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

struct IidMoments {
  double mu, var_x, m_r, var_v, cov_xv, q, f, cov_ind_x, cov_ind_v;
};

IidMoments iid_moments(const InnovationDist& dist, double p, int r) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile level p must lie in (0,1)");
  if (r < 1) throw ParameterError("moment order r must be >= 1");
  dist.validate();
  IidMoments m{};
  m.q = dist.quantile(p);
  m.f = dist.pdf(m.q);
  if (!(m.f > 0.0))
    throw SingularityError("density at the quantile is zero; the quantile CLT is degenerate");
  m.mu = expectation(dist, [](double x) { return x; });
  const double mu = m.mu;
  m.var_x = expectation(dist, [mu](double x) { return (x - mu) * (x - mu); });
  m.m_r = expectation(dist, [=](double x) { return abs_pow(x - mu, r); });
  const double m2r = expectation(dist, [=](double x) { return abs_pow(x - mu, 2 * r); });
  m.var_v = m2r - m.m_r * m.m_r;
  m.cov_xv = expectation(dist, [=](double x) { return (x - mu) * abs_pow(x - mu, r); });
  m.cov_ind_x = expectation_below(dist, [mu](double x) { return x - mu; }, m.q);
  m.cov_ind_v = expectation_below(dist, [=](double x) { return abs_pow(x - mu, r); }, m.q) -
                p * m.m_r;
  return m;
}

Eigen::Matrix3d to_eigen(const Matrix3& m) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = m[i][j];
  return e;
}

}  // namespace

std::string to_string(LrcMethod m) {
  switch (m) {
    case LrcMethod::iid_closed_form: return "iid_closed_form";
    case LrcMethod::replication_mc: return "replication_mc";
    case LrcMethod::hac_bartlett: return "hac_bartlett";
  }
  return "?";
}

double a_r_coefficient(const InnovationDist& dist, int r, double mu) {
  if (r < 1) throw ParameterError("moment order r must be >= 1");
  return r * expectation(dist, [=](double x) {
           const double d = x - mu;
           return std::pow(d, r - 1) * std::pow(sgn(d), r);
         });
}

TrivariateLRC iid_trivariate(const InnovationDist& dist, double p, int r) {
  const auto m = iid_moments(dist, p, r);
  TrivariateLRC out;
  auto& s = out.sigma;
  s[0][0] = m.var_x;
  s[1][1] = m.var_v;
  s[2][2] = p * (1.0 - p) / (m.f * m.f);
  s[0][1] = s[1][0] = m.cov_xv;
  s[0][2] = s[2][0] = -m.cov_ind_x / m.f;
  s[1][2] = s[2][1] = -m.cov_ind_v / m.f;
  out.method = LrcMethod::iid_closed_form;
  out.f_at_q = m.f;
  out.q_true = m.q;
  out.p = p;
  out.r = r;
  out.near_singular = eigen_ratio(s) < kNearSingular;
  return out;
}

Gamma2 iid_gamma(const InnovationDist& dist, double p, int r) {
  const auto m = iid_moments(dist, p, r);
  const double a = a_r_coefficient(dist, r, m.mu);
  Gamma2 g;
  g.a_r = a;
  g.g11 = p * (1.0 - p) / (m.f * m.f);
  g.g22 = a * a * m.var_x + m.var_v - 2.0 * a * m.cov_xv;
  g.g12 = (a * m.cov_ind_x - m.cov_ind_v) / m.f;
  return g;
}

Gamma2 gamma_from_trivariate(const TrivariateLRC& lrc, double a_r) {
  const auto& s = lrc.sigma;
  Gamma2 g;
  g.a_r = a_r;
  g.g11 = s[2][2];
  g.g22 = a_r * a_r * s[0][0] + s[1][1] - 2.0 * a_r * s[0][1];
  g.g12 = -a_r * s[0][2] + s[1][2];
  return g;
}

Matrix2 gamma_standard_errors(const TrivariateLRC& lrc, double a_r) {
  Matrix2 se{};
  const std::size_t m = lrc.replicates.size();
  if (m < 2) return se;
  std::array<std::vector<double>, 3> vals;
  for (const auto& rep : lrc.replicates) {
    TrivariateLRC one;
    one.sigma = rep;
    const auto g = gamma_from_trivariate(one, a_r);
    vals[0].push_back(g.g11);
    vals[1].push_back(g.g22);
    vals[2].push_back(g.g12);
  }
  std::array<double, 3> sd{};
  for (int k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (double v : vals[k]) mean += v;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double v : vals[k]) ss += (v - mean) * (v - mean);
    sd[k] = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
  }
  se[0][0] = sd[0];
  se[1][1] = sd[1];
  se[0][1] = se[1][0] = sd[2];
  return se;
}

TrivariateLRC trivariate_long_run_cov_mc(const ProcessSpec& spec, double p, int r,
                                         double q_true, double f_at_q, std::size_t max_lag,
                                         std::size_t n_per_rep, std::size_t n_reps,
                                         std::uint64_t seed, const LrcOptions& opt) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile level p must lie in (0,1)");
  if (!(f_at_q > 0.0)) throw SingularityError("f_at_q must be positive");
  if (n_reps < 2) throw ParameterError("replication MC needs n_reps >= 2");
  if (n_per_rep <= max_lag + 1) throw ParameterError("n_per_rep must exceed max_lag + 1");
  require_admissible(spec, r);
  const ProcessKernel kernel(spec);
  const std::size_t burn = opt.burn_in.value_or(default_burn_in(spec));
  const std::size_t lags = max_lag + 1;
  const std::size_t n = n_per_rep;

  struct RepSums {
    std::array<std::vector<double>, 9> cross;  // index a * 3 + b
    std::array<double, 3> total{};
    std::array<std::vector<double>, 3> head;  // sum of the first h values
    std::array<std::vector<double>, 3> tail;  // sum of the last h values
  };
  std::vector<RepSums> sums(n_reps);

  parallel_for(n_reps, opt.exec, [&](std::size_t i) {
    const Path path = kernel.simulate(n, burn, seed, i);
    std::array<std::vector<double>, 3> series;
    for (auto& s : series) s.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double x = path.values[t];
      series[0][t] = x;
      series[1][t] = abs_pow(x - opt.mu, r);
      series[2][t] = x <= q_true ? 1.0 : 0.0;
    }
    RepSums& rs = sums[i];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        auto& out = rs.cross[a * 3 + b];
        out.assign(lags, 0.0);
        lagged_cross_products(series[a], series[b], max_lag, out);
      }
      rs.head[a].assign(lags, 0.0);
      rs.tail[a].assign(lags, 0.0);
      for (std::size_t h = 1; h < lags; ++h) {
        rs.head[a][h] = rs.head[a][h - 1] + series[a][h - 1];
        rs.tail[a][h] = rs.tail[a][h - 1] + series[a][n - h];
      }
      double tot = 0.0;
      for (double v : series[a]) tot += v;
      rs.total[a] = tot;
    }
  });

  std::array<double, 3> grand{};
  for (const auto& rs : sums)
    for (int a = 0; a < 3; ++a) grand[a] += rs.total[a];
  for (auto& g : grand) g /= static_cast<double>(n_reps * n);

  const std::array<double, 3> scale{1.0, 1.0, -1.0 / f_at_q};
  TrivariateLRC out;
  out.method = LrcMethod::replication_mc;
  out.truncation_lag = max_lag;
  out.f_at_q = f_at_q;
  out.q_true = q_true;
  out.p = p;
  out.r = r;
  out.n_reps = n_reps;
  out.n_per_rep = n;
  out.replicates.resize(n_reps);
  // Mean (over replications) of gamma_ab(h) + gamma_ba(h), for the tail fit.
  std::array<std::vector<double>, 9> lag_profile;
  for (auto& lp : lag_profile) lp.assign(lags, 0.0);

  for (std::size_t i = 0; i < n_reps; ++i) {
    const RepSums& rs = sums[i];
    auto gamma = [&](int a, int b, std::size_t h) {
      const double len = static_cast<double>(n - h);
      const double sa = rs.total[a] - rs.tail[a][h];
      const double sb = rs.total[b] - rs.head[b][h];
      return (rs.cross[a * 3 + b][h] - grand[b] * sa - grand[a] * sb +
              len * grand[a] * grand[b]) /
             len;
    };
    Matrix3& rep = out.replicates[i];
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        double v = gamma(a, b, 0);
        for (std::size_t h = 1; h < lags; ++h) {
          const double both = gamma(a, b, h) + gamma(b, a, h);
          v += both;
          lag_profile[a * 3 + b][h] += both * scale[a] * scale[b] / static_cast<double>(n_reps);
        }
        rep[a][b] = rep[b][a] = v * scale[a] * scale[b];
      }
    }
  }

  const auto m = static_cast<double>(n_reps);
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      double mean = 0.0;
      for (const auto& rep : out.replicates) mean += rep[a][b];
      mean /= m;
      double ss = 0.0;
      for (const auto& rep : out.replicates) ss += (rep[a][b] - mean) * (rep[a][b] - mean);
      out.sigma[a][b] = out.sigma[b][a] = mean;
      out.mc_se[a][b] = out.mc_se[b][a] = std::sqrt(ss / (m - 1.0) / m);

      // Geometric fit of |lag profile| over h = 1..max_lag.
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int k = 0;
      const auto& lp = lag_profile[a * 3 + b];
      for (std::size_t h = 1; h < lags; ++h) {
        if (lp[h] == 0.0) continue;
        const double y = std::log(std::abs(lp[h]));
        sx += static_cast<double>(h);
        sy += y;
        sxx += static_cast<double>(h * h);
        sxy += static_cast<double>(h) * y;
        ++k;
      }
      double bound = NAN;
      if (k >= 3) {
        const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        const double icept = (sy - slope * sx) / k;
        if (slope < 0.0) {
          const double rho = std::exp(slope);
          bound = std::exp(icept + slope * static_cast<double>(max_lag)) * rho / (1.0 - rho);
        }
      }
      out.tail_bound[a][b] = out.tail_bound[b][a] = bound;
    }
  }
  out.near_singular = eigen_ratio(out.sigma) < kNearSingular;
  return out;
}

double kernel_density(std::span<const double> x, double at) {
  const std::size_t n = x.size();
  if (n < 2) throw ParameterError("kernel density needs at least two points");
  const double mean = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = sorted[quantile_rank(n, 0.75) - 1] - sorted[quantile_rank(n, 0.25) - 1];
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  if (!(h > 0.0)) throw SingularityError("kernel bandwidth is zero (constant sample)");
  double acc = 0.0;
  for (double v : x) {
    const double z = (at - v) / h;
    acc += std::exp(-0.5 * z * z);
  }
  return acc / (static_cast<double>(n) * h * std::sqrt(2.0 * std::numbers::pi));
}

TrivariateLRC trivariate_long_run_cov_hac(std::span<const double> x, double p, int r,
                                          std::optional<std::size_t> bandwidth) {
  const std::size_t n = x.size();
  if (n < 2) throw ParameterError("HAC needs at least two observations");
  const std::size_t b =
      bandwidth.value_or(static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n)))));
  if (n < 10 * b) throw ParameterError("HAC needs n >= 10 * bandwidth");
  const double q_hat = sample_quantile(x, p);
  const double f_hat = kernel_density(x, q_hat);
  if (!(f_hat > 0.0)) throw SingularityError("kernel density estimate at the quantile is zero");
  const double xbar = sample_mean(x);

  std::array<std::vector<double>, 3> series;
  for (auto& s : series) s.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    series[0][t] = x[t];
    series[1][t] = abs_pow(x[t] - xbar, r);
    series[2][t] = x[t] <= q_hat ? 1.0 : 0.0;
  }
  for (auto& s : series) {
    const double m = sample_mean(s);
    for (auto& v : s) v -= m;
  }
  const std::array<double, 3> scale{1.0, 1.0, -1.0 / f_hat};
  TrivariateLRC out;
  std::vector<double> ab(b + 1), ba(b + 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      lagged_cross_products_ref(series[i], series[j], b, ab);
      lagged_cross_products_ref(series[j], series[i], b, ba);
      double v = ab[0];
      for (std::size_t h = 1; h <= b; ++h) {
        const double w = 1.0 - static_cast<double>(h) / static_cast<double>(b + 1);
        v += w * (ab[h] + ba[h]);
      }
      v /= static_cast<double>(n);
      out.sigma[i][j] = out.sigma[j][i] = v * scale[i] * scale[j];
    }
  }
  out.method = LrcMethod::hac_bartlett;
  out.truncation_lag = b;
  out.f_at_q = f_hat;
  out.q_true = q_hat;
  out.p = p;
  out.r = r;
  out.f_estimated = true;
  out.near_singular = eigen_ratio(out.sigma) < kNearSingular;
  out.n_per_rep = n;
  out.n_reps = 1;
  return out;
}

double bahadur_remainder(std::span<const double> x, double p, double q_true, double f_at_q) {
  if (!(f_at_q > 0.0)) throw SingularityError("f_at_q must be positive");
  return sample_quantile(x, p) - q_true - (p - empirical_cdf(x, q_true)) / f_at_q;
}

double representation_gap(std::span<const double> x, int r, double mu, double a_r) {
  const auto n = static_cast<double>(x.size());
  const DoubleDouble xbar = mean_dd(x);
  const DoubleDouble centred = abs_power_sum_dd(x, r, xbar) / n;
  const DoubleDouble known = abs_power_sum_dd(x, r, DoubleDouble{mu, 0.0}) / n;
  const DoubleDouble linear = (xbar - mu) * a_r;
  return ((centred - known + linear) * std::sqrt(n)).value();
}

double eigen_ratio(const Matrix3& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(to_eigen(m),
                                                    Eigen::EigenvaluesOnly);
  const auto ev = es.eigenvalues();
  const double hi = std::max(std::abs(ev(0)), std::abs(ev(2)));
  if (!(hi > 0.0)) return 0.0;
  return ev(0) / hi;
}

double min_eigenvalue(const Matrix3& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(to_eigen(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_eigenvalue(const Matrix2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return tr / 2.0 - disc;
}

json to_json(const TrivariateLRC& lrc) {
  json j;
  j["sigma"] = matrix_json(lrc.sigma);
  j["mc_se"] = matrix_json(lrc.mc_se);
  j["tail_bound"] = matrix_json(lrc.tail_bound);
  j["method"] = to_string(lrc.method);
  j["truncation"] = lrc.truncation_lag;
  j["f_at_q"] = lrc.f_at_q;
  j["q_true"] = lrc.q_true;
  j["p"] = lrc.p;
  j["r"] = lrc.r;
  j["f_estimated"] = lrc.f_estimated;
  j["near_singular"] = lrc.near_singular;
  j["n_reps"] = lrc.n_reps;
  j["n_per_rep"] = lrc.n_per_rep;
  return j;
}

json to_json(const Gamma2& g) {
  return json{{"gamma", {{g.g11, g.g12}, {g.g12, g.g22}}}, {"a_r", g.a_r}};
}

Gamma2 gamma2_from_json(const json& j) {
  try {
    Gamma2 g;
    const auto& m = j.at("gamma");
    g.g11 = m.at(0).at(0).get<double>();
    g.g12 = m.at(0).at(1).get<double>();
    g.g22 = m.at(1).at(1).get<double>();
    g.a_r = j.value("a_r", 0.0);
    return g;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed gamma target: ") + e.what());
  }
}

}  // namespace fclt
