#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "fclt/parallel.hpp"
#include "fclt/process_spec.hpp"

namespace fclt {

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

enum class LrcMethod { iid_closed_form, replication_mc, hac_bartlett };
std::string to_string(LrcMethod m);

/// Long-run covariance of (U, V, W) built from X_t, |X_t - mu|^r and
/// (p - 1{X_t <= q}) / f, in that order.
struct TrivariateLRC {
  Matrix3 sigma{};
  /// Monte Carlo standard errors (replication method), zero otherwise.
  Matrix3 mc_se{};
  /// Estimated sum over lags beyond the truncation, per entry; NaN when no
  /// geometric decay could be fitted.
  Matrix3 tail_bound{};
  LrcMethod method = LrcMethod::iid_closed_form;
  /// max_lag for the replication method, bandwidth for HAC.
  std::size_t truncation_lag = 0;
  double f_at_q = 0.0;
  double q_true = 0.0;
  double p = 0.0;
  int r = 0;
  bool f_estimated = false;
  bool near_singular = false;
  std::size_t n_reps = 0;
  std::size_t n_per_rep = 0;
  /// Per-replication estimates (replication method only).
  std::vector<Matrix3> replicates;
};

/// Asymptotic covariance of sqrt(n) (q_n(p) - q, m_hat - m).
struct Gamma2 {
  double g11 = 0.0;
  double g22 = 0.0;
  double g12 = 0.0;
  double a_r = 0.0;

  Matrix2 matrix() const { return {{{g11, g12}, {g12, g22}}}; }
};

/// r E[(X - mu)^{r-1} sgn(X - mu)^r] for an iid law.
double a_r_coefficient(const InnovationDist& dist, int r, double mu = 0.0);

/// The iid covariance block, every expectation by quadrature.
/// Throws SingularityError when the density at the quantile is 0.
TrivariateLRC iid_trivariate(const InnovationDist& dist, double p, int r);

/// Direct iid formulas for Gamma (no trivariate detour).
Gamma2 iid_gamma(const InnovationDist& dist, double p, int r);

/// Gamma = A Sigma A^T with A = [[0, 0, 1], [-a_r, 1, 0]].
Gamma2 gamma_from_trivariate(const TrivariateLRC& lrc, double a_r);

/// Standard errors of Gamma's entries from the per-replication estimates.
Matrix2 gamma_standard_errors(const TrivariateLRC& lrc, double a_r);

struct LrcOptions {
  double mu = 0.0;
  std::optional<std::size_t> burn_in;
  ExecPolicy exec;
};

/// Replication Monte Carlo: n_reps independent paths of length n_per_rep,
/// lagged covariances up to max_lag from each, centred at the pooled means.
/// Refuses (RefusedError) specs the condition checker rejects for r.
TrivariateLRC trivariate_long_run_cov_mc(const ProcessSpec& spec, double p, int r,
                                         double q_true, double f_at_q, std::size_t max_lag,
                                         std::size_t n_per_rep, std::size_t n_reps,
                                         std::uint64_t seed, const LrcOptions& opt = {});

/// Single-path Bartlett estimator with q and f replaced by the sample
/// quantile and a Gaussian kernel density estimate. Bandwidth defaults to
/// floor(n^{1/3}); needs n >= 10 * bandwidth.
TrivariateLRC trivariate_long_run_cov_hac(std::span<const double> x, double p, int r,
                                          std::optional<std::size_t> bandwidth = std::nullopt);

/// Gaussian kernel density estimate at `at`, Silverman bandwidth.
double kernel_density(std::span<const double> x, double at);

/// q_n(p) - q - (p - F_n(q)) / f, the remainder of the linearisation.
double bahadur_remainder(std::span<const double> x, double p, double q_true, double f_at_q);

/// sqrt(n) [m_hat - (1/n) sum |X_i - mu|^r + a_r (Xbar - mu)], evaluated in
/// double-double and rounded once.
double representation_gap(std::span<const double> x, int r, double mu, double a_r);

/// Smallest over largest eigenvalue; near-singular when below 1e-8.
double eigen_ratio(const Matrix3& m);
double min_eigenvalue(const Matrix2& m);
double min_eigenvalue(const Matrix3& m);

nlohmann::json to_json(const TrivariateLRC& lrc);
nlohmann::json to_json(const Gamma2& g);
Gamma2 gamma2_from_json(const nlohmann::json& j);

}  // namespace fclt
