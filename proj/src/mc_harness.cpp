#include "fclt/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fclt/error.hpp"
#include "fclt/estimators.hpp"
#include "fclt/process_sim.hpp"
#include "fclt/rng.hpp"

namespace fclt {

using nlohmann::json;

namespace {

constexpr std::uint64_t kLrcSeedTag = 0x1C7A;

json matrix_json(const Matrix2& m) { return json::array({{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}); }

McVerdict combine(McVerdict a, McVerdict b) {
  if (a == McVerdict::inconclusive || b == McVerdict::inconclusive) return McVerdict::inconclusive;
  if (a == McVerdict::fail || b == McVerdict::fail) return McVerdict::fail;
  return McVerdict::pass;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return NAN;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Sample covariance of the columns of `pairs` with the standard error of
// each entry taken from the spread of the per-replication centred products.
struct CovEstimate {
  std::array<double, 2> mean{};
  Matrix2 cov{};
  Matrix2 se{};
  // products[k][i]: k = 0 (a,a), 1 (b,b), 2 (a,b)
  std::array<std::vector<double>, 3> products;
};

CovEstimate covariance(const std::vector<std::array<double, 2>>& pairs) {
  CovEstimate c;
  const std::size_t m = pairs.size();
  if (m == 0) {
    c.mean = {NAN, NAN};
    c.cov = c.se = {{{NAN, NAN}, {NAN, NAN}}};
    return c;
  }
  for (const auto& p : pairs) {
    c.mean[0] += p[0];
    c.mean[1] += p[1];
  }
  c.mean[0] /= static_cast<double>(m);
  c.mean[1] /= static_cast<double>(m);
  for (auto& v : c.products) v.reserve(m);
  for (const auto& p : pairs) {
    const double a = p[0] - c.mean[0];
    const double b = p[1] - c.mean[1];
    c.products[0].push_back(a * a);
    c.products[1].push_back(b * b);
    c.products[2].push_back(a * b);
  }
  const double denom = m > 1 ? static_cast<double>(m - 1) : NAN;
  std::array<double, 3> cov{}, se{};
  for (int k = 0; k < 3; ++k) {
    double s = 0.0;
    for (double v : c.products[k]) s += v;
    cov[k] = s / denom;
    se[k] = sd_of(c.products[k]) / std::sqrt(static_cast<double>(m));
  }
  c.cov = {{{cov[0], cov[2]}, {cov[2], cov[1]}}};
  c.se = {{{se[0], se[2]}, {se[2], se[1]}}};
  return c;
}

EntryCheck compare(double emp, double se, double target, double target_se,
                   const ExperimentConfig& cfg, std::size_t used) {
  EntryCheck e{emp, se, target, target_se, 0.0, 0.0, McVerdict::inconclusive};
  const double combined = std::hypot(se, target_se);
  e.tolerance = std::max(cfg.rel_tol * std::abs(target), cfg.threshold_se * combined);
  const double dev = emp - target;
  e.z = combined > 0.0 ? dev / combined : (dev == 0.0 ? 0.0 : INFINITY);
  if (used < kMinVerdictReps || !std::isfinite(dev) || !std::isfinite(e.tolerance)) return e;
  e.verdict = std::abs(dev) <= e.tolerance ? McVerdict::pass : McVerdict::fail;
  return e;
}

MarginDiagnostics margin(const std::vector<std::array<double, 2>>& pairs, int k,
                         double threshold) {
  MarginDiagnostics d;
  const auto m = static_cast<double>(pairs.size());
  if (pairs.size() < 3) {
    d.skewness = d.excess_kurtosis = d.skewness_z = d.kurtosis_z = NAN;
    return d;
  }
  double mean = 0.0;
  for (const auto& p : pairs) mean += p[k];
  mean /= m;
  double m2 = 0, m3 = 0, m4 = 0;
  for (const auto& p : pairs) {
    const double c = p[k] - mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= m;
  m3 /= m;
  m4 /= m;
  d.skewness = m3 / std::pow(m2, 1.5);
  d.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  d.skewness_z = d.skewness / std::sqrt(6.0 / m);
  d.kurtosis_z = d.excess_kurtosis / std::sqrt(24.0 / m);
  if (pairs.size() < kMinVerdictReps || !std::isfinite(d.skewness_z) ||
      !std::isfinite(d.kurtosis_z))
    return d;
  d.verdict = std::abs(d.skewness_z) <= threshold && std::abs(d.kurtosis_z) <= threshold
                  ? McVerdict::pass
                  : McVerdict::fail;
  return d;
}

ConditionReport density_report(double f, Method method) {
  auto rep = decide("C1_plus", f, 0.0, Comparison::above, method);
  rep.details["quantity"] = "density of X_0 at the p-quantile";
  return rep;
}

// Condition gate shared by every experiment. Refuses on the first failing
// required report; when `density` is set also on a missing quantile density.
std::vector<ConditionReport> admit(const ExperimentConfig& cfg, bool density) {
  auto reports = check_all(cfg.spec, cfg.r);
  for (const auto& rep : reports)
    if (rep.required && !rep.satisfied) throw RefusedError(rep);
  if (density && driving_innovation(cfg.spec).discrete()) {
    auto rep = density_report(0.0, Method::closed_form);
    rep.details["reason"] = "discrete innovation law has no density";
    throw RefusedError(rep);
  }
  return reports;
}

void require_density(const Truth& truth, std::vector<ConditionReport>& reports) {
  const auto method = truth.f_at_q.provenance == Provenance::pilot_mc ? Method::monte_carlo
                                                                      : Method::closed_form;
  auto rep = density_report(truth.f_at_q.value, method);
  if (!rep.satisfied || !std::isfinite(truth.f_at_q.value)) {
    rep.satisfied = false;
    throw RefusedError(rep);
  }
  reports.push_back(rep);
}

std::size_t burn_in_of(const ExperimentConfig& cfg) {
  return cfg.burn_in.value_or(default_burn_in(cfg.spec));
}

void validate_config(const ExperimentConfig& cfg) {
  validate(cfg.spec);
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw ParameterError("p must lie in (0,1)");
  if (cfg.r < 1) throw ParameterError("r must be >= 1");
  if (cfg.n < 1) throw ParameterError("n must be >= 1");
  if (cfg.reps < 2) throw ParameterError("reps must be >= 2");
  if (!(cfg.threshold_se > 0.0)) throw ParameterError("threshold_se must be positive");
  if (!(cfg.rel_tol >= 0.0)) throw ParameterError("rel_tol must be >= 0");
  if (!(cfg.ladder_slack >= 0.0)) throw ParameterError("ladder_slack must be >= 0");
  for (std::size_t v : cfg.n_ladder)
    if (v < 2) throw ParameterError("ladder sizes must be >= 2");
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
    const double t = cfg.t_grid[i];
    if (!(t > 0.0 && t <= 1.0)) throw ParameterError("t_grid must lie in (0,1]");
    if (i > 0 && !(t > cfg.t_grid[i - 1])) throw ParameterError("t_grid must be increasing");
  }
}

void fill_target(const ExperimentConfig& cfg, const Truth& truth, CltReport& rep) {
  if (cfg.target) {
    rep.target = *cfg.target;
    rep.target_source = "config";
    return;
  }
  if (const auto* s = std::get_if<IidSpec>(&cfg.spec)) {
    rep.target = iid_gamma(s->dist, cfg.p, cfg.r);
    rep.target_source = "iid_closed_form";
    return;
  }
  LrcOptions opt;
  opt.mu = truth.mu.value;
  opt.burn_in = cfg.burn_in;
  opt.exec = cfg.exec;
  auto lrc = trivariate_long_run_cov_mc(
      cfg.spec, cfg.p, cfg.r, truth.q_true.value, truth.f_at_q.value, cfg.max_lag,
      cfg.lrc_n ? cfg.lrc_n : cfg.n, cfg.lrc_reps ? cfg.lrc_reps : cfg.reps,
      derive_seed(cfg.seed, kLrcSeedTag), opt);
  rep.target = gamma_from_trivariate(lrc, truth.a_r.value);
  rep.target_se = gamma_standard_errors(lrc, truth.a_r.value);
  rep.target_source = "replication_mc";
  lrc.replicates.clear();
  rep.lrc = std::move(lrc);
}

struct Replications {
  // Per replication, per grid point: the scaled centred pair.
  std::vector<std::vector<std::array<double, 2>>> rows;
  std::size_t quarantined = 0;
};

// Simulates stream i of cfg.seed for every replication and evaluates the
// estimator pair on the prefixes in `grid` (t = 1 is the full path).
Replications replicate(const ExperimentConfig& cfg, const Truth& truth,
                       const std::vector<double>& grid) {
  const ProcessKernel kernel(cfg.spec);
  const std::size_t burn = burn_in_of(cfg);
  const double rootn = std::sqrt(static_cast<double>(cfg.n));
  std::vector<std::optional<std::vector<std::array<double, 2>>>> out(cfg.reps);
  parallel_for(cfg.reps, cfg.exec, [&](std::size_t i) {
    Path path;
    try {
      path = kernel.simulate(cfg.n, burn, cfg.seed, i);
    } catch (const DivergenceError&) {
      return;
    }
    std::vector<EstimatePair> est;
    if (grid.size() == 1 && grid[0] == 1.0)
      est.push_back(estimator_vector(path.view(), cfg.p, cfg.r));
    else
      est = partial_sum_process(path.view(), cfg.p, cfg.r, grid);
    std::vector<std::array<double, 2>> row(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double scale = rootn * grid[g];
      row[g] = {scale * (est[g].q_hat - truth.q_true.value),
                scale * (est[g].m_hat - truth.m_true.value)};
      if (!std::isfinite(row[g][0]) || !std::isfinite(row[g][1])) return;
    }
    out[i] = std::move(row);
  });
  Replications reps;
  for (auto& o : out) {
    if (o)
      reps.rows.push_back(std::move(*o));
    else
      ++reps.quarantined;
  }
  return reps;
}

std::vector<std::array<double, 2>> column(const Replications& reps, std::size_t g) {
  std::vector<std::array<double, 2>> c;
  c.reserve(reps.rows.size());
  for (const auto& row : reps.rows) c.push_back(row[g]);
  return c;
}

double sample_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Truth symmetric_centre(const ExperimentConfig& cfg) {
  Truth t;
  t.p = cfg.p;
  t.r = cfg.r;
  t.spec_fingerprint = fingerprint(cfg.spec);
  t.mu = {0.0, Provenance::symmetry};
  t.a_r = {0.0, Provenance::symmetry};
  t.q_true = t.f_at_q = t.m_true = {NAN, Provenance::user};
  return t;
}

DecayTable run_ladder(const ExperimentConfig& cfg, ExperimentKind kind) {
  validate_config(cfg);
  if (cfg.n_ladder.empty()) throw ParameterError("n_ladder must not be empty");
  const bool bahadur = kind == ExperimentKind::bahadur;
  DecayTable table;
  table.kind = kind;
  table.reps = cfg.reps;
  table.conditions = admit(cfg, bahadur);
  if (bahadur) {
    table.truth = resolve_truth(cfg);
    require_density(table.truth, table.conditions);
  } else {
    table.truth = cfg.truth ? *cfg.truth
                  : std::holds_alternative<IidSpec>(cfg.spec) ? resolve_truth(cfg)
                                                              : symmetric_centre(cfg);
  }
  const auto& truth = table.truth;
  const ProcessKernel kernel(cfg.spec);
  const std::size_t burn = burn_in_of(cfg);

  for (std::size_t level = 0; level < cfg.n_ladder.size(); ++level) {
    const std::size_t n = cfg.n_ladder[level];
    const std::uint64_t seed = derive_seed(cfg.seed, level);
    const double rootn = std::sqrt(static_cast<double>(n));
    std::vector<double> stat(cfg.reps, NAN);
    parallel_for(cfg.reps, cfg.exec, [&](std::size_t i) {
      try {
        const Path path = kernel.simulate(n, burn, seed, i);
        stat[i] = bahadur ? std::abs(rootn * bahadur_remainder(path.view(), cfg.p,
                                                                truth.q_true.value,
                                                                truth.f_at_q.value))
                          : representation_gap(path.view(), cfg.r, truth.mu.value,
                                               truth.a_r.value);
      } catch (const DivergenceError&) {
      }
    });
    std::vector<double> used;
    for (double v : stat)
      if (std::isfinite(v)) used.push_back(v);
    DecayRow row;
    row.n = n;
    row.used = used.size();
    row.quarantined = cfg.reps - used.size();
    if (used.empty()) {
      row.median = row.p90 = row.mean = row.std = row.se = NAN;
    } else {
      row.median = sample_quantile(used, 0.5);
      row.p90 = sample_quantile(used, 0.9);
      row.mean = mean_of(used);
      row.std = sd_of(used);
      row.se = row.std / std::sqrt(static_cast<double>(used.size()));
    }
    table.used += row.used;
    table.quarantined += row.quarantined;
    table.rows.push_back(row);
  }

  bool enough = table.rows.size() >= 2;
  for (const auto& row : table.rows) enough = enough && row.used >= kMinVerdictReps;
  if (!enough) return table;
  const double slack = 1.0 + cfg.ladder_slack;
  bool ok = true;
  for (std::size_t l = 1; l < table.rows.size(); ++l) {
    const auto& prev = table.rows[l - 1];
    const auto& next = table.rows[l];
    if (bahadur)
      ok = ok && next.median <= slack * prev.median && next.p90 <= slack * prev.p90;
    else
      ok = ok && next.std <= slack * prev.std;
  }
  table.verdict = ok ? McVerdict::pass : McVerdict::fail;
  return table;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::clt: return "clt";
    case ExperimentKind::fclt: return "fclt";
    case ExperimentKind::bahadur: return "bahadur";
    case ExperimentKind::representation: return "representation";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::clt, ExperimentKind::fclt, ExperimentKind::bahadur,
                 ExperimentKind::representation})
    if (to_string(k) == s) return k;
  throw ParameterError("unknown experiment '" + s + "'");
}

std::string to_string(McVerdict v) {
  switch (v) {
    case McVerdict::pass: return "pass";
    case McVerdict::fail: return "fail";
    case McVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

ExperimentConfig experiment_config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "experiment", "spec",    "p",          "r",           "n",         "reps",
      "seed",       "burn_in", "t_grid",     "n_ladder",    "threshold_se",
      "rel_tol",    "ladder_slack",          "max_lag",     "lrc_reps",  "lrc_n",
      "target",     "truth",   "pilot_draws", "pilot_sidecar"};
  if (!j.is_object()) throw IoError("experiment config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw IoError("unknown config key '" + key + "'");
  ExperimentConfig cfg;
  try {
    cfg.experiment = experiment_kind_from_string(get_or<std::string>(j, "experiment", "clt"));
    if (!j.contains("spec")) throw IoError("config needs a 'spec'");
    cfg.spec = process_spec_from_json(j.at("spec"));
    cfg.p = get_or(j, "p", cfg.p);
    cfg.r = get_or(j, "r", cfg.r);
    cfg.n = get_or(j, "n", cfg.n);
    cfg.reps = get_or(j, "reps", cfg.reps);
    cfg.seed = get_or(j, "seed", cfg.seed);
    if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<std::size_t>();
    cfg.t_grid = get_or(j, "t_grid", cfg.t_grid);
    cfg.n_ladder = get_or(j, "n_ladder", cfg.n_ladder);
    cfg.threshold_se = get_or(j, "threshold_se", cfg.threshold_se);
    cfg.rel_tol = get_or(j, "rel_tol", cfg.rel_tol);
    cfg.ladder_slack = get_or(j, "ladder_slack", cfg.ladder_slack);
    cfg.max_lag = get_or(j, "max_lag", cfg.max_lag);
    cfg.lrc_reps = get_or(j, "lrc_reps", cfg.lrc_reps);
    cfg.lrc_n = get_or(j, "lrc_n", cfg.lrc_n);
    if (j.contains("target")) cfg.target = gamma2_from_json(j.at("target"));
    if (j.contains("truth")) cfg.truth = truth_from_json(j.at("truth"));
    cfg.pilot_draws = get_or(j, "pilot_draws", cfg.pilot_draws);
    cfg.pilot_sidecar = get_or(j, "pilot_sidecar", cfg.pilot_sidecar);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed experiment config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["spec"] = to_json(cfg.spec);
  j["p"] = cfg.p;
  j["r"] = cfg.r;
  j["n"] = cfg.n;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  if (cfg.burn_in) j["burn_in"] = *cfg.burn_in;
  if (!cfg.t_grid.empty()) j["t_grid"] = cfg.t_grid;
  if (!cfg.n_ladder.empty()) j["n_ladder"] = cfg.n_ladder;
  j["threshold_se"] = cfg.threshold_se;
  j["rel_tol"] = cfg.rel_tol;
  j["ladder_slack"] = cfg.ladder_slack;
  j["max_lag"] = cfg.max_lag;
  j["lrc_reps"] = cfg.lrc_reps;
  j["lrc_n"] = cfg.lrc_n;
  if (cfg.target) j["target"] = to_json(*cfg.target);
  if (cfg.truth) j["truth"] = to_json(*cfg.truth);
  j["pilot_draws"] = cfg.pilot_draws;
  if (!cfg.pilot_sidecar.empty()) j["pilot_sidecar"] = cfg.pilot_sidecar;
  return j;
}

std::uint64_t config_fingerprint(const ExperimentConfig& cfg) {
  return fnv1a64(to_json(cfg).dump());
}

Truth resolve_truth(const ExperimentConfig& cfg) {
  if (cfg.truth) return *cfg.truth;
  TruthOptions opt;
  opt.pilot_draws = cfg.pilot_draws;
  opt.sidecar = cfg.pilot_sidecar;
  return compute_truth(cfg.spec, cfg.p, cfg.r, opt);
}

CltReport run_clt_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  CltReport rep;
  rep.conditions = admit(cfg, true);
  rep.truth = resolve_truth(cfg);
  require_density(rep.truth, rep.conditions);
  rep.n = cfg.n;
  rep.reps = cfg.reps;

  const auto reps = replicate(cfg, rep.truth, {1.0});
  rep.used = reps.rows.size();
  rep.quarantined = reps.quarantined;
  const auto pairs = column(reps, 0);
  const auto cov = covariance(pairs);
  rep.empirical_mean = cov.mean;
  rep.empirical_cov = cov.cov;
  rep.cov_se = cov.se;

  fill_target(cfg, rep.truth, rep);
  const auto target = rep.target.matrix();
  const std::array<std::array<int, 2>, 3> idx{{{0, 0}, {1, 1}, {0, 1}}};
  rep.verdict = McVerdict::pass;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto [a, b] = idx[k];
    rep.entries[k] = compare(cov.cov[a][b], cov.se[a][b], target[a][b], rep.target_se[a][b],
                             cfg, rep.used);
    rep.verdict = combine(rep.verdict, rep.entries[k].verdict);
  }
  for (int k = 0; k < 2; ++k) rep.margins[k] = margin(pairs, k, cfg.threshold_se);
  return rep;
}

FcltReport run_fclt_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.t_grid.empty()) throw ParameterError("the FCLT experiment needs a t_grid");
  if (cfg.t_grid.back() != 1.0) throw ParameterError("t_grid must end at 1");
  FcltReport rep;
  rep.conditions = admit(cfg, true);
  rep.truth = resolve_truth(cfg);
  require_density(rep.truth, rep.conditions);
  rep.n = cfg.n;
  rep.reps = cfg.reps;

  const auto reps = replicate(cfg, rep.truth, cfg.t_grid);
  rep.used = reps.rows.size();
  rep.quarantined = reps.quarantined;
  const std::size_t m = rep.used;
  const std::size_t last = cfg.t_grid.size() - 1;
  const auto full = covariance(column(reps, last));
  const bool enough = m >= kMinVerdictReps;
  rep.verdict = McVerdict::pass;

  for (std::size_t g = 0; g < cfg.t_grid.size(); ++g) {
    const double t = cfg.t_grid[g];
    const auto cov = covariance(column(reps, g));
    FcltRow row;
    row.t = t;
    row.prefix = prefix_length(cfg.n, t);
    row.cov = cov.cov;
    row.cov_se = cov.se;
    row.verdict = enough ? McVerdict::pass : McVerdict::inconclusive;
    const std::array<std::array<int, 2>, 3> idx{{{0, 0}, {1, 1}, {0, 1}}};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto [a, b] = idx[k];
      std::vector<double> d(m);
      for (std::size_t i = 0; i < m; ++i)
        d[i] = cov.products[k][i] - t * full.products[k][i];
      const double diff = cov.cov[a][b] - t * full.cov[a][b];
      const double se = m > 1 ? sd_of(d) / std::sqrt(static_cast<double>(m)) : NAN;
      const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
      row.ratio[a][b] = row.ratio[b][a] = cov.cov[a][b] / full.cov[a][b];
      row.ratio_se[a][b] = row.ratio_se[b][a] = se / std::abs(full.cov[a][b]);
      row.scaling_z[a][b] = row.scaling_z[b][a] = z;
      if (enough && !(std::abs(z) <= cfg.threshold_se)) row.verdict = McVerdict::fail;
    }
    rep.verdict = combine(rep.verdict, row.verdict);
    rep.rows.push_back(row);
  }

  // Adjacent windows (t_{g-1}, t_g] and (t_g, t_{g+1}], with t_{-1} = 0.
  for (std::size_t g = 0; g + 1 < cfg.t_grid.size(); ++g) {
    IncrementRow inc;
    inc.a = g == 0 ? 0.0 : cfg.t_grid[g - 1];
    inc.b = cfg.t_grid[g];
    inc.c = cfg.t_grid[g + 1];
    inc.verdict = enough ? McVerdict::pass : McVerdict::inconclusive;
    std::array<std::vector<double>, 2> first, second;
    for (const auto& row : reps.rows) {
      for (int k = 0; k < 2; ++k) {
        const double before = g == 0 ? 0.0 : row[g - 1][k];
        first[k].push_back(row[g][k] - before);
        second[k].push_back(row[g + 1][k] - row[g][k]);
      }
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double c = m > 3 ? sample_correlation(first[a], second[b]) : NAN;
        inc.corr[a][b] = c;
        // Fisher transform: atanh(corr) sqrt(m - 3) is standard normal under 0.
        inc.z[a][b] = m > 3 ? std::atanh(c) * std::sqrt(static_cast<double>(m) - 3.0) : NAN;
        if (enough && !(std::abs(inc.z[a][b]) <= cfg.threshold_se)) inc.verdict = McVerdict::fail;
      }
    }
    rep.verdict = combine(rep.verdict, inc.verdict);
    rep.increments.push_back(inc);
  }
  return rep;
}

DecayTable run_bahadur_experiment(const ExperimentConfig& cfg) {
  return run_ladder(cfg, ExperimentKind::bahadur);
}

DecayTable run_representation_experiment(const ExperimentConfig& cfg) {
  return run_ladder(cfg, ExperimentKind::representation);
}

json run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::clt: return to_json(run_clt_experiment(cfg));
    case ExperimentKind::fclt: return to_json(run_fclt_experiment(cfg));
    case ExperimentKind::bahadur: return to_json(run_bahadur_experiment(cfg));
    case ExperimentKind::representation: return to_json(run_representation_experiment(cfg));
  }
  throw ParameterError("unknown experiment");
}

namespace {

json entry_json(const EntryCheck& e) {
  return {{"empirical", e.empirical}, {"se", e.se},   {"target", e.target},
          {"target_se", e.target_se}, {"z", e.z},     {"tolerance", e.tolerance},
          {"verdict", to_string(e.verdict)}};
}

json conditions_json(const std::vector<ConditionReport>& reports) {
  json a = json::array();
  for (const auto& r : reports) a.push_back(to_json(r));
  return a;
}

}  // namespace

json to_json(const CltReport& r) {
  json j;
  j["experiment"] = "clt";
  j["n"] = r.n;
  j["reps"] = r.reps;
  j["used"] = r.used;
  j["quarantined"] = r.quarantined;
  j["truth"] = to_json(r.truth);
  j["target"] = to_json(r.target);
  j["target_se"] = matrix_json(r.target_se);
  j["target_source"] = r.target_source;
  j["empirical_mean"] = r.empirical_mean;
  j["empirical_cov"] = matrix_json(r.empirical_cov);
  j["cov_se"] = matrix_json(r.cov_se);
  j["entries"] = {{"g11", entry_json(r.entries[0])},
                  {"g22", entry_json(r.entries[1])},
                  {"g12", entry_json(r.entries[2])}};
  json margins = json::array();
  for (const auto& m : r.margins)
    margins.push_back({{"skewness", m.skewness},
                       {"excess_kurtosis", m.excess_kurtosis},
                       {"skewness_z", m.skewness_z},
                       {"kurtosis_z", m.kurtosis_z},
                       {"verdict", to_string(m.verdict)}});
  j["normality"] = margins;
  j["verdict"] = to_string(r.verdict);
  j["conditions"] = conditions_json(r.conditions);
  if (r.lrc) j["lrc"] = to_json(*r.lrc);
  return j;
}

json to_json(const FcltReport& r) {
  json j;
  j["experiment"] = "fclt";
  j["n"] = r.n;
  j["reps"] = r.reps;
  j["used"] = r.used;
  j["quarantined"] = r.quarantined;
  j["truth"] = to_json(r.truth);
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t},
                    {"prefix", row.prefix},
                    {"cov", matrix_json(row.cov)},
                    {"cov_se", matrix_json(row.cov_se)},
                    {"ratio", matrix_json(row.ratio)},
                    {"ratio_se", matrix_json(row.ratio_se)},
                    {"scaling_z", matrix_json(row.scaling_z)},
                    {"verdict", to_string(row.verdict)}});
  j["rows"] = rows;
  json incs = json::array();
  for (const auto& inc : r.increments)
    incs.push_back({{"windows", {{inc.a, inc.b}, {inc.b, inc.c}}},
                    {"corr", matrix_json(inc.corr)},
                    {"z", matrix_json(inc.z)},
                    {"verdict", to_string(inc.verdict)}});
  j["increments"] = incs;
  j["note"] = "finite-dimensional checks on the t grid only; weak convergence of the "
              "whole process is not tested";
  j["verdict"] = to_string(r.verdict);
  j["conditions"] = conditions_json(r.conditions);
  return j;
}

json to_json(const DecayTable& t) {
  json j;
  j["experiment"] = to_string(t.kind);
  j["reps"] = t.reps;
  j["used"] = t.used;
  j["quarantined"] = t.quarantined;
  j["truth"] = to_json(t.truth);
  j["statistic"] = t.kind == ExperimentKind::bahadur ? "abs(sqrt(n) R_n)" : "gap";
  json rows = json::array();
  for (const auto& row : t.rows)
    rows.push_back({{"n", row.n},
                    {"median", row.median},
                    {"p90", row.p90},
                    {"mean", row.mean},
                    {"std", row.std},
                    {"se", row.se},
                    {"used", row.used},
                    {"quarantined", row.quarantined}});
  j["rows"] = rows;
  j["verdict"] = to_string(t.verdict);
  j["conditions"] = conditions_json(t.conditions);
  return j;
}

std::string decay_table_csv(const DecayTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "n,median,p90,std,se\n";
  for (const auto& row : t.rows)
    os << row.n << ',' << row.median << ',' << row.p90 << ',' << row.std << ',' << row.se
       << '\n';
  return os.str();
}

}  // namespace fclt
