#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fclt/asymptotics.hpp"
#include "fclt/conditions.hpp"
#include "fclt/parallel.hpp"
#include "fclt/process_spec.hpp"
#include "fclt/truth.hpp"

namespace fclt {

enum class ExperimentKind { clt, fclt, bahadur, representation };
std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

enum class McVerdict { pass, fail, inconclusive };
std::string to_string(McVerdict v);

/// Below this many replications every verdict is inconclusive.
inline constexpr std::size_t kMinVerdictReps = 30;

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::clt;
  ProcessSpec spec = IidSpec{};
  double p = 0.5;
  int r = 2;
  std::size_t n = 1000;
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  std::optional<std::size_t> burn_in;
  std::vector<double> t_grid;
  std::vector<std::size_t> n_ladder;
  /// Entry tolerance: max(rel_tol |target|, threshold_se * combined SE).
  double threshold_se = 3.0;
  double rel_tol = 0.0;
  /// Slack for the decay ladders: next <= (1 + ladder_slack) previous.
  double ladder_slack = 0.10;
  /// Replication-MC target for non-iid specs; 0 means "use reps / n".
  std::size_t max_lag = 50;
  std::size_t lrc_reps = 0;
  std::size_t lrc_n = 0;
  std::optional<Gamma2> target;
  std::optional<Truth> truth;
  std::size_t pilot_draws = 10'000'000;
  std::string pilot_sidecar;
  /// Not part of the experiment's identity: results do not depend on it.
  ExecPolicy exec;
};

/// Parses and validates (IoError for malformed JSON, ParameterError for bad
/// values). Unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
std::uint64_t config_fingerprint(const ExperimentConfig& cfg);

/// One covariance entry confronted with its target.
struct EntryCheck {
  double empirical = 0.0;
  double se = 0.0;
  double target = 0.0;
  double target_se = 0.0;
  double z = 0.0;
  double tolerance = 0.0;
  McVerdict verdict = McVerdict::inconclusive;
};

struct MarginDiagnostics {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double skewness_z = 0.0;
  double kurtosis_z = 0.0;
  /// Heuristic moment check, not an omnibus test.
  McVerdict verdict = McVerdict::inconclusive;
};

struct CltReport {
  Truth truth;
  Gamma2 target;
  Matrix2 target_se{};
  std::string target_source;
  std::array<double, 2> empirical_mean{};
  Matrix2 empirical_cov{};
  Matrix2 cov_se{};
  /// Entries (0,0), (1,1), (0,1).
  std::array<EntryCheck, 3> entries{};
  std::array<MarginDiagnostics, 2> margins{};
  McVerdict verdict = McVerdict::inconclusive;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t used = 0;
  std::size_t quarantined = 0;
  std::vector<ConditionReport> conditions;
  std::optional<TrivariateLRC> lrc;
};

/// cov(t) against t cov(1), checked through D(t) = cov(t) - t cov(1) and
/// its per-replication standard error.
struct FcltRow {
  double t = 0.0;
  std::size_t prefix = 0;
  Matrix2 cov{};
  Matrix2 cov_se{};
  Matrix2 ratio{};
  Matrix2 ratio_se{};
  Matrix2 scaling_z{};
  McVerdict verdict = McVerdict::inconclusive;
};

/// Correlation between increments over (a, b] and (b, c]; entry [i][j]
/// pairs component i of the first with component j of the second.
struct IncrementRow {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  Matrix2 corr{};
  Matrix2 z{};
  McVerdict verdict = McVerdict::inconclusive;
};

struct FcltReport {
  Truth truth;
  std::vector<FcltRow> rows;
  std::vector<IncrementRow> increments;
  McVerdict verdict = McVerdict::inconclusive;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t used = 0;
  std::size_t quarantined = 0;
  std::vector<ConditionReport> conditions;
};

struct DecayRow {
  std::size_t n = 0;
  double median = 0.0;
  double p90 = 0.0;
  double mean = 0.0;
  double std = 0.0;
  /// Standard error of the mean of the statistic.
  double se = 0.0;
  std::size_t used = 0;
  std::size_t quarantined = 0;
};

/// Bahadur: statistic |sqrt(n) R_n|, verdict on median and p90.
/// Representation: the gap itself, verdict on its standard deviation.
struct DecayTable {
  ExperimentKind kind = ExperimentKind::bahadur;
  Truth truth;
  std::vector<DecayRow> rows;
  McVerdict verdict = McVerdict::inconclusive;
  std::size_t reps = 0;
  std::size_t used = 0;
  std::size_t quarantined = 0;
  std::vector<ConditionReport> conditions;
};

/// Truth from the config, or computed (closed forms / pilot sidecar).
Truth resolve_truth(const ExperimentConfig& cfg);

/// Replication i simulates stream i of cfg.seed. Refuses (RefusedError) when
/// a required condition fails or the quantile density is unavailable
/// (report "C1_plus").
CltReport run_clt_experiment(const ExperimentConfig& cfg);
/// Uses the same paths as run_clt_experiment; t = 1 reproduces it.
FcltReport run_fclt_experiment(const ExperimentConfig& cfg);
/// Ladder level l simulates streams 0..reps-1 of derive_seed(seed, l).
DecayTable run_bahadur_experiment(const ExperimentConfig& cfg);
DecayTable run_representation_experiment(const ExperimentConfig& cfg);

/// Runs cfg.experiment and returns its report as JSON.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

nlohmann::json to_json(const CltReport& r);
nlohmann::json to_json(const FcltReport& r);
nlohmann::json to_json(const DecayTable& t);
/// Header n,median,p90,std,se.
std::string decay_table_csv(const DecayTable& t);

}  // namespace fclt
