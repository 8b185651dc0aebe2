#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fclt/parallel.hpp"
#include "fclt/process_spec.hpp"

namespace fclt {

/// Where a true constant came from.
enum class Provenance { closed_form, quadrature, symmetry, pilot_mc, user };
std::string to_string(Provenance p);

struct TruthValue {
  double value = 0.0;
  Provenance provenance = Provenance::user;
};

/// Population constants the Monte Carlo experiments centre on.
struct Truth {
  TruthValue q_true;
  TruthValue f_at_q;
  TruthValue mu;
  TruthValue a_r;
  TruthValue m_true;
  double p = 0.0;
  int r = 0;
  std::uint64_t spec_fingerprint = 0;
  /// Pilot run metadata; zero when nothing was simulated.
  std::size_t pilot_draws = 0;
  std::uint64_t pilot_seed = 0;
  std::uint64_t pilot_fingerprint = 0;
};

struct TruthOptions {
  std::size_t pilot_draws = 10'000'000;
  std::uint64_t pilot_seed = 0x5EED;
  /// Cache file: reused when its spec/p/r/draws/seed match, written otherwise.
  std::string sidecar;
};

/// Closed forms where they exist (iid laws; ARMA with Gaussian innovations;
/// E X^2 for GARCH at r = 2), symmetry for mu and a_r, and a pilot path of
/// pilot_draws observations for the rest.
Truth compute_truth(const ProcessSpec& spec, double p, int r, const TruthOptions& opt = {});

nlohmann::json to_json(const Truth& t);
Truth truth_from_json(const nlohmann::json& j);

}  // namespace fclt
