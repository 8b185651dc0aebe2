#include "fclt/truth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fclt/asymptotics.hpp"
#include "fclt/error.hpp"
#include "fclt/estimators.hpp"
#include "fclt/process_sim.hpp"

namespace fclt {

using nlohmann::json;

namespace {

constexpr std::size_t kPsiTerms = 5000;

json value_json(const TruthValue& v) {
  return json{{"value", v.value}, {"provenance", to_string(v.provenance)}};
}

TruthValue value_from_json(const json& j) {
  TruthValue v;
  v.value = j.at("value").get<double>();
  const auto s = j.at("provenance").get<std::string>();
  for (auto p : {Provenance::closed_form, Provenance::quadrature, Provenance::symmetry,
                 Provenance::pilot_mc, Provenance::user})
    if (to_string(p) == s) v.provenance = p;
  return v;
}

double psi_square_sum(const ArmaSpec& a) {
  const auto psi = causal_ma_coefficients(a, kPsiTerms);
  double s = 0.0;
  for (double v : psi) s += v * v;
  return s;
}

std::optional<double> garch_second_moment(const AugGarchSpec& g) {
  if (g.model != GarchModel::garch && g.model != GarchModel::arch) return std::nullopt;
  double persistence = 0.0;
  for (double a : g.alpha) persistence += a;
  for (double b : g.beta) persistence += b;
  if (!(persistence < 1.0)) return std::nullopt;
  return g.omega / (1.0 - persistence);
}

bool sidecar_matches(const json& j, const ProcessSpec& spec, double p, int r,
                     const TruthOptions& opt) {
  return j.value("spec_fingerprint", std::uint64_t{0}) == fingerprint(spec) &&
         j.value("p", -1.0) == p && j.value("r", -1) == r &&
         j.value("pilot_draws", std::size_t{0}) == opt.pilot_draws &&
         j.value("pilot_seed", std::uint64_t{0}) == opt.pilot_seed;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed_form";
    case Provenance::quadrature: return "quadrature";
    case Provenance::symmetry: return "symmetry";
    case Provenance::pilot_mc: return "pilot_mc";
    case Provenance::user: return "user";
  }
  return "?";
}

Truth compute_truth(const ProcessSpec& spec, double p, int r, const TruthOptions& opt) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile level p must lie in (0,1)");
  if (r < 1) throw ParameterError("moment order r must be >= 1");
  validate(spec);
  if (!opt.sidecar.empty() && std::filesystem::exists(opt.sidecar)) {
    std::ifstream in(opt.sidecar);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw IoError("unreadable truth sidecar " + opt.sidecar + ": " + e.what());
    }
    if (sidecar_matches(j, spec, p, r, opt)) return truth_from_json(j);
  }

  Truth t;
  t.p = p;
  t.r = r;
  t.spec_fingerprint = fingerprint(spec);
  // Every supported innovation law is symmetric, hence so is every process.
  t.mu = {0.0, Provenance::symmetry};
  t.a_r = {0.0, Provenance::symmetry};
  const auto& dist = driving_innovation(spec);

  if (const auto* s = std::get_if<IidSpec>(&spec)) {
    t.q_true = {s->dist.quantile(p), Provenance::closed_form};
    t.f_at_q = {s->dist.pdf(t.q_true.value), Provenance::closed_form};
    t.m_true = {s->dist.abs_moment(r), Provenance::closed_form};
    return t;
  }
  const auto* arma = std::get_if<ArmaSpec>(&spec);
  if (arma && std::holds_alternative<InnovationDist>(arma->innovation) &&
      dist.kind == InnovationDist::Kind::standard_normal) {
    const double sd = std::sqrt(psi_square_sum(*arma));
    const double z = dist.quantile(p);
    t.q_true = {sd * z, Provenance::closed_form};
    t.f_at_q = {dist.pdf(z) / sd, Provenance::closed_form};
    t.m_true = {std::pow(sd, r) * dist.abs_moment(r), Provenance::closed_form};
    return t;
  }

  // Pilot: one long path.
  const ProcessKernel kernel(spec);
  const Path pilot = kernel.simulate(opt.pilot_draws, default_burn_in(spec), opt.pilot_seed);
  t.pilot_draws = opt.pilot_draws;
  t.pilot_seed = opt.pilot_seed;
  t.pilot_fingerprint = fnv1a64(std::to_string(t.spec_fingerprint) + ":" +
                                std::to_string(opt.pilot_draws) + ":" +
                                std::to_string(opt.pilot_seed));
  t.q_true = {sample_quantile(pilot.view(), p), Provenance::pilot_mc};
  t.f_at_q = {kernel_density(pilot.view(), t.q_true.value), Provenance::pilot_mc};
  t.m_true = {known_mean_abs_moment(pilot.view(), r, 0.0), Provenance::pilot_mc};
  if (r == 2) {
    if (const auto* g = std::get_if<AugGarchSpec>(&spec)) {
      if (auto m2 = garch_second_moment(*g)) t.m_true = {*m2, Provenance::closed_form};
    } else if (arma) {
      if (auto m2 = garch_second_moment(std::get<AugGarchSpec>(arma->innovation)))
        t.m_true = {*m2 * psi_square_sum(*arma), Provenance::closed_form};
    }
  }
  if (!opt.sidecar.empty()) {
    std::ofstream out(opt.sidecar);
    if (!out) throw IoError("cannot write truth sidecar " + opt.sidecar);
    out << to_json(t).dump(2) << '\n';
  }
  return t;
}

json to_json(const Truth& t) {
  json j;
  j["q_true"] = value_json(t.q_true);
  j["f_at_q"] = value_json(t.f_at_q);
  j["mu"] = value_json(t.mu);
  j["a_r"] = value_json(t.a_r);
  j["m_true"] = value_json(t.m_true);
  j["p"] = t.p;
  j["r"] = t.r;
  j["spec_fingerprint"] = t.spec_fingerprint;
  j["pilot_draws"] = t.pilot_draws;
  j["pilot_seed"] = t.pilot_seed;
  j["pilot_fingerprint"] = t.pilot_fingerprint;
  return j;
}

Truth truth_from_json(const json& j) {
  try {
    Truth t;
    t.q_true = value_from_json(j.at("q_true"));
    t.f_at_q = value_from_json(j.at("f_at_q"));
    t.mu = value_from_json(j.at("mu"));
    t.a_r = value_from_json(j.at("a_r"));
    t.m_true = value_from_json(j.at("m_true"));
    t.p = j.value("p", 0.0);
    t.r = j.value("r", 0);
    t.spec_fingerprint = j.value("spec_fingerprint", std::uint64_t{0});
    t.pilot_draws = j.value("pilot_draws", std::size_t{0});
    t.pilot_seed = j.value("pilot_seed", std::uint64_t{0});
    t.pilot_fingerprint = j.value("pilot_fingerprint", std::uint64_t{0});
    return t;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed truth record: ") + e.what());
  }
}

}  // namespace fclt
