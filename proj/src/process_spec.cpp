#include "fclt/process_spec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fclt/error.hpp"
#include "fclt/polynomial.hpp"
#include "fclt/quadrature.hpp"

namespace fclt {

using nlohmann::json;

namespace {

constexpr double kCommonRootTol = 1e-8;

bool is_apgarch_family(GarchModel m) {
  switch (m) {
    case GarchModel::apgarch:
    case GarchModel::agarch:
    case GarchModel::gjr:
    case GarchModel::garch:
    case GarchModel::arch:
    case GarchModel::tgarch:
    case GarchModel::tsgarch:
    case GarchModel::pgarch:
    case GarchModel::ngarch:
      return true;
    default:
      return false;
  }
}

/// Lambda exponent fixed by the model, or 0 when the model leaves it free.
double fixed_delta(GarchModel m) {
  switch (m) {
    case GarchModel::garch:
    case GarchModel::arch:
    case GarchModel::agarch:
    case GarchModel::gjr:
    case GarchModel::ngarch:
    case GarchModel::vgarch:
      return 1.0;
    case GarchModel::tgarch:
    case GarchModel::tsgarch:
      return 0.5;
    default:
      return 0.0;
  }
}

bool symmetric_model(GarchModel m) {
  return m == GarchModel::garch || m == GarchModel::arch || m == GarchModel::tsgarch ||
         m == GarchModel::pgarch;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

std::vector<double> number_array(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  const auto& a = j.at(key);
  if (!a.is_array()) throw IoError(std::string("'") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw IoError(std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<GenericRow> generic_rows(const json& j, const char* key) {
  std::vector<GenericRow> rows;
  if (!j.contains(key)) return rows;
  for (const auto& row : j.at(key)) {
    if (!row.is_array() || row.size() != kGenericBasis)
      throw IoError(std::string("'") + key + "' rows need " +
                    std::to_string(kGenericBasis) + " coefficients");
    GenericRow r{};
    for (std::size_t b = 0; b < kGenericBasis; ++b) r[b] = row[b].get<double>();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

double pow_exact(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  if (e == 0.5) return std::sqrt(x);
  if (e == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(x, e);
}

double generic_basis(std::size_t b, double e) {
  switch (b) {
    case 0: return 1.0;
    case 1: return std::abs(e);
    case 2: return e;
    case 3: return e * e;
    case 4: {
      const double m = std::max(0.0, -e);
      return m * m;
    }
    case 5: return std::log(e * e);
    default: throw ParameterError("generic basis index out of range");
  }
}

// ---------------------------------------------------------------------------
// AugGarchSpec

std::size_t AugGarchSpec::g_count() const {
  if (model == GarchModel::generic) return g_coef.size();
  return static_cast<std::size_t>(p);
}

std::size_t AugGarchSpec::c_count() const {
  if (model == GarchModel::generic) return c_coef.size();
  if (is_apgarch_family(model)) return static_cast<std::size_t>(std::max(p, q));
  return static_cast<std::size_t>(q);
}

std::size_t AugGarchSpec::max_lag() const { return std::max(g_count(), c_count()); }

void AugGarchSpec::validate() const {
  innovation.validate();
  require(p >= 1, "augmented GARCH needs p >= 1");
  require(q >= 0, "augmented GARCH needs q >= 0");
  require(std::isfinite(delta) && delta > 0.0, "delta must be a positive real");

  const bool exponential = model == GarchModel::mgarch || model == GarchModel::egarch;
  if (exponential)
    require(lambda == LambdaKind::log, to_string(model) + " belongs to the log-Lambda group");
  else if (model != GarchModel::generic)
    require(lambda == LambdaKind::power,
            to_string(model) + " belongs to the power-Lambda group");
  if (lambda == LambdaKind::power) {
    const double fixed = fixed_delta(model);
    if (fixed > 0.0)
      require(delta == fixed, to_string(model) + " requires delta = " + std::to_string(fixed));
  }

  if (model == GarchModel::generic) {
    require(g_coef.size() == static_cast<std::size_t>(p), "generic model needs p rows of g_coef");
    require(c_coef.size() == static_cast<std::size_t>(q), "generic model needs q rows of c_coef");
    for (const auto& rows : {g_coef, c_coef})
      for (const auto& row : rows)
        for (double v : row) require(std::isfinite(v), "generic coefficients must be finite");
    return;
  }

  require(alpha.size() == static_cast<std::size_t>(p), "alpha must have p entries");
  require(beta.size() == static_cast<std::size_t>(q), "beta must have q entries");
  require(gamma.empty() || gamma.size() == static_cast<std::size_t>(p),
          "gamma must be empty or have p entries");
  if (model == GarchModel::arch) require(q == 0, "ARCH has q = 0");
  if (lambda == LambdaKind::power)
    require(std::isfinite(omega) && omega > 0.0, "omega must be > 0");
  else
    require(std::isfinite(omega), "omega must be finite");
  for (double a : alpha) require(std::isfinite(a) && a >= 0.0, "alpha_i must be >= 0");
  for (double b : beta) require(std::isfinite(b) && b >= 0.0, "beta_j must be >= 0");
  if (model == GarchModel::gjr) {
    for (std::size_t i = 0; i < gamma.size(); ++i)
      require(std::isfinite(gamma[i]) && alpha[i] + gamma[i] >= 0.0,
              "GJR needs alpha*_i + gamma*_i >= 0");
  } else {
    for (double g : gamma)
      require(std::isfinite(g) && g >= -1.0 && g <= 1.0, "gamma_i must lie in [-1, 1]");
    if (symmetric_model(model))
      for (double g : gamma) require(g == 0.0, to_string(model) + " has no gamma parameter");
  }
}

// ---------------------------------------------------------------------------
// GarchFunctionals

GarchFunctionals::GarchFunctionals(AugGarchSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.model == GarchModel::egarch) mean_abs_ = mean_abs_innovation(spec_.innovation);
}

double GarchFunctionals::g(std::size_t i, double e) const {
  const auto& s = spec_;
  if (s.model == GarchModel::generic) {
    double v = 0.0;
    for (std::size_t b = 0; b < kGenericBasis; ++b)
      if (s.g_coef[i][b] != 0.0) v += s.g_coef[i][b] * generic_basis(b, e);
    return v;
  }
  const double base = s.omega / s.p;
  switch (s.model) {
    case GarchModel::vgarch: {
      const double d = e + s.gamma_at(i);
      return base + s.alpha_at(i) * (d * d);
    }
    case GarchModel::mgarch:
      return base + s.alpha_at(i) * std::log(e * e);
    case GarchModel::egarch:
      return base + s.alpha_at(i) * (std::abs(e) - mean_abs_) + s.gamma_at(i) * e;
    default:
      return base;
  }
}

double GarchFunctionals::c(std::size_t j, double e) const {
  const auto& s = spec_;
  switch (s.model) {
    case GarchModel::generic: {
      double v = 0.0;
      for (std::size_t b = 0; b < kGenericBasis; ++b)
        if (s.c_coef[j][b] != 0.0) v += s.c_coef[j][b] * generic_basis(b, e);
      return v;
    }
    case GarchModel::vgarch:
    case GarchModel::mgarch:
    case GarchModel::egarch:
      return s.beta_at(j);
    case GarchModel::garch:
    case GarchModel::arch:
      return s.alpha_at(j) * (e * e) + s.beta_at(j);
    case GarchModel::gjr: {
      const double m = std::max(0.0, -e);
      return s.beta_at(j) + s.alpha_at(j) * (e * e) + s.gamma_at(j) * (m * m);
    }
    case GarchModel::ngarch: {
      const double d = e + s.gamma_at(j);
      return s.alpha_at(j) * (d * d) + s.beta_at(j);
    }
    case GarchModel::tsgarch:
    case GarchModel::pgarch:
      return s.alpha_at(j) * pow_exact(std::abs(e), 2.0 * s.delta) + s.beta_at(j);
    case GarchModel::apgarch:
    case GarchModel::agarch:
    case GarchModel::tgarch:
      return s.alpha_at(j) * pow_exact(std::abs(e) - s.gamma_at(j) * e, 2.0 * s.delta) +
             s.beta_at(j);
  }
  return 0.0;
}

double GarchFunctionals::lambda(double sigma2) const {
  return spec_.lambda == LambdaKind::log ? std::log(sigma2) : pow_exact(sigma2, spec_.delta);
}

double GarchFunctionals::lambda_inverse(double state) const {
  return spec_.lambda == LambdaKind::log ? std::exp(state)
                                         : pow_exact(state, 1.0 / spec_.delta);
}

// ---------------------------------------------------------------------------
// ArmaSpec / ProcessSpec

const InnovationDist& ArmaSpec::base_innovation() const {
  if (const auto* d = std::get_if<InnovationDist>(&innovation)) return *d;
  return std::get<AugGarchSpec>(innovation).innovation;
}

void ArmaSpec::validate() const {
  for (double v : phi) require(std::isfinite(v), "phi must be finite");
  for (double v : theta) require(std::isfinite(v), "theta must be finite");
  if (const auto* g = std::get_if<AugGarchSpec>(&innovation)) {
    require(g->model == GarchModel::garch, "ARMA-GARCH innovations must use model = garch");
    g->validate();
  } else {
    std::get<InnovationDist>(innovation).validate();
  }
  if (!phi.empty() && !theta.empty()) {
    const auto ar = lag_polynomial_roots(phi);
    const auto ma = lag_polynomial_roots(theta);
    for (const auto& a : ar)
      for (const auto& m : ma)
        require(std::abs(a - m) > kCommonRootTol, "Phi and Theta share a common root");
  }
}

void validate(const ProcessSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSpec>)
          s.dist.validate();
        else
          s.validate();
      },
      spec);
}

const InnovationDist& driving_innovation(const ProcessSpec& spec) {
  if (const auto* s = std::get_if<IidSpec>(&spec)) return s->dist;
  if (const auto* s = std::get_if<AugGarchSpec>(&spec)) return s->innovation;
  return std::get<ArmaSpec>(spec).base_innovation();
}

std::size_t default_burn_in(const ProcessSpec& spec) {
  std::size_t order = 0;
  if (std::holds_alternative<IidSpec>(spec)) return 0;
  if (const auto* g = std::get_if<AugGarchSpec>(&spec)) {
    order = static_cast<std::size_t>(g->p + g->q);
  } else {
    const auto& a = std::get<ArmaSpec>(spec);
    order = a.phi.size() + a.theta.size();
    if (const auto* gi = std::get_if<AugGarchSpec>(&a.innovation))
      order += static_cast<std::size_t>(gi->p + gi->q);
  }
  return std::max<std::size_t>(1000, 20 * order);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fingerprint(const ProcessSpec& spec) { return fnv1a64(to_json(spec).dump()); }

std::string describe(const ProcessSpec& spec) {
  std::ostringstream os;
  if (const auto* s = std::get_if<IidSpec>(&spec)) {
    os << "iid " << to_string(s->dist.kind);
  } else if (const auto* g = std::get_if<AugGarchSpec>(&spec)) {
    os << to_string(g->model) << "(" << g->p << "," << g->q << ")";
  } else {
    const auto& a = std::get<ArmaSpec>(spec);
    os << "ARMA(" << a.phi.size() << "," << a.theta.size() << ")";
    if (std::holds_alternative<AugGarchSpec>(a.innovation)) os << "-GARCH";
  }
  return os.str();
}

std::string to_string(GarchModel m) {
  switch (m) {
    case GarchModel::generic: return "generic";
    case GarchModel::apgarch: return "apgarch";
    case GarchModel::agarch: return "agarch";
    case GarchModel::gjr: return "gjr";
    case GarchModel::garch: return "garch";
    case GarchModel::arch: return "arch";
    case GarchModel::tgarch: return "tgarch";
    case GarchModel::tsgarch: return "tsgarch";
    case GarchModel::pgarch: return "pgarch";
    case GarchModel::vgarch: return "vgarch";
    case GarchModel::ngarch: return "ngarch";
    case GarchModel::mgarch: return "mgarch";
    case GarchModel::egarch: return "egarch";
  }
  return "?";
}

GarchModel garch_model_from_string(const std::string& s) {
  for (auto m : {GarchModel::generic, GarchModel::apgarch, GarchModel::agarch, GarchModel::gjr,
                 GarchModel::garch, GarchModel::arch, GarchModel::tgarch, GarchModel::tsgarch,
                 GarchModel::pgarch, GarchModel::vgarch, GarchModel::ngarch, GarchModel::mgarch,
                 GarchModel::egarch})
    if (to_string(m) == s) return m;
  throw ParameterError("unknown model '" + s + "'");
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const InnovationDist& d) {
  json j{{"kind", to_string(d.kind)}};
  j["dof"] = d.kind == InnovationDist::Kind::student_t ? json(d.dof) : json(nullptr);
  return j;
}

InnovationDist innovation_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw IoError("innovation needs a 'kind'");
  InnovationDist d;
  d.kind = innovation_kind_from_string(j.at("kind").get<std::string>());
  if (d.kind == InnovationDist::Kind::student_t) {
    if (!j.contains("dof") || !j.at("dof").is_number())
      throw IoError("student_t innovation needs a numeric 'dof'");
    d.dof = j.at("dof").get<double>();
  }
  return d;
}

json to_json(const AugGarchSpec& s) {
  json j;
  j["model"] = to_string(s.model);
  j["lambda"] = s.lambda == LambdaKind::log ? "log" : "power";
  j["delta"] = s.lambda == LambdaKind::log ? json(nullptr) : json(s.delta);
  j["p"] = s.p;
  j["q"] = s.q;
  j["omega"] = s.omega;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["gamma"] = s.gamma;
  if (s.model == GarchModel::generic) {
    j["g_coef"] = s.g_coef;
    j["c_coef"] = s.c_coef;
  }
  j["innovation"] = to_json(s.innovation);
  return j;
}

AugGarchSpec garch_from_json(const json& j) {
  if (!j.is_object()) throw IoError("GARCH spec must be a JSON object");
  AugGarchSpec s;
  try {
    s.model = garch_model_from_string(j.at("model").get<std::string>());
    const bool exponential = s.model == GarchModel::mgarch || s.model == GarchModel::egarch;
    s.lambda = exponential ? LambdaKind::log : LambdaKind::power;
    if (j.contains("lambda") && !j.at("lambda").is_null()) {
      const auto l = j.at("lambda").get<std::string>();
      if (l == "log")
        s.lambda = LambdaKind::log;
      else if (l == "power")
        s.lambda = LambdaKind::power;
      else
        throw ParameterError("lambda must be 'power' or 'log'");
    }
    const double fixed = fixed_delta(s.model);
    s.delta = fixed > 0.0 ? fixed : 1.0;
    if (j.contains("delta") && !j.at("delta").is_null()) s.delta = j.at("delta").get<double>();
    s.alpha = number_array(j, "alpha");
    s.beta = number_array(j, "beta");
    s.gamma = number_array(j, "gamma");
    s.g_coef = generic_rows(j, "g_coef");
    s.c_coef = generic_rows(j, "c_coef");
    const bool generic = s.model == GarchModel::generic;
    s.p = j.contains("p") ? j.at("p").get<int>()
                          : static_cast<int>(generic ? s.g_coef.size() : s.alpha.size());
    s.q = j.contains("q") ? j.at("q").get<int>()
                          : static_cast<int>(generic ? s.c_coef.size() : s.beta.size());
    if (j.contains("omega")) s.omega = j.at("omega").get<double>();
    s.innovation = j.contains("innovation") ? innovation_from_json(j.at("innovation"))
                                            : InnovationDist::normal();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed GARCH spec: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const ProcessSpec& spec) {
  if (const auto* s = std::get_if<IidSpec>(&spec))
    return json{{"model", "iid"}, {"innovation", to_json(s->dist)}};
  if (const auto* g = std::get_if<AugGarchSpec>(&spec)) return to_json(*g);
  const auto& a = std::get<ArmaSpec>(spec);
  json j{{"model", "arma"}, {"phi", a.phi}, {"theta", a.theta}};
  if (const auto* g = std::get_if<AugGarchSpec>(&a.innovation))
    j["innovation"] = json{{"kind", "garch"}, {"garch", to_json(*g)}};
  else
    j["innovation"] = to_json(std::get<InnovationDist>(a.innovation));
  return j;
}

ProcessSpec process_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("model")) throw IoError("spec needs a 'model' field");
  const auto model = j.at("model").get<std::string>();
  try {
    if (model == "iid") {
      IidSpec s{innovation_from_json(j.at("innovation"))};
      s.dist.validate();
      return s;
    }
    if (model == "arma") {
      ArmaSpec a;
      a.phi = number_array(j, "phi");
      a.theta = number_array(j, "theta");
      const auto& inn = j.contains("innovation") ? j.at("innovation") : json{{"kind", "normal"}};
      if (inn.value("kind", "") == "garch")
        a.innovation = garch_from_json(inn.at("garch"));
      else
        a.innovation = innovation_from_json(inn);
      a.validate();
      return a;
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed spec: ") + e.what());
  }
  return garch_from_json(j);
}

}  // namespace fclt
