#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fclt/error.hpp"
#include "fclt/process_spec.hpp"

namespace fclt {

enum class Verdict { satisfied, not_satisfied, boundary, inconclusive };
enum class Method { closed_form, quadrature, monte_carlo };
/// below: value < threshold; above: value > threshold; at_least: value >= threshold.
enum class Comparison { below, above, at_least };

/// Strict inequalities are decided with this margin; values inside it are
/// reported as boundary (and not satisfied).
inline constexpr double kConditionMargin = 1e-10;

struct ConditionReport {
  std::string name;
  bool satisfied = false;
  Verdict verdict = Verdict::inconclusive;
  double computed_value = 0.0;
  double threshold = 0.0;
  Comparison comparison = Comparison::below;
  Method method = Method::closed_form;
  /// Whether the condition gates admissibility, or is informational only.
  bool required = true;
  std::optional<std::string> discrepancy_note;
  nlohmann::json details = nlohmann::json::object();
};

/// Applies the comparison and margin to fill satisfied/verdict.
ConditionReport decide(std::string name, double value, double threshold, Comparison cmp,
                       Method method);

std::string to_string(Verdict v);
std::string to_string(Method m);
nlohmann::json to_json(const ConditionReport& r);
ConditionReport condition_report_from_json(const nlohmann::json& j);

/// A precondition failed; carries the report that failed.
class RefusedError : public Error {
public:
  explicit RefusedError(ConditionReport report);
  const ConditionReport& report() const noexcept { return report_; }

private:
  ConditionReport report_;
};

/// min |z| over the roots of Phi; satisfied iff > 1 + margin.
ConditionReport check_causality(const ArmaSpec& spec);

/// Positivity of every g_i and c_j over the innovation support.
ConditionReport check_positivity(const AugGarchSpec& spec);

/// sum_j ||c_j(eps)||_s with s = max(1, r/delta), and the companion
/// sum_i ||g_i(eps)||_s < inf, evaluated by quadrature. Satisfied iff the
/// c-sum is < 1, the g-sum is finite and positivity holds.
/// Throws WrongGroupError for log-Lambda specs.
ConditionReport check_polynomial_condition(const AugGarchSpec& spec, int r);

/// sum_j |c_j| < 1 together with E[exp(4r sum_i g_i(eps)^2)] < inf; the latter
/// by log-integrand tail analysis followed by quadrature, and may come back
/// inconclusive. Throws WrongGroupError for power-Lambda specs.
ConditionReport check_exponential_condition(const AugGarchSpec& spec, int r);

/// sum alpha + sum beta < 1. Throws ParameterError unless model == garch.
ConditionReport check_garch_stationarity(const AugGarchSpec& spec);

/// E|eps|^{2r} < inf, the moment the sample-moment CLT needs.
ConditionReport check_innovation_moment(const InnovationDist& dist, int r);

/// E[|c|^s] for the volatility coefficient of a named (1,1)-type row, in
/// closed form; nullopt when no closed form exists (generic model, non-integer s).
std::optional<double> closed_form_c_moment(const AugGarchSpec& spec, std::size_t j, double s);

/// Closed-form row of the named-model condition tables: `table2_row` for
/// p = q = 1 (value E|c_1|^s) and `table3_row` otherwise (value
/// sum_j ||c_j||_s). Cross-checked against quadrature; a discrepancy_note is
/// attached where the textbook printed form of the row does not evaluate to
/// the same number.
ConditionReport table_row(const AugGarchSpec& spec, int r);

/// Every report relevant for (spec, r), in a stable order.
std::vector<ConditionReport> check_all(const ProcessSpec& spec, int r);

/// Throws RefusedError with the first failing required report.
void require_admissible(const ProcessSpec& spec, int r);

}  // namespace fclt
