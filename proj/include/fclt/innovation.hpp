#pragma once

#include <string>

#include "fclt/rng.hpp"

namespace fclt {

/// Law of the iid innovations. Every kind is standardised to mean 0 and
/// variance 1, and every kind is symmetric about 0.
struct InnovationDist {
  enum class Kind { standard_normal, student_t, rademacher, uniform };

  Kind kind = Kind::standard_normal;
  double dof = 0.0;  // student_t only

  static InnovationDist normal() { return {Kind::standard_normal, 0.0}; }
  static InnovationDist student_t(double dof) { return {Kind::student_t, dof}; }
  static InnovationDist rademacher() { return {Kind::rademacher, 0.0}; }
  static InnovationDist uniform() { return {Kind::uniform, 0.0}; }

  /// Throws ParameterError for dof <= 2.
  void validate() const;

  bool discrete() const { return kind == Kind::rademacher; }
  /// Student-t with dof <= 4 has no finite fourth moment.
  bool lacks_fourth_moment() const { return kind == Kind::student_t && dof <= 4.0; }

  double sample(Rng& rng) const;

  /// Lebesgue density; 0 for the discrete law.
  double pdf(double x) const;
  /// log pdf, evaluated without underflow in the tails.
  double log_pdf(double x) const;
  double cdf(double x) const;
  /// Lower quantile inf{x : F(x) >= p}.
  double quantile(double p) const;

  /// Support as [lo, hi]; infinite for normal and t.
  double support_lo() const;
  double support_hi() const;

  /// E|eps|^k in closed form, +inf when the moment does not exist.
  double abs_moment(double k) const;

  bool operator==(const InnovationDist&) const = default;
};

std::string to_string(InnovationDist::Kind kind);
InnovationDist::Kind innovation_kind_from_string(const std::string& s);

}  // namespace fclt
