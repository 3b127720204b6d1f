#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gitpol/constants.hpp"
#include "gitpol/json_io.hpp"
#include "gitpol/polarization.hpp"
#include "gitpol/region.hpp"

namespace gitpol {

enum class Truth { True, False, Unknown };
std::string to_string(Truth t);

struct ConstantUse {
  std::string name;
  Rational value;
  ConstantSource source = ConstantSource::LowerBound;
};

// coeffs · (λ_1..λ_r, μ_1..μ_s) + constant ≥ 0, or > 0 when strict.
struct LinearCondition {
  std::string id;
  std::string text;
  Vec coeffs;
  Rational constant;
  bool strict = false;
  std::vector<ConstantUse> constants;

  bool exact() const;
  Rational slack(const Polarization& pol) const;
};

struct ConditionTree {
  enum class Kind { Leaf, All, Any };
  Kind kind = Kind::All;
  std::string id;
  LinearCondition leaf;
  std::vector<ConditionTree> children;

  static ConditionTree of(LinearCondition c);
  static ConditionTree all(std::string id, std::vector<ConditionTree> children);
  static ConditionTree any(std::string id, std::vector<ConditionTree> children);
  // Conjunctions of leaves whose union is the tree.
  std::vector<std::vector<LinearCondition>> disjunctive_form() const;
};

struct ConditionReport {
  std::string id;
  ConditionTree::Kind kind = ConditionTree::Kind::Leaf;
  Truth truth = Truth::Unknown;
  std::optional<Rational> slack;  // leaves only
  bool strict = false;
  std::vector<ConstantUse> constants;
  std::vector<ConditionReport> children;

  bool holds() const { return truth == Truth::True; }
};

// A leaf whose constants are not all exact evaluates to Unknown.
ConditionReport evaluate(const ConditionTree& tree, const Polarization& pol);

struct CertifyOptions {
  uint64_t seed = 1;
  size_t trials = 200;  // for constants that are only sampled
};

// Each builder resolves the constants it needs.
ConditionTree cond_equivalence_s1(const ProblemSpec& spec, const CertifyOptions& opt = {});
ConditionTree cond_equality_left(const ProblemSpec& spec, const CertifyOptions& opt = {});
ConditionTree cond_equality_right(const ProblemSpec& spec, const CertifyOptions& opt = {});
// Positivity of the associated weights plus both sides; for s = 1 this is cond_equivalence_s1.
ConditionTree cond_equality_general(const ProblemSpec& spec, const CertifyOptions& opt = {});
// Empty when no criterion is available for the type.
std::optional<ConditionTree> cond_projectivity(const ProblemSpec& spec, const CertifyOptions& opt = {});

enum class Verdict { GoodProjectiveQuotient, GeometricQuotientOnly, Unknown };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct Certificate {
  ProblemSpec spec;
  Polarization pol;
  Verdict verdict = Verdict::Unknown;
  std::string reason;
  ConditionTree equality_tree;
  ConditionReport equality;
  std::optional<ConditionTree> projectivity_tree;
  std::optional<ConditionReport> projectivity;
};

// Throws SchemaError for shape mismatch or a polarization that is not normalized.
Certificate certify(const ProblemSpec& spec, const Polarization& pol, const CertifyOptions& opt = {});

Json certificate_to_json(const Certificate& cert);

struct CertificateCheck {
  bool consistent = false;    // stored slacks and truths re-evaluate to themselves
  bool reproducible = false;  // a fresh certify gives the same verdict and truths
  std::string message;
};
CertificateCheck verify_certificate(const Json& j, const CertifyOptions& opt = {});

// t-thresholds for type (2,1) with a = dim A_21 and constant c = c_1(m_2):
// α_2 > 0 ⇔ t > a m_2 / (a m_2 + m_1), and the constant bound t ≥ a c m_2 / n_1.
std::pair<Rational, Rational> thresholds_general(long a, int m1, int m2, int n1, const Rational& c);
// The same for (O(-2)^{m1} ⊕ O(-1)^{m2} → O^{n1}) on P_n, from the explicit formulas.
std::pair<Rational, Rational> thresholds_projective_space(int n, int m1, int m2, int n1);

struct AdmissibleRegion {
  Chart chart;
  Region region;
  // One entry per convex piece: the primitive integer inequalities in chart coordinates.
  std::vector<std::vector<HalfSpace>> inequalities;
  bool projectivity_available = true;
  size_t dropped_inexact = 0;  // conjunctions skipped because a constant is only bounded
};

// Polarizations in the chart certified as GOOD_PROJECTIVE_QUOTIENT.
AdmissibleRegion admissible_region(const ProblemSpec& spec, const std::vector<std::string>& params,
                                   const CertifyOptions& opt = {});

// dim W − dim G + 1.
long expected_dimension(const ProblemSpec& spec);

}  // namespace gitpol
