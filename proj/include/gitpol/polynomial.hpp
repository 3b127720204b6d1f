#pragma once

#include <map>
#include <string>
#include <string_view>

#include "gitpol/graded.hpp"

namespace gitpol {

struct GrlexGreater {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

// Sparse multivariate polynomial over Q in variables x0..x_{nvars-1}.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Rational, GrlexGreater>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}
  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int k);
  static Polynomial monomial(const Exponent& e, const Rational& c);
  static Polynomial from_coeffs(const GradedSpace& space, const Vec& coeffs);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int total_degree() const;  // -1 for zero
  bool is_homogeneous() const;
  const Exponent& leading_exponent() const { return terms_.begin()->first; }
  const Rational& leading_coeff() const { return terms_.begin()->second; }

  void add_term(const Exponent& e, const Rational& c);
  Vec to_coeffs(const GradedSpace& space) const;  // requires homogeneity of that degree

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Rational& c) const;
  Polynomial pow(int k) const;
  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Rational evaluate(const Vec& point) const;
  Polynomial monic() const;

  int degree_in(int var) const;
  // Coefficient of var^k, as a polynomial in the remaining variables.
  Polynomial coeff_in(int var, int k) const;

 private:
  int nvars_ = 0;
  Terms terms_;
};

// Variables may be written x0..xn or z0..zn; '*' may be omitted; '^' for powers.
Polynomial parse_polynomial(std::string_view text, int nvars);
std::string to_string(const Polynomial& p);

// Exact division; throws if b does not divide a.
Polynomial exact_divide(const Polynomial& a, const Polynomial& b);

// Monic gcd (the zero polynomial only when both inputs are zero).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

}  // namespace gitpol
