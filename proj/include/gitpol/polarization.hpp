#pragma once

#include <string>
#include <vector>

#include "gitpol/region.hpp"
#include "gitpol/setting.hpp"

namespace gitpol {

struct Polarization {
  Vec lambda;  // r weights of the left summands
  Vec mu;      // s weights of the right summands (entering with a minus sign)

  bool operator==(const Polarization&) const = default;
};

bool is_normalized(const Polarization& pol, const std::vector<int>& m, const std::vector<int>& n);
bool is_proper(const Polarization& pol);

struct DimensionVector {
  std::vector<int> mprime, nprime;
  bool operator==(const DimensionVector&) const = default;
  auto operator<=>(const DimensionVector&) const = default;
};

// Neither all zero nor all full.
bool is_proper_vector(const DimensionVector& d, const std::vector<int>& m, const std::vector<int>& n);
// Every proper dimension vector, in lexicographic order.
std::vector<DimensionVector> proper_dimension_vectors(const std::vector<int>& m, const std::vector<int>& n);

// Σ λ_i m'_i − Σ μ_l n'_l.
Rational discriminant(const Polarization& pol, const DimensionVector& d);

struct AssociatedPolarization {
  Vec alpha, beta;
  std::vector<size_t> p, q;
};

// Solves λ_j = Σ_{i≤j} a_ji α_i (forward) and μ_m = Σ_{l≥m} b_lm β_l (backward).
AssociatedPolarization associated(const Polarization& pol, const CompositionSystem& sys);
// The inverse transform.
Polarization from_associated(const Vec& alpha, const Vec& beta, const CompositionSystem& sys);

// p'_i = Σ_{j≥i} m'_j a_ji and q'_l = Σ_{m≤l} n'_m b_lm.
std::vector<size_t> saturated_left_dims(const std::vector<int>& mprime, const CompositionSystem& sys);
std::vector<size_t> saturated_right_dims(const std::vector<int>& nprime, const CompositionSystem& sys);

struct WeightCheck {
  std::string id;
  bool holds = false;
  Rational slack;  // the left side minus the right side
  bool strict = true;
};

// Σ_{j≥i} α_j p_j > 0 for 2 ≤ i ≤ r and Σ_{l≤m} β_l q_l > 0 for 1 ≤ m ≤ s−1.
std::vector<WeightCheck> weight_conditions(const AssociatedPolarization& assoc);
// α_i > 0 and β_l > 0.
std::vector<WeightCheck> positivity_conditions(const AssociatedPolarization& assoc);

// Necessary conditions for stable points with signed weights (left weights positive,
// right weights negative when proper).
//   case 1: every left weight > 0, every right weight < 0
//   case 2: left tail sums Σ_{j≥i} e_j d_j > 0, right head sums Σ_{l≤m} e_l d_l < 0
//   case 3: left tail sums > 0, every right weight < 0
std::vector<WeightCheck> proper_case_check(const Vec& left_weights, const Vec& right_weights,
                                           const std::vector<size_t>& left_dims,
                                           const std::vector<size_t>& right_dims, int which_case);

struct CharacterExponents {
  std::vector<Integer> left, right;  // coprime integers; right entries are −scale·μ_l
  Integer scale;
  Integer degree_case1;  // Σ e_i m_i over the left side
  Integer degree_case2;  // Σ i·e_i m_i − Σ (s−l) e_l n_l with 1-based i, l
};
CharacterExponents char_exponents(const Polarization& pol, const std::vector<int>& m,
                                  const std::vector<int>& n);

// Free coordinates on the normalized polarization space. Each parameter is an affine
// functional of (λ, μ); together with the two normalizations they determine the polarization.
// Accepted parameter forms: "lambda2", "mu1", "1-mu1", "2*lambda2", "3/2*mu2", and "t" (= m_2 λ_2, type (2,1)).
class Chart {
 public:
  Chart(std::vector<std::string> names, std::vector<int> m, std::vector<int> n);
  // Default chart: t for type (2,1); otherwise λ_2..λ_r, μ_1..μ_{s−1}.
  static Chart standard(const std::vector<int>& m, const std::vector<int>& n);

  int dim() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<int>& m() const { return m_; }
  const std::vector<int>& n() const { return n_; }

  Polarization at(const Vec& point) const;
  Vec coordinates(const Polarization& pol) const;
  // Rewrites the linear form coeffs · (λ, μ) + constant in chart coordinates.
  std::pair<Vec, Rational> pull_back(const Vec& coeffs, const Rational& constant) const;
  // Proper polarizations (all λ_i > 0, μ_l > 0) as strict half-spaces.
  std::vector<HalfSpace> proper_domain() const;
  // A box containing the closure of the proper domain.
  Box bounding_box() const;

 private:
  std::vector<std::string> names_;
  std::vector<int> m_, n_;
  // pol = base_ + dirs_ · x, as a vector over (λ, μ).
  Vec base_;
  std::vector<Vec> dirs_;
  std::vector<std::pair<Vec, Rational>> funcs_;
};

// Δ(d) as an affine form in chart coordinates.
std::pair<Vec, Rational> discriminant_form(const Chart& chart, const DimensionVector& d);

struct Wall {
  Vec normal;         // coprime integers, first nonzero entry positive
  Rational constant;  // normal · x + constant = 0
  std::vector<DimensionVector> sources;
};

// Walls meeting the open proper domain, deduplicated and sorted by (normal, constant).
// Vectors with Δ identically zero on the chart are skipped.
std::vector<Wall> singular_polarizations(const Chart& chart);
// For one free parameter: the wall positions in increasing order.
std::vector<Rational> singular_values(const Chart& chart);

struct ChamberSet {
  std::vector<Wall> walls;              // walls that cross the window's interior
  std::vector<std::vector<Vec>> cells;  // closures of the open chambers
};

// Open chambers of the arrangement inside window ∩ proper domain.
ChamberSet chambers(const Chart& chart, const Box& window);

// Serial and parallel wall enumeration; identical results.
std::vector<Wall> singular_polarizations_serial(const Chart& chart);

std::string format_dimension_vector(const DimensionVector& d);

}  // namespace gitpol
