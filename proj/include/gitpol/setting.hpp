#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gitpol/matrix.hpp"
#include "gitpol/polynomial.hpp"

namespace gitpol {

struct ProblemSpec {
  int ambient_dim = 0;  // n; dim V = n+1
  std::vector<int> left_twists, left_mults;
  std::vector<int> right_twists, right_mults;

  int r() const { return static_cast<int>(left_twists.size()); }
  int s() const { return static_cast<int>(right_twists.size()); }
  void validate() const;  // throws SchemaError
  bool operator==(const ProblemSpec&) const = default;
};

// Dual problem: the transpose F* → E*. Types (r,s) become (s,r).
ProblemSpec transpose(const ProblemSpec& spec);

// Indices are 0-based throughout the code: the first block has index 0.
// All composition maps X⊗Y → Z are stored as dim Z × (dim X · dim Y) matrices
// with column index x * dim Y + y.
struct CompositionSystem {
  int r = 0, s = 0;
  std::vector<int> m, n;                   // multiplicities (0 allowed for graded pieces)
  std::vector<std::vector<size_t>> a;      // a[j][i] = dim A_ji, i <= j
  std::vector<std::vector<size_t>> b;      // b[m][l] = dim B_ml, l <= m
  std::vector<std::vector<size_t>> h;      // h[l][i] = dim H_li
  std::map<std::array<int, 3>, RatMatrix> comp_aa;  // (k,j,i): A_kj ⊗ A_ji → A_ki
  std::map<std::array<int, 3>, RatMatrix> comp_bb;  // (p,m,l): B_pm ⊗ B_ml → B_pl
  std::map<std::array<int, 3>, RatMatrix> comp_ha;  // (l,j,i): H_lj ⊗ A_ji → H_li
  std::map<std::array<int, 3>, RatMatrix> comp_bh;  // (m,l,i): B_ml ⊗ H_li → H_mi
  std::optional<ProblemSpec> origin;                // set for line-bundle systems

  const RatMatrix& aa(int k, int j, int i) const;
  const RatMatrix& bb(int p, int mm, int l) const;
  const RatMatrix& ha(int l, int j, int i) const;
  const RatMatrix& bh(int mm, int l, int i) const;

  size_t dim_w() const;
  // Dimension of G = G_L × G_R.
  size_t dim_g() const;
};

using SystemPtr = std::shared_ptr<const CompositionSystem>;

SystemPtr build_line_bundle_system(const ProblemSpec& spec);

// Same spaces and pairings with other multiplicities (used for graded pieces).
SystemPtr with_multiplicities(const CompositionSystem& sys, const std::vector<int>& m,
                              const std::vector<int>& n);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;
};
// Surjectivity of all compositions and induced dual maps, plus the five associativity squares.
ValidationReport validate_system(const CompositionSystem& sys);

// Induced maps on duals. For C: H_lj ⊗ A_ji → H_li this is H*_li ⊗ A_ji → H*_lj
// (dim H_lj × (dim H_li · dim A_ji)); for C: B_ml ⊗ H_li → H_mi it is
// B_ml ⊗ H*_mi → H*_li (dim H_li × (dim B_ml · dim H_mi)).
RatMatrix dual_of_right_factor(const RatMatrix& c, size_t dim_x, size_t dim_y);
RatMatrix dual_of_left_factor(const RatMatrix& c, size_t dim_x, size_t dim_y);

struct MorphismElement {
  SystemPtr sys;
  std::vector<std::vector<RatMatrix>> phi;  // phi[l][i]: (n_l·h_li) × m_i

  static MorphismElement zero(SystemPtr sys);
  MorphismElement operator+(const MorphismElement& o) const;
  MorphismElement operator-(const MorphismElement& o) const;
  MorphismElement scaled(const Rational& c) const;
  bool operator==(const MorphismElement& o) const;
  bool is_zero() const;
  // Coordinates in a fixed basis of W (blocks in (l,i) order, row-major inside).
  Vec flatten() const;
  static MorphismElement unflatten(SystemPtr sys, const Vec& v);
};

struct GroupElement {
  SystemPtr sys;
  std::vector<RatMatrix> g;                         // g[i]: m_i × m_i
  std::map<std::pair<int, int>, RatMatrix> u;      // u[{j,i}], i<j: (m_j·a_ji) × m_i
  std::vector<RatMatrix> hh;                        // hh[l]: n_l × n_l
  std::map<std::pair<int, int>, RatMatrix> v;      // v[{m,l}], l<m: (n_m·b_ml) × n_l
  bool is_unipotent = false;

  static GroupElement identity(SystemPtr sys);
  bool operator==(const GroupElement& o) const;
  bool check_unipotent() const;
};

GroupElement compose_group(const GroupElement& g2, const GroupElement& g1);
GroupElement inverse(const GroupElement& g);
MorphismElement act(const GroupElement& g, const MorphismElement& w);

GroupElement random_unipotent(SystemPtr sys, std::uint64_t seed, int coefficient_bound);
// Random element of G_red (u = v = 0) with invertible diagonal blocks.
GroupElement random_reductive(SystemPtr sys, std::uint64_t seed, int coefficient_bound);
GroupElement random_group(SystemPtr sys, std::uint64_t seed, int coefficient_bound);
MorphismElement random_morphism(SystemPtr sys, std::uint64_t seed, int coefficient_bound,
                                int zero_percent = 0);

// Composition primitives shared with the embedding module.
// After: (P ← Q⊗X) then (Q ← C⊗Y): M_c → M_q⊗Y → M_p⊗X⊗Y → M_p⊗Z with comp: X⊗Y → Z.
//   outer: (dim P · dim X) × dim Q, inner: (dim Q · dim Y) × dim C.
RatMatrix compose_after(const RatMatrix& outer, size_t dim_x, const RatMatrix& inner, size_t dim_y,
                        const RatMatrix& comp);
// Before: V: N_l → N_m⊗B, then Phi: M → N_l⊗H, combined by comp: B⊗H → Z.
//   v: (dim N_m · dim B) × dim N_l, phi: (dim N_l · dim H) × c.
RatMatrix compose_before(const RatMatrix& v, size_t dim_b, const RatMatrix& phi, size_t dim_h,
                         const RatMatrix& comp);

// Polynomial-matrix I/O for line-bundle systems. Block (l,i) is an n_l × m_i matrix
// of forms of degree f_l − e_i.
MorphismElement morphism_from_polynomials(
    SystemPtr sys, const std::vector<std::vector<std::vector<std::vector<std::string>>>>& blocks);
std::vector<std::vector<std::vector<std::vector<std::string>>>> morphism_to_polynomials(
    const MorphismElement& w);

// The polynomial carried by coefficient vector coeffs of S^d V*.
Polynomial form_from_coeffs(int n, int d, const Vec& coeffs);
Vec coeffs_from_form(int n, int d, const Polynomial& p);

// Degrees of the spaces in a line-bundle system.
int deg_a(const ProblemSpec& spec, int j, int i);
int deg_b(const ProblemSpec& spec, int mm, int l);
int deg_h(const ProblemSpec& spec, int l, int i);

}  // namespace gitpol
