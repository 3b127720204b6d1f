#pragma once

#include <string>
#include <vector>

#include "gitpol/json_io.hpp"
#include "gitpol/polarization.hpp"
#include "gitpol/polynomial.hpp"
#include "gitpol/setting.hpp"

namespace gitpol {

// Morphisms O(−2) ⊗ C² → O(−1) ⊕ (O ⊗ C^k) on P_n.
ProblemSpec fm_spec(int n, int k);
// λ = 1/2 on the left; μ = (t, (1 − t)/k) on the right.
Polarization fm_polarization(int n, int k, const Rational& t);

struct CriticalValue {
  long p = 0;
  Rational t;  // 1 − k/(2p)
};

struct FMParams {
  int n = 0, k = 0;
  bool valid = false;  // (n+1)(n+2)/2 < k ≤ (n+1)²
  long q_intro = 0;    // (n+1)(n+2)/2 − ⌊(n+k+1)/2⌋
  long q_body = 0;     // (n+1)(n+2)/2 − ⌊(n+1+k)/2⌋ + 1; the reported count
  long dimension = 0;  // 2(n−1) + k((n+1)² − k)
  Rational window_low; // quotients are projective for t above (n+1)/(n+1+k)
  std::vector<CriticalValue> critical;  // increasing p
};

FMParams fm_params(int n, int k);

// dim of the cubics vanishing on a codimension-2 linear subspace, computed as a rank,
// against C(n+3,3) − C(n+1,3) and (n+1)².
bool ideal_h0_check(int n);
size_t ideal_h0(int n);

enum class FMClass { Generic, Special, Degenerate };
std::string to_string(FMClass c);
FMClass classify(const MorphismElement& phi);

struct PKDatum {
  int n = 0;
  Polynomial z1, z2;          // independent linear forms
  std::vector<Polynomial> K;  // independent cubics in the ideal (z1, z2)
};

// Throws SchemaError naming the offending entry.
void validate_datum(const PKDatum& d);
// Φ₁(λ, μ) = λ z1 − μ z2 and row i of Φ₂ is (q_{2i}, q_{1i}) for K_i = z1 q_{1i} + z2 q_{2i}.
MorphismElement build_phi_from_PK(const PKDatum& d);
// Same, with the splittings given explicitly (pairs (q_{1i}, q_{2i})).
MorphismElement build_phi_from_splitting(int n, const Polynomial& z1, const Polynomial& z2,
                                         const std::vector<std::pair<Polynomial, Polynomial>>& q);

// True iff the cubics of K have a constant gcd.
bool injectivity_codim2_check(const PKDatum& d);

// f': C^k* → H⁰(I(3)) for generic φ; its rank.
size_t f_prime_rank(const MorphismElement& phi);
bool f_prime_injective(const MorphismElement& phi);
// Φ̄₂: C² → H⁰(O_H(2)) ⊗ C^k for special φ.
bool special_fbar2_injective(const MorphismElement& phi);

// φ(x) as a (1 + k) × 2 matrix.
RatMatrix evaluate_fm(const MorphismElement& phi, const Vec& point);

PKDatum datum_from_json(const Json& j);
Json datum_to_json(const PKDatum& d);
Json fm_params_to_json(const FMParams& p);

}  // namespace gitpol
