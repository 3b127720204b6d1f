#pragma once

#include <string>
#include <vector>

#include "gitpol/json_io.hpp"
#include "gitpol/polarization.hpp"
#include "gitpol/setting.hpp"
#include "gitpol/stability.hpp"

namespace gitpol {

// The reductive enlargement. With 0-based indices
//   P_i = ⊕_{j≥i} M_j ⊗ A_ji,   Q_l = ⊕_{m≤l} N_m ⊗ B*_lm,
// block j of P_i at p_offset[i][j] (rows μ·a_ji + α inside the block), block m of Q_l at
// q_offset[l][m] (rows ν·b_lm + β). B*_lm uses the dual of the stored basis of B_lm.
struct BigSetting {
  SystemPtr sys;
  std::vector<size_t> p, q;
  std::vector<std::vector<size_t>> p_offset, q_offset;
  std::vector<RatMatrix> xi;   // xi[i], i ≥ 1: P_i ⊗ A_{i,i−1} → P_{i−1}; xi[0] is empty
  std::vector<RatMatrix> eta;  // eta[l], l ≤ s−2: Q_{l+1} ⊗ B_{l+1,l} → Q_l
  size_t h_top() const { return sys->h[sys->s - 1][0]; }
};

BigSetting build_big(SystemPtr sys);

// 𝐰 = (x_2..x_r, γ, y_1..y_{s−1}); x[0] is empty. gamma: P_1 ⊗ H*_{s1} → Q_s with
// column index x·h_{s1} + z.
struct BigElement {
  std::vector<RatMatrix> x;
  RatMatrix gamma;
  std::vector<RatMatrix> y;
  bool operator==(const BigElement& o) const = default;
};

// γ(w) in the P_1 ⊗ H*_{s1} → Q_s form.
RatMatrix gamma_of(const BigSetting& big, const MorphismElement& w);
BigElement zeta(const BigSetting& big, const MorphismElement& w);

struct BigGroupElement {
  std::vector<RatMatrix> g;  // g[i] ∈ GL(P_i)
  std::vector<RatMatrix> h;  // h[l] ∈ GL(Q_l)
  bool operator==(const BigGroupElement& o) const = default;
};

BigGroupElement theta(const BigSetting& big, const GroupElement& g);
BigGroupElement compose_big(const BigGroupElement& a, const BigGroupElement& b);
// x_i ↦ g_{i−1} x_i (g_i ⊗ 1)^{-1}, γ ↦ h_s γ (g_1 ⊗ 1)^{-1}, y_l ↦ h_l y_l (h_{l+1} ⊗ 1)^{-1}.
BigElement act_big(const BigSetting& big, const BigGroupElement& g, const BigElement& bw);

// Rank of w ↦ γ(w) equals dim W.
bool gamma_injectivity_check(const CompositionSystem& sys);
size_t gamma_rank(const CompositionSystem& sys);

enum class ZStatus { InZ, Boundary, Outside };
std::string to_string(ZStatus s);

struct ZCondition {
  std::string id;  // e.g. "rank-x2", "factor-left-3", "factor-gamma-left-2-1"
  std::string group;  // "rank", "rank*", "left-chain", "right-chain", "gamma-left", "gamma-right"
  bool holds = false;
  long value = -1, canonical = -1;  // ranks only
};

struct ZReport {
  ZStatus status = ZStatus::Outside;
  std::vector<ZCondition> conditions;
  std::string note;
};

// Rank and factorization conditions characterizing the orbit of ζ(W) and its closure.
ZReport z_membership(const BigSetting& big, const BigElement& bw);

// Subspaces P'_i ⊂ P_i and Q'_l ⊂ Q_l as column bases.
struct BigFamily {
  std::vector<RatMatrix> pprime, qprime;
};

// P_i(M') = ⊕ M'_j ⊗ A_ji and Q_l(N') = ⊕ N'_m ⊗ B*_lm.
BigFamily saturated_big_family(const BigSetting& big, const SubspaceFamily& fam);
bool is_big_invariant(const BigSetting& big, const BigElement& bw, const BigFamily& fam);
// Σ α_i p'_i − Σ β_l q'_l.
Rational big_delta(const AssociatedPolarization& assoc, const BigFamily& fam);
BigFamily transform_family(const BigGroupElement& g, const BigFamily& fam);

// A destabilizer of w (found on act(h, w)) moved to a destabilizer of ζ(w).
BigFamily transport_witness(const BigSetting& big, const StabilityWitness& wit);

struct BigVerdict {
  StabilityStatus status = StabilityStatus::NoDestabilizerFound;
  std::optional<BigFamily> family;
  Rational delta;
  size_t budget_used = 0, candidates = 0;
  bool budget_exhausted = false;
  std::string note;
};

// King-type search on the chain P_r → … → P_1 → Q_s → … → Q_1 with weights (α, −β).
// Never reports STABLE_EXACT.
BigVerdict big_destabilizer_search(const BigSetting& big, const BigElement& bw, const AssociatedPolarization& assoc,
                                   size_t budget = 4000, uint64_t seed = 1);
BigVerdict big_destabilizer_search_serial(const BigSetting& big, const BigElement& bw,
                                          const AssociatedPolarization& assoc, size_t budget = 4000,
                                          uint64_t seed = 1);

Json big_element_to_json(const BigElement& bw);
Json z_report_to_json(const ZReport& rep);
Json big_verdict_to_json(const BigVerdict& v);

}  // namespace gitpol
