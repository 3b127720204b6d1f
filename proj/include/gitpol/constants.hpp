#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gitpol/setting.hpp"

namespace gitpol {

enum class ConstantSide { Left, Right };

// One codimension constant. Left side: c_l for the blocks i > base paired with A_{i,base}
// and H_{l,base}. Right side: d_i for the blocks l < base paired with B_{base,l} and H_{base,i}.
// mults has one entry per participating block, in block order.
struct ConstantQuery {
  SystemPtr sys;
  ConstantSide side = ConstantSide::Left;
  int index = 0;
  int base = 0;
  std::vector<int> mults;
};

// c_l(m_2, ..., m_r) with the system's own multiplicities.
ConstantQuery c_query(SystemPtr sys, int l);
// d_i(n_1, ..., n_{s-1}) with the system's own multiplicities.
ConstantQuery d_query(SystemPtr sys, int i);
// Type (3,1): c_3 = c_1(0, m_3) and c'_3 (blocks paired through A_32 and H_12).
ConstantQuery c3_query(SystemPtr sys);
ConstantQuery c3_prime_query(SystemPtr sys);

std::string describe(const ConstantQuery& q);

// The linear data behind one constant: U = ⊕ M_k ⊗ A_k and the map
// δ: U ⊗ H*_src → ⊕ M_k ⊗ H*_k.
struct DeltaBlock {
  int mult = 0;
  size_t a = 0;       // dim A_k (or B_k)
  size_t h_tgt = 0;   // dim H*_k
  RatMatrix pairing;  // h_tgt × (h_src · a); column x * a + y with x ∈ H*_src, y ∈ A_k
};

struct DeltaSystem {
  size_t h_src = 0;
  std::vector<DeltaBlock> blocks;

  size_t dim_u() const;
  size_t dim_target() const;
  size_t offset(size_t k) const;  // start of block k inside U
};

DeltaSystem delta_system(const ConstantQuery& q);

// K is given by spanning columns (dim_u rows).
bool in_family(const DeltaSystem& ds, const RatMatrix& k);
// codim δ(K ⊗ H*_src) / codim K; K must be a proper subspace.
Rational rho(const DeltaSystem& ds, const RatMatrix& k);
size_t image_dim(const DeltaSystem& ds, const RatMatrix& k);

// Adds one to the multiplicity of block `block` and returns the padded subspace
// (L ⊗ A_k) ⊕ K, with the new summand L placed first.
std::pair<DeltaSystem, RatMatrix> pad_subspace(const DeltaSystem& ds, const RatMatrix& k, size_t block);

// m(m−1)/(2(m(n+1)−1)) for m ≤ n+1, else (n+1)/(2(n+2)).
Rational c_closed_form_21(int n, int m);
// (n+1)/sym_dim(n, d−1).
Rational c_closed_form_triple(int n, int d);

// Stated values for configurations that have no closed form here.
std::optional<Rational> reference_table(const ConstantQuery& q);

enum class ConstantSource { Empty, SingleFactor, ClosedForm21, ClosedFormTriple, Table, LowerBound };
std::string to_string(ConstantSource s);

struct ConstantValue {
  Rational value;
  ConstantSource source = ConstantSource::LowerBound;
  bool exact() const { return source != ConstantSource::LowerBound; }
};

struct LowerBound {
  Rational value;
  std::optional<RatMatrix> witness;  // rows form the reduced basis of K
  size_t candidates = 0;             // subspaces evaluated
  size_t admissible = 0;             // of which in the family
};

// Maximum of ρ over a deterministic pool plus `trials` seeded random subspaces.
LowerBound sampled_lower_bound(const ConstantQuery& q, uint64_t seed, size_t trials);
LowerBound sampled_lower_bound_serial(const ConstantQuery& q, uint64_t seed, size_t trials);

// Exact value when known, otherwise a sampled lower bound.
ConstantValue resolve(const ConstantQuery& q, uint64_t seed = 1, size_t trials = 200);

}  // namespace gitpol
