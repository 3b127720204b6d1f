#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gitpol/json_io.hpp"
#include "gitpol/polarization.hpp"
#include "gitpol/setting.hpp"

namespace gitpol {

// Subspaces M'_i ⊂ C^{m_i} and N'_l ⊂ C^{n_l}, each given by a basis of columns.
struct SubspaceFamily {
  std::vector<RatMatrix> mprime, nprime;

  static SubspaceFamily zero(const CompositionSystem& sys);
  static SubspaceFamily full(const CompositionSystem& sys);
  DimensionVector dims() const;
  bool operator==(const SubspaceFamily& o) const;
};

// Column basis in reduced echelon form (canonical for the span).
RatMatrix canonical_basis(const RatMatrix& columns, size_t ambient);

// φ_li(M'_i) ⊆ N'_l ⊗ H_li for all l, i.
bool is_invariant(const MorphismElement& w, const SubspaceFamily& fam);
// Smallest N' making (M', N') invariant.
SubspaceFamily saturate_up(const MorphismElement& w, const std::vector<RatMatrix>& mprime);
// Largest M' making (M', N') invariant.
SubspaceFamily saturate_down(const MorphismElement& w, const std::vector<RatMatrix>& nprime);

Rational family_delta(const Polarization& pol, const SubspaceFamily& fam);

enum class StabilityStatus { Unstable, NotStable, NoDestabilizerFound, StableExact };
std::string to_string(StabilityStatus s);

struct StabilityWitness {
  GroupElement h;  // the family is invariant for act(h, w)
  SubspaceFamily family;
  Rational delta;
};

struct StabilityVerdict {
  StabilityStatus status = StabilityStatus::NoDestabilizerFound;
  std::optional<StabilityWitness> witness;
  size_t budget_used = 0;
  size_t candidates = 0;          // size of the candidate pool before truncation
  bool budget_exhausted = false;  // the pool was larger than the budget
  bool exhaustive = false;        // every family of act(h, w) was covered for each sampled h
  std::string note;
};

struct SearchOptions {
  size_t budget = 4000;
  uint64_t seed = 1;
  bool unipotent = true;  // also search along sampled H-orbit points
};

// Semi-decision. UNSTABLE and NOT_STABLE carry a witness; STABLE_EXACT only when every
// m_i ≤ 1 and H is trivial, so the exhaustive branch covers the whole orbit.
StabilityVerdict destabilizer_search(const MorphismElement& w, const Polarization& pol, const SearchOptions& opt = {});
StabilityVerdict destabilizer_search_serial(const MorphismElement& w, const Polarization& pol,
                                            const SearchOptions& opt = {});

// Exact G_red-verdict for w itself when every m_i ≤ 1: StableExact here means reductive stability.
StabilityVerdict reductive_exhaustive(const MorphismElement& w, const Polarization& pol);

// Witness re-check: invariance under act(h, w), the stored Δ, and its sign against the status.
bool verify_witness(const MorphismElement& w, const Polarization& pol, const StabilityVerdict& v);

// Morphisms 2 O(-2) → O(-1) ⊕ O on P_2.
enum class Mu1Side { AboveHalf, BelowHalf };
StabilityVerdict decide_two_by_one_plane(const MorphismElement& x, Mu1Side side);
// A normalized polarization on the given side (μ_1 = 3/4 or 1/4).
Polarization two_by_one_plane_polarization(Mu1Side side);

// UNSTABLE if some act(h, w) with h from a seeded H-sample is destabilized.
StabilityVerdict g_stability_sample(const MorphismElement& w, const Polarization& pol, size_t trials, uint64_t seed,
                                    size_t budget_per_trial = 400);

struct FiltrationFamily {
  std::vector<SubspaceFamily> levels;  // strictly increasing, ending at the full family
};

// The graded piece between levels j-1 and j (level -1 is zero) with its own multiplicities.
MorphismElement graded_piece(const MorphismElement& w, const FiltrationFamily& filt, size_t j);

// Invariance and Δ = 0 at every level, and no destabilizer on each graded piece.
bool verify_jh(const MorphismElement& w, const FiltrationFamily& filt, const Polarization& pol,
               const SearchOptions& opt = {});

Json family_to_json(const SubspaceFamily& fam);
SubspaceFamily family_from_json(const CompositionSystem& sys, const Json& j);
Json group_to_json(const GroupElement& g);
GroupElement group_from_json(SystemPtr sys, const Json& j);
Json stability_verdict_to_json(const MorphismElement& w, const StabilityVerdict& v);
// Rebuilds the verdict's witness from JSON; throws SchemaError on malformed input.
StabilityVerdict stability_verdict_from_json(SystemPtr sys, const Json& j);

}  // namespace gitpol
