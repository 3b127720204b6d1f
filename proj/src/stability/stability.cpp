#include "gitpol/stability.hpp"

#include <algorithm>
#include <random>

#include "gitpol/errors.hpp"
#include "gitpol/graded.hpp"

namespace gitpol {

SubspaceFamily SubspaceFamily::zero(const CompositionSystem& sys) {
  SubspaceFamily f;
  for (int i = 0; i < sys.r; ++i) f.mprime.emplace_back(sys.m[i], 0);
  for (int l = 0; l < sys.s; ++l) f.nprime.emplace_back(sys.n[l], 0);
  return f;
}

SubspaceFamily SubspaceFamily::full(const CompositionSystem& sys) {
  SubspaceFamily f;
  for (int i = 0; i < sys.r; ++i) f.mprime.push_back(RatMatrix::identity(sys.m[i]));
  for (int l = 0; l < sys.s; ++l) f.nprime.push_back(RatMatrix::identity(sys.n[l]));
  return f;
}

DimensionVector SubspaceFamily::dims() const {
  DimensionVector d;
  for (const auto& x : mprime) d.mprime.push_back(static_cast<int>(x.cols()));
  for (const auto& x : nprime) d.nprime.push_back(static_cast<int>(x.cols()));
  return d;
}

bool SubspaceFamily::operator==(const SubspaceFamily& o) const {
  if (mprime.size() != o.mprime.size() || nprime.size() != o.nprime.size()) return false;
  auto same = [](const RatMatrix& a, const RatMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && span_contains(a, b) && span_contains(b, a);
  };
  for (size_t i = 0; i < mprime.size(); ++i)
    if (!same(mprime[i], o.mprime[i])) return false;
  for (size_t l = 0; l < nprime.size(); ++l)
    if (!same(nprime[l], o.nprime[l])) return false;
  return true;
}

RatMatrix canonical_basis(const RatMatrix& columns, size_t ambient) {
  require(columns.rows() == ambient, "canonical_basis: ambient mismatch");
  if (columns.cols() == 0 || ambient == 0) return RatMatrix(ambient, 0);
  Rref rr = rref(columns.transpose());
  RatMatrix out(ambient, rr.pivots.size());
  for (size_t k = 0; k < rr.pivots.size(); ++k)
    for (size_t x = 0; x < ambient; ++x) out(x, k) = rr.reduced(k, x);
  return out;
}

namespace {

void check_family_shape(const CompositionSystem& sys, const SubspaceFamily& fam) {
  require(static_cast<int>(fam.mprime.size()) == sys.r && static_cast<int>(fam.nprime.size()) == sys.s,
          "family has the wrong number of blocks");
  for (int i = 0; i < sys.r; ++i)
    require(fam.mprime[i].rows() == static_cast<size_t>(sys.m[i]), "family block M' has the wrong ambient");
  for (int l = 0; l < sys.s; ++l)
    require(fam.nprime[l].rows() == static_cast<size_t>(sys.n[l]), "family block N' has the wrong ambient");
}

// The n_l-vectors occurring in y ∈ N_l ⊗ H (rows a*h + k), as columns.
RatMatrix tensor_support_columns(const RatMatrix& y, size_t nl, size_t h) {
  RatMatrix out(nl, y.cols() * h);
  for (size_t c = 0; c < y.cols(); ++c)
    for (size_t k = 0; k < h; ++k)
      for (size_t a = 0; a < nl; ++a) out(a, c * h + k) = y(a * h + k, c);
  return out;
}

}  // namespace

bool is_invariant(const MorphismElement& w, const SubspaceFamily& fam) {
  const CompositionSystem& sys = *w.sys;
  check_family_shape(sys, fam);
  for (int l = 0; l < sys.s; ++l)
    for (int i = 0; i < sys.r; ++i) {
      const size_t h = sys.h[l][i];
      if (h == 0 || fam.mprime[i].cols() == 0) continue;
      RatMatrix img = tensor_support_columns(w.phi[l][i] * fam.mprime[i], sys.n[l], h);
      if (!span_contains(fam.nprime[l], img)) return false;
    }
  return true;
}

SubspaceFamily saturate_up(const MorphismElement& w, const std::vector<RatMatrix>& mprime) {
  const CompositionSystem& sys = *w.sys;
  require(static_cast<int>(mprime.size()) == sys.r, "saturate_up: wrong number of blocks");
  SubspaceFamily fam;
  for (int i = 0; i < sys.r; ++i) fam.mprime.push_back(canonical_basis(mprime[i], sys.m[i]));
  for (int l = 0; l < sys.s; ++l) {
    RatMatrix acc(sys.n[l], 0);
    for (int i = 0; i < sys.r; ++i) {
      const size_t h = sys.h[l][i];
      if (h == 0 || fam.mprime[i].cols() == 0) continue;
      acc = RatMatrix::hstack(acc, tensor_support_columns(w.phi[l][i] * fam.mprime[i], sys.n[l], h));
    }
    fam.nprime.push_back(canonical_basis(acc, sys.n[l]));
  }
  return fam;
}

SubspaceFamily saturate_down(const MorphismElement& w, const std::vector<RatMatrix>& nprime) {
  const CompositionSystem& sys = *w.sys;
  require(static_cast<int>(nprime.size()) == sys.s, "saturate_down: wrong number of blocks");
  SubspaceFamily fam;
  std::vector<RatMatrix> ann;
  for (int l = 0; l < sys.s; ++l) {
    fam.nprime.push_back(canonical_basis(nprime[l], sys.n[l]));
    ann.push_back(annihilator(fam.nprime[l], sys.n[l]));
  }
  for (int i = 0; i < sys.r; ++i) {
    const size_t mi = sys.m[i];
    RatMatrix cons(0, mi);
    for (int l = 0; l < sys.s; ++l) {
      const size_t h = sys.h[l][i];
      if (h == 0 || ann[l].rows() == 0 || mi == 0) continue;
      cons = RatMatrix::vstack(cons, RatMatrix::kron(ann[l], RatMatrix::identity(h)) * w.phi[l][i]);
    }
    RatMatrix ker = cons.rows() == 0 ? RatMatrix::identity(mi) : kernel_basis(cons);
    fam.mprime.push_back(canonical_basis(ker, mi));
  }
  return fam;
}

Rational family_delta(const Polarization& pol, const SubspaceFamily& fam) { return discriminant(pol, fam.dims()); }

std::string to_string(StabilityStatus s) {
  switch (s) {
    case StabilityStatus::Unstable: return "UNSTABLE";
    case StabilityStatus::NotStable: return "NOT_STABLE";
    case StabilityStatus::NoDestabilizerFound: return "NO_DESTABILIZER_FOUND";
    case StabilityStatus::StableExact: return "STABLE_EXACT";
  }
  return "NO_DESTABILIZER_FOUND";
}

namespace {

StabilityStatus status_from_string(const std::string& s) {
  for (auto st : {StabilityStatus::Unstable, StabilityStatus::NotStable, StabilityStatus::NoDestabilizerFound,
                  StabilityStatus::StableExact})
    if (to_string(st) == s) return st;
  throw SchemaError("unknown stability status \"" + s + "\"");
}

void check_polarization(const CompositionSystem& sys, const Polarization& pol) {
  if (static_cast<int>(pol.lambda.size()) != sys.r || static_cast<int>(pol.mu.size()) != sys.s)
    throw SchemaError("polarization shape does not match the system");
  if (!is_proper(pol)) throw SchemaError("stability checks need a proper polarization");
  if (family_delta(pol, SubspaceFamily::full(sys)) != 0)
    throw SchemaError("polarization is not balanced: sum lambda_i m_i must equal sum mu_l n_l");
}

bool h_trivial(const CompositionSystem& sys) {
  for (int j = 0; j < sys.r; ++j)
    for (int i = 0; i < j; ++i)
      if (sys.m[j] * sys.a[j][i] * sys.m[i] > 0) return false;
  for (int q = 0; q < sys.s; ++q)
    for (int l = 0; l < q; ++l)
      if (sys.n[q] * sys.b[q][l] * sys.n[l] > 0) return false;
  return true;
}

bool all_left_small(const CompositionSystem& sys) {
  if (sys.r > 16) return false;
  for (int x : sys.m)
    if (x > 1) return false;
  return true;
}

// A candidate: an H-element index and a seed family, either on the left (M') or the right (N').
struct Seed {
  bool right = false;
  std::vector<RatMatrix> mats;
};

struct Outcome {
  int severity = 0;  // 2: Δ > 0, 1: Δ = 0 on a proper family
  SubspaceFamily family;
  Rational delta;
};

Outcome evaluate_seed(const MorphismElement& w, const Polarization& pol, const Seed& seed) {
  SubspaceFamily fam;
  if (seed.right) {
    SubspaceFamily down = saturate_down(w, seed.mats);
    fam = saturate_up(w, down.mprime);
  } else {
    SubspaceFamily up = saturate_up(w, seed.mats);
    fam = saturate_down(w, up.nprime);
    fam.nprime = up.nprime;
  }
  Outcome out;
  out.delta = family_delta(pol, fam);
  const CompositionSystem& sys = *w.sys;
  bool proper = is_proper_vector(fam.dims(), sys.m, sys.n);
  if (sgn(out.delta) > 0 && proper) out.severity = 2;
  else if (sgn(out.delta) == 0 && proper) out.severity = 1;
  out.family = std::move(fam);
  return out;
}

std::vector<RatMatrix> zero_left(const CompositionSystem& sys) { return SubspaceFamily::zero(sys).mprime; }
std::vector<RatMatrix> zero_right(const CompositionSystem& sys) { return SubspaceFamily::zero(sys).nprime; }

RatMatrix unit_column(size_t dim, size_t k) {
  RatMatrix e(dim, 1);
  e(k, 0) = 1;
  return e;
}

// Seeds for act(h, w). Sets exhaustive when the seeds cover every left family.
std::vector<Seed> make_seeds(const MorphismElement& w, std::mt19937_64& rng, bool& exhaustive) {
  const CompositionSystem& sys = *w.sys;
  std::vector<Seed> seeds;
  if (all_left_small(sys)) {
    exhaustive = true;
    std::vector<int> active;
    for (int i = 0; i < sys.r; ++i)
      if (sys.m[i] == 1) active.push_back(i);
    for (unsigned mask = 1; mask < (1u << active.size()); ++mask) {
      Seed s{false, zero_left(sys)};
      for (size_t k = 0; k < active.size(); ++k)
        if (mask & (1u << k)) s.mats[active[k]] = RatMatrix::identity(1);
      seeds.push_back(std::move(s));
    }
    return seeds;
  }
  exhaustive = false;
  // Coordinate lines and whole blocks.
  for (int i = 0; i < sys.r; ++i) {
    for (int k = 0; k < sys.m[i]; ++k) {
      Seed s{false, zero_left(sys)};
      s.mats[i] = unit_column(sys.m[i], k);
      seeds.push_back(std::move(s));
    }
    if (sys.m[i] > 0) {
      Seed s{false, zero_left(sys)};
      s.mats[i] = RatMatrix::identity(sys.m[i]);
      seeds.push_back(std::move(s));
    }
  }
  // Tails and heads of full blocks.
  for (int i = 0; i < sys.r; ++i) {
    Seed tail{false, zero_left(sys)}, head{false, zero_left(sys)};
    for (int j = 0; j < sys.r; ++j) {
      if (j >= i) tail.mats[j] = RatMatrix::identity(sys.m[j]);
      if (j <= i) head.mats[j] = RatMatrix::identity(sys.m[j]);
    }
    seeds.push_back(std::move(tail));
    seeds.push_back(std::move(head));
  }
  // Kernels of single blocks and of whole block columns.
  for (int i = 0; i < sys.r; ++i) {
    if (sys.m[i] == 0) continue;
    RatMatrix stacked(0, sys.m[i]);
    for (int l = 0; l < sys.s; ++l) {
      if (w.phi[l][i].rows() == 0) continue;
      stacked = RatMatrix::vstack(stacked, w.phi[l][i]);
      RatMatrix k = kernel_basis(w.phi[l][i]);
      if (k.cols() > 0 && k.cols() < static_cast<size_t>(sys.m[i])) {
        Seed s{false, zero_left(sys)};
        s.mats[i] = k;
        seeds.push_back(std::move(s));
      }
    }
    RatMatrix k = stacked.rows() == 0 ? RatMatrix::identity(sys.m[i]) : kernel_basis(stacked);
    if (k.cols() > 0) {
      Seed s{false, zero_left(sys)};
      s.mats[i] = k;
      seeds.push_back(std::move(s));
    }
  }
  // Right patterns: each block zero or full, then coordinate hyperplanes and lines.
  if (sys.s <= 10)
    for (unsigned mask = 0; mask + 1 < (1u << sys.s); ++mask) {
      Seed s{true, zero_right(sys)};
      for (int l = 0; l < sys.s; ++l)
        if (mask & (1u << l)) s.mats[l] = RatMatrix::identity(sys.n[l]);
      seeds.push_back(std::move(s));
    }
  for (int l = 0; l < sys.s; ++l)
    for (int k = 0; k < sys.n[l]; ++k) {
      Seed hyper{true, SubspaceFamily::full(sys).nprime};
      RatMatrix basis(sys.n[l], sys.n[l] - 1);
      for (int c = 0, col = 0; c < sys.n[l]; ++c)
        if (c != k) basis(c, col++) = 1;
      hyper.mats[l] = basis;
      seeds.push_back(std::move(hyper));
      Seed line{true, zero_right(sys)};
      line.mats[l] = unit_column(sys.n[l], k);
      seeds.push_back(std::move(line));
    }
  // Random rational subspaces.
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int t = 0; t < 16; ++t) {
    Seed s{false, zero_left(sys)};
    for (int i = 0; i < sys.r; ++i) {
      std::uniform_int_distribution<int> dim(0, sys.m[i]);
      int d = dim(rng);
      RatMatrix b(sys.m[i], d);
      for (int x = 0; x < sys.m[i]; ++x)
        for (int c = 0; c < d; ++c) b(x, c) = coef(rng);
      s.mats[i] = b;
    }
    seeds.push_back(std::move(s));
  }
  return seeds;
}

// Unipotent elements clearing one column of a left block, or one row of a right block.
std::vector<GroupElement> structured_eliminations(const MorphismElement& w) {
  const CompositionSystem& sys = *w.sys;
  std::vector<GroupElement> out;
  // Left: act uses g^{-1}, whose single u-block is -u.
  for (int i = 0; i < sys.r; ++i)
    for (int j = i + 1; j < sys.r; ++j) {
      const size_t a = sys.a[j][i], mj = sys.m[j], mi = sys.m[i];
      if (a == 0 || mj == 0 || mi == 0) continue;
      const size_t unknowns = mj * a;
      // contribution of a unit column of ũ to Σ_l φ'_{l,i}
      std::vector<RatMatrix> contrib;
      size_t total_rows = 0;
      for (int l = 0; l < sys.s; ++l) total_rows += w.phi[l][i].rows();
      RatMatrix A(total_rows, unknowns);
      for (size_t p = 0; p < unknowns; ++p) {
        RatMatrix e = unit_column(unknowns, p);
        size_t off = 0;
        for (int l = 0; l < sys.s; ++l) {
          const size_t rows = w.phi[l][i].rows();
          if (rows > 0 && sys.h[l][j] > 0) {
            RatMatrix c = compose_after(w.phi[l][j], sys.h[l][j], e, a, sys.ha(l, j, i));
            for (size_t x = 0; x < rows; ++x) A(off + x, p) = c(x, 0);
          }
          off += rows;
        }
      }
      for (size_t col = 0; col <= mi; ++col) {
        // col == mi: clear every column at once
        const size_t lo = col == mi ? 0 : col, hi = col == mi ? mi : col + 1;
        RatMatrix bigA(total_rows * (hi - lo), unknowns * (hi - lo));
        RatMatrix rhs(total_rows * (hi - lo), 1);
        for (size_t c = lo; c < hi; ++c) {
          bigA.set_block((c - lo) * total_rows, (c - lo) * unknowns, A);
          size_t off = 0;
          for (int l = 0; l < sys.s; ++l) {
            for (size_t x = 0; x < w.phi[l][i].rows(); ++x) rhs((c - lo) * total_rows + off + x, 0) = -w.phi[l][i](x, c);
            off += w.phi[l][i].rows();
          }
        }
        auto sol = solve(bigA, rhs);
        if (!sol || sol->is_zero()) continue;
        GroupElement g = GroupElement::identity(w.sys);
        RatMatrix u(unknowns, mi);
        for (size_t c = lo; c < hi; ++c)
          for (size_t p = 0; p < unknowns; ++p) u(p, c) = -(*sol)((c - lo) * unknowns + p, 0);
        g.u[{j, i}] = u;
        out.push_back(std::move(g));
      }
    }
  // Right: v acts directly.
  for (int l = 0; l < sys.s; ++l)
    for (int q = l + 1; q < sys.s; ++q) {
      const size_t b = sys.b[q][l], nq = sys.n[q], nl = sys.n[l];
      if (b == 0 || nq == 0 || nl == 0) continue;
      const size_t unknowns = nq * b * nl;
      for (size_t row = 0; row <= nq; ++row) {
        // row == nq: clear every row at once
        std::vector<std::pair<int, size_t>> targets;  // (i, row index in φ_{q,i})
        for (int i = 0; i < sys.r; ++i) {
          const size_t h = sys.h[q][i];
          for (size_t aa = 0; aa < nq; ++aa) {
            if (row != nq && aa != row) continue;
            for (size_t k = 0; k < h; ++k)
              if (sys.m[i] > 0) targets.emplace_back(i, aa * h + k);
          }
        }
        size_t eqs = 0;
        for (const auto& t : targets) eqs += sys.m[t.first];
        if (eqs == 0) continue;
        RatMatrix A(eqs, unknowns), rhs(eqs, 1);
        for (size_t p = 0; p < unknowns; ++p) {
          RatMatrix v(nq * b, nl);
          v(p / nl, p % nl) = 1;
          size_t e = 0;
          std::vector<RatMatrix> cache(sys.r);
          for (const auto& [i, x] : targets) {
            if (cache[i].empty() && sys.h[l][i] > 0)
              cache[i] = compose_before(v, b, w.phi[l][i], sys.h[l][i], sys.bh(q, l, i));
            for (int c = 0; c < sys.m[i]; ++c, ++e)
              if (!cache[i].empty()) A(e, p) = cache[i](x, c);
          }
        }
        size_t e = 0;
        for (const auto& [i, x] : targets)
          for (int c = 0; c < sys.m[i]; ++c, ++e) rhs(e, 0) = -w.phi[q][i](x, c);
        auto sol = solve(A, rhs);
        if (!sol || sol->is_zero()) continue;
        GroupElement g = GroupElement::identity(w.sys);
        RatMatrix v(nq * b, nl);
        for (size_t p = 0; p < unknowns; ++p) v(p / nl, p % nl) = (*sol)(p, 0);
        g.v[{q, l}] = v;
        out.push_back(std::move(g));
      }
    }
  return out;
}

StabilityVerdict run_search(const MorphismElement& w, const Polarization& pol, const SearchOptions& opt,
                            bool parallel) {
  const CompositionSystem& sys = *w.sys;
  check_polarization(sys, pol);
  if (opt.budget == 0) throw SchemaError("search budget must be positive");
  const bool trivial_h = h_trivial(sys);

  std::vector<GroupElement> pool = {GroupElement::identity(w.sys)};
  if (opt.unipotent && !trivial_h) {
    for (auto& g : structured_eliminations(w)) pool.push_back(std::move(g));
  }
  std::vector<MorphismElement> moved;
  std::vector<std::vector<Seed>> seeds;
  bool exhaustive = true;
  size_t total = 0;
  auto add_h = [&](size_t k) {
    std::seed_seq ss{static_cast<uint64_t>(opt.seed), static_cast<uint64_t>(k)};
    std::mt19937_64 rng(ss);
    moved.push_back(k == 0 ? w : act(pool[k], w));
    bool ex = false;
    seeds.push_back(make_seeds(moved.back(), rng, ex));
    exhaustive = exhaustive && ex;
    total += seeds.back().size();
  };
  for (size_t k = 0; k < pool.size(); ++k) add_h(k);
  if (opt.unipotent && !trivial_h) {
    const size_t per_h = std::max<size_t>(1, seeds[0].size());
    const size_t room = opt.budget > total ? (opt.budget - total) / per_h : 0;
    const size_t extra = std::min<size_t>(64, std::max<size_t>(4, room));
    for (size_t t = 0; t < extra; ++t) {
      pool.push_back(random_unipotent(w.sys, opt.seed * 1000003ULL + t, 2));
      add_h(pool.size() - 1);
    }
  }

  std::vector<std::pair<size_t, size_t>> cand;
  for (size_t k = 0; k < seeds.size(); ++k)
    for (size_t s = 0; s < seeds[k].size(); ++s) cand.emplace_back(k, s);
  StabilityVerdict v;
  v.candidates = cand.size();
  v.budget_exhausted = cand.size() > opt.budget;
  if (v.budget_exhausted) cand.resize(opt.budget);
  v.budget_used = cand.size();

  std::vector<Outcome> results(cand.size());
  const long nc = static_cast<long>(cand.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long c = 0; c < nc; ++c)
      results[c] = evaluate_seed(moved[cand[c].first], pol, seeds[cand[c].first][cand[c].second]);
  } else {
    for (long c = 0; c < nc; ++c)
      results[c] = evaluate_seed(moved[cand[c].first], pol, seeds[cand[c].first][cand[c].second]);
  }

  long best = -1;
  for (long c = 0; c < nc; ++c)
    if (results[c].severity > 0 && (best < 0 || results[c].severity > results[best].severity)) best = c;
  if (best >= 0) {
    v.status = results[best].severity == 2 ? StabilityStatus::Unstable : StabilityStatus::NotStable;
    v.witness = StabilityWitness{pool[cand[best].first], results[best].family, results[best].delta};
  } else if (exhaustive && trivial_h && !v.budget_exhausted) {
    v.status = StabilityStatus::StableExact;
    v.exhaustive = true;
  } else {
    v.status = StabilityStatus::NoDestabilizerFound;
    v.exhaustive = exhaustive && !v.budget_exhausted;
    v.note = "semi-decision: no destabilizing family among the sampled candidates";
    if (v.exhaustive) v.note = "every family of each sampled orbit point was checked; other orbit points were not";
  }
  if (v.budget_exhausted) v.note += (v.note.empty() ? "" : "; ") + std::string("budget exhausted");
  return v;
}

}  // namespace

StabilityVerdict destabilizer_search(const MorphismElement& w, const Polarization& pol, const SearchOptions& opt) {
  return run_search(w, pol, opt, true);
}

StabilityVerdict destabilizer_search_serial(const MorphismElement& w, const Polarization& pol,
                                            const SearchOptions& opt) {
  return run_search(w, pol, opt, false);
}

StabilityVerdict reductive_exhaustive(const MorphismElement& w, const Polarization& pol) {
  const CompositionSystem& sys = *w.sys;
  check_polarization(sys, pol);
  if (!all_left_small(sys)) throw SchemaError("the exhaustive check needs every left multiplicity at most 1");
  std::mt19937_64 rng(0);
  bool ex = false;
  auto seeds = make_seeds(w, rng, ex);
  StabilityVerdict v;
  v.candidates = v.budget_used = seeds.size();
  v.exhaustive = true;
  Outcome best_out;
  for (const auto& s : seeds) {
    Outcome o = evaluate_seed(w, pol, s);
    if (o.severity > best_out.severity) best_out = std::move(o);
  }
  if (best_out.severity > 0) {
    v.status = best_out.severity == 2 ? StabilityStatus::Unstable : StabilityStatus::NotStable;
    v.witness = StabilityWitness{GroupElement::identity(w.sys), best_out.family, best_out.delta};
  } else {
    v.status = StabilityStatus::StableExact;
    v.note = "stable for the reductive part";
  }
  return v;
}

bool verify_witness(const MorphismElement& w, const Polarization& pol, const StabilityVerdict& v) {
  if (!v.witness) return false;
  const auto& wit = *v.witness;
  MorphismElement moved = act(wit.h, w);
  if (!wit.h.check_unipotent()) return false;
  if (!is_invariant(moved, wit.family)) return false;
  Rational d = family_delta(pol, wit.family);
  if (d != wit.delta) return false;
  if (!is_proper_vector(wit.family.dims(), w.sys->m, w.sys->n)) return false;
  if (v.status == StabilityStatus::Unstable) return sgn(d) > 0;
  if (v.status == StabilityStatus::NotStable) return sgn(d) == 0;
  return false;
}

// ---- the exact decider for 2 O(-2) → O(-1) ⊕ O on P_2 ----

namespace {

const ProblemSpec& plane_shape() {
  static const ProblemSpec spec{2, {-2}, {2}, {-1, 0}, {1, 1}};
  return spec;
}

// Multiplication by the linear form ell: S^1 → S^2, as a 6 × 3 matrix.
RatMatrix times_linear(const Vec& ell) {
  static const RatMatrix mm = mult_map(2, 1, 1);
  RatMatrix out(6, 3);
  for (size_t x = 0; x < 3; ++x)
    for (size_t y = 0; y < 3; ++y)
      for (size_t z = 0; z < 6; ++z) out(z, y) += ell[x] * mm(z, x * 3 + y);
  return out;
}

Polynomial det_poly(std::vector<std::vector<Polynomial>> m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  Polynomial acc(m[0][0].nvars());
  for (size_t c = 0; c < n; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<Polynomial>> minor;
    for (size_t r = 1; r < n; ++r) {
      std::vector<Polynomial> row;
      for (size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(std::move(row));
    }
    Polynomial term = m[0][c] * det_poly(std::move(minor));
    acc = (c % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

std::vector<Integer> divisors(Integer x) {
  if (x < 0) x = -x;
  std::vector<Integer> out;
  if (x == 0 || x > Integer("1000000000000")) return out;
  for (Integer d = 1; d * d <= x; ++d)
    if (x % d == 0) {
      out.push_back(d);
      if (d * d != x) out.push_back(x / d);
    }
  return out;
}

// A rational root (a : b) of a nonzero binary form, if one exists and is found.
std::optional<std::pair<Rational, Rational>> rational_root(const Polynomial& g) {
  // univariate coefficients of g(t, 1)
  const int deg = g.total_degree();
  std::vector<Rational> c(deg + 1);
  for (const auto& [e, v] : g.terms()) c[e[0]] += v;
  if (c[deg] == 0) return std::make_pair(Rational(1), Rational(0));
  Integer den = 1;
  for (const auto& x : c) den = lcm(den, Integer(x.get_den()));
  std::vector<Integer> ic;
  for (const auto& x : c) ic.push_back(Integer(x * den));
  size_t low = 0;
  while (low < ic.size() && ic[low] == 0) ++low;
  if (low > 0) return std::make_pair(Rational(0), Rational(1));
  auto ps = divisors(ic[0]), qs = divisors(ic[deg]);
  for (const auto& p : ps)
    for (const auto& q : qs)
      for (int sign : {1, -1}) {
        Rational t(sign * p, q);
        t.canonicalize();
        Rational val = 0, pw = 1;
        for (int k = 0; k <= deg; ++k) {
          val += c[k] * pw;
          pw *= t;
        }
        if (val == 0) return std::make_pair(t, Rational(1));
      }
  return std::nullopt;
}

StabilityVerdict unstable_with(const MorphismElement& x, const Polarization& pol, const GroupElement& h,
                               const std::vector<RatMatrix>& mprime) {
  MorphismElement moved = act(h, x);
  SubspaceFamily up = saturate_up(moved, mprime);
  SubspaceFamily fam = saturate_down(moved, up.nprime);
  fam.nprime = up.nprime;
  StabilityVerdict v;
  v.status = StabilityStatus::Unstable;
  v.exhaustive = true;
  v.witness = StabilityWitness{h, fam, family_delta(pol, fam)};
  require(sgn(v.witness->delta) > 0 && is_invariant(moved, fam), "decider produced an invalid witness");
  return v;
}

GroupElement shift_by(SystemPtr sys, const Vec& z) {
  GroupElement h = GroupElement::identity(sys);
  RatMatrix v(3, 1);
  for (size_t k = 0; k < 3; ++k) v(k, 0) = -z[k];
  h.v[{1, 0}] = v;
  return h;
}

}  // namespace

Polarization two_by_one_plane_polarization(Mu1Side side) {
  Rational mu1 = side == Mu1Side::AboveHalf ? make_rational(3, 4) : make_rational(1, 4);
  return Polarization{{make_rational(1, 2)}, {mu1, 1 - mu1}};
}

StabilityVerdict decide_two_by_one_plane(const MorphismElement& x, Mu1Side side) {
  const CompositionSystem& sys = *x.sys;
  if (!sys.origin || !(*sys.origin == plane_shape()))
    throw SchemaError("the exact decider needs morphisms 2 O(-2) -> O(-1) + O on P_2");
  const Polarization pol = two_by_one_plane_polarization(side);
  Vec z1 = x.phi[0][0].column(0), z2 = x.phi[0][0].column(1);
  Vec q1 = x.phi[1][0].column(0), q2 = x.phi[1][0].column(1);
  const RatMatrix zs = x.phi[0][0];
  const size_t zrank = rank(zs);
  auto line = [](const Vec& ab) { return std::vector<RatMatrix>{RatMatrix::column_vector(ab)}; };
  auto id = GroupElement::identity(x.sys);
  StabilityVerdict stable;
  stable.status = StabilityStatus::StableExact;
  stable.exhaustive = true;

  if (side == Mu1Side::AboveHalf) {
    if (zrank < 2) {
      RatMatrix k = kernel_basis(zs);
      return unstable_with(x, pol, id, line(k.column(0)));
    }
    RatMatrix lhs = RatMatrix::vstack(times_linear(z1), times_linear(z2));
    RatMatrix rhs(12, 1);
    for (size_t k = 0; k < 6; ++k) {
      rhs(k, 0) = q1[k];
      rhs(6 + k, 0) = q2[k];
    }
    // det(x) = 0 with z_1 ∧ z_2 ≠ 0 exactly when q_i = z z_i for one linear form z.
    auto z = solve(lhs, rhs);
    if (z) return unstable_with(x, pol, shift_by(x.sys, z->column(0)), {RatMatrix::identity(2)});
    return stable;
  }

  if (zrank == 0) return unstable_with(x, pol, id, {RatMatrix::identity(2)});
  // Columns of [ℓ·V* | a q_1 + b q_2] with ℓ = a z_1 + b z_2, as polynomials in (a, b).
  const Polynomial pa = Polynomial::variable(2, 0), pb = Polynomial::variable(2, 1);
  RatMatrix m1 = times_linear(z1), m2 = times_linear(z2);
  std::vector<std::vector<Polynomial>> big(6, std::vector<Polynomial>(4, Polynomial(2)));
  for (size_t r = 0; r < 6; ++r) {
    for (size_t c = 0; c < 3; ++c) big[r][c] = pa.scaled(m1(r, c)) + pb.scaled(m2(r, c));
    big[r][3] = pa.scaled(q1[r]) + pb.scaled(q2[r]);
  }
  Polynomial g(2);
  bool any_minor = false;
  for (unsigned mask = 0; mask < 64; ++mask) {
    if (__builtin_popcount(mask) != 4) continue;
    std::vector<std::vector<Polynomial>> sub;
    for (size_t r = 0; r < 6; ++r)
      if (mask & (1u << r)) sub.push_back(big[r]);
    Polynomial d = det_poly(sub);
    if (d.is_zero()) continue;
    g = any_minor ? gcd(g, d) : d.monic();
    any_minor = true;
  }
  std::optional<Vec> degenerate;  // (a0, b0) with a0 z_1 + b0 z_2 = 0
  if (zrank == 1) degenerate = kernel_basis(zs).column(0);
  if (degenerate) {
    const Vec& ab = *degenerate;
    Vec comb(6);
    for (size_t k = 0; k < 6; ++k) comb[k] = ab[0] * q1[k] + ab[1] * q2[k];
    bool zero = std::all_of(comb.begin(), comb.end(), [](const Rational& r) { return sgn(r) == 0; });
    if (zero) return unstable_with(x, pol, id, line(ab));
    if (any_minor) {
      Polynomial factor = pa.scaled(ab[1]) - pb.scaled(ab[0]);
      for (;;) {
        try {
          Polynomial qd = exact_divide(g, factor);
          g = qd;
        } catch (const std::exception&) {
          break;
        }
      }
    }
  }
  std::optional<std::pair<Rational, Rational>> root;
  if (!any_minor) {
    // Every (a : b) is dependent; pick one with ℓ ≠ 0.
    for (auto cand : {std::make_pair(Rational(1), Rational(0)), std::make_pair(Rational(0), Rational(1)),
                      std::make_pair(Rational(1), Rational(1))}) {
      bool nonzero = false;
      for (size_t k = 0; k < 3; ++k) nonzero = nonzero || sgn(cand.first * z1[k] + cand.second * z2[k]) != 0;
      if (nonzero) {
        root = cand;
        break;
      }
    }
  } else {
    if (g.total_degree() <= 0) return stable;
    root = rational_root(g);
  }
  if (!root) {
    StabilityVerdict v;
    v.status = StabilityStatus::Unstable;
    v.exhaustive = true;
    v.note = "destabilizing direction is not rational; no witness over Q";
    return v;
  }
  Vec ab = {root->first, root->second}, ell(3), comb(6);
  for (size_t k = 0; k < 3; ++k) ell[k] = ab[0] * z1[k] + ab[1] * z2[k];
  for (size_t k = 0; k < 6; ++k) comb[k] = ab[0] * q1[k] + ab[1] * q2[k];
  auto z = solve(times_linear(ell), RatMatrix::column_vector(comb));
  require(z.has_value(), "decider: dependent direction without a linear factor");
  return unstable_with(x, pol, shift_by(x.sys, z->column(0)), line(ab));
}

StabilityVerdict g_stability_sample(const MorphismElement& w, const Polarization& pol, size_t trials, uint64_t seed,
                                    size_t budget_per_trial) {
  check_polarization(*w.sys, pol);
  if (trials == 0) throw SchemaError("g_stability_sample needs at least one trial");
  StabilityVerdict out;
  for (size_t t = 0; t < trials; ++t) {
    GroupElement h = t == 0 ? GroupElement::identity(w.sys) : random_unipotent(w.sys, seed * 7919ULL + t, 2);
    SearchOptions opt{budget_per_trial, seed + t, t == 0};  // structured moves at the first sample
    StabilityVerdict v = destabilizer_search(act(h, w), pol, opt);
    out.budget_used += v.budget_used;
    out.candidates += v.candidates;
    if (v.status == StabilityStatus::Unstable) {
      out.status = StabilityStatus::Unstable;
      out.witness = StabilityWitness{compose_group(v.witness->h, h), v.witness->family, v.witness->delta};
      out.note = "destabilized at sample " + std::to_string(t);
      return out;
    }
  }
  out.status = StabilityStatus::NoDestabilizerFound;
  out.note = "no destabilizer at " + std::to_string(trials) + " sampled orbit points";
  return out;
}

MorphismElement graded_piece(const MorphismElement& w, const FiltrationFamily& filt, size_t j) {
  const CompositionSystem& sys = *w.sys;
  require(j < filt.levels.size(), "graded_piece: level out of range");
  const SubspaceFamily prev = j == 0 ? SubspaceFamily::zero(sys) : filt.levels[j - 1];
  const SubspaceFamily& cur = filt.levels[j];
  // Complements of prev inside cur.
  auto complement = [](const RatMatrix& small, const RatMatrix& big) {
    RatMatrix basis = small;
    RatMatrix extra(big.rows(), 0);
    for (size_t c = 0; c < big.cols(); ++c) {
      RatMatrix col = big.block(0, c, big.rows(), 1);
      if (!span_contains(basis, col)) {
        basis = RatMatrix::hstack(basis, col);
        extra = RatMatrix::hstack(extra, col);
      }
    }
    return extra;
  };
  std::vector<int> mm, nn;
  std::vector<RatMatrix> cm, cn;
  for (int i = 0; i < sys.r; ++i) {
    cm.push_back(complement(prev.mprime[i], cur.mprime[i]));
    mm.push_back(static_cast<int>(cm.back().cols()));
  }
  for (int l = 0; l < sys.s; ++l) {
    cn.push_back(complement(prev.nprime[l], cur.nprime[l]));
    nn.push_back(static_cast<int>(cn.back().cols()));
  }
  SystemPtr piece = with_multiplicities(sys, mm, nn);
  MorphismElement out = MorphismElement::zero(piece);
  for (int l = 0; l < sys.s; ++l) {
    RatMatrix basis = RatMatrix::hstack(prev.nprime[l], cn[l]);
    const size_t np = prev.nprime[l].cols();
    for (int i = 0; i < sys.r; ++i) {
      const size_t hd = sys.h[l][i];
      if (hd == 0 || cm[i].cols() == 0 || cn[l].cols() == 0) continue;
      RatMatrix img = w.phi[l][i] * cm[i];
      RatMatrix block(cn[l].cols() * hd, cm[i].cols());
      for (size_t c = 0; c < img.cols(); ++c) {
        RatMatrix y(sys.n[l], hd);
        for (size_t a = 0; a < static_cast<size_t>(sys.n[l]); ++a)
          for (size_t k = 0; k < hd; ++k) y(a, k) = img(a * hd + k, c);
        auto coords = solve(basis, y);
        require(coords.has_value(), "graded_piece: level is not invariant");
        for (size_t a = 0; a < cn[l].cols(); ++a)
          for (size_t k = 0; k < hd; ++k) block(a * hd + k, c) = (*coords)(np + a, k);
      }
      out.phi[l][i] = block;
    }
  }
  return out;
}

bool verify_jh(const MorphismElement& w, const FiltrationFamily& filt, const Polarization& pol,
               const SearchOptions& opt) {
  const CompositionSystem& sys = *w.sys;
  check_polarization(sys, pol);
  if (filt.levels.empty()) return false;
  const DimensionVector full = SubspaceFamily::full(sys).dims();
  if (filt.levels.back().dims() != full) return false;
  for (size_t j = 0; j < filt.levels.size(); ++j) {
    const SubspaceFamily& lev = filt.levels[j];
    check_family_shape(sys, lev);
    if (!is_invariant(w, lev) || family_delta(pol, lev) != 0) return false;
    if (j > 0) {
      const SubspaceFamily& prev = filt.levels[j - 1];
      bool contained = true;
      for (int i = 0; i < sys.r; ++i) contained = contained && span_contains(lev.mprime[i], prev.mprime[i]);
      for (int l = 0; l < sys.s; ++l) contained = contained && span_contains(lev.nprime[l], prev.nprime[l]);
      if (!contained || prev.dims() == lev.dims()) return false;
    } else if (lev.dims() == SubspaceFamily::zero(sys).dims()) {
      return false;
    }
  }
  for (size_t j = 0; j < filt.levels.size(); ++j) {
    MorphismElement piece = graded_piece(w, filt, j);
    StabilityVerdict v = destabilizer_search(piece, pol, opt);
    if (v.status == StabilityStatus::Unstable || v.status == StabilityStatus::NotStable) return false;
  }
  return true;
}

Json family_to_json(const SubspaceFamily& fam) {
  Json m = Json::array(), n = Json::array();
  for (const auto& x : fam.mprime) m.push_back(to_json(x));
  for (const auto& x : fam.nprime) n.push_back(to_json(x));
  return Json{{"mprime", m}, {"nprime", n}, {"dims", dimension_vector_to_json(fam.dims())}};
}

namespace {

// Basis matrices travel as row lists; an empty list means the zero subspace.
RatMatrix basis_from_json(const Json& j, size_t ambient, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of rows");
  if (j.empty()) return RatMatrix(ambient, 0);
  RatMatrix m = matrix_from_json(j, where);
  if (m.rows() != ambient) throw SchemaError(where + ": expected " + std::to_string(ambient) + " rows");
  return m;
}

RatMatrix block_from_json(const Json& j, size_t rows, size_t cols, const std::string& where) {
  if (rows == 0 || cols == 0) return RatMatrix(rows, cols);
  RatMatrix m = matrix_from_json(j, where);
  if (m.rows() != rows || m.cols() != cols) throw SchemaError(where + ": wrong block shape");
  return m;
}

}  // namespace

SubspaceFamily family_from_json(const CompositionSystem& sys, const Json& j) {
  if (!j.is_object() || !j.contains("mprime") || !j.contains("nprime"))
    throw SchemaError("family needs \"mprime\" and \"nprime\"");
  const Json& m = j.at("mprime");
  const Json& n = j.at("nprime");
  if (!m.is_array() || !n.is_array() || static_cast<int>(m.size()) != sys.r || static_cast<int>(n.size()) != sys.s)
    throw SchemaError("family has the wrong number of blocks");
  SubspaceFamily fam;
  for (int i = 0; i < sys.r; ++i)
    fam.mprime.push_back(basis_from_json(m[i], sys.m[i], "mprime[" + std::to_string(i) + "]"));
  for (int l = 0; l < sys.s; ++l)
    fam.nprime.push_back(basis_from_json(n[l], sys.n[l], "nprime[" + std::to_string(l) + "]"));
  for (const auto& b : fam.mprime)
    if (rank(b) != b.cols()) throw SchemaError("family basis is not of full column rank");
  for (const auto& b : fam.nprime)
    if (rank(b) != b.cols()) throw SchemaError("family basis is not of full column rank");
  return fam;
}

Json group_to_json(const GroupElement& g) {
  Json gg = Json::array(), hh = Json::array(), u = Json::array(), v = Json::array();
  for (const auto& x : g.g) gg.push_back(to_json(x));
  for (const auto& x : g.hh) hh.push_back(to_json(x));
  for (const auto& [key, blk] : g.u)
    if (!blk.is_zero()) u.push_back(Json{{"to", key.first}, {"from", key.second}, {"block", to_json(blk)}});
  for (const auto& [key, blk] : g.v)
    if (!blk.is_zero()) v.push_back(Json{{"to", key.first}, {"from", key.second}, {"block", to_json(blk)}});
  return Json{{"g", gg}, {"u", u}, {"hh", hh}, {"v", v}};
}

GroupElement group_from_json(SystemPtr sys, const Json& j) {
  if (!j.is_object()) throw SchemaError("group element must be an object");
  GroupElement g = GroupElement::identity(sys);
  try {
    for (int i = 0; i < sys->r; ++i)
      g.g[i] = block_from_json(j.at("g").at(i), sys->m[i], sys->m[i], "g[" + std::to_string(i) + "]");
    for (int l = 0; l < sys->s; ++l)
      g.hh[l] = block_from_json(j.at("hh").at(l), sys->n[l], sys->n[l], "hh[" + std::to_string(l) + "]");
    for (const auto& e : j.at("u")) {
      std::pair<int, int> key{e.at("to").get<int>(), e.at("from").get<int>()};
      if (!g.u.count(key)) throw SchemaError("u block index out of range");
      auto& blk = g.u[key];
      blk = block_from_json(e.at("block"), blk.rows(), blk.cols(), "u block");
    }
    for (const auto& e : j.at("v")) {
      std::pair<int, int> key{e.at("to").get<int>(), e.at("from").get<int>()};
      if (!g.v.count(key)) throw SchemaError("v block index out of range");
      auto& blk = g.v[key];
      blk = block_from_json(e.at("block"), blk.rows(), blk.cols(), "v block");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed group element: ") + e.what());
  }
  g.is_unipotent = g.check_unipotent();
  return g;
}

Json stability_verdict_to_json(const MorphismElement& w, const StabilityVerdict& v) {
  Json j{{"schema", "1"},
         {"status", to_string(v.status)},
         {"budget_used", v.budget_used},
         {"candidates", v.candidates},
         {"budget_exhausted", v.budget_exhausted},
         {"exhaustive", v.exhaustive},
         {"note", v.note}};
  if (v.witness) {
    Json wit{{"delta", to_json(v.witness->delta)},
             {"family", family_to_json(v.witness->family)},
             {"h", group_to_json(v.witness->h)}};
    if (w.sys->origin) wit["transformed_morphism"] = morphism_to_json(act(v.witness->h, w));
    j["witness"] = wit;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

StabilityVerdict stability_verdict_from_json(SystemPtr sys, const Json& j) {
  StabilityVerdict v;
  try {
    v.status = status_from_string(j.at("status").get<std::string>());
    v.budget_used = j.value("budget_used", size_t{0});
    v.candidates = j.value("candidates", size_t{0});
    v.budget_exhausted = j.value("budget_exhausted", false);
    v.exhaustive = j.value("exhaustive", false);
    v.note = j.value("note", std::string());
    if (j.contains("witness") && !j.at("witness").is_null()) {
      const Json& wit = j.at("witness");
      v.witness = StabilityWitness{group_from_json(sys, wit.at("h")), family_from_json(*sys, wit.at("family")),
                                   rational_from_json(wit.at("delta"), "witness.delta")};
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed stability verdict: ") + e.what());
  }
  return v;
}

}  // namespace gitpol
