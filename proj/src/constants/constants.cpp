#include "gitpol/constants.hpp"

#include <algorithm>
#include <random>

#include "gitpol/errors.hpp"
#include "gitpol/graded.hpp"

namespace gitpol {

ConstantQuery c_query(SystemPtr sys, int l) {
  require(sys->r >= 2, "c_l needs r >= 2");
  require(l >= 0 && l < sys->s, "c_l index out of range");
  ConstantQuery q{sys, ConstantSide::Left, l, 0, {}};
  q.mults.assign(sys->m.begin() + 1, sys->m.end());
  return q;
}

ConstantQuery d_query(SystemPtr sys, int i) {
  require(sys->s >= 2, "d_i needs s >= 2");
  require(i >= 0 && i < sys->r, "d_i index out of range");
  ConstantQuery q{sys, ConstantSide::Right, i, sys->s - 1, {}};
  q.mults.assign(sys->n.begin(), sys->n.end() - 1);
  return q;
}

ConstantQuery c3_query(SystemPtr sys) {
  require(sys->r == 3 && sys->s == 1, "c_3 is defined for type (3,1)");
  return ConstantQuery{sys, ConstantSide::Left, 0, 0, {0, sys->m[2]}};
}

ConstantQuery c3_prime_query(SystemPtr sys) {
  require(sys->r == 3 && sys->s == 1, "c'_3 is defined for type (3,1)");
  return ConstantQuery{sys, ConstantSide::Left, 0, 1, {sys->m[2]}};
}

std::string describe(const ConstantQuery& q) {
  std::string s = q.side == ConstantSide::Left ? "c" : "d";
  s += "_" + std::to_string(q.index + 1);
  if (q.side == ConstantSide::Left && q.base != 0) s += "[base " + std::to_string(q.base + 1) + "]";
  if (q.side == ConstantSide::Right && q.base != q.sys->s - 1) s += "[base " + std::to_string(q.base + 1) + "]";
  s += "(";
  for (size_t k = 0; k < q.mults.size(); ++k) s += (k ? "," : "") + std::to_string(q.mults[k]);
  return s + ")";
}

size_t DeltaSystem::dim_u() const {
  size_t d = 0;
  for (const auto& b : blocks) d += static_cast<size_t>(b.mult) * b.a;
  return d;
}

size_t DeltaSystem::dim_target() const {
  size_t d = 0;
  for (const auto& b : blocks) d += static_cast<size_t>(b.mult) * b.h_tgt;
  return d;
}

size_t DeltaSystem::offset(size_t k) const {
  size_t d = 0;
  for (size_t j = 0; j < k; ++j) d += static_cast<size_t>(blocks[j].mult) * blocks[j].a;
  return d;
}

namespace {

void check_query(const ConstantQuery& q) {
  require(q.sys != nullptr, "constant query without a system");
  const auto& sys = *q.sys;
  if (q.side == ConstantSide::Left) {
    require(q.base >= 0 && q.base < sys.r, "constant base out of range");
    require(q.index >= 0 && q.index < sys.s, "constant index out of range");
    require(static_cast<int>(q.mults.size()) == sys.r - 1 - q.base, "constant multiplicity count mismatch");
  } else {
    require(q.base >= 0 && q.base < sys.s, "constant base out of range");
    require(q.index >= 0 && q.index < sys.r, "constant index out of range");
    require(static_cast<int>(q.mults.size()) == q.base, "constant multiplicity count mismatch");
  }
  for (int m : q.mults) require(m >= 0, "negative multiplicity");
}

}  // namespace

DeltaSystem delta_system(const ConstantQuery& q) {
  check_query(q);
  const auto& sys = *q.sys;
  DeltaSystem ds;
  if (q.side == ConstantSide::Left) {
    const int l = q.index, b0 = q.base;
    ds.h_src = sys.h[l][b0];
    for (int j = b0 + 1; j < sys.r; ++j) {
      DeltaBlock blk;
      blk.mult = q.mults[j - b0 - 1];
      blk.a = sys.a[j][b0];
      blk.h_tgt = sys.h[l][j];
      blk.pairing = dual_of_right_factor(sys.ha(l, j, b0), blk.h_tgt, blk.a);
      ds.blocks.push_back(std::move(blk));
    }
  } else {
    const int i = q.index, b0 = q.base;
    ds.h_src = sys.h[b0][i];
    for (int l = 0; l < b0; ++l) {
      DeltaBlock blk;
      blk.mult = q.mults[l];
      blk.a = sys.b[b0][l];
      blk.h_tgt = sys.h[l][i];
      // Reorder columns from x * h_src + z (x ∈ B) to z * a + x.
      RatMatrix d = dual_of_left_factor(sys.bh(b0, l, i), blk.a, blk.h_tgt);
      blk.pairing = RatMatrix(blk.h_tgt, ds.h_src * blk.a);
      for (size_t y = 0; y < blk.h_tgt; ++y)
        for (size_t x = 0; x < blk.a; ++x)
          for (size_t z = 0; z < ds.h_src; ++z) blk.pairing(y, z * blk.a + x) = d(y, x * ds.h_src + z);
      ds.blocks.push_back(std::move(blk));
    }
  }
  return ds;
}

bool in_family(const DeltaSystem& ds, const RatMatrix& k) {
  require(k.rows() == ds.dim_u(), "subspace dimension mismatch");
  size_t dk = rank(k);
  if (dk == 0 || dk >= ds.dim_u()) return false;
  for (size_t b = 0; b < ds.blocks.size(); ++b) {
    const auto& blk = ds.blocks[b];
    if (blk.mult == 0) continue;
    // Slices of K in block b as an m_b × (cols · a) matrix; K avoids every M' ⊗ A with M' ≠ M
    // exactly when these columns span M.
    const size_t off = ds.offset(b);
    RatMatrix slices(blk.mult, k.cols() * blk.a);
    for (size_t c = 0; c < k.cols(); ++c)
      for (int mu = 0; mu < blk.mult; ++mu)
        for (size_t y = 0; y < blk.a; ++y) slices(mu, c * blk.a + y) = k(off + mu * blk.a + y, c);
    if (rank(slices) < static_cast<size_t>(blk.mult)) return false;
  }
  return true;
}

namespace {

// Echelon basis grown one vector at a time; pivots are normalized to 1.
class EchelonSpan {
 public:
  explicit EchelonSpan(size_t dim) : dim_(dim) {}
  size_t rank() const { return rows_.size(); }
  bool full() const { return rows_.size() == dim_; }
  void insert(Vec v) {
    for (size_t r = 0; r < rows_.size(); ++r) {
      const Rational& c = v[pivots_[r]];
      if (sgn(c) == 0) continue;
      Rational f = c;
      for (size_t j = pivots_[r]; j < dim_; ++j)
        if (sgn(rows_[r][j]) != 0) v[j] -= f * rows_[r][j];
    }
    size_t p = 0;
    while (p < dim_ && sgn(v[p]) == 0) ++p;
    if (p == dim_) return;
    Rational inv = 1 / v[p];
    for (size_t j = p; j < dim_; ++j) v[j] *= inv;
    // Keep rows sorted by pivot so that reduction above stays valid.
    size_t at = 0;
    while (at < pivots_.size() && pivots_[at] < p) ++at;
    rows_.insert(rows_.begin() + at, std::move(v));
    pivots_.insert(pivots_.begin() + at, p);
  }

 private:
  size_t dim_;
  std::vector<Vec> rows_;
  std::vector<size_t> pivots_;
};

}  // namespace

size_t image_dim(const DeltaSystem& ds, const RatMatrix& k) {
  require(k.rows() == ds.dim_u(), "subspace dimension mismatch");
  const size_t tgt = ds.dim_target();
  if (tgt == 0 || k.cols() == 0) return 0;
  EchelonSpan span(tgt);
  for (size_t c = 0; c < k.cols() && !span.full(); ++c) {
    for (size_t x = 0; x < ds.h_src && !span.full(); ++x) {
      Vec img(tgt);
      size_t off = 0, toff = 0;
      for (const auto& blk : ds.blocks) {
        for (int mu = 0; mu < blk.mult; ++mu)
          for (size_t y = 0; y < blk.a; ++y) {
            const Rational& v = k(off + mu * blk.a + y, c);
            if (sgn(v) == 0) continue;
            for (size_t z = 0; z < blk.h_tgt; ++z) {
              const Rational& p = blk.pairing(z, x * blk.a + y);
              if (sgn(p) != 0) img[toff + mu * blk.h_tgt + z] += v * p;
            }
          }
        off += static_cast<size_t>(blk.mult) * blk.a;
        toff += static_cast<size_t>(blk.mult) * blk.h_tgt;
      }
      span.insert(std::move(img));
    }
  }
  return span.rank();
}

Rational rho(const DeltaSystem& ds, const RatMatrix& k) {
  size_t dk = rank(k);
  require(dk > 0 && dk < ds.dim_u(), "rho needs a proper nonzero subspace");
  Rational num = static_cast<unsigned long>(ds.dim_target() - image_dim(ds, k));
  return num / static_cast<unsigned long>(ds.dim_u() - dk);
}

std::pair<DeltaSystem, RatMatrix> pad_subspace(const DeltaSystem& ds, const RatMatrix& k, size_t block) {
  require(block < ds.blocks.size(), "padding block out of range");
  DeltaSystem out = ds;
  out.blocks[block].mult += 1;
  const size_t a = ds.blocks[block].a, off = ds.offset(block);
  RatMatrix kb(out.dim_u(), k.cols() + a);
  // New coordinates: everything before block's first slice stays; L occupies the first a slots of the block.
  for (size_t c = 0; c < k.cols(); ++c)
    for (size_t r = 0; r < k.rows(); ++r) kb(r < off ? r : r + a, c) = k(r, c);
  for (size_t y = 0; y < a; ++y) kb(off + y, k.cols() + y) = 1;
  return {out, kb};
}

Rational c_closed_form_21(int n, int m) {
  require(n >= 1 && m >= 1, "c_closed_form_21 needs n, m >= 1");
  if (m <= n + 1) return make_rational(static_cast<long>(m) * (m - 1), 2L * (static_cast<long>(m) * (n + 1) - 1));
  return make_rational(n + 1, 2L * (n + 2));
}

Rational c_closed_form_triple(int n, int d) {
  require(n >= 1 && d >= 2, "c_closed_form_triple needs n >= 1, d >= 2");
  return make_rational(n + 1, static_cast<long>(sym_dim(n, d - 1)));
}

namespace {

struct ActiveBlock {
  int mult;
  int deg;    // degree of A_k (or B_k)
  int deg_h;  // degree of the target H_k
};

// Active blocks with their polynomial degrees; nothing for systems without a line-bundle origin.
std::optional<std::vector<ActiveBlock>> local_shape(const ConstantQuery& q) {
  if (!q.sys->origin) return std::nullopt;
  const ProblemSpec& spec = *q.sys->origin;
  std::vector<ActiveBlock> out;
  if (q.side == ConstantSide::Left) {
    for (int j = q.base + 1; j < q.sys->r; ++j) {
      int mult = q.mults[j - q.base - 1];
      if (mult > 0) out.push_back({mult, deg_a(spec, j, q.base), deg_h(spec, q.index, j)});
    }
  } else {
    for (int l = 0; l < q.base; ++l) {
      int mult = q.mults[l];
      if (mult > 0) out.push_back({mult, deg_b(spec, q.base, l), deg_h(spec, l, q.index)});
    }
  }
  return out;
}

std::optional<Rational> table_value(int n, const std::vector<ActiveBlock>& shape) {
  if (n == 3 && shape.size() == 1 && shape[0].mult == 2 && shape[0].deg == 1 && shape[0].deg_h == 2)
    return make_rational(4, 7);
  return std::nullopt;
}

}  // namespace

std::optional<Rational> reference_table(const ConstantQuery& q) {
  check_query(q);
  auto shape = local_shape(q);
  if (!shape) return std::nullopt;
  return table_value(q.sys->origin->ambient_dim, *shape);
}

std::string to_string(ConstantSource s) {
  switch (s) {
    case ConstantSource::Empty: return "empty";
    case ConstantSource::SingleFactor: return "single-factor";
    case ConstantSource::ClosedForm21: return "closed-form-21";
    case ConstantSource::ClosedFormTriple: return "closed-form-triple";
    case ConstantSource::Table: return "table";
    case ConstantSource::LowerBound: return "lower-bound";
  }
  return "unknown";
}

namespace {

struct Candidate {
  RatMatrix k;
};

RatMatrix canonical_rows(const RatMatrix& k) {
  Rref r = rref(k.transpose());
  return r.reduced.block(0, 0, r.pivots.size(), k.rows());
}

bool lex_less(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
  return false;
}

// K spanned by Σ_μ e_μ ⊗ g_{k,μ}·f over a basis f of S^t V*.
std::optional<RatMatrix> graph_subspace(const DeltaSystem& ds, int n, const std::vector<ActiveBlock>& degs,
                                        int t, const std::vector<std::vector<Vec>>& multipliers) {
  const size_t df = sym_dim(n, t);
  RatMatrix k(ds.dim_u(), df);
  size_t ab = 0;
  bool any = false;
  for (size_t b = 0; b < ds.blocks.size(); ++b) {
    const auto& blk = ds.blocks[b];
    if (blk.mult == 0) continue;
    const int dg = degs[ab].deg - t;
    RatMatrix mm = mult_map(n, t, dg);
    const size_t dgd = sym_dim(n, dg);
    const size_t off = ds.offset(b);
    for (int mu = 0; mu < blk.mult; ++mu) {
      const Vec& g = multipliers[ab][mu];
      for (size_t f = 0; f < df; ++f)
        for (size_t y = 0; y < dgd; ++y) {
          if (sgn(g[y]) == 0) continue;
          for (size_t z = 0; z < blk.a; ++z)
            if (sgn(mm(z, f * dgd + y)) != 0) {
              k(off + mu * blk.a + z, f) += g[y] * mm(z, f * dgd + y);
              any = true;
            }
        }
    }
    ++ab;
  }
  if (!any) return std::nullopt;
  return k;
}

struct Pool {
  const DeltaSystem& ds;
  std::optional<std::vector<ActiveBlock>> shape;
  int n = 0;

  int max_t() const {
    int t = 1 << 20;
    for (const auto& b : *shape) t = std::min(t, b.deg);
    return t;
  }

  std::vector<Candidate> deterministic() const {
    std::vector<Candidate> out;
    const size_t du = ds.dim_u();
    if (du >= 2 && du <= 10) {
      for (unsigned long mask = 1; mask + 1 < (1UL << du); ++mask) {
        std::vector<Vec> cols;
        for (size_t r = 0; r < du; ++r)
          if (mask & (1UL << r)) {
            Vec e(du);
            e[r] = 1;
            cols.push_back(e);
          }
        out.push_back({RatMatrix::from_columns(cols, du)});
      }
    }
    if (shape && !shape->empty()) {
      for (int t = 0; t <= max_t(); ++t)
        for (size_t shift = 0; shift < 8; ++shift) {
          std::vector<std::vector<Vec>> mult;
          for (size_t b = 0; b < shape->size(); ++b) {
            const size_t dim = sym_dim(n, (*shape)[b].deg - t);
            std::vector<Vec> per;
            for (int mu = 0; mu < (*shape)[b].mult; ++mu) {
              Vec g(dim);
              g[(shift + mu * (b + 1) + b) % dim] = 1;
              per.push_back(g);
            }
            mult.push_back(per);
          }
          if (auto k = graph_subspace(ds, n, *shape, t, mult)) out.push_back({*k});
        }
    }
    return out;
  }

  Candidate random(uint64_t seed, size_t trial) const {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(trial), static_cast<uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    const size_t du = ds.dim_u();
    std::uniform_int_distribution<int> coef(-2, 2);
    const int kind = static_cast<int>(trial % 3);
    if (kind == 2 && shape && !shape->empty()) {
      std::uniform_int_distribution<int> pick_t(0, max_t());
      int t = pick_t(rng);
      std::vector<std::vector<Vec>> mult;
      for (const auto& b : *shape) {
        std::vector<Vec> per;
        for (int mu = 0; mu < b.mult; ++mu) {
          Vec g(sym_dim(n, b.deg - t));
          for (auto& x : g) x = (rng() % 3 == 0) ? coef(rng) : 0;
          per.push_back(g);
        }
        mult.push_back(per);
      }
      if (auto k = graph_subspace(ds, n, *shape, t, mult)) return {*k};
    }
    if (kind == 1) {
      std::vector<Vec> cols;
      for (size_t r = 0; r < du; ++r)
        if (rng() & 1) {
          Vec e(du);
          e[r] = 1;
          cols.push_back(e);
        }
      if (cols.empty()) cols.push_back(Vec(du));
      return {RatMatrix::from_columns(cols, du)};
    }
    std::uniform_int_distribution<size_t> pick_dim(1, du > 1 ? du - 1 : 1);
    const size_t dk = std::min(pick_dim(rng), pick_dim(rng));
    RatMatrix k(du, dk);
    for (size_t r = 0; r < du; ++r)
      for (size_t c = 0; c < dk; ++c) k(r, c) = coef(rng);
    return {k};
  }
};

struct Evaluated {
  bool admissible = false;
  Rational value;
};

Evaluated evaluate(const DeltaSystem& ds, const RatMatrix& k) {
  Evaluated e;
  if (!in_family(ds, k)) return e;
  e.admissible = true;
  e.value = rho(ds, k);
  return e;
}

LowerBound merge(const std::vector<Candidate>& cands, const std::vector<Evaluated>& evals) {
  LowerBound lb;
  lb.value = 0;
  lb.candidates = cands.size();
  for (size_t c = 0; c < cands.size(); ++c) {
    if (!evals[c].admissible) continue;
    ++lb.admissible;
    if (!lb.witness || evals[c].value > lb.value) {
      lb.value = evals[c].value;
      lb.witness = canonical_rows(cands[c].k);
    } else if (evals[c].value == lb.value) {
      RatMatrix w = canonical_rows(cands[c].k);
      if (lex_less(w, *lb.witness)) lb.witness = w;
    }
  }
  return lb;
}

std::vector<Candidate> all_candidates(const Pool& pool, uint64_t seed, size_t trials) {
  auto cands = pool.deterministic();
  for (size_t t = 0; t < trials; ++t) cands.push_back(pool.random(seed, t));
  return cands;
}

Pool make_pool(const ConstantQuery& q, const DeltaSystem& ds) {
  Pool pool{ds, local_shape(q), q.sys->origin ? q.sys->origin->ambient_dim : 0};
  return pool;
}

}  // namespace

LowerBound sampled_lower_bound_serial(const ConstantQuery& q, uint64_t seed, size_t trials) {
  if (trials == 0) throw SchemaError("sampled_lower_bound needs at least one trial");
  DeltaSystem ds = delta_system(q);
  if (ds.dim_u() < 2) return LowerBound{0, std::nullopt, 0, 0};
  auto cands = all_candidates(make_pool(q, ds), seed, trials);
  std::vector<Evaluated> evals(cands.size());
  for (size_t c = 0; c < cands.size(); ++c) evals[c] = evaluate(ds, cands[c].k);
  return merge(cands, evals);
}

LowerBound sampled_lower_bound(const ConstantQuery& q, uint64_t seed, size_t trials) {
  if (trials == 0) throw SchemaError("sampled_lower_bound needs at least one trial");
  DeltaSystem ds = delta_system(q);
  if (ds.dim_u() < 2) return LowerBound{0, std::nullopt, 0, 0};
  auto cands = all_candidates(make_pool(q, ds), seed, trials);
  std::vector<Evaluated> evals(cands.size());
  const long count = static_cast<long>(cands.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long c = 0; c < count; ++c) evals[c] = evaluate(ds, cands[c].k);
  return merge(cands, evals);
}

ConstantValue resolve(const ConstantQuery& q, uint64_t seed, size_t trials) {
  check_query(q);
  auto shape = local_shape(q);
  DeltaSystem ds = delta_system(q);
  if (ds.dim_u() == 0) return {0, ConstantSource::Empty};
  if (shape) {
    const int n = q.sys->origin->ambient_dim;
    const auto& sh = *shape;
    if (sh.size() == 1 && sh[0].mult == 1) return {0, ConstantSource::SingleFactor};
    if (sh.size() == 1 && sh[0].deg == 1 && sh[0].deg_h == 1)
      return {c_closed_form_21(n, sh[0].mult), ConstantSource::ClosedForm21};
    if (sh.size() == 2 && sh[0].mult == 1 && sh[1].mult == 1) {
      auto lo = sh[0].deg < sh[1].deg ? sh[0] : sh[1];
      auto hi = sh[0].deg < sh[1].deg ? sh[1] : sh[0];
      if (lo.deg_h == 2 && hi.deg_h == 1 && hi.deg == lo.deg + 1)
        return {c_closed_form_triple(n, hi.deg + 1), ConstantSource::ClosedFormTriple};
    }
    if (auto v = table_value(n, sh)) return {*v, ConstantSource::Table};
  }
  return {sampled_lower_bound(q, seed, trials).value, ConstantSource::LowerBound};
}

}  // namespace gitpol
