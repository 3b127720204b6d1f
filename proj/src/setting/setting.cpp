#include "gitpol/setting.hpp"

#include <random>

#include "gitpol/errors.hpp"
#include "gitpol/graded.hpp"

namespace gitpol {

void ProblemSpec::validate() const {
  if (ambient_dim < 1) throw SchemaError("ambient_dim must be at least 1");
  if (left_twists.empty() || right_twists.empty())
    throw SchemaError("both sides need at least one summand");
  if (left_twists.size() != left_mults.size() || right_twists.size() != right_mults.size())
    throw SchemaError("twist and multiplicity lists differ in length");
  for (size_t k = 0; k + 1 < left_twists.size(); ++k)
    if (left_twists[k] >= left_twists[k + 1])
      throw SchemaError("left twists must be strictly increasing");
  for (size_t k = 0; k + 1 < right_twists.size(); ++k)
    if (right_twists[k] >= right_twists[k + 1])
      throw SchemaError("right twists must be strictly increasing");
  if (left_twists.back() >= right_twists.front())
    throw SchemaError("largest left twist must be below the smallest right twist");
  for (int x : left_mults)
    if (x < 1) throw SchemaError("multiplicities must be positive");
  for (int x : right_mults)
    if (x < 1) throw SchemaError("multiplicities must be positive");
}

ProblemSpec transpose(const ProblemSpec& spec) {
  ProblemSpec t;
  t.ambient_dim = spec.ambient_dim;
  for (int k = spec.s() - 1; k >= 0; --k) {
    t.left_twists.push_back(-spec.right_twists[k]);
    t.left_mults.push_back(spec.right_mults[k]);
  }
  for (int k = spec.r() - 1; k >= 0; --k) {
    t.right_twists.push_back(-spec.left_twists[k]);
    t.right_mults.push_back(spec.left_mults[k]);
  }
  return t;
}

int deg_a(const ProblemSpec& spec, int j, int i) { return spec.left_twists[j] - spec.left_twists[i]; }
int deg_b(const ProblemSpec& spec, int mm, int l) {
  return spec.right_twists[mm] - spec.right_twists[l];
}
int deg_h(const ProblemSpec& spec, int l, int i) {
  return spec.right_twists[l] - spec.left_twists[i];
}

namespace {

const RatMatrix& lookup(const std::map<std::array<int, 3>, RatMatrix>& table, int x, int y, int z,
                        const char* what) {
  auto it = table.find({x, y, z});
  require(it != table.end(), std::string("missing composition ") + what);
  return it->second;
}

}  // namespace

const RatMatrix& CompositionSystem::aa(int k, int j, int i) const {
  return lookup(comp_aa, k, j, i, "A⊗A");
}
const RatMatrix& CompositionSystem::bb(int p, int mm, int l) const {
  return lookup(comp_bb, p, mm, l, "B⊗B");
}
const RatMatrix& CompositionSystem::ha(int l, int j, int i) const {
  return lookup(comp_ha, l, j, i, "H⊗A");
}
const RatMatrix& CompositionSystem::bh(int mm, int l, int i) const {
  return lookup(comp_bh, mm, l, i, "B⊗H");
}

size_t CompositionSystem::dim_w() const {
  size_t d = 0;
  for (int l = 0; l < s; ++l)
    for (int i = 0; i < r; ++i) d += static_cast<size_t>(m[i] * n[l]) * h[l][i];
  return d;
}

size_t CompositionSystem::dim_g() const {
  size_t d = 0;
  for (int i = 0; i < r; ++i) {
    d += static_cast<size_t>(m[i] * m[i]);
    for (int j = i + 1; j < r; ++j) d += static_cast<size_t>(m[i] * m[j]) * a[j][i];
  }
  for (int l = 0; l < s; ++l) {
    d += static_cast<size_t>(n[l] * n[l]);
    for (int q = l + 1; q < s; ++q) d += static_cast<size_t>(n[l] * n[q]) * b[q][l];
  }
  return d;
}

SystemPtr build_line_bundle_system(const ProblemSpec& spec) {
  spec.validate();
  auto sys = std::make_shared<CompositionSystem>();
  const int nn = spec.ambient_dim, r = spec.r(), s = spec.s();
  sys->r = r;
  sys->s = s;
  sys->m = spec.left_mults;
  sys->n = spec.right_mults;
  sys->origin = spec;
  sys->a.assign(r, std::vector<size_t>(r, 0));
  sys->b.assign(s, std::vector<size_t>(s, 0));
  sys->h.assign(s, std::vector<size_t>(r, 0));
  for (int j = 0; j < r; ++j)
    for (int i = 0; i <= j; ++i) sys->a[j][i] = sym_dim(nn, deg_a(spec, j, i));
  for (int q = 0; q < s; ++q)
    for (int l = 0; l <= q; ++l) sys->b[q][l] = sym_dim(nn, deg_b(spec, q, l));
  for (int l = 0; l < s; ++l)
    for (int i = 0; i < r; ++i) sys->h[l][i] = sym_dim(nn, deg_h(spec, l, i));
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j)
      for (int k = j; k < r; ++k)
        sys->comp_aa.emplace(std::array<int, 3>{k, j, i},
                             mult_map(nn, deg_a(spec, k, j), deg_a(spec, j, i)));
  for (int l = 0; l < s; ++l)
    for (int q = l; q < s; ++q)
      for (int p = q; p < s; ++p)
        sys->comp_bb.emplace(std::array<int, 3>{p, q, l},
                             mult_map(nn, deg_b(spec, p, q), deg_b(spec, q, l)));
  for (int l = 0; l < s; ++l)
    for (int i = 0; i < r; ++i)
      for (int j = i; j < r; ++j)
        sys->comp_ha.emplace(std::array<int, 3>{l, j, i},
                             mult_map(nn, deg_h(spec, l, j), deg_a(spec, j, i)));
  for (int i = 0; i < r; ++i)
    for (int l = 0; l < s; ++l)
      for (int q = l; q < s; ++q)
        sys->comp_bh.emplace(std::array<int, 3>{q, l, i},
                             mult_map(nn, deg_b(spec, q, l), deg_h(spec, l, i)));
  return sys;
}

SystemPtr with_multiplicities(const CompositionSystem& sys, const std::vector<int>& m,
                              const std::vector<int>& n) {
  require(static_cast<int>(m.size()) == sys.r && static_cast<int>(n.size()) == sys.s,
          "with_multiplicities: length mismatch");
  auto out = std::make_shared<CompositionSystem>(sys);
  out->m = m;
  out->n = n;
  if (out->origin) {
    out->origin->left_mults = m;
    out->origin->right_mults = n;
  }
  return out;
}

RatMatrix dual_of_right_factor(const RatMatrix& c, size_t dim_x, size_t dim_y) {
  require(c.cols() == dim_x * dim_y, "dual_of_right_factor: shape mismatch");
  const size_t dz = c.rows();
  RatMatrix d(dim_x, dz * dim_y);
  for (size_t z = 0; z < dz; ++z)
    for (size_t x = 0; x < dim_x; ++x)
      for (size_t y = 0; y < dim_y; ++y) d(x, z * dim_y + y) = c(z, x * dim_y + y);
  return d;
}

RatMatrix dual_of_left_factor(const RatMatrix& c, size_t dim_x, size_t dim_y) {
  require(c.cols() == dim_x * dim_y, "dual_of_left_factor: shape mismatch");
  const size_t dz = c.rows();
  RatMatrix d(dim_y, dim_x * dz);
  for (size_t z = 0; z < dz; ++z)
    for (size_t x = 0; x < dim_x; ++x)
      for (size_t y = 0; y < dim_y; ++y) d(y, x * dz + z) = c(z, x * dim_y + y);
  return d;
}

ValidationReport validate_system(const CompositionSystem& sys) {
  ValidationReport rep;
  auto fail = [&](const std::string& what) {
    rep.ok = false;
    rep.failures.push_back(what);
  };
  auto key = [](int x, int y, int z) {
    return "(" + std::to_string(x + 1) + "," + std::to_string(y + 1) + "," + std::to_string(z + 1) + ")";
  };
  auto id = [](size_t d) { return RatMatrix::identity(d); };
  const int r = sys.r, s = sys.s;
  try {
    for (int i = 0; i < r; ++i)
      if (sys.a[i][i] != 1) fail("A_ii is not one-dimensional");
    for (int l = 0; l < s; ++l)
      if (sys.b[l][l] != 1) fail("B_ll is not one-dimensional");
    auto full_row_rank = [&](const RatMatrix& mtx, const std::string& what) {
      if (rank(mtx) != mtx.rows()) fail("not surjective: " + what);
    };
    for (int i = 0; i < r; ++i)
      for (int j = i; j < r; ++j)
        for (int k = j; k < r; ++k) {
          const RatMatrix& c = sys.aa(k, j, i);
          if (c.rows() != sys.a[k][i] || c.cols() != sys.a[k][j] * sys.a[j][i])
            fail("shape of A⊗A composition " + key(k, j, i));
          else
            full_row_rank(c, "A⊗A " + key(k, j, i));
        }
    for (int l = 0; l < s; ++l)
      for (int q = l; q < s; ++q)
        for (int p = q; p < s; ++p) {
          const RatMatrix& c = sys.bb(p, q, l);
          if (c.rows() != sys.b[p][l] || c.cols() != sys.b[p][q] * sys.b[q][l])
            fail("shape of B⊗B composition " + key(p, q, l));
          else
            full_row_rank(c, "B⊗B " + key(p, q, l));
        }
    for (int l = 0; l < s; ++l)
      for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
          const RatMatrix& c = sys.ha(l, j, i);
          if (c.rows() != sys.h[l][i] || c.cols() != sys.h[l][j] * sys.a[j][i]) {
            fail("shape of H⊗A composition " + key(l, j, i));
            continue;
          }
          full_row_rank(c, "H⊗A " + key(l, j, i));
          full_row_rank(dual_of_right_factor(c, sys.h[l][j], sys.a[j][i]),
                        "induced H*⊗A " + key(l, j, i));
        }
    for (int i = 0; i < r; ++i)
      for (int l = 0; l < s; ++l)
        for (int q = l; q < s; ++q) {
          const RatMatrix& c = sys.bh(q, l, i);
          if (c.rows() != sys.h[q][i] || c.cols() != sys.b[q][l] * sys.h[l][i]) {
            fail("shape of B⊗H composition " + key(q, l, i));
            continue;
          }
          full_row_rank(c, "B⊗H " + key(q, l, i));
          full_row_rank(dual_of_left_factor(c, sys.b[q][l], sys.h[l][i]),
                        "induced B⊗H* " + key(q, l, i));
        }
    if (!rep.ok) return rep;
    // Associativity squares.
    for (int i = 0; i < r; ++i)
      for (int j = i; j < r; ++j)
        for (int k = j; k < r; ++k)
          for (int l = k; l < r; ++l) {
            RatMatrix lhs = sys.aa(l, j, i) * RatMatrix::kron(sys.aa(l, k, j), id(sys.a[j][i]));
            RatMatrix rhs = sys.aa(l, k, i) * RatMatrix::kron(id(sys.a[l][k]), sys.aa(k, j, i));
            if (lhs != rhs) fail("A associativity " + key(l, k, j) + "," + std::to_string(i + 1));
          }
    for (int l = 0; l < s; ++l)
      for (int q = l; q < s; ++q)
        for (int p = q; p < s; ++p)
          for (int t = p; t < s; ++t) {
            RatMatrix lhs = sys.bb(t, q, l) * RatMatrix::kron(sys.bb(t, p, q), id(sys.b[q][l]));
            RatMatrix rhs = sys.bb(t, p, l) * RatMatrix::kron(id(sys.b[t][p]), sys.bb(p, q, l));
            if (lhs != rhs) fail("B associativity " + key(t, p, q) + "," + std::to_string(l + 1));
          }
    for (int l = 0; l < s; ++l)
      for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j)
          for (int k = j; k < r; ++k) {
            RatMatrix lhs = sys.ha(l, j, i) * RatMatrix::kron(sys.ha(l, k, j), id(sys.a[j][i]));
            RatMatrix rhs = sys.ha(l, k, i) * RatMatrix::kron(id(sys.h[l][k]), sys.aa(k, j, i));
            if (lhs != rhs) fail("H⊗A⊗A associativity " + key(l, k, j) + "," + std::to_string(i + 1));
          }
    for (int i = 0; i < r; ++i)
      for (int l = 0; l < s; ++l)
        for (int q = l; q < s; ++q)
          for (int p = q; p < s; ++p) {
            RatMatrix lhs = sys.bh(p, l, i) * RatMatrix::kron(sys.bb(p, q, l), id(sys.h[l][i]));
            RatMatrix rhs = sys.bh(p, q, i) * RatMatrix::kron(id(sys.b[p][q]), sys.bh(q, l, i));
            if (lhs != rhs) fail("B⊗B⊗H associativity " + key(p, q, l) + "," + std::to_string(i + 1));
          }
    for (int l = 0; l < s; ++l)
      for (int q = l; q < s; ++q)
        for (int i = 0; i < r; ++i)
          for (int j = i; j < r; ++j) {
            RatMatrix lhs = sys.ha(q, j, i) * RatMatrix::kron(sys.bh(q, l, j), id(sys.a[j][i]));
            RatMatrix rhs = sys.bh(q, l, i) * RatMatrix::kron(id(sys.b[q][l]), sys.ha(l, j, i));
            if (lhs != rhs) fail("B⊗H⊗A associativity " + key(q, l, j) + "," + std::to_string(i + 1));
          }
  } catch (const InvariantError& e) {
    fail(e.what());
  }
  return rep;
}

RatMatrix compose_after(const RatMatrix& outer, size_t dim_x, const RatMatrix& inner, size_t dim_y,
                        const RatMatrix& comp) {
  require(dim_x > 0 && dim_y > 0, "compose_after: empty tensor factor");
  const size_t dq = outer.cols();
  require(outer.rows() % dim_x == 0, "compose_after: outer rows");
  const size_t dp = outer.rows() / dim_x;
  require(inner.rows() == dq * dim_y, "compose_after: inner rows");
  require(comp.cols() == dim_x * dim_y, "compose_after: composition shape");
  const size_t dz = comp.rows(), dc = inner.cols();
  std::vector<std::vector<std::pair<size_t, Rational>>> cc(comp.cols());
  for (size_t z = 0; z < dz; ++z)
    for (size_t k = 0; k < comp.cols(); ++k)
      if (sgn(comp(z, k)) != 0) cc[k].emplace_back(z, comp(z, k));
  RatMatrix out(dp * dz, dc);
  Rational t;
  for (size_t c = 0; c < dc; ++c)
    for (size_t q = 0; q < dq; ++q)
      for (size_t y = 0; y < dim_y; ++y) {
        const Rational& iv = inner(q * dim_y + y, c);
        if (sgn(iv) == 0) continue;
        for (size_t p = 0; p < dp; ++p)
          for (size_t x = 0; x < dim_x; ++x) {
            const Rational& ov = outer(p * dim_x + x, q);
            if (sgn(ov) == 0) continue;
            t = iv * ov;
            for (const auto& [z, cv] : cc[x * dim_y + y]) out(p * dz + z, c) += t * cv;
          }
      }
  return out;
}

RatMatrix compose_before(const RatMatrix& v, size_t dim_b, const RatMatrix& phi, size_t dim_h,
                         const RatMatrix& comp) {
  require(dim_b > 0 && dim_h > 0, "compose_before: empty tensor factor");
  const size_t dl = v.cols();
  require(v.rows() % dim_b == 0, "compose_before: v rows");
  const size_t dm = v.rows() / dim_b;
  require(phi.rows() == dl * dim_h, "compose_before: phi rows");
  require(comp.cols() == dim_b * dim_h, "compose_before: composition shape");
  const size_t dz = comp.rows(), dc = phi.cols();
  std::vector<std::vector<std::pair<size_t, Rational>>> cc(comp.cols());
  for (size_t z = 0; z < dz; ++z)
    for (size_t k = 0; k < comp.cols(); ++k)
      if (sgn(comp(z, k)) != 0) cc[k].emplace_back(z, comp(z, k));
  RatMatrix out(dm * dz, dc);
  Rational t;
  for (size_t c = 0; c < dc; ++c)
    for (size_t a = 0; a < dl; ++a)
      for (size_t x = 0; x < dim_h; ++x) {
        const Rational& pv = phi(a * dim_h + x, c);
        if (sgn(pv) == 0) continue;
        for (size_t bb = 0; bb < dm; ++bb)
          for (size_t y = 0; y < dim_b; ++y) {
            const Rational& vv = v(bb * dim_b + y, a);
            if (sgn(vv) == 0) continue;
            t = pv * vv;
            for (const auto& [z, cv] : cc[y * dim_h + x]) out(bb * dz + z, c) += t * cv;
          }
      }
  return out;
}

MorphismElement MorphismElement::zero(SystemPtr sys) {
  MorphismElement w;
  w.sys = sys;
  w.phi.resize(sys->s);
  for (int l = 0; l < sys->s; ++l)
    for (int i = 0; i < sys->r; ++i)
      w.phi[l].emplace_back(static_cast<size_t>(sys->n[l]) * sys->h[l][i],
                            static_cast<size_t>(sys->m[i]));
  return w;
}

MorphismElement MorphismElement::operator+(const MorphismElement& o) const {
  require(sys == o.sys || (sys->r == o.sys->r && sys->s == o.sys->s), "morphism sum: system mismatch");
  MorphismElement out = *this;
  for (size_t l = 0; l < phi.size(); ++l)
    for (size_t i = 0; i < phi[l].size(); ++i) out.phi[l][i] += o.phi[l][i];
  return out;
}

MorphismElement MorphismElement::operator-(const MorphismElement& o) const {
  return *this + o.scaled(-1);
}

MorphismElement MorphismElement::scaled(const Rational& c) const {
  MorphismElement out = *this;
  for (auto& row : out.phi)
    for (auto& blk : row) blk = blk.scaled(c);
  return out;
}

bool MorphismElement::operator==(const MorphismElement& o) const { return phi == o.phi; }

bool MorphismElement::is_zero() const {
  for (const auto& row : phi)
    for (const auto& blk : row)
      if (!blk.is_zero()) return false;
  return true;
}

Vec MorphismElement::flatten() const {
  Vec out;
  out.reserve(sys->dim_w());
  for (const auto& row : phi)
    for (const auto& blk : row)
      for (size_t i = 0; i < blk.rows(); ++i)
        for (size_t j = 0; j < blk.cols(); ++j) out.push_back(blk(i, j));
  return out;
}

MorphismElement MorphismElement::unflatten(SystemPtr sys, const Vec& v) {
  require(v.size() == sys->dim_w(), "unflatten: length mismatch");
  MorphismElement w = zero(sys);
  size_t k = 0;
  for (auto& row : w.phi)
    for (auto& blk : row)
      for (size_t i = 0; i < blk.rows(); ++i)
        for (size_t j = 0; j < blk.cols(); ++j) blk(i, j) = v[k++];
  return w;
}

GroupElement GroupElement::identity(SystemPtr sys) {
  GroupElement g;
  g.sys = sys;
  g.is_unipotent = true;
  for (int i = 0; i < sys->r; ++i) g.g.push_back(RatMatrix::identity(sys->m[i]));
  for (int l = 0; l < sys->s; ++l) g.hh.push_back(RatMatrix::identity(sys->n[l]));
  for (int i = 0; i < sys->r; ++i)
    for (int j = i + 1; j < sys->r; ++j)
      g.u.emplace(std::make_pair(j, i),
                  RatMatrix(static_cast<size_t>(sys->m[j]) * sys->a[j][i], sys->m[i]));
  for (int l = 0; l < sys->s; ++l)
    for (int q = l + 1; q < sys->s; ++q)
      g.v.emplace(std::make_pair(q, l),
                  RatMatrix(static_cast<size_t>(sys->n[q]) * sys->b[q][l], sys->n[l]));
  return g;
}

bool GroupElement::operator==(const GroupElement& o) const {
  return g == o.g && u == o.u && hh == o.hh && v == o.v;
}

bool GroupElement::check_unipotent() const {
  for (const auto& x : g)
    if (x != RatMatrix::identity(x.rows())) return false;
  for (const auto& x : hh)
    if (x != RatMatrix::identity(x.rows())) return false;
  return true;
}

GroupElement compose_group(const GroupElement& g2, const GroupElement& g1) {
  require(g2.sys->r == g1.sys->r && g2.sys->s == g1.sys->s && g2.g.size() == g1.g.size(),
          "compose_group: system mismatch");
  const CompositionSystem& sys = *g1.sys;
  GroupElement out = GroupElement::identity(g1.sys);
  for (int i = 0; i < sys.r; ++i) out.g[i] = g2.g[i] * g1.g[i];
  for (int l = 0; l < sys.s; ++l) out.hh[l] = g2.hh[l] * g1.hh[l];
  for (int i = 0; i < sys.r; ++i)
    for (int k = i + 1; k < sys.r; ++k) {
      RatMatrix acc = g2.u.at({k, i}) * g1.g[i];
      acc += RatMatrix::kron(g2.g[k], RatMatrix::identity(sys.a[k][i])) * g1.u.at({k, i});
      for (int j = i + 1; j < k; ++j)
        acc += compose_after(g2.u.at({k, j}), sys.a[k][j], g1.u.at({j, i}), sys.a[j][i],
                             sys.aa(k, j, i));
      out.u[{k, i}] = acc;
    }
  for (int l = 0; l < sys.s; ++l)
    for (int q = l + 1; q < sys.s; ++q) {
      RatMatrix acc = g2.v.at({q, l}) * g1.hh[l];
      acc += RatMatrix::kron(g2.hh[q], RatMatrix::identity(sys.b[q][l])) * g1.v.at({q, l});
      for (int p = l + 1; p < q; ++p)
        acc += compose_after(g2.v.at({q, p}), sys.b[q][p], g1.v.at({p, l}), sys.b[p][l],
                             sys.bb(q, p, l));
      out.v[{q, l}] = acc;
    }
  out.is_unipotent = g1.is_unipotent && g2.is_unipotent;
  return out;
}

GroupElement inverse(const GroupElement& g) {
  const CompositionSystem& sys = *g.sys;
  GroupElement out = GroupElement::identity(g.sys);
  for (int i = 0; i < sys.r; ++i) {
    auto inv = gitpol::inverse(g.g[i]);
    require(inv.has_value(), "group element has a singular diagonal block");
    out.g[i] = *inv;
  }
  for (int l = 0; l < sys.s; ++l) {
    auto inv = gitpol::inverse(g.hh[l]);
    require(inv.has_value(), "group element has a singular diagonal block");
    out.hh[l] = *inv;
  }
  for (int gap = 1; gap < sys.r; ++gap)
    for (int i = 0; i + gap < sys.r; ++i) {
      const int k = i + gap;
      RatMatrix acc = RatMatrix::kron(out.g[k], RatMatrix::identity(sys.a[k][i])) * g.u.at({k, i});
      for (int j = i + 1; j < k; ++j)
        acc += compose_after(out.u.at({k, j}), sys.a[k][j], g.u.at({j, i}), sys.a[j][i],
                             sys.aa(k, j, i));
      out.u[{k, i}] = -(acc * out.g[i]);
    }
  for (int gap = 1; gap < sys.s; ++gap)
    for (int l = 0; l + gap < sys.s; ++l) {
      const int q = l + gap;
      RatMatrix acc = RatMatrix::kron(out.hh[q], RatMatrix::identity(sys.b[q][l])) * g.v.at({q, l});
      for (int p = l + 1; p < q; ++p)
        acc += compose_after(out.v.at({q, p}), sys.b[q][p], g.v.at({p, l}), sys.b[p][l],
                             sys.bb(q, p, l));
      out.v[{q, l}] = -(acc * out.hh[l]);
    }
  out.is_unipotent = g.is_unipotent;
  return out;
}

namespace {

// w ∘ g on the left group.
MorphismElement apply_right(const MorphismElement& w, const GroupElement& g) {
  const CompositionSystem& sys = *w.sys;
  MorphismElement out = w;
  for (int l = 0; l < sys.s; ++l)
    for (int i = 0; i < sys.r; ++i) {
      RatMatrix acc = w.phi[l][i] * g.g[i];
      for (int j = i + 1; j < sys.r; ++j)
        acc += compose_after(w.phi[l][j], sys.h[l][j], g.u.at({j, i}), sys.a[j][i], sys.ha(l, j, i));
      out.phi[l][i] = acc;
    }
  return out;
}

// h ∘ w on the right group.
MorphismElement apply_left(const GroupElement& g, const MorphismElement& w) {
  const CompositionSystem& sys = *w.sys;
  MorphismElement out = w;
  for (int q = 0; q < sys.s; ++q)
    for (int i = 0; i < sys.r; ++i) {
      RatMatrix acc = RatMatrix::kron(g.hh[q], RatMatrix::identity(sys.h[q][i])) * w.phi[q][i];
      for (int l = 0; l < q; ++l)
        acc += compose_before(g.v.at({q, l}), sys.b[q][l], w.phi[l][i], sys.h[l][i], sys.bh(q, l, i));
      out.phi[q][i] = acc;
    }
  return out;
}

}  // namespace

MorphismElement act(const GroupElement& g, const MorphismElement& w) {
  require(g.g.size() == w.phi.at(0).size() && g.hh.size() == w.phi.size(), "act: system mismatch");
  return apply_left(g, apply_right(w, inverse(g)));
}

namespace {

RatMatrix random_block(std::mt19937_64& rng, size_t rows, size_t cols, int bound, int zero_pct) {
  RatMatrix m(rows, cols);
  if (bound <= 0) return m;
  std::uniform_int_distribution<int> val(-bound, bound), pct(0, 99);
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      if (pct(rng) >= zero_pct) m(i, j) = val(rng);
  return m;
}

RatMatrix random_invertible(std::mt19937_64& rng, size_t n, int bound) {
  for (;;) {
    RatMatrix m = random_block(rng, n, n, std::max(bound, 1), 0);
    if (rank(m) == n) return m;
  }
}

}  // namespace

GroupElement random_unipotent(SystemPtr sys, std::uint64_t seed, int coefficient_bound) {
  std::mt19937_64 rng(seed);
  GroupElement g = GroupElement::identity(sys);
  for (auto& [key, blk] : g.u) blk = random_block(rng, blk.rows(), blk.cols(), coefficient_bound, 0);
  for (auto& [key, blk] : g.v) blk = random_block(rng, blk.rows(), blk.cols(), coefficient_bound, 0);
  return g;
}

GroupElement random_reductive(SystemPtr sys, std::uint64_t seed, int coefficient_bound) {
  std::mt19937_64 rng(seed);
  GroupElement g = GroupElement::identity(sys);
  for (auto& x : g.g) x = random_invertible(rng, x.rows(), coefficient_bound);
  for (auto& x : g.hh) x = random_invertible(rng, x.rows(), coefficient_bound);
  g.is_unipotent = false;
  return g;
}

GroupElement random_group(SystemPtr sys, std::uint64_t seed, int coefficient_bound) {
  GroupElement red = random_reductive(sys, seed, coefficient_bound);
  GroupElement uni = random_unipotent(sys, seed ^ 0x9e3779b97f4a7c15ULL, coefficient_bound);
  return compose_group(red, uni);
}

MorphismElement random_morphism(SystemPtr sys, std::uint64_t seed, int coefficient_bound,
                                int zero_percent) {
  std::mt19937_64 rng(seed);
  MorphismElement w = MorphismElement::zero(sys);
  for (auto& row : w.phi)
    for (auto& blk : row) blk = random_block(rng, blk.rows(), blk.cols(), coefficient_bound, zero_percent);
  return w;
}

Polynomial form_from_coeffs(int n, int d, const Vec& coeffs) {
  return Polynomial::from_coeffs(*graded_space(n, d), coeffs);
}

Vec coeffs_from_form(int n, int d, const Polynomial& p) { return p.to_coeffs(*graded_space(n, d)); }

MorphismElement morphism_from_polynomials(
    SystemPtr sys, const std::vector<std::vector<std::vector<std::vector<std::string>>>>& blocks) {
  if (!sys->origin) throw SchemaError("polynomial morphisms need a line-bundle system");
  const ProblemSpec& spec = *sys->origin;
  const int nn = spec.ambient_dim;
  MorphismElement w = MorphismElement::zero(sys);
  if (static_cast<int>(blocks.size()) != sys->s)
    throw SchemaError("morphism has " + std::to_string(blocks.size()) + " block rows, expected " +
                      std::to_string(sys->s));
  for (int l = 0; l < sys->s; ++l) {
    if (static_cast<int>(blocks[l].size()) != sys->r)
      throw SchemaError("block row " + std::to_string(l) + " has wrong number of blocks");
    for (int i = 0; i < sys->r; ++i) {
      const auto& mat = blocks[l][i];
      const std::string where = "block (" + std::to_string(l) + "," + std::to_string(i) + ")";
      if (static_cast<int>(mat.size()) != sys->n[l])
        throw SchemaError(where + " must have " + std::to_string(sys->n[l]) + " rows");
      const size_t hd = sys->h[l][i];
      for (int a = 0; a < sys->n[l]; ++a) {
        if (static_cast<int>(mat[a].size()) != sys->m[i])
          throw SchemaError(where + " row " + std::to_string(a) + " must have " +
                            std::to_string(sys->m[i]) + " entries");
        for (int c = 0; c < sys->m[i]; ++c) {
          Polynomial p = parse_polynomial(mat[a][c], nn + 1);
          Vec co;
          try {
            co = coeffs_from_form(nn, deg_h(spec, l, i), p);
          } catch (const SchemaError& e) {
            throw SchemaError(where + " entry (" + std::to_string(a) + "," + std::to_string(c) +
                              "): " + e.what());
          }
          for (size_t k = 0; k < hd; ++k) w.phi[l][i](a * hd + k, c) = co[k];
        }
      }
    }
  }
  return w;
}

std::vector<std::vector<std::vector<std::vector<std::string>>>> morphism_to_polynomials(
    const MorphismElement& w) {
  const CompositionSystem& sys = *w.sys;
  require(sys.origin.has_value(), "morphism_to_polynomials: not a line-bundle system");
  const ProblemSpec& spec = *sys.origin;
  std::vector<std::vector<std::vector<std::vector<std::string>>>> out(sys.s);
  for (int l = 0; l < sys.s; ++l)
    for (int i = 0; i < sys.r; ++i) {
      const size_t hd = sys.h[l][i];
      std::vector<std::vector<std::string>> mat(sys.n[l], std::vector<std::string>(sys.m[i]));
      for (int a = 0; a < sys.n[l]; ++a)
        for (int c = 0; c < sys.m[i]; ++c) {
          Vec co(hd);
          for (size_t k = 0; k < hd; ++k) co[k] = w.phi[l][i](a * hd + k, c);
          mat[a][c] = to_string(form_from_coeffs(spec.ambient_dim, deg_h(spec, l, i), co));
        }
      out[l].push_back(std::move(mat));
    }
  return out;
}

}  // namespace gitpol
