#include "gitpol/embedding.hpp"

#include <algorithm>
#include <random>

#include "gitpol/errors.hpp"

namespace gitpol {

namespace {

RatMatrix id(size_t d) { return RatMatrix::identity(d); }

// f: V ⊗ K → W  ↦  V → W ⊗ K* (rows w·k + y).
RatMatrix adjoint_right(const RatMatrix& f, size_t k) {
  const size_t dv = k == 0 ? 0 : f.cols() / k;
  RatMatrix out(f.rows() * k, dv);
  for (size_t w = 0; w < f.rows(); ++w)
    for (size_t c = 0; c < dv; ++c)
      for (size_t y = 0; y < k; ++y) out(w * k + y, c) = f(w, c * k + y);
  return out;
}

// f: V ⊗ K → W  ↦  V → K* ⊗ W (rows y·dim W + w).
RatMatrix adjoint_left(const RatMatrix& f, size_t k) {
  const size_t dv = k == 0 ? 0 : f.cols() / k, dw = f.rows();
  RatMatrix out(k * dw, dv);
  for (size_t w = 0; w < dw; ++w)
    for (size_t c = 0; c < dv; ++c)
      for (size_t y = 0; y < k; ++y) out(y * dw + w, c) = f(w, c * k + y);
  return out;
}

// X with X·s = f (s surjective onto the middle space), if any.
std::optional<RatMatrix> factor_through_surjection(const RatMatrix& f, const RatMatrix& s) {
  require(f.cols() == s.cols(), "factor_through_surjection: shape mismatch");
  if (s.rows() == 0) {
    if (!f.is_zero()) return std::nullopt;
    return RatMatrix(f.rows(), 0);
  }
  auto xt = solve(s.transpose(), f.transpose());
  if (!xt) return std::nullopt;
  return xt->transpose();
}

// X with i·X = f (i injective), if any.
std::optional<RatMatrix> factor_through_injection(const RatMatrix& f, const RatMatrix& inj) {
  require(f.rows() == inj.rows(), "factor_through_injection: shape mismatch");
  if (inj.cols() == 0) {
    if (!f.is_zero()) return std::nullopt;
    return RatMatrix(0, f.cols());
  }
  return solve(inj, f);
}

const RatMatrix& must_invert(const std::optional<RatMatrix>& m) {
  require(m.has_value(), "big group element has a singular block");
  return *m;
}

}  // namespace

BigSetting build_big(SystemPtr sp) {
  require(sp != nullptr, "build_big: null system");
  const CompositionSystem& sys = *sp;
  const int r = sys.r, s = sys.s;
  BigSetting big;
  big.sys = sp;
  big.p.assign(r, 0);
  big.q.assign(s, 0);
  big.p_offset.assign(r, std::vector<size_t>(r, 0));
  big.q_offset.assign(s, std::vector<size_t>(s, 0));
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      big.p_offset[i][j] = big.p[i];
      big.p[i] += sys.m[j] * sys.a[j][i];
    }
  for (int l = 0; l < s; ++l)
    for (int mm = 0; mm <= l; ++mm) {
      big.q_offset[l][mm] = big.q[l];
      big.q[l] += sys.n[mm] * sys.b[l][mm];
    }

  big.xi.assign(r, RatMatrix());
  for (int i = 1; i < r; ++i) {
    const size_t a = sys.a[i][i - 1];
    RatMatrix x(big.p[i - 1], big.p[i] * a);
    for (int j = i; j < r; ++j) {
      const size_t aj = sys.a[j][i], at = sys.a[j][i - 1];
      if (aj == 0 || a == 0 || at == 0) continue;
      const RatMatrix& c = sys.aa(j, i, i - 1);
      for (int mu = 0; mu < sys.m[j]; ++mu)
        for (size_t al = 0; al < aj; ++al)
          for (size_t be = 0; be < a; ++be)
            for (size_t z = 0; z < at; ++z)
              x(big.p_offset[i - 1][j] + mu * at + z, (big.p_offset[i][j] + mu * aj + al) * a + be) =
                  c(z, al * a + be);
    }
    big.xi[i] = std::move(x);
  }

  for (int l = 0; l + 1 < s; ++l) {
    const size_t b = sys.b[l + 1][l];
    RatMatrix y(big.q[l], big.q[l + 1] * b);
    for (int mm = 0; mm <= l; ++mm) {
      const size_t bs = sys.b[l + 1][mm], bt = sys.b[l][mm];
      if (bs == 0 || b == 0 || bt == 0) continue;
      const RatMatrix& c = sys.bb(l + 1, l, mm);
      for (int nu = 0; nu < sys.n[mm]; ++nu)
        for (size_t ph = 0; ph < bs; ++ph)
          for (size_t be = 0; be < b; ++be)
            for (size_t g = 0; g < bt; ++g)
              y(big.q_offset[l][mm] + nu * bt + g, (big.q_offset[l + 1][mm] + nu * bs + ph) * b + be) =
                  c(ph, be * bt + g);
    }
    big.eta.push_back(std::move(y));
  }
  return big;
}

RatMatrix gamma_of(const BigSetting& big, const MorphismElement& w) {
  const CompositionSystem& sys = *big.sys;
  require(w.phi.size() == static_cast<size_t>(sys.s) && w.phi.at(0).size() == static_cast<size_t>(sys.r),
          "gamma: morphism does not match the system");
  const int top = sys.s - 1;
  const size_t h = big.h_top();
  RatMatrix out(big.q[top], big.p[0] * h);
  for (int l = 0; l < sys.s; ++l)
    for (int i = 0; i < sys.r; ++i) {
      const size_t hli = sys.h[l][i], ai = sys.a[i][0], hl0 = sys.h[l][0], bt = sys.b[top][l];
      if (hli == 0 || ai == 0 || hl0 == 0 || bt == 0 || h == 0 || sys.m[i] == 0 || sys.n[l] == 0) continue;
      // M_i ⊗ A_i1 → N_l ⊗ H_l1.
      RatMatrix step = compose_after(w.phi[l][i], hli, id(sys.m[i] * ai), ai, sys.ha(l, i, 0));
      // H_l1 → B*_sl ⊗ H_s1.
      const RatMatrix& c = sys.bh(top, l, 0);
      for (size_t col = 0; col < step.cols(); ++col)
        for (int nu = 0; nu < sys.n[l]; ++nu)
          for (size_t x = 0; x < hl0; ++x) {
            const Rational& v = step(nu * hl0 + x, col);
            if (sgn(v) == 0) continue;
            for (size_t be = 0; be < bt; ++be)
              for (size_t z = 0; z < h; ++z) {
                const Rational& cv = c(z, be * hl0 + x);
                if (sgn(cv) == 0) continue;
                out(big.q_offset[top][l] + nu * bt + be, (big.p_offset[0][i] + col) * h + z) += v * cv;
              }
          }
    }
  return out;
}

BigElement zeta(const BigSetting& big, const MorphismElement& w) {
  BigElement bw;
  bw.x = big.xi;
  bw.gamma = gamma_of(big, w);
  bw.y = big.eta;
  return bw;
}

BigGroupElement theta(const BigSetting& big, const GroupElement& g) {
  const CompositionSystem& sys = *big.sys;
  require(g.g.size() == static_cast<size_t>(sys.r) && g.hh.size() == static_cast<size_t>(sys.s),
          "theta: group element does not match the system");
  BigGroupElement out;
  for (int i = 0; i < sys.r; ++i) {
    RatMatrix t(big.p[i], big.p[i]);
    for (int j = i; j < sys.r; ++j) {
      const size_t aj = sys.a[j][i];
      if (aj == 0 || sys.m[j] == 0) continue;
      t.set_block(big.p_offset[i][j], big.p_offset[i][j], RatMatrix::kron(g.g[j], id(aj)));
      for (int k = j + 1; k < sys.r; ++k) {
        const size_t akj = sys.a[k][j];
        if (akj == 0 || sys.m[k] == 0 || sys.a[k][i] == 0) continue;
        t.set_block(big.p_offset[i][k], big.p_offset[i][j],
                    compose_after(g.u.at({k, j}), akj, id(sys.m[j] * aj), aj, sys.aa(k, j, i)));
      }
    }
    out.g.push_back(std::move(t));
  }
  for (int l = 0; l < sys.s; ++l) {
    RatMatrix t(big.q[l], big.q[l]);
    for (int mm = 0; mm <= l; ++mm) {
      const size_t blm = sys.b[l][mm];
      if (blm == 0 || sys.n[mm] == 0) continue;
      t.set_block(big.q_offset[l][mm], big.q_offset[l][mm], RatMatrix::kron(g.hh[mm], id(blm)));
      // N_m ⊗ B*_lm → N_q ⊗ B_qm ⊗ B*_lm → N_q ⊗ B*_lq for m < q ≤ l.
      for (int q = mm + 1; q <= l; ++q) {
        const size_t bqm = sys.b[q][mm], blq = sys.b[l][q];
        if (bqm == 0 || blq == 0 || sys.n[q] == 0) continue;
        const RatMatrix& v = g.v.at({q, mm});
        const RatMatrix& c = sys.bb(l, q, mm);
        RatMatrix blk(sys.n[q] * blq, sys.n[mm] * blm);
        for (int nu = 0; nu < sys.n[mm]; ++nu)
          for (int nq = 0; nq < sys.n[q]; ++nq)
            for (size_t ka = 0; ka < bqm; ++ka) {
              const Rational& vv = v(nq * bqm + ka, nu);
              if (sgn(vv) == 0) continue;
              for (size_t cc = 0; cc < blq; ++cc)
                for (size_t be = 0; be < blm; ++be) blk(nq * blq + cc, nu * blm + be) += vv * c(be, cc * bqm + ka);
            }
        t.set_block(big.q_offset[l][q], big.q_offset[l][mm], blk);
      }
    }
    out.h.push_back(std::move(t));
  }
  return out;
}

BigGroupElement compose_big(const BigGroupElement& a, const BigGroupElement& b) {
  require(a.g.size() == b.g.size() && a.h.size() == b.h.size(), "compose_big: shape mismatch");
  BigGroupElement out;
  for (size_t i = 0; i < a.g.size(); ++i) out.g.push_back(a.g[i] * b.g[i]);
  for (size_t l = 0; l < a.h.size(); ++l) out.h.push_back(a.h[l] * b.h[l]);
  return out;
}

BigElement act_big(const BigSetting& big, const BigGroupElement& g, const BigElement& bw) {
  const CompositionSystem& sys = *big.sys;
  require(g.g.size() == static_cast<size_t>(sys.r) && g.h.size() == static_cast<size_t>(sys.s),
          "act_big: group element does not match");
  std::vector<RatMatrix> ginv, hinv;
  for (const auto& x : g.g) ginv.push_back(must_invert(inverse(x)));
  for (const auto& x : g.h) hinv.push_back(must_invert(inverse(x)));
  BigElement out = bw;
  for (int i = 1; i < sys.r; ++i)
    out.x[i] = g.g[i - 1] * bw.x[i] * RatMatrix::kron(ginv[i], id(sys.a[i][i - 1]));
  out.gamma = g.h[sys.s - 1] * bw.gamma * RatMatrix::kron(ginv[0], id(big.h_top()));
  for (int l = 0; l + 1 < sys.s; ++l)
    out.y[l] = g.h[l] * bw.y[l] * RatMatrix::kron(hinv[l + 1], id(sys.b[l + 1][l]));
  return out;
}

size_t gamma_rank(const CompositionSystem& sys) {
  auto sp = std::make_shared<CompositionSystem>(sys);
  BigSetting big = build_big(sp);
  const size_t d = sys.dim_w();
  const size_t rows = big.q[sys.s - 1] * big.p[0] * big.h_top();
  RatMatrix lin(rows, d);
  for (size_t k = 0; k < d; ++k) {
    Vec e(d);
    e[k] = 1;
    RatMatrix g = gamma_of(big, MorphismElement::unflatten(sp, e));
    for (size_t x = 0; x < g.rows(); ++x)
      for (size_t y = 0; y < g.cols(); ++y) lin(x * g.cols() + y, k) = g(x, y);
  }
  return rank(lin);
}

bool gamma_injectivity_check(const CompositionSystem& sys) { return gamma_rank(sys) == sys.dim_w(); }

std::string to_string(ZStatus s) {
  switch (s) {
    case ZStatus::InZ: return "in_Z";
    case ZStatus::Boundary: return "boundary";
    case ZStatus::Outside: return "outside";
  }
  return "outside";
}

ZReport z_membership(const BigSetting& big, const BigElement& bw) {
  const CompositionSystem& sys = *big.sys;
  const int r = sys.r, s = sys.s, top = s - 1;
  require(bw.x.size() == static_cast<size_t>(r) && bw.y.size() == static_cast<size_t>(s - 1),
          "z_membership: element does not match the big setting");
  const size_t h = big.h_top();
  require(bw.gamma.rows() == big.q[top] && bw.gamma.cols() == big.p[0] * h, "z_membership: gamma shape");
  ZReport rep;
  auto add = [&](std::string idv, std::string group, bool holds, long value = -1, long canon = -1) {
    rep.conditions.push_back(ZCondition{std::move(idv), std::move(group), holds, value, canon});
  };
  bool ranks_le = true, ranks_eq = true, factors = true;

  for (int i = 1; i < r; ++i) {
    require(bw.x[i].rows() == big.p[i - 1] && bw.x[i].cols() == big.p[i] * sys.a[i][i - 1],
            "z_membership: x shape");
    const long v = static_cast<long>(rank(bw.x[i])), c = static_cast<long>(rank(big.xi[i]));
    ranks_le = ranks_le && v <= c;
    ranks_eq = ranks_eq && v == c;
    add("rank-x" + std::to_string(i + 1), "rank", v == c, v, c);
  }
  for (int l = 0; l < top; ++l) {
    const size_t b = sys.b[l + 1][l];
    require(bw.y[l].rows() == big.q[l] && bw.y[l].cols() == big.q[l + 1] * b, "z_membership: y shape");
    const long v = static_cast<long>(rank(adjoint_left(bw.y[l], b)));
    const long c = static_cast<long>(rank(adjoint_left(big.eta[l], b)));
    ranks_le = ranks_le && v <= c;
    ranks_eq = ranks_eq && v == c;
    add("rank-y" + std::to_string(l + 1), "rank*", v == c, v, c);
  }

  // x_{1i}: P_i ⊗ A_i1 → P_1, through the iterated pairings.
  std::vector<std::optional<RatMatrix>> x1(r);
  x1[0] = id(big.p[0]);
  if (r > 1) x1[1] = bw.x[1];
  {
    RatMatrix chain = r > 1 ? bw.x[1] : RatMatrix();
    RatMatrix pair = r > 1 ? id(sys.a[1][0]) : RatMatrix();
    size_t tdim = r > 1 ? sys.a[1][0] : 0;
    for (int i = 2; i < r; ++i) {
      const size_t a = sys.a[i][i - 1];
      chain = chain * RatMatrix::kron(bw.x[i], id(tdim));
      pair = sys.aa(i, i - 1, 0) * RatMatrix::kron(id(a), pair);
      tdim *= a;
      x1[i] = factor_through_surjection(chain, RatMatrix::kron(id(big.p[i]), pair));
      factors = factors && x1[i].has_value();
      add("factor-left-" + std::to_string(i + 1), "left-chain", x1[i].has_value());
    }
  }

  // y_{ls}: Q_s → B*_sl ⊗ Q_l.
  std::vector<std::optional<RatMatrix>> ys(s);
  ys[top] = id(big.q[top]);
  if (s > 1) ys[top - 1] = adjoint_left(bw.y[top - 1], sys.b[top][top - 1]);
  {
    RatMatrix chain = s > 1 ? adjoint_left(bw.y[top - 1], sys.b[top][top - 1]) : RatMatrix();
    RatMatrix pair = s > 1 ? id(sys.b[top][top - 1]) : RatMatrix();
    size_t udim = s > 1 ? sys.b[top][top - 1] : 0;
    for (int l = top - 2; l >= 0; --l) {
      const size_t b = sys.b[l + 1][l];
      chain = RatMatrix::kron(id(udim), adjoint_left(bw.y[l], b)) * chain;
      pair = sys.bb(top, l + 1, l) * RatMatrix::kron(pair, id(b));
      udim *= b;
      ys[l] = factor_through_injection(chain, RatMatrix::kron(pair.transpose(), id(big.q[l])));
      factors = factors && ys[l].has_value();
      add("factor-right-" + std::to_string(l + 1), "right-chain", ys[l].has_value());
    }
  }

  // (L_i): γ ∘ (x_{1i} ⊗ 1) through P_i ⊗ H*_si.
  std::vector<std::optional<RatMatrix>> gs(r);
  gs[0] = bw.gamma;
  for (int i = 1; i < r; ++i) {
    if (!x1[i]) {
      factors = false;
      add("factor-gamma-left-" + std::to_string(i + 1), "gamma-left", false);
      continue;
    }
    const size_t ai = sys.a[i][0], hti = sys.h[top][i];
    RatMatrix d(hti, ai * h);
    if (hti > 0 && ai > 0 && h > 0) {
      const RatMatrix& c = sys.ha(top, i, 0);
      for (size_t k = 0; k < hti; ++k)
        for (size_t al = 0; al < ai; ++al)
          for (size_t z = 0; z < h; ++z) d(k, al * h + z) = c(z, k * ai + al);
    }
    RatMatrix lhs = bw.gamma * RatMatrix::kron(*x1[i], id(h));
    gs[i] = factor_through_surjection(lhs, RatMatrix::kron(id(big.p[i]), d));
    factors = factors && gs[i].has_value();
    add("factor-gamma-left-" + std::to_string(i + 1), "gamma-left", gs[i].has_value());
  }
  // (L_li): ỹ_ls ∘ (γ_si ⊗ 1) through P_i ⊗ H*_li.
  for (int l = 0; l < s; ++l)
    for (int i = 0; i < r; ++i) {
      const std::string name = "factor-gamma-left-" + std::to_string(l + 1) + "-" + std::to_string(i + 1);
      if (!gs[i] || !ys[l]) {
        factors = false;
        add(name, "gamma-left", false);
        continue;
      }
      const size_t btl = sys.b[top][l], hti = sys.h[top][i], hli = sys.h[l][i], ql = big.q[l];
      RatMatrix ytilde(ql, big.q[top] * btl);
      for (size_t qq = 0; qq < ql; ++qq)
        for (size_t x = 0; x < big.q[top]; ++x)
          for (size_t be = 0; be < btl; ++be) ytilde(qq, x * btl + be) = (*ys[l])(be * ql + qq, x);
      RatMatrix e(hli, hti * btl);
      if (hli > 0 && hti > 0 && btl > 0) {
        const RatMatrix& c = sys.bh(top, l, i);
        for (size_t k = 0; k < hli; ++k)
          for (size_t ka = 0; ka < hti; ++ka)
            for (size_t be = 0; be < btl; ++be) e(k, ka * btl + be) = c(ka, be * hli + k);
      }
      RatMatrix lhs = ytilde * RatMatrix::kron(*gs[i], id(btl));
      bool ok = factor_through_surjection(lhs, RatMatrix::kron(id(big.p[i]), e)).has_value();
      factors = factors && ok;
      add(name, "gamma-left", ok);
    }

  // (R_l): (y_ls ⊗ 1) ∘ γ through Q_l ⊗ H_l1.
  RatMatrix gadj = adjoint_right(bw.gamma, h);
  std::vector<std::optional<RatMatrix>> gl(s);
  for (int l = 0; l < s; ++l) {
    const std::string name = "factor-gamma-right-" + std::to_string(l + 1);
    if (!ys[l]) {
      factors = false;
      add(name, "gamma-right", false);
      continue;
    }
    const size_t btl = sys.b[top][l], hl0 = sys.h[l][0], ql = big.q[l];
    RatMatrix inj(btl * ql * h, ql * hl0);
    if (btl > 0 && hl0 > 0 && h > 0) {
      const RatMatrix& c = sys.bh(top, l, 0);
      for (size_t be = 0; be < btl; ++be)
        for (size_t qq = 0; qq < ql; ++qq)
          for (size_t z = 0; z < h; ++z)
            for (size_t x = 0; x < hl0; ++x) inj((be * ql + qq) * h + z, qq * hl0 + x) = c(z, be * hl0 + x);
    }
    gl[l] = factor_through_injection(RatMatrix::kron(*ys[l], id(h)) * gadj, inj);
    factors = factors && gl[l].has_value();
    add(name, "gamma-right", gl[l].has_value());
  }
  // (R_li): (γ_l1 ⊗ 1) ∘ x̃_{1i} through Q_l ⊗ H_li.
  for (int l = 0; l < s; ++l)
    for (int i = 1; i < r; ++i) {
      const std::string name = "factor-gamma-right-" + std::to_string(l + 1) + "-" + std::to_string(i + 1);
      if (!gl[l] || !x1[i]) {
        factors = false;
        add(name, "gamma-right", false);
        continue;
      }
      const size_t ai = sys.a[i][0], hl0 = sys.h[l][0], hli = sys.h[l][i], ql = big.q[l];
      RatMatrix xt = adjoint_right(*x1[i], ai);
      RatMatrix inj(ql * hl0 * ai, ql * hli);
      if (ai > 0 && hl0 > 0 && hli > 0) {
        const RatMatrix& c = sys.ha(l, i, 0);
        for (size_t qq = 0; qq < ql; ++qq)
          for (size_t x = 0; x < hl0; ++x)
            for (size_t al = 0; al < ai; ++al)
              for (size_t k = 0; k < hli; ++k) inj((qq * hl0 + x) * ai + al, qq * hli + k) = c(x, k * ai + al);
      }
      bool ok = factor_through_injection(RatMatrix::kron(*gl[l], id(ai)) * xt, inj).has_value();
      factors = factors && ok;
      add(name, "gamma-right", ok);
    }

  if (ranks_eq && factors) {
    rep.status = ZStatus::InZ;
  } else if (factors && ranks_le) {
    rep.status = ZStatus::Boundary;
    rep.note = "the closure conditions are necessary, not sufficient: boundary may over-approximate";
  } else {
    rep.status = ZStatus::Outside;
  }
  return rep;
}

BigFamily saturated_big_family(const BigSetting& big, const SubspaceFamily& fam) {
  const CompositionSystem& sys = *big.sys;
  require(fam.mprime.size() == static_cast<size_t>(sys.r) && fam.nprime.size() == static_cast<size_t>(sys.s),
          "saturated_big_family: family does not match");
  BigFamily out;
  for (int i = 0; i < sys.r; ++i) {
    size_t cols = 0;
    for (int j = i; j < sys.r; ++j) cols += fam.mprime[j].cols() * sys.a[j][i];
    RatMatrix basis(big.p[i], cols);
    size_t c0 = 0;
    for (int j = i; j < sys.r; ++j) {
      RatMatrix blk = RatMatrix::kron(fam.mprime[j], id(sys.a[j][i]));
      if (blk.cols() == 0) continue;
      basis.set_block(big.p_offset[i][j], c0, blk);
      c0 += blk.cols();
    }
    out.pprime.push_back(std::move(basis));
  }
  for (int l = 0; l < sys.s; ++l) {
    size_t cols = 0;
    for (int mm = 0; mm <= l; ++mm) cols += fam.nprime[mm].cols() * sys.b[l][mm];
    RatMatrix basis(big.q[l], cols);
    size_t c0 = 0;
    for (int mm = 0; mm <= l; ++mm) {
      RatMatrix blk = RatMatrix::kron(fam.nprime[mm], id(sys.b[l][mm]));
      if (blk.cols() == 0) continue;
      basis.set_block(big.q_offset[l][mm], c0, blk);
      c0 += blk.cols();
    }
    out.qprime.push_back(std::move(basis));
  }
  return out;
}

namespace {

// The big representation as a chain of vertices v_0 = P_r, …, P_1, Q_s, …, Q_1 with arrows
// v_k ⊗ K_k → v_{k+1}.
struct Chain {
  std::vector<size_t> dims, mult;
  std::vector<RatMatrix> arrows;
  std::vector<RatMatrix> adj;  // v_k → v_{k+1} ⊗ K_k*
  Vec weights;
};

Chain make_chain(const BigSetting& big, const BigElement& bw, const AssociatedPolarization* assoc) {
  const CompositionSystem& sys = *big.sys;
  const int r = sys.r, s = sys.s;
  Chain c;
  for (int i = r - 1; i >= 0; --i) {
    c.dims.push_back(big.p[i]);
    if (assoc) c.weights.push_back(assoc->alpha[i]);
  }
  for (int l = s - 1; l >= 0; --l) {
    c.dims.push_back(big.q[l]);
    if (assoc) c.weights.push_back(-assoc->beta[l]);
  }
  for (int i = r - 1; i >= 1; --i) {
    c.arrows.push_back(bw.x[i]);
    c.mult.push_back(sys.a[i][i - 1]);
  }
  c.arrows.push_back(bw.gamma);
  c.mult.push_back(big.h_top());
  for (int l = s - 2; l >= 0; --l) {
    c.arrows.push_back(bw.y[l]);
    c.mult.push_back(sys.b[l + 1][l]);
  }
  for (size_t k = 0; k < c.arrows.size(); ++k) c.adj.push_back(adjoint_right(c.arrows[k], c.mult[k]));
  return c;
}

std::vector<RatMatrix> family_to_chain(const BigFamily& f) {
  std::vector<RatMatrix> out(f.pprime.rbegin(), f.pprime.rend());
  out.insert(out.end(), f.qprime.rbegin(), f.qprime.rend());
  return out;
}

BigFamily chain_to_family(const std::vector<RatMatrix>& v, int r) {
  BigFamily f;
  for (int k = r - 1; k >= 0; --k) f.pprime.push_back(v[k]);
  for (int k = static_cast<int>(v.size()) - 1; k >= r; --k) f.qprime.push_back(v[k]);
  return f;
}

RatMatrix image_of(const Chain& c, size_t k, const RatMatrix& sub) {
  if (sub.cols() == 0 || c.mult[k] == 0) return RatMatrix(c.dims[k + 1], 0);
  return canonical_basis(c.arrows[k] * RatMatrix::kron(sub, id(c.mult[k])), c.dims[k + 1]);
}

RatMatrix preimage_of(const Chain& c, size_t k, const RatMatrix& target) {
  const size_t d = c.dims[k];
  if (c.mult[k] == 0 || target.cols() == c.dims[k + 1]) return id(d);
  RatMatrix ann = annihilator(target, c.dims[k + 1]);
  if (ann.rows() == 0) return id(d);
  return canonical_basis(kernel_basis(RatMatrix::kron(ann, id(c.mult[k])) * c.adj[k]), d);
}

enum class Closure { Up, Down, Mixed };

std::vector<RatMatrix> close_from(const Chain& c, size_t k, const RatMatrix& seed, Closure how) {
  const size_t nv = c.dims.size();
  std::vector<RatMatrix> f(nv);
  f[k] = canonical_basis(seed, c.dims[k]);
  for (size_t j = k + 1; j < nv; ++j)
    f[j] = how == Closure::Down ? id(c.dims[j]) : image_of(c, j - 1, f[j - 1]);
  for (size_t j = k; j-- > 0;) f[j] = how == Closure::Up ? RatMatrix(c.dims[j], 0) : preimage_of(c, j, f[j + 1]);
  return f;
}

// Components v_y ∈ V of the columns of a matrix over V ⊗ K.
RatMatrix support_columns(const RatMatrix& y, size_t dv, size_t k) {
  RatMatrix out(dv, y.cols() * k);
  for (size_t col = 0; col < y.cols(); ++col)
    for (size_t t = 0; t < k; ++t)
      for (size_t x = 0; x < dv; ++x) out(x, col * k + t) = y(x * k + t, col);
  return out;
}

RatMatrix random_subspace(std::mt19937_64& rng, size_t d, size_t k) {
  std::uniform_int_distribution<int> dist(-3, 3);
  RatMatrix m(d, k);
  for (size_t x = 0; x < d; ++x)
    for (size_t y = 0; y < k; ++y) m(x, y) = dist(rng);
  return m;
}

struct BigSeed {
  size_t vertex;
  RatMatrix basis;
  Closure how;
};

std::vector<BigSeed> make_big_seeds(const Chain& c, uint64_t seed) {
  std::seed_seq ss{static_cast<uint64_t>(seed), static_cast<uint64_t>(0xB16)};
  std::mt19937_64 rng(ss);
  std::vector<BigSeed> out;
  auto push_all = [&](size_t k, const RatMatrix& b) {
    for (Closure how : {Closure::Up, Closure::Down, Closure::Mixed}) out.push_back(BigSeed{k, b, how});
  };
  const size_t nv = c.dims.size();
  // Kernel-support seeds first: smallest S with ker(arrow) ⊂ S ⊗ K.
  for (size_t k = 0; k + 1 < nv; ++k) {
    if (c.dims[k] == 0 || c.mult[k] == 0) continue;
    RatMatrix ker = kernel_basis(c.arrows[k]);
    if (ker.cols() > 0) push_all(k, canonical_basis(support_columns(ker, c.dims[k], c.mult[k]), c.dims[k]));
    RatMatrix kill = kernel_basis(c.adj[k]);
    if (kill.cols() > 0) push_all(k, kill);
  }
  for (size_t k = 0; k < nv; ++k) {
    const size_t d = c.dims[k];
    if (d == 0) continue;
    push_all(k, RatMatrix(d, 0));
    push_all(k, id(d));
    const size_t cap = std::min<size_t>(d, 48);
    for (size_t x = 0; x < cap; ++x) {
      RatMatrix e(d, 1);
      e(x, 0) = 1;
      push_all(k, e);
    }
    for (size_t x = 0; x < cap && d > 1; ++x) {
      RatMatrix hyp(d, d - 1);
      for (size_t y = 0, col = 0; y < d; ++y)
        if (y != x) hyp(y, col++) = 1;
      push_all(k, hyp);
    }
    for (int t = 0; t < 8 && d > 1; ++t) {
      std::uniform_int_distribution<size_t> kd(1, d - 1);
      push_all(k, random_subspace(rng, d, kd(rng)));
    }
  }
  return out;
}

struct BigOutcome {
  int severity = 0;
  std::vector<RatMatrix> family;
  Rational delta;
};

BigOutcome evaluate_big_seed(const Chain& c, const BigSeed& sd) {
  BigOutcome o;
  o.family = close_from(c, sd.vertex, sd.basis, sd.how);
  bool all_zero = true, all_full = true;
  for (size_t k = 0; k < c.dims.size(); ++k) {
    const size_t dk = o.family[k].cols();
    o.delta += c.weights[k] * Rational(static_cast<long>(dk));
    all_zero = all_zero && dk == 0;
    all_full = all_full && dk == c.dims[k];
  }
  const bool proper = !all_zero && !all_full;
  if (proper && sgn(o.delta) > 0) o.severity = 2;
  else if (proper && sgn(o.delta) == 0) o.severity = 1;
  return o;
}

void check_assoc(const BigSetting& big, const AssociatedPolarization& assoc) {
  const CompositionSystem& sys = *big.sys;
  if (assoc.alpha.size() != static_cast<size_t>(sys.r) || assoc.beta.size() != static_cast<size_t>(sys.s))
    throw SchemaError("associated polarization does not match the system");
  Rational left, right;
  for (int i = 0; i < sys.r; ++i) left += assoc.alpha[i] * Rational(static_cast<long>(big.p[i]));
  for (int l = 0; l < sys.s; ++l) right += assoc.beta[l] * Rational(static_cast<long>(big.q[l]));
  if (left != right) throw SchemaError("associated polarization is not balanced on the big space");
}

BigVerdict run_big_search(const BigSetting& big, const BigElement& bw, const AssociatedPolarization& assoc,
                          size_t budget, uint64_t seed, bool parallel) {
  check_assoc(big, assoc);
  if (budget == 0) throw SchemaError("search budget must be positive");
  Chain c = make_chain(big, bw, &assoc);
  std::vector<BigSeed> seeds = make_big_seeds(c, seed);
  BigVerdict v;
  v.candidates = seeds.size();
  v.budget_exhausted = seeds.size() > budget;
  if (v.budget_exhausted) seeds.resize(budget);
  v.budget_used = seeds.size();
  std::vector<BigOutcome> res(seeds.size());
  const long n = static_cast<long>(seeds.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long k = 0; k < n; ++k) res[k] = evaluate_big_seed(c, seeds[k]);
  } else {
    for (long k = 0; k < n; ++k) res[k] = evaluate_big_seed(c, seeds[k]);
  }
  long best = -1;
  for (long k = 0; k < n; ++k)
    if (res[k].severity > 0 && (best < 0 || res[k].severity > res[best].severity)) best = k;
  if (best >= 0) {
    v.status = res[best].severity == 2 ? StabilityStatus::Unstable : StabilityStatus::NotStable;
    v.family = chain_to_family(res[best].family, big.sys->r);
    v.delta = res[best].delta;
  } else {
    v.note = "semi-decision: no destabilizing subrepresentation among the sampled candidates";
  }
  if (v.budget_exhausted) v.note += (v.note.empty() ? "" : "; ") + std::string("budget exhausted");
  return v;
}

}  // namespace

bool is_big_invariant(const BigSetting& big, const BigElement& bw, const BigFamily& fam) {
  Chain c = make_chain(big, bw, nullptr);
  std::vector<RatMatrix> f = family_to_chain(fam);
  require(f.size() == c.dims.size(), "is_big_invariant: family does not match");
  for (size_t k = 0; k < f.size(); ++k) require(f[k].rows() == c.dims[k], "is_big_invariant: family ambient");
  for (size_t k = 0; k + 1 < f.size(); ++k)
    if (!span_contains(f[k + 1], image_of(c, k, f[k]))) return false;
  return true;
}

Rational big_delta(const AssociatedPolarization& assoc, const BigFamily& fam) {
  require(assoc.alpha.size() == fam.pprime.size() && assoc.beta.size() == fam.qprime.size(),
          "big_delta: shape mismatch");
  Rational d;
  for (size_t i = 0; i < fam.pprime.size(); ++i) d += assoc.alpha[i] * Rational(static_cast<long>(rank(fam.pprime[i])));
  for (size_t l = 0; l < fam.qprime.size(); ++l) d -= assoc.beta[l] * Rational(static_cast<long>(rank(fam.qprime[l])));
  return d;
}

BigFamily transform_family(const BigGroupElement& g, const BigFamily& fam) {
  require(g.g.size() == fam.pprime.size() && g.h.size() == fam.qprime.size(), "transform_family: shape mismatch");
  BigFamily out;
  for (size_t i = 0; i < fam.pprime.size(); ++i) out.pprime.push_back(g.g[i] * fam.pprime[i]);
  for (size_t l = 0; l < fam.qprime.size(); ++l) out.qprime.push_back(g.h[l] * fam.qprime[l]);
  return out;
}

BigFamily transport_witness(const BigSetting& big, const StabilityWitness& wit) {
  return transform_family(theta(big, inverse(wit.h)), saturated_big_family(big, wit.family));
}

BigVerdict big_destabilizer_search(const BigSetting& big, const BigElement& bw, const AssociatedPolarization& assoc,
                                   size_t budget, uint64_t seed) {
  return run_big_search(big, bw, assoc, budget, seed, true);
}

BigVerdict big_destabilizer_search_serial(const BigSetting& big, const BigElement& bw,
                                          const AssociatedPolarization& assoc, size_t budget, uint64_t seed) {
  return run_big_search(big, bw, assoc, budget, seed, false);
}

Json big_element_to_json(const BigElement& bw) {
  Json x = Json::array(), y = Json::array();
  for (size_t i = 1; i < bw.x.size(); ++i) x.push_back(to_json(bw.x[i]));
  for (const auto& m : bw.y) y.push_back(to_json(m));
  return Json{{"x", x}, {"gamma", to_json(bw.gamma)}, {"y", y}};
}

Json z_report_to_json(const ZReport& rep) {
  Json conds = Json::array();
  for (const auto& c : rep.conditions) {
    Json j{{"id", c.id}, {"group", c.group}, {"holds", c.holds}};
    if (c.value >= 0) {
      j["rank"] = c.value;
      j["canonical_rank"] = c.canonical;
    }
    conds.push_back(j);
  }
  return Json{{"schema", "1"}, {"status", to_string(rep.status)}, {"conditions", conds}, {"note", rep.note}};
}

Json big_verdict_to_json(const BigVerdict& v) {
  Json j{{"schema", "1"},
         {"status", to_string(v.status)},
         {"budget_used", v.budget_used},
         {"candidates", v.candidates},
         {"budget_exhausted", v.budget_exhausted},
         {"note", v.note}};
  if (v.family) {
    Json p = Json::array(), q = Json::array();
    for (const auto& m : v.family->pprime) p.push_back(to_json(m));
    for (const auto& m : v.family->qprime) q.push_back(to_json(m));
    j["witness"] = Json{{"pprime", p}, {"qprime", q}, {"delta", to_json(v.delta)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace gitpol
