#include "gitpol/region.hpp"

#include <algorithm>

#include "gitpol/errors.hpp"

namespace gitpol {

Rational HalfSpace::evaluate(const Vec& x) const {
  require(x.size() == coeffs.size(), "half-space dimension mismatch");
  Rational v = constant;
  for (size_t k = 0; k < x.size(); ++k) v += coeffs[k] * x[k];
  return v;
}

bool HalfSpace::satisfied_by(const Vec& x) const {
  int s = sgn(evaluate(x));
  return strict ? s > 0 : s >= 0;
}

bool ConvexPiece::contains(const Vec& x) const {
  for (const auto& h : constraints)
    if (!h.satisfied_by(x)) return false;
  return true;
}

bool Region::nonempty() const {
  for (const auto& p : pieces)
    if (p.nonempty()) return true;
  return false;
}

bool Region::contains(const Vec& x) const {
  for (const auto& p : pieces)
    if (p.contains(x)) return true;
  return false;
}

Rational twice_area(const std::vector<Vec>& polygon) {
  Rational a = 0;
  for (size_t k = 0; k < polygon.size(); ++k) {
    const Vec& p = polygon[k];
    const Vec& q = polygon[(k + 1) % polygon.size()];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return a;
}

namespace {

Rational eval_form(const Vec& coeffs, const Rational& constant, const Vec& x) {
  Rational v = constant;
  for (size_t k = 0; k < x.size(); ++k) v += coeffs[k] * x[k];
  return v;
}

Vec lerp(const Vec& p, const Vec& q, const Rational& fp, const Rational& fq) {
  // Point on segment pq where the form vanishes, given its values fp, fq of opposite sign.
  Rational s = fp / (fp - fq);
  Vec out(p.size());
  for (size_t k = 0; k < p.size(); ++k) out[k] = p[k] + s * (q[k] - p[k]);
  return out;
}

void dedup(std::vector<Vec>& poly) {
  std::vector<Vec> out;
  for (const auto& v : poly)
    if (out.empty() || out.back() != v) out.push_back(v);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  poly = std::move(out);
}

}  // namespace

std::vector<Vec> clip_polygon(const std::vector<Vec>& polygon, const Vec& coeffs,
                              const Rational& constant) {
  std::vector<Vec> out;
  const size_t n = polygon.size();
  for (size_t k = 0; k < n; ++k) {
    const Vec& p = polygon[k];
    const Vec& q = polygon[(k + 1) % n];
    Rational fp = eval_form(coeffs, constant, p), fq = eval_form(coeffs, constant, q);
    if (sgn(fp) >= 0) out.push_back(p);
    if ((sgn(fp) > 0 && sgn(fq) < 0) || (sgn(fp) < 0 && sgn(fq) > 0)) out.push_back(lerp(p, q, fp, fq));
  }
  dedup(out);
  return out;
}

std::pair<std::vector<Vec>, std::vector<Vec>> split_polygon(const std::vector<Vec>& polygon,
                                                            const Vec& coeffs,
                                                            const Rational& constant) {
  Vec neg(coeffs.size());
  for (size_t k = 0; k < coeffs.size(); ++k) neg[k] = -coeffs[k];
  return {clip_polygon(polygon, coeffs, constant), clip_polygon(polygon, neg, -constant)};
}

ConvexPiece make_piece(int dim, const std::vector<HalfSpace>& constraints, const Box& bounding) {
  require(dim == 1 || dim == 2, "regions are supported in dimension 1 or 2");
  ConvexPiece piece;
  piece.constraints = constraints;
  for (const auto& h : constraints)
    require(static_cast<int>(h.coeffs.size()) == dim, "half-space dimension mismatch");
  if (dim == 1) {
    Rational lo = bounding.lo[0], hi = bounding.hi[0];
    for (const auto& h : constraints) {
      const Rational& a = h.coeffs[0];
      if (sgn(a) == 0) {
        if (sgn(h.constant) < 0 || (h.strict && sgn(h.constant) == 0)) return piece;
        continue;
      }
      Rational root = -h.constant / a;
      if (sgn(a) > 0) lo = std::max(lo, root);
      else hi = std::min(hi, root);
    }
    if (lo > hi) return piece;
    piece.closure = {Vec{lo}, Vec{hi}};
    Vec mid{(lo + hi) / 2};
    if (piece.contains(mid)) piece.witness = mid;
    else if (lo == hi && piece.contains(Vec{lo})) piece.witness = Vec{lo};
    return piece;
  }
  std::vector<Vec> poly = {Vec{bounding.lo[0], bounding.lo[1]}, Vec{bounding.hi[0], bounding.lo[1]},
                           Vec{bounding.hi[0], bounding.hi[1]}, Vec{bounding.lo[0], bounding.hi[1]}};
  for (const auto& h : constraints) {
    if (sgn(h.coeffs[0]) == 0 && sgn(h.coeffs[1]) == 0) {
      if (sgn(h.constant) < 0 || (h.strict && sgn(h.constant) == 0)) poly.clear();
      continue;
    }
    poly = clip_polygon(poly, h.coeffs, h.constant);
    if (poly.empty()) break;
  }
  piece.closure = poly;
  if (poly.empty()) return piece;
  // Interior candidates: centroid of vertices, then edge midpoints, then vertices.
  std::vector<Vec> candidates;
  Vec c(2);
  for (const auto& v : poly) {
    c[0] += v[0];
    c[1] += v[1];
  }
  c[0] /= static_cast<long>(poly.size());
  c[1] /= static_cast<long>(poly.size());
  candidates.push_back(c);
  for (size_t k = 0; k < poly.size(); ++k) {
    const Vec& p = poly[k];
    const Vec& q = poly[(k + 1) % poly.size()];
    candidates.push_back(Vec{(p[0] + q[0]) / 2, (p[1] + q[1]) / 2});
  }
  for (const auto& v : poly) candidates.push_back(v);
  for (const auto& x : candidates)
    if (piece.contains(x)) {
      piece.witness = x;
      break;
    }
  return piece;
}

bool primitive_form(Vec& coeffs, Rational& constant) {
  bool any = false;
  for (const auto& c : coeffs)
    if (sgn(c) != 0) any = true;
  if (!any) return false;
  Integer l = 1;
  auto take_den = [&](const Rational& x) { mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t()); };
  for (const auto& c : coeffs) take_den(c);
  take_den(constant);
  Integer g = 0;
  auto take_num = [&](const Rational& x) {
    Integer v = Integer(x.get_num() * (l / x.get_den()));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  };
  for (const auto& c : coeffs) take_num(c);
  take_num(constant);
  Rational scale = Rational(l) / Rational(g);
  for (const auto& c : coeffs)
    if (sgn(c) != 0) {
      if (sgn(c) < 0) scale = -scale;
      break;
    }
  for (auto& c : coeffs) c *= scale;
  constant *= scale;
  return true;
}

}  // namespace gitpol
