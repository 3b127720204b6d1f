#include "gitpol/polarization.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <regex>

#include "gitpol/errors.hpp"

namespace gitpol {

bool is_normalized(const Polarization& pol, const std::vector<int>& m, const std::vector<int>& n) {
  if (pol.lambda.size() != m.size() || pol.mu.size() != n.size()) return false;
  Rational a = 0, b = 0;
  for (size_t i = 0; i < m.size(); ++i) a += pol.lambda[i] * m[i];
  for (size_t l = 0; l < n.size(); ++l) b += pol.mu[l] * n[l];
  return a == 1 && b == 1;
}

bool is_proper(const Polarization& pol) {
  for (const auto& x : pol.lambda)
    if (sgn(x) <= 0) return false;
  for (const auto& x : pol.mu)
    if (sgn(x) <= 0) return false;
  return true;
}

bool is_proper_vector(const DimensionVector& d, const std::vector<int>& m, const std::vector<int>& n) {
  bool all_zero = true, all_full = true;
  for (size_t i = 0; i < m.size(); ++i) {
    if (d.mprime[i] != 0) all_zero = false;
    if (d.mprime[i] != m[i]) all_full = false;
  }
  for (size_t l = 0; l < n.size(); ++l) {
    if (d.nprime[l] != 0) all_zero = false;
    if (d.nprime[l] != n[l]) all_full = false;
  }
  return !all_zero && !all_full;
}

std::vector<DimensionVector> proper_dimension_vectors(const std::vector<int>& m,
                                                      const std::vector<int>& n) {
  std::vector<int> bounds(m);
  bounds.insert(bounds.end(), n.begin(), n.end());
  std::vector<int> cur(bounds.size(), 0);
  std::vector<DimensionVector> out;
  for (;;) {
    DimensionVector d{std::vector<int>(cur.begin(), cur.begin() + m.size()),
                      std::vector<int>(cur.begin() + m.size(), cur.end())};
    if (is_proper_vector(d, m, n)) out.push_back(std::move(d));
    size_t k = cur.size();
    while (k > 0) {
      --k;
      if (cur[k] < bounds[k]) {
        ++cur[k];
        break;
      }
      cur[k] = 0;
      if (k == 0) return out;
    }
    if (cur.empty()) return out;
  }
}

Rational discriminant(const Polarization& pol, const DimensionVector& d) {
  require(pol.lambda.size() == d.mprime.size() && pol.mu.size() == d.nprime.size(),
          "discriminant: shape mismatch");
  Rational v = 0;
  for (size_t i = 0; i < d.mprime.size(); ++i) v += pol.lambda[i] * d.mprime[i];
  for (size_t l = 0; l < d.nprime.size(); ++l) v -= pol.mu[l] * d.nprime[l];
  return v;
}

std::vector<size_t> saturated_left_dims(const std::vector<int>& mprime, const CompositionSystem& sys) {
  std::vector<size_t> p(sys.r, 0);
  for (int i = 0; i < sys.r; ++i)
    for (int j = i; j < sys.r; ++j) p[i] += static_cast<size_t>(mprime[j]) * sys.a[j][i];
  return p;
}

std::vector<size_t> saturated_right_dims(const std::vector<int>& nprime, const CompositionSystem& sys) {
  std::vector<size_t> q(sys.s, 0);
  for (int l = 0; l < sys.s; ++l)
    for (int mm = 0; mm <= l; ++mm) q[l] += static_cast<size_t>(nprime[mm]) * sys.b[l][mm];
  return q;
}

AssociatedPolarization associated(const Polarization& pol, const CompositionSystem& sys) {
  require(static_cast<int>(pol.lambda.size()) == sys.r && static_cast<int>(pol.mu.size()) == sys.s,
          "associated: shape mismatch");
  AssociatedPolarization out;
  out.alpha.resize(sys.r);
  out.beta.resize(sys.s);
  for (int j = 0; j < sys.r; ++j) {
    Rational acc = pol.lambda[j];
    for (int i = 0; i < j; ++i) acc -= out.alpha[i] * sys.a[j][i];
    out.alpha[j] = acc;
  }
  for (int mm = sys.s - 1; mm >= 0; --mm) {
    Rational acc = pol.mu[mm];
    for (int l = mm + 1; l < sys.s; ++l) acc -= out.beta[l] * sys.b[l][mm];
    out.beta[mm] = acc;
  }
  out.p = saturated_left_dims(sys.m, sys);
  out.q = saturated_right_dims(sys.n, sys);
  return out;
}

Polarization from_associated(const Vec& alpha, const Vec& beta, const CompositionSystem& sys) {
  Polarization pol;
  pol.lambda.assign(sys.r, 0);
  pol.mu.assign(sys.s, 0);
  for (int j = 0; j < sys.r; ++j)
    for (int i = 0; i <= j; ++i) pol.lambda[j] += alpha[i] * sys.a[j][i];
  for (int mm = 0; mm < sys.s; ++mm)
    for (int l = mm; l < sys.s; ++l) pol.mu[mm] += beta[l] * sys.b[l][mm];
  return pol;
}

namespace {

WeightCheck check(std::string id, Rational slack, bool strict) {
  WeightCheck w;
  w.id = std::move(id);
  w.strict = strict;
  w.holds = strict ? sgn(slack) > 0 : sgn(slack) >= 0;
  w.slack = std::move(slack);
  return w;
}

}  // namespace

std::vector<WeightCheck> weight_conditions(const AssociatedPolarization& assoc) {
  std::vector<WeightCheck> out;
  const int r = static_cast<int>(assoc.alpha.size()), s = static_cast<int>(assoc.beta.size());
  for (int i = 1; i < r; ++i) {
    Rational tail = 0;
    for (int j = i; j < r; ++j) tail += assoc.alpha[j] * static_cast<unsigned long>(assoc.p[j]);
    out.push_back(check("tail-alpha-" + std::to_string(i + 1), tail, true));
  }
  for (int mm = 0; mm + 1 < s; ++mm) {
    Rational head = 0;
    for (int l = 0; l <= mm; ++l) head += assoc.beta[l] * static_cast<unsigned long>(assoc.q[l]);
    out.push_back(check("head-beta-" + std::to_string(mm + 1), head, true));
  }
  return out;
}

std::vector<WeightCheck> positivity_conditions(const AssociatedPolarization& assoc) {
  std::vector<WeightCheck> out;
  for (size_t i = 0; i < assoc.alpha.size(); ++i)
    out.push_back(check("alpha" + std::to_string(i + 1) + ">0", assoc.alpha[i], true));
  for (size_t l = 0; l < assoc.beta.size(); ++l)
    out.push_back(check("beta" + std::to_string(l + 1) + ">0", assoc.beta[l], true));
  return out;
}

std::vector<WeightCheck> proper_case_check(const Vec& left_weights, const Vec& right_weights,
                                           const std::vector<size_t>& left_dims,
                                           const std::vector<size_t>& right_dims, int which_case) {
  require(which_case >= 1 && which_case <= 3, "proper_case_check: case must be 1, 2 or 3");
  require(left_weights.size() == left_dims.size() && right_weights.size() == right_dims.size(),
          "proper_case_check: shape mismatch");
  std::vector<WeightCheck> out;
  const size_t r = left_weights.size(), s = right_weights.size();
  if (which_case == 1) {
    for (size_t i = 0; i < r; ++i)
      out.push_back(check("left" + std::to_string(i + 1) + ">0", left_weights[i], true));
  } else {
    for (size_t i = 0; i < r; ++i) {
      Rational tail = 0;
      for (size_t j = i; j < r; ++j) tail += left_weights[j] * static_cast<unsigned long>(left_dims[j]);
      out.push_back(check("left-tail" + std::to_string(i + 1) + ">0", tail, true));
    }
  }
  if (which_case == 2) {
    for (size_t mm = 0; mm < s; ++mm) {
      Rational head = 0;
      for (size_t l = 0; l <= mm; ++l) head += right_weights[l] * static_cast<unsigned long>(right_dims[l]);
      out.push_back(check("right-head" + std::to_string(mm + 1) + "<0", -head, true));
    }
  } else {
    for (size_t l = 0; l < s; ++l)
      out.push_back(check("right" + std::to_string(l + 1) + "<0", -right_weights[l], true));
  }
  return out;
}

CharacterExponents char_exponents(const Polarization& pol, const std::vector<int>& m,
                                  const std::vector<int>& n) {
  CharacterExponents out;
  Vec all = pol.lambda;
  for (const auto& x : pol.mu) all.push_back(-x);
  Integer l = lcm_of_denominators(all);
  Integer g = 0;
  for (const auto& x : all) {
    Integer v = x.get_num() * (l / x.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g == 0) g = 1;
  out.scale = l / g;
  for (size_t i = 0; i < pol.lambda.size(); ++i) {
    Rational v = pol.lambda[i] * out.scale;
    out.left.push_back(v.get_num());
  }
  for (size_t k = 0; k < pol.mu.size(); ++k) {
    Rational v = -pol.mu[k] * out.scale;
    out.right.push_back(v.get_num());
  }
  const long s = static_cast<long>(n.size());
  out.degree_case1 = 0;
  out.degree_case2 = 0;
  for (size_t i = 0; i < m.size(); ++i) {
    out.degree_case1 += out.left[i] * m[i];
    out.degree_case2 += out.left[i] * m[i] * static_cast<long>(i + 1);
  }
  for (long k = 0; k < s; ++k) out.degree_case2 -= out.right[k] * n[k] * (s - (k + 1));
  return out;
}

namespace {

// Parses one chart parameter into an affine functional over (λ, μ).
std::pair<Vec, Rational> parse_parameter(const std::string& text, const std::vector<int>& m,
                                         const std::vector<int>& n) {
  const size_t r = m.size(), s = n.size();
  Vec coeffs(r + s);
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t == "t") {
    if (r != 2 || s != 1) throw SchemaError("parameter t is defined for type (2,1) only");
    coeffs[1] = m[1];
    return {coeffs, 0};
  }
  static const std::regex re(R"(^(?:([0-9]+(?:/[0-9]+)?)([+-]))?(?:([0-9]+(?:/[0-9]+)?)\*)?(lambda|mu)([0-9]+)$)");
  std::smatch mt;
  if (!std::regex_match(t, mt, re)) throw SchemaError("cannot parse chart parameter \"" + text + "\"");
  Rational constant = mt[1].matched ? parse_rational(mt[1].str()) : Rational(0);
  Rational sign = (mt[2].matched && mt[2].str() == "-") ? -1 : 1;
  Rational coef = mt[3].matched ? parse_rational(mt[3].str()) : Rational(1);
  int idx = std::stoi(mt[5].str());
  bool is_lambda = mt[4].str() == "lambda";
  if (idx < 1 || idx > static_cast<int>(is_lambda ? r : s))
    throw SchemaError("chart parameter index out of range in \"" + text + "\"");
  coeffs[(is_lambda ? 0 : r) + idx - 1] = sign * coef;
  return {coeffs, constant};
}

}  // namespace

Chart::Chart(std::vector<std::string> names, std::vector<int> m, std::vector<int> n)
    : names_(std::move(names)), m_(std::move(m)), n_(std::move(n)) {
  const size_t r = m_.size(), s = n_.size(), d = r + s;
  if (names_.size() + 2 != d)
    throw SchemaError("need exactly " + std::to_string(d - 2) + " chart parameters, got " +
                      std::to_string(names_.size()));
  for (const auto& nm : names_) funcs_.push_back(parse_parameter(nm, m_, n_));
  RatMatrix a(d, d);
  for (size_t i = 0; i < r; ++i) a(0, i) = m_[i];
  for (size_t l = 0; l < s; ++l) a(1, r + l) = n_[l];
  for (size_t k = 0; k < funcs_.size(); ++k)
    for (size_t c = 0; c < d; ++c) a(2 + k, c) = funcs_[k].first[c];
  auto inv = inverse(a);
  if (!inv) throw SchemaError("chart parameters do not determine the polarization");
  Vec rhs(d);
  rhs[0] = 1;
  rhs[1] = 1;
  for (size_t k = 0; k < funcs_.size(); ++k) rhs[2 + k] = -funcs_[k].second;
  base_ = inv->apply(rhs);
  for (size_t k = 0; k < funcs_.size(); ++k) dirs_.push_back(inv->column(2 + k));
}

Chart Chart::standard(const std::vector<int>& m, const std::vector<int>& n) {
  std::vector<std::string> names;
  if (m.size() == 2 && n.size() == 1) {
    names.push_back("t");
  } else {
    for (size_t i = 1; i < m.size(); ++i) names.push_back("lambda" + std::to_string(i + 1));
    for (size_t l = 0; l + 1 < n.size(); ++l) names.push_back("mu" + std::to_string(l + 1));
  }
  return Chart(names, m, n);
}

Polarization Chart::at(const Vec& point) const {
  require(point.size() == names_.size(), "chart point dimension mismatch");
  Vec v = base_;
  for (size_t k = 0; k < point.size(); ++k)
    for (size_t c = 0; c < v.size(); ++c) v[c] += dirs_[k][c] * point[k];
  Polarization pol;
  pol.lambda.assign(v.begin(), v.begin() + m_.size());
  pol.mu.assign(v.begin() + m_.size(), v.end());
  return pol;
}

Vec Chart::coordinates(const Polarization& pol) const {
  Vec v = pol.lambda;
  v.insert(v.end(), pol.mu.begin(), pol.mu.end());
  Vec out;
  for (const auto& [coeffs, constant] : funcs_) {
    Rational x = constant;
    for (size_t c = 0; c < v.size(); ++c) x += coeffs[c] * v[c];
    out.push_back(x);
  }
  return out;
}

std::pair<Vec, Rational> Chart::pull_back(const Vec& coeffs, const Rational& constant) const {
  require(coeffs.size() == base_.size(), "pull_back: dimension mismatch");
  Vec lin(dirs_.size());
  Rational c = constant;
  for (size_t j = 0; j < coeffs.size(); ++j) {
    if (sgn(coeffs[j]) == 0) continue;
    c += coeffs[j] * base_[j];
    for (size_t k = 0; k < dirs_.size(); ++k) lin[k] += coeffs[j] * dirs_[k][j];
  }
  return {lin, c};
}

std::vector<HalfSpace> Chart::proper_domain() const {
  std::vector<HalfSpace> out;
  const size_t r = m_.size();
  for (size_t j = 0; j < base_.size(); ++j) {
    Vec e(base_.size());
    e[j] = 1;
    auto [lin, c] = pull_back(e, 0);
    std::string label = j < r ? "lambda" + std::to_string(j + 1) + ">0" : "mu" + std::to_string(j - r + 1) + ">0";
    out.push_back(HalfSpace{lin, c, true, label});
  }
  return out;
}

Box Chart::bounding_box() const {
  Box b;
  for (const auto& [coeffs, constant] : funcs_) {
    Rational bound = abs(constant) + 1;
    for (const auto& c : coeffs) bound += abs(c);
    b.lo.push_back(-bound);
    b.hi.push_back(bound);
  }
  return b;
}

std::pair<Vec, Rational> discriminant_form(const Chart& chart, const DimensionVector& d) {
  Vec coeffs;
  for (int x : d.mprime) coeffs.push_back(x);
  for (int x : d.nprime) coeffs.push_back(-x);
  return chart.pull_back(coeffs, 0);
}

namespace {

struct WallKey {
  Vec normal;
  Rational constant;
  bool operator<(const WallKey& o) const {
    if (normal != o.normal) return std::lexicographical_compare(normal.begin(), normal.end(),
                                                                o.normal.begin(), o.normal.end());
    return constant < o.constant;
  }
};

// True if the line strictly separates two vertices of the closed polygon/interval.
bool crosses(const std::vector<Vec>& closure, const Vec& normal, const Rational& constant) {
  bool pos = false, neg = false;
  for (const auto& v : closure) {
    Rational f = constant;
    for (size_t k = 0; k < v.size(); ++k) f += normal[k] * v[k];
    if (sgn(f) > 0) pos = true;
    if (sgn(f) < 0) neg = true;
  }
  return pos && neg;
}

std::optional<WallKey> wall_of(const Chart& chart, const DimensionVector& d,
                               const std::vector<Vec>& domain) {
  auto [lin, c] = discriminant_form(chart, d);
  if (!primitive_form(lin, c)) return std::nullopt;
  if (!crosses(domain, lin, c)) return std::nullopt;
  return WallKey{lin, c};
}

std::vector<Wall> merge_walls(const std::vector<DimensionVector>& vecs,
                              const std::vector<std::optional<WallKey>>& keys) {
  std::map<WallKey, std::vector<DimensionVector>> walls;
  for (size_t k = 0; k < vecs.size(); ++k)
    if (keys[k]) walls[*keys[k]].push_back(vecs[k]);
  std::vector<Wall> out;
  for (auto& [key, src] : walls) out.push_back(Wall{key.normal, key.constant, std::move(src)});
  return out;
}

std::vector<Vec> domain_closure(const Chart& chart) {
  ConvexPiece dom = make_piece(chart.dim(), chart.proper_domain(), chart.bounding_box());
  return dom.closure;
}

}  // namespace

std::vector<Wall> singular_polarizations_serial(const Chart& chart) {
  require(chart.dim() == 1 || chart.dim() == 2, "walls are computed for 1 or 2 free parameters");
  auto vecs = proper_dimension_vectors(chart.m(), chart.n());
  auto domain = domain_closure(chart);
  std::vector<std::optional<WallKey>> keys(vecs.size());
  for (size_t k = 0; k < vecs.size(); ++k) keys[k] = wall_of(chart, vecs[k], domain);
  return merge_walls(vecs, keys);
}

std::vector<Wall> singular_polarizations(const Chart& chart) {
  require(chart.dim() == 1 || chart.dim() == 2, "walls are computed for 1 or 2 free parameters");
  auto vecs = proper_dimension_vectors(chart.m(), chart.n());
  auto domain = domain_closure(chart);
  std::vector<std::optional<WallKey>> keys(vecs.size());
  const long count = static_cast<long>(vecs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long k = 0; k < count; ++k) keys[k] = wall_of(chart, vecs[k], domain);
  return merge_walls(vecs, keys);
}

std::vector<Rational> singular_values(const Chart& chart) {
  require(chart.dim() == 1, "singular_values needs one free parameter");
  std::vector<Rational> out;
  for (const auto& w : singular_polarizations(chart)) out.push_back(-w.constant / w.normal[0]);
  std::sort(out.begin(), out.end());
  return out;
}

ChamberSet chambers(const Chart& chart, const Box& window) {
  const int dim = chart.dim();
  require(static_cast<int>(window.lo.size()) == dim && static_cast<int>(window.hi.size()) == dim,
          "window dimension mismatch");
  for (int k = 0; k < dim; ++k)
    if (!(window.lo[k] < window.hi[k])) throw SchemaError("empty window");
  std::vector<HalfSpace> cons = chart.proper_domain();
  for (int k = 0; k < dim; ++k) {
    Vec e(dim);
    e[k] = 1;
    cons.push_back(HalfSpace{e, -window.lo[k], true, "window"});
    e[k] = -1;
    cons.push_back(HalfSpace{e, window.hi[k], true, "window"});
  }
  ConvexPiece base = make_piece(dim, cons, chart.bounding_box());
  ChamberSet out;
  if (!base.nonempty()) return out;
  for (const auto& w : singular_polarizations(chart))
    if (crosses(base.closure, w.normal, w.constant)) out.walls.push_back(w);
  if (dim == 1) {
    Rational lo = base.closure[0][0], hi = base.closure[1][0];
    std::vector<Rational> cuts;
    for (const auto& w : out.walls) cuts.push_back(-w.constant / w.normal[0]);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Rational prev = lo;
    for (const auto& c : cuts) {
      out.cells.push_back({Vec{prev}, Vec{c}});
      prev = c;
    }
    out.cells.push_back({Vec{prev}, Vec{hi}});
    return out;
  }
  std::vector<std::vector<Vec>> cells = {base.closure};
  for (const auto& w : out.walls) {
    std::vector<std::vector<Vec>> next;
    for (const auto& cell : cells) {
      if (!crosses(cell, w.normal, w.constant)) {
        next.push_back(cell);
        continue;
      }
      auto [a, b] = split_polygon(cell, w.normal, w.constant);
      if (a.size() >= 3 && sgn(twice_area(a)) != 0) next.push_back(a);
      if (b.size() >= 3 && sgn(twice_area(b)) != 0) next.push_back(b);
    }
    cells = std::move(next);
  }
  out.cells = std::move(cells);
  return out;
}

std::string format_dimension_vector(const DimensionVector& d) {
  std::string s = "(";
  for (size_t i = 0; i < d.mprime.size(); ++i) s += (i ? "," : "") + std::to_string(d.mprime[i]);
  s += ";";
  for (size_t l = 0; l < d.nprime.size(); ++l) s += (l ? "," : "") + std::to_string(d.nprime[l]);
  return s + ")";
}

}  // namespace gitpol
