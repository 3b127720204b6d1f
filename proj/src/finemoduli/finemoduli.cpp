#include "gitpol/finemoduli.hpp"

#include "gitpol/errors.hpp"
#include "gitpol/graded.hpp"

namespace gitpol {

namespace {

long binom(long a, long b) {
  if (b < 0 || b > a) return 0;
  long r = 1;
  for (long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

long top_count(int n) { return static_cast<long>(n + 1) * (n + 2) / 2; }

void require_fm_shape(const MorphismElement& phi) {
  const auto& sys = *phi.sys;
  if (!sys.origin) throw SchemaError("expected a line-bundle system O(-2)^2 -> O(-1) + O^k");
  const ProblemSpec& s = *sys.origin;
  const bool ok = s.left_twists == std::vector<int>{-2} && s.left_mults == std::vector<int>{2} &&
                  s.right_twists == std::vector<int>{-1, 0} && s.right_mults.size() == 2 &&
                  s.right_mults[0] == 1 && s.right_mults[1] >= 1;
  if (!ok) throw SchemaError("expected a line-bundle system O(-2)^2 -> O(-1) + O^k");
}

int ambient(const MorphismElement& phi) { return phi.sys->origin->ambient_dim; }
int k_of(const MorphismElement& phi) { return phi.sys->origin->right_mults[1]; }

// Column c of Φ₁ as a linear form.
Polynomial phi1_entry(const MorphismElement& phi, size_t c) {
  return form_from_coeffs(ambient(phi), 1, phi.phi[0][0].column(c));
}

// Row nu, column c of Φ₂ as a quadric.
Polynomial phi2_entry(const MorphismElement& phi, size_t nu, size_t c) {
  const int n = ambient(phi);
  const size_t h = sym_dim(n, 2);
  Vec co(h);
  for (size_t kk = 0; kk < h; ++kk) co[kk] = phi.phi[1][0](nu * h + kk, c);
  return form_from_coeffs(n, 2, co);
}

size_t rank_of_forms(int n, int d, const std::vector<Polynomial>& forms) {
  if (forms.empty()) return 0;
  std::vector<Vec> cols;
  for (const auto& f : forms) cols.push_back(coeffs_from_form(n, d, f));
  return rank(RatMatrix::from_columns(cols, sym_dim(n, d)));
}

void require_form(const Polynomial& p, int n, int d, const std::string& what) {
  if (p.nvars() != n + 1) throw SchemaError(what + ": expected " + std::to_string(n + 1) + " variables");
  if (p.is_zero() || !p.is_homogeneous() || p.total_degree() != d)
    throw SchemaError(what + ": expected a nonzero form of degree " + std::to_string(d));
}

// (q1, q2) ↦ z1 q1 + z2 q2 from S² ⊕ S² to S³.
RatMatrix ideal_map(int n, const Polynomial& z1, const Polynomial& z2) {
  const size_t h2 = sym_dim(n, 2), h3 = sym_dim(n, 3);
  const auto& s2 = *graded_space(n, 2);
  RatMatrix m(h3, 2 * h2);
  for (size_t c = 0; c < h2; ++c) {
    const Polynomial mono = Polynomial::monomial(s2.basis[c], Rational(1));
    m.set_block(0, c, RatMatrix::column_vector(coeffs_from_form(n, 3, z1 * mono)));
    m.set_block(0, h2 + c, RatMatrix::column_vector(coeffs_from_form(n, 3, z2 * mono)));
  }
  return m;
}

}  // namespace

ProblemSpec fm_spec(int n, int k) {
  ProblemSpec s{n, {-2}, {2}, {-1, 0}, {1, k}};
  s.validate();
  return s;
}

Polarization fm_polarization(int n, int k, const Rational& t) {
  fm_spec(n, k);
  return Polarization{{make_rational(1, 2)}, {t, (Rational(1) - t) / Rational(k)}};
}

FMParams fm_params(int n, int k) {
  if (n < 2) throw SchemaError("fine moduli parameters need n >= 2");
  if (k < 1) throw SchemaError("fine moduli parameters need k >= 1");
  FMParams p;
  p.n = n;
  p.k = k;
  const long big = top_count(n);
  const long sq = static_cast<long>(n + 1) * (n + 1);
  p.valid = big < k && k <= sq;
  p.q_intro = big - (n + k + 1) / 2;
  p.q_body = big - (n + 1 + k) / 2 + 1;
  p.dimension = 2L * (n - 1) + static_cast<long>(k) * (sq - k);
  p.window_low = make_rational(n + 1, n + 1 + k);
  // (n+1+k)/2 < p  ⟺  2p > n+1+k.
  for (long q = 1; q <= big; ++q)
    if (2 * q > n + 1 + k) p.critical.push_back({q, Rational(1) - make_rational(k, 2 * q)});
  return p;
}

size_t ideal_h0(int n) {
  if (n < 2) throw SchemaError("ideal_h0 needs n >= 2");
  const Polynomial z1 = Polynomial::variable(n + 1, 0), z2 = Polynomial::variable(n + 1, 1);
  return rank(ideal_map(n, z1, z2));
}

bool ideal_h0_check(int n) {
  const long byrank = static_cast<long>(ideal_h0(n));
  const long bybinom = binom(n + 3, 3) - binom(n + 1, 3);
  return byrank == bybinom && bybinom == static_cast<long>(n + 1) * (n + 1);
}

std::string to_string(FMClass c) {
  switch (c) {
    case FMClass::Generic: return "generic";
    case FMClass::Special: return "special";
    case FMClass::Degenerate: return "degenerate";
  }
  return "?";
}

FMClass classify(const MorphismElement& phi) {
  require_fm_shape(phi);
  switch (rank(phi.phi[0][0])) {
    case 2: return FMClass::Generic;
    case 1: return FMClass::Special;
    default: return FMClass::Degenerate;
  }
}

void validate_datum(const PKDatum& d) {
  if (d.n < 2) throw SchemaError("datum: n must be >= 2");
  require_form(d.z1, d.n, 1, "datum z1");
  require_form(d.z2, d.n, 1, "datum z2");
  if (rank_of_forms(d.n, 1, {d.z1, d.z2}) != 2) throw SchemaError("datum: z1 and z2 are dependent");
  if (d.K.empty()) throw SchemaError("datum: K is empty");
  const size_t sq = static_cast<size_t>(d.n + 1) * (d.n + 1);
  if (d.K.size() > sq)
    throw SchemaError("datum: k = " + std::to_string(d.K.size()) + " exceeds " + std::to_string(sq));
  const RatMatrix m = ideal_map(d.n, d.z1, d.z2);
  for (size_t i = 0; i < d.K.size(); ++i) {
    require_form(d.K[i], d.n, 3, "datum K[" + std::to_string(i) + "]");
    if (!solve(m, RatMatrix::column_vector(coeffs_from_form(d.n, 3, d.K[i]))))
      throw SchemaError("datum K[" + std::to_string(i) + "] is not in the ideal (z1, z2)");
  }
  if (rank_of_forms(d.n, 3, d.K) != d.K.size()) throw SchemaError("datum: the cubics of K are dependent");
}

MorphismElement build_phi_from_splitting(int n, const Polynomial& z1, const Polynomial& z2,
                                         const std::vector<std::pair<Polynomial, Polynomial>>& q) {
  const int k = static_cast<int>(q.size());
  SystemPtr sys = build_line_bundle_system(fm_spec(n, k));
  MorphismElement w = MorphismElement::zero(sys);
  w.phi[0][0].set_block(0, 0, RatMatrix::column_vector(coeffs_from_form(n, 1, z1)));
  w.phi[0][0].set_block(0, 1, RatMatrix::column_vector(coeffs_from_form(n, 1, -z2)));
  const size_t h = sym_dim(n, 2);
  for (int i = 0; i < k; ++i) {
    const Vec c0 = q[i].second.is_zero() ? Vec(h) : coeffs_from_form(n, 2, q[i].second);
    const Vec c1 = q[i].first.is_zero() ? Vec(h) : coeffs_from_form(n, 2, q[i].first);
    w.phi[1][0].set_block(i * h, 0, RatMatrix::column_vector(c0));
    w.phi[1][0].set_block(i * h, 1, RatMatrix::column_vector(c1));
  }
  return w;
}

MorphismElement build_phi_from_PK(const PKDatum& d) {
  validate_datum(d);
  const RatMatrix m = ideal_map(d.n, d.z1, d.z2);
  const size_t h = sym_dim(d.n, 2);
  std::vector<std::pair<Polynomial, Polynomial>> q;
  for (const auto& cubic : d.K) {
    const RatMatrix x = *solve(m, RatMatrix::column_vector(coeffs_from_form(d.n, 3, cubic)));
    const Vec col = x.column(0);
    q.emplace_back(form_from_coeffs(d.n, 2, Vec(col.begin(), col.begin() + h)),
                   form_from_coeffs(d.n, 2, Vec(col.begin() + h, col.end())));
  }
  return build_phi_from_splitting(d.n, d.z1, d.z2, q);
}

bool injectivity_codim2_check(const PKDatum& d) {
  validate_datum(d);
  Polynomial g = d.K[0];
  for (size_t i = 1; i < d.K.size(); ++i) g = gcd(g, d.K[i]);
  return g.is_constant();
}

size_t f_prime_rank(const MorphismElement& phi) {
  if (classify(phi) != FMClass::Generic) throw SchemaError("f' is defined for generic morphisms only");
  const int n = ambient(phi), k = k_of(phi);
  // ker Φ₁ ≅ O(−3) is generated by (b, −a) where Φ₁ = (a, b).
  const Polynomial a = phi1_entry(phi, 0), b = phi1_entry(phi, 1);
  std::vector<Polynomial> cubics;
  for (int nu = 0; nu < k; ++nu) cubics.push_back(phi2_entry(phi, nu, 0) * b - phi2_entry(phi, nu, 1) * a);
  return rank_of_forms(n, 3, cubics);
}

bool f_prime_injective(const MorphismElement& phi) {
  return f_prime_rank(phi) == static_cast<size_t>(k_of(phi));
}

bool special_fbar2_injective(const MorphismElement& phi) {
  if (classify(phi) != FMClass::Special) throw SchemaError("Φ̄₂ is defined for special morphisms only");
  const int n = ambient(phi), k = k_of(phi);
  const size_t h2 = sym_dim(n, 2);
  const Polynomial ell = phi1_entry(phi, 0).is_zero() ? phi1_entry(phi, 1) : phi1_entry(phi, 0);
  // S²V* → H⁰(O_H(2)) = S²V* / ℓ·V*.
  std::vector<Vec> multiples;
  for (int j = 0; j <= n; ++j) multiples.push_back(coeffs_from_form(n, 2, ell * Polynomial::variable(n + 1, j)));
  const RatMatrix quot = annihilator(RatMatrix::from_columns(multiples, h2), h2);
  std::vector<Vec> images(2);
  for (size_t c = 0; c < 2; ++c)
    for (int nu = 0; nu < k; ++nu) {
      Vec co(h2);
      for (size_t kk = 0; kk < h2; ++kk) co[kk] = phi.phi[1][0](nu * h2 + kk, c);
      const Vec r = quot.apply(co);
      images[c].insert(images[c].end(), r.begin(), r.end());
    }
  return rank(RatMatrix::from_columns(images, images[0].size())) == 2;
}

RatMatrix evaluate_fm(const MorphismElement& phi, const Vec& point) {
  require_fm_shape(phi);
  const int n = ambient(phi), k = k_of(phi);
  if (point.size() != static_cast<size_t>(n + 1)) throw SchemaError("evaluation point has the wrong length");
  RatMatrix out(1 + k, 2);
  for (size_t c = 0; c < 2; ++c) {
    out(0, c) = phi1_entry(phi, c).evaluate(point);
    for (int nu = 0; nu < k; ++nu) out(1 + nu, c) = phi2_entry(phi, nu, c).evaluate(point);
  }
  return out;
}

PKDatum datum_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("datum: expected an object");
  for (const char* key : {"n", "z1", "z2", "K"})
    if (!j.contains(key)) throw SchemaError(std::string("datum: missing field '") + key + "'");
  if (!j["n"].is_number_integer()) throw SchemaError("datum: n must be an integer");
  if (!j["K"].is_array()) throw SchemaError("datum: K must be an array of strings");
  PKDatum d;
  d.n = j["n"].get<int>();
  if (d.n < 2) throw SchemaError("datum: n must be >= 2");
  auto poly = [&](const Json& v, const std::string& where) {
    if (!v.is_string()) throw SchemaError("datum " + where + ": expected a polynomial string");
    return parse_polynomial(v.get<std::string>(), d.n + 1);
  };
  d.z1 = poly(j["z1"], "z1");
  d.z2 = poly(j["z2"], "z2");
  for (size_t i = 0; i < j["K"].size(); ++i) d.K.push_back(poly(j["K"][i], "K[" + std::to_string(i) + "]"));
  return d;
}

Json datum_to_json(const PKDatum& d) {
  Json k = Json::array();
  for (const auto& c : d.K) k.push_back(to_string(c));
  return Json{{"n", d.n}, {"z1", to_string(d.z1)}, {"z2", to_string(d.z2)}, {"K", k}};
}

Json fm_params_to_json(const FMParams& p) {
  Json crit = Json::array();
  for (const auto& c : p.critical) crit.push_back(Json{{"p", c.p}, {"t", to_json(c.t)}});
  return Json{{"schema", "1"},
              {"n", p.n},
              {"k", p.k},
              {"valid", p.valid},
              {"q", p.q_body},
              {"q_body", p.q_body},
              {"q_intro", p.q_intro},
              {"q_formulas_agree", p.q_body == p.q_intro},
              {"dimension", p.dimension},
              {"window_low", to_json(p.window_low)},
              {"critical_ts", crit}};
}

}  // namespace gitpol
