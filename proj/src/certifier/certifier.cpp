#include "gitpol/certifier.hpp"

#include <set>

#include "gitpol/errors.hpp"

namespace gitpol {

std::string to_string(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Unknown: return "unknown";
  }
  return "unknown";
}

bool LinearCondition::exact() const {
  for (const auto& c : constants)
    if (c.source == ConstantSource::LowerBound) return false;
  return true;
}

Rational LinearCondition::slack(const Polarization& pol) const {
  require(coeffs.size() == pol.lambda.size() + pol.mu.size(), "condition dimension mismatch");
  Rational v = constant;
  const size_t r = pol.lambda.size();
  for (size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * (k < r ? pol.lambda[k] : pol.mu[k - r]);
  return v;
}

ConditionTree ConditionTree::of(LinearCondition c) {
  ConditionTree t;
  t.kind = Kind::Leaf;
  t.id = c.id;
  t.leaf = std::move(c);
  return t;
}

ConditionTree ConditionTree::all(std::string id, std::vector<ConditionTree> children) {
  ConditionTree t;
  t.kind = Kind::All;
  t.id = std::move(id);
  t.children = std::move(children);
  return t;
}

ConditionTree ConditionTree::any(std::string id, std::vector<ConditionTree> children) {
  ConditionTree t;
  t.kind = Kind::Any;
  t.id = std::move(id);
  t.children = std::move(children);
  return t;
}

std::vector<std::vector<LinearCondition>> ConditionTree::disjunctive_form() const {
  if (kind == Kind::Leaf) return {{leaf}};
  if (kind == Kind::Any) {
    std::vector<std::vector<LinearCondition>> out;
    for (const auto& c : children)
      for (auto& conj : c.disjunctive_form()) out.push_back(std::move(conj));
    return out;
  }
  std::vector<std::vector<LinearCondition>> out = {{}};
  for (const auto& c : children) {
    auto sub = c.disjunctive_form();
    std::vector<std::vector<LinearCondition>> next;
    for (const auto& a : out)
      for (const auto& b : sub) {
        auto merged = a;
        merged.insert(merged.end(), b.begin(), b.end());
        next.push_back(std::move(merged));
      }
    out = std::move(next);
  }
  return out;
}

namespace {

Truth combine(ConditionTree::Kind kind, const std::vector<ConditionReport>& children) {
  bool any_unknown = false;
  for (const auto& c : children) {
    if (kind == ConditionTree::Kind::All && c.truth == Truth::False) return Truth::False;
    if (kind == ConditionTree::Kind::Any && c.truth == Truth::True) return Truth::True;
    if (c.truth == Truth::Unknown) any_unknown = true;
  }
  if (any_unknown) return Truth::Unknown;
  return kind == ConditionTree::Kind::All ? Truth::True : Truth::False;
}

Truth leaf_truth(const Rational& slack, bool strict, bool exact) {
  if (!exact) return Truth::Unknown;
  bool ok = strict ? sgn(slack) > 0 : sgn(slack) >= 0;
  return ok ? Truth::True : Truth::False;
}

}  // namespace

ConditionReport evaluate(const ConditionTree& tree, const Polarization& pol) {
  ConditionReport rep;
  rep.id = tree.id;
  rep.kind = tree.kind;
  if (tree.kind == ConditionTree::Kind::Leaf) {
    rep.slack = tree.leaf.slack(pol);
    rep.strict = tree.leaf.strict;
    rep.constants = tree.leaf.constants;
    rep.truth = leaf_truth(*rep.slack, rep.strict, tree.leaf.exact());
    return rep;
  }
  for (const auto& c : tree.children) rep.children.push_back(evaluate(c, pol));
  rep.truth = combine(tree.kind, rep.children);
  return rep;
}

namespace {

// Affine form over (λ, μ).
struct Form {
  Vec c;
  Rational k;

  Form operator+(const Form& o) const {
    Form f = *this;
    for (size_t j = 0; j < c.size(); ++j) f.c[j] += o.c[j];
    f.k += o.k;
    return f;
  }
  Form operator-(const Form& o) const { return *this + o * Rational(-1); }
  Form operator*(const Rational& x) const {
    Form f = *this;
    for (auto& v : f.c) v *= x;
    f.k *= x;
    return f;
  }
};

std::string rat(const Rational& x) { return to_string(x); }

class Builder {
 public:
  Builder(const ProblemSpec& spec, const CertifyOptions& opt)
      : spec_(spec), sys_(build_line_bundle_system(spec)), opt_(opt), r_(spec.r()), s_(spec.s()) {
    for (int j = 0; j < r_; ++j) {
      Form f = lambda(j);
      for (int i = 0; i < j; ++i) f = f - alpha_[i] * Rational(static_cast<unsigned long>(sys_->a[j][i]));
      alpha_.push_back(f);
    }
    beta_.resize(s_);
    for (int mm = s_ - 1; mm >= 0; --mm) {
      Form f = mu(mm);
      for (int l = mm + 1; l < s_; ++l) f = f - beta_[l] * Rational(static_cast<unsigned long>(sys_->b[l][mm]));
      beta_[mm] = f;
    }
  }

  const CompositionSystem& sys() const { return *sys_; }
  int r() const { return r_; }
  int s() const { return s_; }

  Form zero() const { return Form{Vec(r_ + s_), 0}; }
  Form lambda(int i) const {
    Form f = zero();
    f.c[i] = 1;
    return f;
  }
  Form mu(int l) const {
    Form f = zero();
    f.c[r_ + l] = 1;
    return f;
  }
  Form alpha(int i) const { return alpha_[i]; }
  Form beta(int l) const { return beta_[l]; }
  Rational a(int j, int i) const { return Rational(static_cast<unsigned long>(sys_->a[j][i])); }
  Rational b(int mm, int l) const { return Rational(static_cast<unsigned long>(sys_->b[mm][l])); }

  ConstantUse constant(const ConstantQuery& q) const {
    ConstantValue v = resolve(q, opt_.seed, opt_.trials);
    return ConstantUse{describe(q), v.value, v.source};
  }
  ConstantUse c(int l) const { return constant(c_query(sys_, l)); }
  ConstantUse d(int i) const { return constant(d_query(sys_, i)); }
  ConstantUse c3() const { return constant(c3_query(sys_)); }
  ConstantUse c3_prime() const { return constant(c3_prime_query(sys_)); }

  ConditionTree geq(std::string id, std::string text, const Form& lhs, const Form& rhs, bool strict,
                    std::vector<ConstantUse> used = {}) const {
    Form diff = lhs - rhs;
    LinearCondition lc{std::move(id), std::move(text), diff.c, diff.k, strict, std::move(used)};
    return ConditionTree::of(std::move(lc));
  }

  std::vector<ConditionTree> alpha_positive() const {
    std::vector<ConditionTree> out;
    for (int i = 0; i < r_; ++i) {
      std::string n = "alpha" + std::to_string(i + 1);
      out.push_back(geq(n + ">0", n + " > 0", alpha(i), zero(), true));
    }
    return out;
  }
  std::vector<ConditionTree> beta_positive() const {
    std::vector<ConditionTree> out;
    for (int l = 0; l < s_; ++l) {
      std::string n = "beta" + std::to_string(l + 1);
      out.push_back(geq(n + ">0", n + " > 0", beta(l), zero(), true));
    }
    return out;
  }

 private:
  ProblemSpec spec_;
  SystemPtr sys_;
  CertifyOptions opt_;
  int r_, s_;
  std::vector<Form> alpha_, beta_;
};

std::string cname(const ConstantUse& u) { return u.name + "=" + rat(u.value); }

// λ_2 ≥ a_21 Σ_l μ_l c_l.
ConditionTree left_leaf(const Builder& bd) {
  Form rhs = bd.zero();
  std::vector<ConstantUse> used;
  std::string text = "lambda2 >= " + rat(bd.a(1, 0)) + "*(";
  for (int l = 0; l < bd.s(); ++l) {
    ConstantUse cl = bd.c(l);
    rhs = rhs + bd.mu(l) * (bd.a(1, 0) * cl.value);
    text += (l ? " + " : "") + std::string("mu") + std::to_string(l + 1) + "*" + cname(cl);
    used.push_back(cl);
  }
  return bd.geq("equality-left", text + ")", bd.lambda(1), rhs, false, used);
}

// μ_{s-1} ≥ b_{s,s-1} d_1 Σ_i α_i a_i1.
ConditionTree right_leaf(const Builder& bd) {
  const int s = bd.s();
  ConstantUse d1 = bd.d(0);
  Form sum = bd.zero();
  for (int i = 0; i < bd.r(); ++i) sum = sum + bd.alpha(i) * bd.a(i, 0);
  Form rhs = sum * (bd.b(s - 1, s - 2) * d1.value);
  std::string text = "mu" + std::to_string(s - 1) + " >= " + rat(bd.b(s - 1, s - 2)) + "*" + cname(d1) +
                     "*sum_i alpha_i*a_i1";
  return bd.geq("equality-right", text, bd.mu(s - 2), rhs, false, {d1});
}

ConditionTree equivalence_s1(const Builder& bd) {
  require(bd.s() == 1, "the s = 1 equivalence criterion needs s = 1");
  std::vector<ConditionTree> ch = bd.alpha_positive();
  if (bd.r() >= 2) {
    ConstantUse c1 = bd.c(0);
    Form rhs = bd.mu(0) * (bd.a(1, 0) * c1.value);
    ch.push_back(bd.geq("equivalence-s1-constant", "lambda2 >= " + rat(bd.a(1, 0)) + "*mu1*" + cname(c1),
                        bd.lambda(1), rhs, false, {c1}));
  }
  return ConditionTree::all("equivalence-s1", std::move(ch));
}

ConditionTree equality_general(const Builder& bd) {
  if (bd.s() == 1) return equivalence_s1(bd);
  std::vector<ConditionTree> ch = bd.alpha_positive();
  for (auto& t : bd.beta_positive()) ch.push_back(std::move(t));
  if (bd.r() >= 2) ch.push_back(left_leaf(bd));
  ch.push_back(right_leaf(bd));
  return ConditionTree::all("equality", std::move(ch));
}

std::optional<ConditionTree> projectivity_direct(const Builder& bd) {
  const int r = bd.r(), s = bd.s();
  if (r == 1 && s == 1) return ConditionTree::all("projectivity-trivial", {});
  if (r == 2 && s == 1) {
    ConstantUse c1 = bd.c(0);
    Form rhs = bd.mu(0) * (c1.value * bd.a(1, 0));
    return ConditionTree::all(
        "projectivity-21",
        {bd.geq("projectivity-21-lambda2", "lambda2 >= " + cname(c1) + "*" + rat(bd.a(1, 0)) + "*mu1", bd.lambda(1),
                rhs, false, {c1})});
  }
  if (r == 2 && s == 2) {
    ConstantUse c1 = bd.c(0), c2 = bd.c(1), d1 = bd.d(0), d2 = bd.d(1);
    const Rational a21 = bd.a(1, 0), b21 = bd.b(1, 0);
    Form left = (bd.mu(0) * c1.value + bd.mu(1) * (c2.value - b21 * c1.value)) * a21;
    Form right = (bd.lambda(0) * (d1.value - d2.value * a21) + bd.lambda(1) * d2.value) * b21;
    return ConditionTree::all(
        "projectivity-22",
        {bd.geq("projectivity-22-lambda2", "lambda2 >= (mu1*c_1 + mu2*(c_2 - b21*c_1))*a21", bd.lambda(1), left, false,
                {c1, c2}),
         bd.geq("projectivity-22-mu1", "mu1 >= (lambda1*(d_1 - d_2*a21) + lambda2*d_2)*b21", bd.mu(0), right, false,
                {d1, d2})});
  }
  if (r == 3 && s == 1) {
    ConstantUse c1 = bd.c(0), c3 = bd.c3(), c3p = bd.c3_prime();
    const Rational a21 = bd.a(1, 0), a31 = bd.a(2, 0), a32 = bd.a(2, 1);
    const Form mu1 = bd.mu(0), l1 = bd.lambda(0), l2 = bd.lambda(1), l3 = bd.lambda(2);
    const Form al2 = bd.alpha(1), al3 = bd.alpha(2);
    auto g = [&](std::string id, std::string text, const Form& lhs, const Form& rhs, std::vector<ConstantUse> u) {
      return bd.geq("projectivity-31-" + id, std::move(text), lhs, rhs, false, std::move(u));
    };
    ConditionTree mixed = ConditionTree::any(
        "projectivity-31-alternatives",
        {g("mixed", "alpha2*c_3 + lambda1*c'_3 >= mu1*c_3*c'_3", al2 * c3.value + l1 * c3p.value,
           mu1 * (c3.value * c3p.value), {c3, c3p}),
         g("lambda3-via-lambda1", "lambda3 >= mu1*c'_3*a32 + a31*lambda1", l3, mu1 * (c3p.value * a32) + l1 * a31,
           {c3p}),
         g("lambda3-via-alpha2", "lambda3 >= mu1*c_3*a31 + a32*alpha2", l3, mu1 * (c3.value * a31) + al2 * a32, {c3}),
         g("lambda3-product", "lambda3 >= mu1*c_3*a32*a21", l3, mu1 * (c3.value * a32 * a21), {c3})});
    ConditionTree main = ConditionTree::all(
        "projectivity-31-main",
        {g("lambda2", "lambda2 >= a21*mu1*c_1", l2, mu1 * (a21 * c1.value), {c1}),
         g("lambda3", "lambda3 >= a31*mu1*c_1", l3, mu1 * (a31 * c1.value), {c1}), std::move(mixed)});
    return ConditionTree::any(
        "projectivity-31",
        {std::move(main), g("lambda1", "lambda1 >= mu1*c_3", l1, mu1 * c3.value, {c3}),
         g("alpha2", "alpha2 >= mu1*c'_3", al2, mu1 * c3p.value, {c3p}),
         g("alpha3-c3", "alpha3 >= mu1*c_3*a31", al3, mu1 * (c3.value * a31), {c3}),
         g("alpha3-c3prime", "alpha3 >= mu1*c'_3*a32", al3, mu1 * (c3p.value * a32), {c3p})});
  }
  return std::nullopt;
}

// Rewrites a tree for the transposed problem in the original coordinates:
// λ'_k = μ_{s-1-k} and μ'_k = λ_{r-1-k}.
void untranspose(ConditionTree& t, int r, int s) {
  if (t.kind == ConditionTree::Kind::Leaf) {
    Vec c(r + s);
    const Vec& tc = t.leaf.coeffs;  // over (λ'_0..λ'_{s-1}, μ'_0..μ'_{r-1})
    for (int k = 0; k < s; ++k) c[r + (s - 1 - k)] = tc[k];
    for (int k = 0; k < r; ++k) c[r - 1 - k] = tc[s + k];
    t.leaf.coeffs = c;
    t.leaf.text += " [transposed problem]";
    return;
  }
  for (auto& ch : t.children) untranspose(ch, r, s);
}

}  // namespace

ConditionTree cond_equivalence_s1(const ProblemSpec& spec, const CertifyOptions& opt) {
  spec.validate();
  return equivalence_s1(Builder(spec, opt));
}

ConditionTree cond_equality_left(const ProblemSpec& spec, const CertifyOptions& opt) {
  spec.validate();
  Builder bd(spec, opt);
  require(bd.r() >= 2, "the left equality criterion needs r >= 2");
  auto ch = bd.alpha_positive();
  ch.push_back(left_leaf(bd));
  return ConditionTree::all("equality-left-side", std::move(ch));
}

ConditionTree cond_equality_right(const ProblemSpec& spec, const CertifyOptions& opt) {
  spec.validate();
  Builder bd(spec, opt);
  require(bd.s() >= 2, "the right equality criterion needs s >= 2");
  auto ch = bd.alpha_positive();
  for (auto& t : bd.beta_positive()) ch.push_back(std::move(t));
  ch.push_back(right_leaf(bd));
  return ConditionTree::all("equality-right-side", std::move(ch));
}

ConditionTree cond_equality_general(const ProblemSpec& spec, const CertifyOptions& opt) {
  spec.validate();
  return equality_general(Builder(spec, opt));
}

std::optional<ConditionTree> cond_projectivity(const ProblemSpec& spec, const CertifyOptions& opt) {
  spec.validate();
  const int r = spec.r(), s = spec.s();
  if (r == 1 && (s == 2 || s == 3)) {
    ProblemSpec t = transpose(spec);
    auto tree = projectivity_direct(Builder(t, opt));
    if (!tree) return std::nullopt;
    untranspose(*tree, r, s);
    tree->id += "-dual";
    return tree;
  }
  return projectivity_direct(Builder(spec, opt));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::GoodProjectiveQuotient: return "GOOD_PROJECTIVE_QUOTIENT";
    case Verdict::GeometricQuotientOnly: return "GEOMETRIC_QUOTIENT_ONLY";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "GOOD_PROJECTIVE_QUOTIENT") return Verdict::GoodProjectiveQuotient;
  if (s == "GEOMETRIC_QUOTIENT_ONLY") return Verdict::GeometricQuotientOnly;
  if (s == "UNKNOWN") return Verdict::Unknown;
  throw SchemaError("unknown verdict \"" + s + "\"");
}

namespace {

std::pair<Verdict, std::string> decide(bool proper, Truth equality, std::optional<Truth> projectivity) {
  if (!proper) return {Verdict::Unknown, "polarization is not proper"};
  if (equality != Truth::True)
    return {Verdict::Unknown, equality == Truth::Unknown ? "constant not exactly known"
                                                          : "equality conditions do not hold"};
  if (!projectivity) return {Verdict::GeometricQuotientOnly, "no projectivity criterion for this type"};
  if (*projectivity == Truth::True) return {Verdict::GoodProjectiveQuotient, "equality and projectivity conditions hold"};
  return {Verdict::GeometricQuotientOnly, *projectivity == Truth::Unknown ? "constant not exactly known"
                                                                           : "projectivity conditions do not hold"};
}

void check_pol(const ProblemSpec& spec, const Polarization& pol) {
  if (static_cast<int>(pol.lambda.size()) != spec.r() || static_cast<int>(pol.mu.size()) != spec.s())
    throw SchemaError("polarization shape does not match the type (" + std::to_string(spec.r()) + "," +
                      std::to_string(spec.s()) + ")");
  if (!is_normalized(pol, spec.left_mults, spec.right_mults))
    throw SchemaError("polarization is not normalized: need sum lambda_i m_i = sum mu_l n_l = 1");
}

}  // namespace

Certificate certify(const ProblemSpec& spec, const Polarization& pol, const CertifyOptions& opt) {
  spec.validate();
  check_pol(spec, pol);
  Certificate cert;
  cert.spec = spec;
  cert.pol = pol;
  cert.equality_tree = cond_equality_general(spec, opt);
  cert.equality = evaluate(cert.equality_tree, pol);
  cert.projectivity_tree = cond_projectivity(spec, opt);
  if (cert.projectivity_tree) cert.projectivity = evaluate(*cert.projectivity_tree, pol);
  std::optional<Truth> pt;
  if (cert.projectivity) pt = cert.projectivity->truth;
  std::tie(cert.verdict, cert.reason) = decide(is_proper(pol), cert.equality.truth, pt);
  return cert;
}

namespace {

std::string kind_name(ConditionTree::Kind k) {
  switch (k) {
    case ConditionTree::Kind::Leaf: return "leaf";
    case ConditionTree::Kind::All: return "all";
    case ConditionTree::Kind::Any: return "any";
  }
  return "leaf";
}

Json node_json(const ConditionTree& t, const ConditionReport& rep) {
  Json j{{"id", t.id}, {"kind", kind_name(t.kind)}, {"truth", to_string(rep.truth)}};
  if (t.kind == ConditionTree::Kind::Leaf) {
    j["text"] = t.leaf.text;
    j["coeffs"] = to_json(t.leaf.coeffs);
    j["constant"] = to_json(t.leaf.constant);
    j["strict"] = t.leaf.strict;
    j["slack"] = to_json(*rep.slack);
    Json cs = Json::array();
    for (const auto& c : t.leaf.constants)
      cs.push_back(Json{{"name", c.name}, {"value", to_json(c.value)}, {"source", to_string(c.source)}});
    j["constants"] = cs;
  } else {
    Json ch = Json::array();
    for (size_t k = 0; k < t.children.size(); ++k) ch.push_back(node_json(t.children[k], rep.children[k]));
    j["children"] = ch;
  }
  return j;
}

Truth truth_from_string(const std::string& s) {
  if (s == "true") return Truth::True;
  if (s == "false") return Truth::False;
  if (s == "unknown") return Truth::Unknown;
  throw SchemaError("unknown truth value \"" + s + "\"");
}

// Re-evaluates a serialized node; returns the recomputed truth and records mismatches.
Truth recheck(const Json& j, const Polarization& pol, std::string& problems) {
  const std::string id = j.value("id", std::string("?"));
  const std::string kind = j.at("kind").get<std::string>();
  Truth stored = truth_from_string(j.at("truth").get<std::string>());
  Truth got;
  if (kind == "leaf") {
    LinearCondition lc;
    lc.coeffs = vec_from_json(j.at("coeffs"), id + ".coeffs");
    lc.constant = rational_from_json(j.at("constant"), id + ".constant");
    lc.strict = j.at("strict").get<bool>();
    bool exact = true;
    for (const auto& c : j.at("constants"))
      if (c.at("source").get<std::string>() == to_string(ConstantSource::LowerBound)) exact = false;
    Rational slack = lc.slack(pol);
    if (slack != rational_from_json(j.at("slack"), id + ".slack")) problems += id + ": slack differs; ";
    got = leaf_truth(slack, lc.strict, exact);
  } else {
    std::vector<ConditionReport> ch;
    for (const auto& c : j.at("children")) {
      ConditionReport r;
      r.truth = recheck(c, pol, problems);
      ch.push_back(r);
    }
    got = combine(kind == "all" ? ConditionTree::Kind::All : ConditionTree::Kind::Any, ch);
  }
  if (got != stored) problems += id + ": truth differs; ";
  return got;
}

}  // namespace

Json certificate_to_json(const Certificate& cert) {
  Json j{{"schema", "1"},
         {"spec", to_json(cert.spec)},
         {"polarization", to_json(cert.pol)},
         {"proper", is_proper(cert.pol)},
         {"verdict", to_string(cert.verdict)},
         {"reason", cert.reason},
         {"equality", node_json(cert.equality_tree, cert.equality)}};
  j["projectivity"] = cert.projectivity ? node_json(*cert.projectivity_tree, *cert.projectivity) : Json(nullptr);
  return j;
}

CertificateCheck verify_certificate(const Json& j, const CertifyOptions& opt) {
  CertificateCheck out;
  ProblemSpec spec;
  Polarization pol;
  try {
    spec = spec_from_json(j.at("spec"));
    pol = polarization_from_json(j.at("polarization"));
    check_pol(spec, pol);
    std::string problems;
    Truth eq = recheck(j.at("equality"), pol, problems);
    std::optional<Truth> pt;
    if (!j.at("projectivity").is_null()) pt = recheck(j.at("projectivity"), pol, problems);
    auto [verdict, reason] = decide(is_proper(pol), eq, pt);
    if (to_string(verdict) != j.at("verdict").get<std::string>()) problems += "verdict differs; ";
    out.consistent = problems.empty();
    out.message = problems;
  } catch (const nlohmann::json::exception& e) {
    out.message = std::string("malformed certificate: ") + e.what();
    return out;
  }
  out.reproducible = certificate_to_json(certify(spec, pol, opt)) == j;
  if (!out.reproducible) out.message += "fresh certification differs";
  return out;
}

std::pair<Rational, Rational> thresholds_general(long a, int m1, int m2, int n1, const Rational& c) {
  require(a >= 1 && m1 >= 1 && m2 >= 1 && n1 >= 1, "thresholds need positive data");
  Rational am2 = Rational(a) * m2;
  return {am2 / (am2 + m1), am2 * c / n1};
}

std::pair<Rational, Rational> thresholds_projective_space(int n, int m1, int m2, int n1) {
  require(n >= 2 && m1 >= 1 && m2 >= 1 && n1 >= 1, "thresholds need n >= 2 and positive multiplicities");
  const long N = n + 1;
  Rational first = Rational(N * m2) / Rational(N * m2 + m1);
  Rational second;
  if (m2 <= n + 1)
    second = Rational(N * m2 * m2 * (m2 - 1)) / Rational(2L * n1 * (static_cast<long>(m2) * N - 1));
  else
    second = Rational(N * N * m2) / Rational(2L * (n + 2) * n1);
  return {first, second};
}

namespace {

HalfSpace integral(HalfSpace h) {
  Vec c = h.coeffs;
  Rational k = h.constant;
  if (!primitive_form(c, k)) return h;
  // primitive_form may flip the orientation; restore it.
  for (size_t j = 0; j < c.size(); ++j)
    if (sgn(h.coeffs[j]) != 0) {
      if (sgn(c[j]) != sgn(h.coeffs[j])) {
        for (auto& x : c) x = -x;
        k = -k;
      }
      break;
    }
  h.coeffs = c;
  h.constant = k;
  return h;
}

}  // namespace

AdmissibleRegion admissible_region(const ProblemSpec& spec, const std::vector<std::string>& params,
                                   const CertifyOptions& opt) {
  spec.validate();
  Chart chart(params, spec.left_mults, spec.right_mults);
  if (chart.dim() < 1 || chart.dim() > 2) throw SchemaError("admissible regions need one or two free parameters");
  AdmissibleRegion out{chart, Region{chart.dim(), {}}, {}, true, 0};
  auto eq = cond_equality_general(spec, opt);
  auto proj = cond_projectivity(spec, opt);
  if (!proj) {
    out.projectivity_available = false;
    return out;
  }
  auto conj_eq = eq.disjunctive_form(), conj_proj = proj->disjunctive_form();
  std::set<std::vector<std::string>> seen;
  for (const auto& a : conj_eq)
    for (const auto& b : conj_proj) {
      std::vector<LinearCondition> all = a;
      all.insert(all.end(), b.begin(), b.end());
      bool exact = true;
      for (const auto& lc : all) exact = exact && lc.exact();
      if (!exact) {
        ++out.dropped_inexact;
        continue;
      }
      std::vector<HalfSpace> cons;
      std::set<std::string> keys;
      auto add = [&](HalfSpace h) {
        h = integral(std::move(h));
        std::string key = (h.strict ? "s" : "n") + to_string(h.constant);
        for (const auto& x : h.coeffs) key += "," + to_string(x);
        if (keys.insert(key).second) cons.push_back(std::move(h));
      };
      for (auto& h : chart.proper_domain()) add(std::move(h));
      for (const auto& lc : all) {
        auto [lin, k] = chart.pull_back(lc.coeffs, lc.constant);
        add(HalfSpace{lin, k, lc.strict, lc.id});
      }
      std::vector<std::string> sig(keys.begin(), keys.end());
      if (!seen.insert(sig).second) continue;
      ConvexPiece piece = make_piece(chart.dim(), cons, chart.bounding_box());
      if (!piece.nonempty()) continue;
      out.region.pieces.push_back(piece);
      out.inequalities.push_back(cons);
    }
  return out;
}

long expected_dimension(const ProblemSpec& spec) {
  spec.validate();
  auto sys = build_line_bundle_system(spec);
  return static_cast<long>(sys->dim_w()) - static_cast<long>(sys->dim_g()) + 1;
}

}  // namespace gitpol
