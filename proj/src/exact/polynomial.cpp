#include "gitpol/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "gitpol/errors.hpp"

namespace gitpol {

namespace {

int degree_of(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

}  // namespace

bool GrlexGreater::operator()(const Exponent& a, const Exponent& b) const {
  int da = degree_of(a), db = degree_of(b);
  if (da != db) return da > db;
  return a > b;
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Exponent(static_cast<size_t>(nvars), 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int k) {
  require(k >= 0 && k < nvars, "variable index out of range");
  Exponent e(static_cast<size_t>(nvars), 0);
  e[k] = 1;
  return monomial(e, 1);
}

Polynomial Polynomial::monomial(const Exponent& e, const Rational& c) {
  Polynomial p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::from_coeffs(const GradedSpace& space, const Vec& coeffs) {
  require(coeffs.size() == space.dim(), "from_coeffs: length mismatch");
  Polynomial p(space.ambient_dim + 1);
  for (size_t k = 0; k < coeffs.size(); ++k) p.add_term(space.basis[k], coeffs[k]);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && degree_of(terms_.begin()->first) == 0);
}

int Polynomial::total_degree() const {
  return terms_.empty() ? -1 : degree_of(terms_.begin()->first);
}

bool Polynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  int d = total_degree();
  for (const auto& [e, c] : terms_)
    if (degree_of(e) != d) return false;
  return true;
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
  require(static_cast<int>(e.size()) == nvars_, "add_term: variable count mismatch");
  if (sgn(c) == 0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (sgn(it->second) == 0) terms_.erase(it);
}

Vec Polynomial::to_coeffs(const GradedSpace& space) const {
  require(nvars_ == space.ambient_dim + 1, "to_coeffs: variable count mismatch");
  Vec v(space.dim());
  for (const auto& [e, c] : terms_) {
    if (degree_of(e) != space.degree)
      throw SchemaError("polynomial \"" + to_string(*this) + "\" is not homogeneous of degree " +
                        std::to_string(space.degree));
    v[space.index_of(e)] = c;
  }
  return v;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  require(nvars_ == o.nvars_, "polynomial sum: variable count mismatch");
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator-() const { return scaled(-1); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  require(nvars_ == o.nvars_, "polynomial product: variable count mismatch");
  Polynomial out(nvars_);
  Exponent e(static_cast<size_t>(nvars_));
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int k = 0; k < nvars_; ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  return out;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial out(nvars_);
  if (sgn(c) == 0) return out;
  for (const auto& [e, x] : terms_) out.terms_.emplace(e, x * c);
  return out;
}

Polynomial Polynomial::pow(int k) const {
  require(k >= 0, "negative power");
  Polynomial out = constant(nvars_, 1);
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

Rational Polynomial::evaluate(const Vec& point) const {
  require(static_cast<int>(point.size()) == nvars_, "evaluate: point dimension mismatch");
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int k = 0; k < nvars_; ++k)
      for (int j = 0; j < e[k]; ++j) t *= point[k];
    s += t;
  }
  return s;
}

Polynomial Polynomial::monic() const {
  if (terms_.empty()) return *this;
  return scaled(1 / leading_coeff());
}

int Polynomial::degree_in(int var) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

Polynomial Polynomial::coeff_in(int var, int k) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_)
    if (e[var] == k) {
      Exponent f = e;
      f[var] = 0;
      out.add_term(f, c);
    }
  return out;
}

namespace {

class Parser {
 public:
  Parser(std::string_view s, int nvars) : s_(s), nvars_(nvars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  std::string_view s_;
  int nvars_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw SchemaError("polynomial \"" + std::string(s_) + "\": " + why + " at position " +
                      std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool starts_factor() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == 'x' || c == 'z' || c == '(';
  }

  Polynomial expr() {
    Polynomial acc(nvars_);
    bool neg = false;
    if (peek('+') || peek('-')) neg = s_[pos_++] == '-';
    Polynomial t = term();
    acc = neg ? acc - t : acc + t;
    while (peek('+') || peek('-')) {
      neg = s_[pos_++] == '-';
      t = term();
      acc = neg ? acc - t : acc + t;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = power();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        acc = acc * power();
      } else if (peek('/')) {
        ++pos_;
        Integer d = integer();
        if (d == 0) fail("division by zero");
        acc = acc.scaled(Rational(1) / Rational(d));
      } else if (starts_factor()) {
        acc = acc * power();
      } else {
        return acc;
      }
    }
  }

  Polynomial power() {
    Polynomial base = factor();
    if (peek('^')) {
      ++pos_;
      Integer k = integer();
      if (k > 64) fail("exponent too large");
      base = base.pow(static_cast<int>(k.get_si()));
    }
    return base;
  }

  Integer integer() {
    skip();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return Integer(std::string(s_.substr(start, pos_ - start)));
  }

  Polynomial factor() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return p;
    }
    if (c == 'x' || c == 'z') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '_') ++pos_;
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected variable index");
      int k = std::stoi(std::string(s_.substr(start, pos_ - start)));
      if (k >= nvars_) fail("variable index " + std::to_string(k) + " out of range");
      return Polynomial::variable(nvars_, k);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
      return Polynomial::constant(nvars_, parse_rational(s_.substr(start, pos_ - start)));
    }
    fail("unexpected character");
  }
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, int nvars) {
  return Parser(text, nvars).parse();
}

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    bool neg = sgn(c) < 0;
    Rational a = neg ? Rational(-c) : c;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(k);
      if (e[k] > 1) mono += "^" + std::to_string(e[k]);
    }
    if (mono.empty()) {
      out += to_string(a);
    } else if (a == 1) {
      out += mono;
    } else {
      out += to_string(a) + "*" + mono;
    }
  }
  return out;
}

Polynomial exact_divide(const Polynomial& a, const Polynomial& b) {
  require(!b.is_zero(), "exact_divide: division by zero");
  Polynomial q(a.nvars()), r = a;
  const Exponent& lb = b.leading_exponent();
  const Rational& cb = b.leading_coeff();
  Exponent t(lb.size());
  while (!r.is_zero()) {
    const Exponent& lr = r.leading_exponent();
    for (size_t k = 0; k < lb.size(); ++k) {
      t[k] = lr[k] - lb[k];
      require(t[k] >= 0, "exact_divide: not divisible");
    }
    Polynomial m = Polynomial::monomial(t, r.leading_coeff() / cb);
    q = q + m;
    r = r - m * b;
  }
  return q;
}

namespace {

int main_variable(const Polynomial& a, const Polynomial& b) {
  for (int v = a.nvars() - 1; v >= 0; --v)
    if (a.degree_in(v) > 0 || b.degree_in(v) > 0) return v;
  return -1;
}

Polynomial content_in(const Polynomial& p, int v);

Polynomial primitive_in(const Polynomial& p, int v) { return exact_divide(p, content_in(p, v)); }

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, int v) {
  const int db = b.degree_in(v);
  Polynomial lcb = b.coeff_in(v, db);
  Polynomial r = a;
  while (!r.is_zero() && r.degree_in(v) >= db) {
    int dr = r.degree_in(v);
    Polynomial lcr = r.coeff_in(v, dr);
    Exponent e(static_cast<size_t>(a.nvars()), 0);
    e[v] = dr - db;
    r = lcb * r - lcr * Polynomial::monomial(e, 1) * b;
  }
  return r;
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  require(a.nvars() == b.nvars(), "gcd: variable count mismatch");
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial::constant(a.nvars(), 1);
  int v = main_variable(a, b);
  if (a.degree_in(v) == 0) return gcd(a, content_in(b, v));
  if (b.degree_in(v) == 0) return gcd(content_in(a, v), b);
  Polynomial ca = content_in(a, v), cb = content_in(b, v);
  Polynomial pa = exact_divide(a, ca), pb = exact_divide(b, cb);
  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  for (;;) {
    Polynomial r = pseudo_remainder(pa, pb, v);
    if (r.is_zero()) break;
    if (r.degree_in(v) == 0) {
      pb = Polynomial::constant(a.nvars(), 1);
      break;
    }
    pa = pb;
    pb = primitive_in(r, v);
  }
  return (gcd(ca, cb) * primitive_in(pb, v)).monic();
}

namespace {

Polynomial content_in(const Polynomial& p, int v) {
  Polynomial g(p.nvars());
  for (int k = 0; k <= p.degree_in(v); ++k) {
    Polynomial c = p.coeff_in(v, k);
    if (!c.is_zero()) g = gcd(g, c);
    if (g.is_constant() && !g.is_zero()) return Polynomial::constant(p.nvars(), 1);
  }
  return g.monic();
}

}  // namespace

}  // namespace gitpol
