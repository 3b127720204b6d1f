#include "gitpol/rational.hpp"

#include <cctype>

#include "gitpol/errors.hpp"

namespace gitpol {

Rational make_rational(long num, long den) {
  require(den != 0, "make_rational: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational out;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string_view::npos) {
    auto p = s.substr(0, slash), q = s.substr(slash + 1);
    if (!all_digits(p) || !all_digits(q))
      throw SchemaError("malformed rational \"" + std::string(text) + "\"");
    Integer den{std::string(q)};
    if (den == 0) throw SchemaError("zero denominator in \"" + std::string(text) + "\"");
    out = Rational(Integer(std::string(p)), den);
    out.canonicalize();
  } else if (dot != std::string_view::npos) {
    auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || !all_digits(fp))
      throw SchemaError("malformed rational \"" + std::string(text) + "\"");
    Integer scale = 1;
    for (size_t k = 0; k < fp.size(); ++k) scale *= 10;
    Integer whole = ip.empty() ? Integer(0) : Integer(std::string(ip));
    out = Rational(whole * scale + Integer(std::string(fp)), scale);
    out.canonicalize();
  } else {
    if (!all_digits(s)) throw SchemaError("malformed rational \"" + std::string(text) + "\"");
    out = Rational(Integer(std::string(s)));
  }
  return neg ? Rational(-out) : out;
}

std::string to_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Integer lcm_of_denominators(const Vec& v) {
  Integer l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

}  // namespace gitpol
