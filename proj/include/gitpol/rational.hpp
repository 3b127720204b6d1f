#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace gitpol {

// GMP keeps mpq values canonical (lowest terms, positive denominator)
// as long as every constructor from a raw pair is followed by canonicalize().
using Rational = mpq_class;
using Integer = mpz_class;
using Vec = std::vector<Rational>;

Rational make_rational(long num, long den = 1);

// Accepts "p", "-p", "p/q", and finite decimals such as "0.7".
Rational parse_rational(std::string_view text);

// "p/q", or "p" when q = 1.
std::string to_string(const Rational& x);

Integer lcm_of_denominators(const Vec& v);

}  // namespace gitpol
