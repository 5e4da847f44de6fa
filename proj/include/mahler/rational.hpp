#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mahler/errors.hpp"

namespace mahler {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return den(r) == 1; }

// Parses "n" or "n/d" with optional leading '-'.  Rejects everything else so
// malformed input surfaces as ParseError instead of silently truncating.
inline Rational parse_rational(std::string_view s) {
  auto bad = [&]() -> Rational {
    fail(Errc::parse_error, "not a rational literal: '" + std::string(s) + "'");
  };
  if (s.empty()) return bad();
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '-' || s[i] == '+') neg = (s[i++] == '-');
  std::size_t num_begin = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == num_begin) return bad();
  Int n(std::string(s.substr(num_begin, i - num_begin)));
  if (neg) n = -n;
  if (i == s.size()) return Rational(n);
  if (s[i] != '/') return bad();
  ++i;
  std::size_t den_begin = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == den_begin || i != s.size()) return bad();
  Int d(std::string(s.substr(den_begin)));
  if (d == 0) return bad();
  return Rational(n) / Rational(d);
}

inline std::string format_rational(const Rational& r) {
  if (is_integer(r)) return num(r).str();
  return num(r).str() + "/" + den(r).str();
}

// r^e for integer e, with r != 0 when e < 0.
inline Rational rational_pow(const Rational& r, long e) {
  if (e == 0) return Rational(1);
  if (r == 0) {
    require(e > 0, Errc::zero_input, "0 raised to a negative power");
    return Rational(0);
  }
  Rational base = r;
  long k = e;
  if (k < 0) {
    base = 1 / base;
    k = -k;
  }
  Rational acc(1);
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

// Number of times ell divides n; n must be nonzero.
inline long multiplicity(Int n, const Int& ell) {
  require(n != 0, Errc::zero_input, "multiplicity of zero");
  if (n < 0) n = -n;
  long v = 0;
  while (n % ell == 0) {
    n /= ell;
    ++v;
  }
  return v;
}

inline bool is_prime(const Int& n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (Int d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

// ell-adic valuation of a nonzero rational, for prime ell.
inline long ell_adic_valuation(const Rational& r, const Int& ell) {
  require(r != 0, Errc::zero_input, "valuation of zero");
  require(is_prime(ell), Errc::invalid_argument,
          "ell-adic valuation needs a prime, got " + ell.str());
  return multiplicity(num(r), ell) - multiplicity(den(r), ell);
}

// Ascending (prime, exponent) factorization of n >= 1 by trial division.
inline std::vector<std::pair<Int, long>> prime_factors(Int n) {
  require(n >= 1, Errc::invalid_argument, "factorization needs n >= 1");
  std::vector<std::pair<Int, long>> out;
  for (Int d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d != 0) continue;
    long e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

// Removes from n every prime factor it shares with p; the result is coprime
// to p.  Needs no factorization, only gcds.
inline Int strip_factors(Int n, const Int& p) {
  require(n != 0, Errc::zero_input, "strip_factors of zero");
  if (n < 0) n = -n;
  if (p == 0) return n;
  for (;;) {
    Int g = gcd(n, p);
    if (g == 1) return n;
    while (n % g == 0) n /= g;
  }
}

// Extended gcd: returns g = gcd(a, b) and (x, y) with a*x + b*y = g.
inline Int extended_gcd(const Int& a, const Int& b, Int& x, Int& y) {
  if (b == 0) {
    x = (a < 0) ? -1 : 1;
    y = 0;
    return a < 0 ? Int(-a) : a;
  }
  Int x1, y1;
  Int g = extended_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

// Inverse of a modulo m, for gcd(a, m) = 1 and m >= 1.
inline Int mod_inverse(const Int& a, const Int& m) {
  require(m >= 1, Errc::invalid_argument, "modulus must be positive");
  Int x, y;
  Int g = extended_gcd(a % m, m, x, y);
  require(g == 1, Errc::invalid_argument,
          "no inverse: gcd(" + a.str() + ", " + m.str() + ") != 1");
  Int r = x % m;
  if (r < 0) r += m;
  return r;
}

inline Int mod_pow(Int base, Int e, const Int& m) {
  require(m >= 1, Errc::invalid_argument, "modulus must be positive");
  require(e >= 0, Errc::invalid_argument, "mod_pow needs e >= 0");
  base %= m;
  if (base < 0) base += m;
  Int acc(1);
  while (e > 0) {
    if ((e & 1) != 0) acc = acc * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return acc;
}

// floor(r) as an integer.
inline Int rational_floor(const Rational& r) {
  Int n = num(r), d = den(r);
  Int q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

}  // namespace mahler
