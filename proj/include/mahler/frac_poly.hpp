#pragma once

#include <utility>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/hahn_series.hpp"

namespace mahler {

// Coefficient polynomials of functional equations are exact Hahn series with
// nonnegative rational exponents: elements of K[x^(1/l)] for some l >= 1.
// They reuse HahnSeries wholesale; this header adds the polynomial-only
// operations (degree, division, gcd, content) that make elimination work.

inline void validate_coefficient_poly(const HahnSeries& p, const ScaleContext& ctx,
                                      const std::string& what) {
  require(p.is_exact(), Errc::invalid_argument, what + ": must be exact, not truncated");
  for (const auto& [e, c] : p.terms()) {
    (void)c;
    require(e.is_rational(), Errc::invalid_argument,
            what + ": exponent " + e.to_string() + " is not rational");
    require(e.rational_value() >= 0, Errc::invalid_argument,
            what + ": exponent " + e.to_string() + " is negative");
  }
  (void)ctx;
}

// Least l >= 1 with all exponents in (1/l) * Z.
inline Int poly_exponent_denominator(const HahnSeries& p) {
  Int l = 1;
  for (const auto& [e, c] : p.terms()) {
    (void)c;
    l = lcm(l, den(e.rational_value()));
  }
  return l;
}

inline Rational poly_degree(const HahnSeries& p) {
  require(!p.empty(), Errc::zero_series, "degree of the zero polynomial");
  return p.terms().back().first.rational_value();
}

inline Rational poly_trailing_exponent(const HahnSeries& p) {
  require(!p.empty(), Errc::zero_series, "valuation of the zero polynomial");
  return p.terms().front().first.rational_value();
}

// Adds delta to every exponent; the result must stay nonnegative.
inline HahnSeries poly_shift_exponents(const HahnSeries& p, const Rational& delta,
                                       const ScaleContext& ctx) {
  if (p.empty()) return p;
  require(poly_trailing_exponent(p) + delta >= 0, Errc::invalid_argument,
          "exponent shift would create a negative exponent");
  SeriesBuilder sb(ctx);
  for (const auto& [e, c] : p.terms()) sb.add(Exponent(e.rational_value() + delta), c);
  return sb.build();
}

// Division with remainder by descending exponents; works on any common
// (1/l)-grid, terminating because exponents decrease in steps of at least 1/l.
inline std::pair<HahnSeries, HahnSeries> poly_divmod(const HahnSeries& a,
                                                     const HahnSeries& b,
                                                     const ScaleContext& ctx) {
  require(!b.empty(), Errc::zero_input, "polynomial division by zero");
  Rational db = poly_degree(b);
  Rational lb = b.terms().back().second;
  HahnSeries q = HahnSeries::zero();
  HahnSeries r = a;
  while (!r.empty() && poly_degree(r) >= db) {
    Rational shift = poly_degree(r) - db;
    Rational coef = r.terms().back().second / lb;
    HahnSeries t = monomial(Exponent(shift), coef, ctx);
    q = series_add(q, t, ctx);
    r = series_sub(r, series_mul(t, b, ctx), ctx);
  }
  return {q, r};
}

// Division known to be exact; a nonzero remainder means a logic error upstream.
inline HahnSeries poly_exact_divide(const HahnSeries& a, const HahnSeries& b,
                                    const ScaleContext& ctx) {
  auto [q, r] = poly_divmod(a, b, ctx);
  require(r.empty(), Errc::invalid_argument, "polynomial division left a remainder");
  return q;
}

// gcd of the coefficients as a nonnegative rational; 0 for the zero polynomial.
inline Rational poly_content(const HahnSeries& p) {
  Int g = 0, l = 1;
  for (const auto& [e, c] : p.terms()) {
    (void)e;
    g = gcd(g, num(c));
    l = lcm(l, den(c));
  }
  if (g < 0) g = -g;
  return Rational(g) / l;
}

// p divided by its content: integer coefficients with gcd 1, sign preserved.
inline HahnSeries poly_primitive_part(const HahnSeries& p, const ScaleContext& ctx) {
  if (p.empty()) return p;
  return series_scalar_mul(p, 1 / poly_content(p), ctx);
}

// Euclidean gcd, returned primitive with positive leading coefficient, so it
// is a canonical representative of the ideal it generates.
inline HahnSeries poly_gcd(HahnSeries a, HahnSeries b, const ScaleContext& ctx) {
  while (!b.empty()) {
    auto [q, r] = poly_divmod(a, b, ctx);
    (void)q;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.empty()) return a;
  HahnSeries g = poly_primitive_part(a, ctx);
  if (g.terms().back().second < 0) g = series_neg(g, ctx);
  return g;
}

inline HahnSeries poly_gcd_many(const std::vector<HahnSeries>& ps,
                                const ScaleContext& ctx) {
  HahnSeries g = HahnSeries::zero();
  for (const auto& p : ps) g = poly_gcd(g, p, ctx);
  return g;
}

inline HahnSeries poly_lcm(const HahnSeries& a, const HahnSeries& b,
                           const ScaleContext& ctx) {
  if (a.empty() || b.empty()) return HahnSeries::zero();
  HahnSeries g = poly_gcd(a, b, ctx);
  HahnSeries l = poly_exact_divide(series_mul(a, b, ctx), g, ctx);
  HahnSeries out = poly_primitive_part(l, ctx);
  if (out.terms().back().second < 0) out = series_neg(out, ctx);
  return out;
}

// Evaluation at a rational point, for spot checks and sign normalization.
inline Rational poly_eval(const HahnSeries& p, const Rational& x) {
  Rational acc = 0;
  for (const auto& [e, c] : p.terms()) {
    Rational ev = e.rational_value();
    require(is_integer(ev), Errc::invalid_argument,
            "evaluation needs integer exponents; rescale first");
    require(ev >= 0 || x != 0, Errc::zero_input, "negative power of zero");
    acc += c * rational_pow(x, num(ev).convert_to<long>());
  }
  return acc;
}

}  // namespace mahler
