#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mahler/equation.hpp"
#include "mahler/errors.hpp"
#include "mahler/hahn_series.hpp"
#include "mahler/rational.hpp"
#include "mahler/scale.hpp"

namespace mahler {

// Equivalence class of exponents under "b = base^m * a + r for some integer m
// and some r in Z[base, 1/base]".  For base p/q in lowest terms that ring is
// Z[1/(pq)], so a rational exponent is classified by the prime-to-pq part w
// of its denominator together with the orbit of its numerator residue under
// multiplication by p * q^-1 mod w.  The representative is the least orbit
// member u/w with 0 <= u < w; class 0 is Z[1/(pq)] itself.
struct SupportClass {
  Scale base;
  Exponent representative;
};

namespace detail {

inline Int lattice_radical(const Scale& base) {
  require(base.is_rational(), Errc::symbolic_base_unsupported,
          "support classes need an exact rational base");
  return num(base.value()) * den(base.value());
}

inline Rational class_rational(const Exponent& e) {
  require(e.is_rational(), Errc::undecidable_membership,
          "class membership of the non-rational exponent " + e.to_string() +
              " is not decidable here");
  return e.rational_value();
}

// Writes den(a) = w * t with t built from primes dividing pq and w coprime
// to pq; then a differs from u/w by an element of Z[1/(pq)], where
// u = num(a) * t^-1 mod w.  Returns (w, u) with 0 <= u < w.
inline std::pair<Int, Int> class_residue(const Rational& a, const Int& pq) {
  Int d = den(a);
  Int w = strip_factors(d, pq);
  if (w == 1) return {w, Int(0)};
  Int t = d / w;
  Int u = (num(a) % w) * mod_inverse(t % w, w) % w;
  if (u < 0) u += w;
  return {w, u};
}

// Orbit of u under multiplication by p * q^-1 modulo w, sorted.  The step is
// a unit mod w, so the orbit is a finite cycle through u.
inline std::vector<Int> class_orbit(const Int& u, const Int& w, const Rational& base) {
  Int step = (num(base) % w) * mod_inverse(den(base) % w, w) % w;
  std::vector<Int> out;
  Int cur = u;
  do {
    out.push_back(cur);
    cur = cur * step % w;
  } while (cur != u);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Decides whether two exponents lie in the same support class.  Necessary
// first: multiplication by the base and shifts from Z[1/(pq)] both preserve
// the ell-adic valuations at primes ell not dividing pq, so the w parts must
// agree.  The remaining test searches the full base orbit of the residue, a
// complete procedure since the orbit is finite.
inline bool same_class(const Exponent& a, const Exponent& b, const Scale& base) {
  Int pq = detail::lattice_radical(base);
  auto [wa, ua] = detail::class_residue(detail::class_rational(a), pq);
  auto [wb, ub] = detail::class_residue(detail::class_rational(b), pq);
  if (wa != wb) return false;
  if (wa == 1) return true;
  auto orbit = detail::class_orbit(ua, wa, base.value());
  return std::binary_search(orbit.begin(), orbit.end(), ub);
}

inline Exponent canonical_class_representative(const Exponent& e, const Scale& base) {
  Int pq = detail::lattice_radical(base);
  auto [w, u] = detail::class_residue(detail::class_rational(e), pq);
  if (w == 1) return Exponent(Rational(0));
  auto orbit = detail::class_orbit(u, w, base.value());
  return Exponent(Rational(orbit.front(), w));
}

// Splits a series into its class components.  Parts keep the input's cutoff,
// are returned in increasing representative order, and sum to the input
// exactly; the zero series has no parts.
inline std::vector<std::pair<SupportClass, HahnSeries>> decompose(
    const HahnSeries& f, const Scale& base, const ScaleContext& ctx) {
  std::map<Rational, std::vector<HahnSeries::Term>> parts;
  for (const auto& [e, c] : f.terms())
    parts[canonical_class_representative(e, base).rational_value()].push_back({e, c});
  std::vector<std::pair<SupportClass, HahnSeries>> out;
  for (auto& [rep, terms] : parts)
    out.push_back({SupportClass{base, Exponent(rep)},
                   HahnSeries::from_terms(std::move(terms), f.cutoff(), ctx)});
  return out;
}

inline std::vector<std::pair<SupportClass, HahnSeries>> decompose(
    const HahnSeries& f, const ScaleContext& ctx) {
  return decompose(f, ctx.alpha, ctx);
}

// Exhaustive candidate set for the minimal exponent of a nonzero solution,
// one entry per class a solution could occupy.  Balancing lowest-order terms
// is the only way a solution can start, so every solution class meets this
// set; the number of classes of any solution is finitely bounded by it.
inline std::vector<Exponent> class_count_bound(const MahlerEquation& eq) {
  std::vector<Exponent> out;
  for (const Rational& v : admissible_valuations(eq)) out.push_back(Exponent(v));
  return out;
}

struct RescaleResult {
  Int factor;
  HahnSeries series;
};

// Substitutes x -> x^l for the least positive integer l that clears every
// prime-to-pq denominator part, so the result's support lies in Z[1/(pq)].
inline RescaleResult rescale_to_lattice(const HahnSeries& f, const Scale& base,
                                        const ScaleContext& ctx) {
  Int pq = detail::lattice_radical(base);
  Int l = 1;
  for (const auto& [e, c] : f.terms()) {
    (void)c;
    require(e.is_rational(), Errc::irrational_class_present,
            "support contains the non-rational exponent " + e.to_string() +
                "; rescaling by an integer cannot reach the base lattice");
    Int w = detail::class_residue(e.rational_value(), pq).first;
    l = lcm(l, w);
  }
  return {l, series_substitute(f, Rational(l), ctx)};
}

// Checks every class component of a candidate solution against the equation
// it came from.  Coefficient exponents must lie in Z[1/(pq)]: multiplying by
// such a monomial and substituting x -> x^(base^i) both fix every class, so
// the equation splits class by class, each component facing the matching
// class component of the right-hand side.
inline std::vector<std::pair<SupportClass, Verdict>> class_component_preserves_equation(
    const HahnSeries& f, const MahlerEquation& eq) {
  const ScaleContext& ctx = eq.context();
  const Scale& base = ctx.alpha;
  Int pq = detail::lattice_radical(base);
  for (long i = 0; i <= eq.degree(); ++i)
    for (const auto& [k, c] : eq.coeffs()[static_cast<std::size_t>(i)].terms()) {
      (void)c;
      require(strip_factors(den(k.rational_value()), pq) == 1, Errc::invalid_argument,
              "coefficient exponent " + k.to_string() + " of P_" + std::to_string(i) +
                  " leaves the base lattice; classes are not preserved");
    }

  std::map<Rational, std::pair<HahnSeries, HahnSeries>> slots;
  HahnSeries f_zero = f.cutoff() ? HahnSeries::zero_below(*f.cutoff()) : HahnSeries::zero();
  for (auto& [cls, part] : decompose(f, base, ctx))
    slots.insert({cls.representative.rational_value(), {part, HahnSeries::zero()}});
  for (auto& [cls, part] : decompose(eq.rhs(), base, ctx)) {
    auto [it, fresh] =
        slots.insert({cls.representative.rational_value(), {f_zero, part}});
    if (!fresh) it->second.second = part;
  }

  std::vector<std::pair<SupportClass, Verdict>> out;
  for (auto& [rep, pair] : slots) {
    MahlerEquation cls_eq(ctx, eq.base_pow(), eq.coeffs(), pair.second);
    out.push_back({SupportClass{base, Exponent(rep)}, check_equation(pair.first, cls_eq)});
  }
  return out;
}

}  // namespace mahler
