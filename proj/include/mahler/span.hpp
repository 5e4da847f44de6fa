#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mahler/equation.hpp"
#include "mahler/errors.hpp"
#include "mahler/frac_poly.hpp"
#include "mahler/hahn_series.hpp"
#include "mahler/linalg.hpp"

namespace mahler {

// Quotient of two fractional-exponent polynomials, kept reduced with the
// denominator primitive and positive-leading, so equal values have equal
// representations.
struct RatFunc {
  HahnSeries num;
  HahnSeries den;
};

inline RatFunc rf_make(HahnSeries n, HahnSeries d, const ScaleContext& ctx) {
  require(!d.empty(), Errc::invalid_argument, "rational function with zero denominator");
  if (n.empty()) return {HahnSeries::zero(), poly_one(ctx)};
  HahnSeries g = poly_gcd(n, d, ctx);
  if (!detail::poly_is_one(g)) {
    n = poly_exact_divide(n, g, ctx);
    d = poly_exact_divide(d, g, ctx);
  }
  Rational c = poly_content(d);
  if (d.terms().back().second < 0) c = -c;
  if (c != 1) {
    d = series_scalar_mul(d, 1 / c, ctx);
    n = series_scalar_mul(n, 1 / c, ctx);
  }
  return {std::move(n), std::move(d)};
}

inline RatFunc rf_zero(const ScaleContext& ctx) {
  return {HahnSeries::zero(), poly_one(ctx)};
}
inline bool rf_is_zero(const RatFunc& r) { return r.num.empty(); }

inline RatFunc rf_add(const RatFunc& x, const RatFunc& y, const ScaleContext& ctx) {
  return rf_make(series_add(series_mul(x.num, y.den, ctx), series_mul(y.num, x.den, ctx), ctx),
                 series_mul(x.den, y.den, ctx), ctx);
}

inline RatFunc rf_mul(const RatFunc& x, const RatFunc& y, const ScaleContext& ctx) {
  return rf_make(series_mul(x.num, y.num, ctx), series_mul(x.den, y.den, ctx), ctx);
}

// Finitely generated module picture of the span of F(x^(a^i b^j)): window
// generators are the pairs 0 <= i < d1, 0 <= j < d2, and every pair in the
// built range rewrites as a rational-function combination of them.  denom is
// the least common denominator of every exponent the stored rules introduce.
struct SpanBasis {
  ScaleContext ctx;
  std::pair<long, long> dims;
  Int denom;
  std::map<std::pair<long, long>, std::vector<RatFunc>> rules;

  bool in_window(long i, long j) const {
    return 0 <= i && i < dims.first && 0 <= j && j < dims.second;
  }

  std::vector<RatFunc> coords(long i, long j) const {
    if (in_window(i, j)) {
      std::vector<RatFunc> v(static_cast<std::size_t>(dims.first * dims.second),
                             rf_zero(ctx));
      v[static_cast<std::size_t>(i * dims.second + j)] = {poly_one(ctx), poly_one(ctx)};
      return v;
    }
    auto it = rules.find({i, j});
    require(it != rules.end(), Errc::invalid_argument,
            "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                ") is outside the built range; rebuild the span with a larger bound");
    return it->second;
  }
};

namespace detail {

inline void span_preconditions(const MahlerEquation& eq, const char* label) {
  require(eq.homogeneous(), Errc::not_homogeneous,
          std::string(label) + " must be homogeneous; homogenize first");
  require(eq.base_rational(), Errc::symbolic_base_unsupported,
          std::string(label) + " has a symbolic base; span construction needs exact rationals");
  require(!eq.coeffs().front().empty(), Errc::coefficient_vanishes,
          std::string(label) + " has P_0 = 0; backward substitution would divide by zero");
  require(!eq.coeffs().back().empty(), Errc::coefficient_vanishes,
          std::string(label) + " has P_d = 0; forward substitution would divide by zero");
}

struct SpanWork {
  const MahlerEquation& A;
  const MahlerEquation& B;
  ScaleContext ctx;
  long d1, d2;
  Rational a, b;
  std::map<std::pair<long, long>, std::vector<RatFunc>> memo;

  std::vector<RatFunc> unit(long i, long j) {
    std::vector<RatFunc> v(static_cast<std::size_t>(d1 * d2), rf_zero(ctx));
    v[static_cast<std::size_t>(i * d2 + j)] = {poly_one(ctx), poly_one(ctx)};
    return v;
  }

  // One rewriting step along the given axis.  The substitution exponent gamma
  // is chosen so the equation's terms land on F(x^(a^? b^?)) with the target
  // appearing at the divided-out slot: slot d going forward, slot 0 going
  // backward.  Both directions reduce to "generator (gi + t, j) or (i, gj + t)
  // with coefficient -P_t(x^gamma) / P_pivot(x^gamma)".
  std::vector<RatFunc> axis_step(const MahlerEquation& eq, int axis, bool forward,
                                 long i, long j) {
    long d = eq.degree();
    long gi = i - (axis == 0 && forward ? d : 0);
    long gj = j - (axis == 1 && forward ? d : 0);
    Rational gamma = rational_pow(a, gi) * rational_pow(b, gj);
    HahnSeries bottom = series_substitute(
        eq.coeffs()[static_cast<std::size_t>(forward ? d : 0)], Exponent(gamma), ctx);
    std::vector<RatFunc> acc(static_cast<std::size_t>(d1 * d2), rf_zero(ctx));
    for (long t = forward ? 0 : 1; t <= (forward ? d - 1 : d); ++t) {
      const HahnSeries& pt = eq.coeffs()[static_cast<std::size_t>(t)];
      if (pt.empty()) continue;
      RatFunc c = rf_make(series_neg(series_substitute(pt, Exponent(gamma), ctx), ctx),
                          bottom, ctx);
      const auto& sub = rep(axis == 0 ? gi + t : i, axis == 1 ? gj + t : j);
      for (std::size_t k = 0; k < acc.size(); ++k)
        acc[k] = rf_add(acc[k], rf_mul(c, sub[k], ctx), ctx);
    }
    return acc;
  }

  const std::vector<RatFunc>& rep(long i, long j) {
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    std::vector<RatFunc> out;
    if (0 <= i && i < d1 && 0 <= j && j < d2)
      out = unit(i, j);
    else if (i >= d1)
      out = axis_step(A, 0, true, i, j);
    else if (i < 0)
      out = axis_step(A, 0, false, i, j);
    else if (j >= d2)
      out = axis_step(B, 1, true, i, j);
    else
      out = axis_step(B, 1, false, i, j);
    return memo.emplace(std::pair<long, long>{i, j}, std::move(out)).first->second;
  }
};

}  // namespace detail

// Builds rewrite rules for every pair |i|, |j| <= d1 * d2 * range by repeated
// forward and backward substitution of the two equations, normalizing the
// first index with the base-a equation and then the second with the base-b
// equation.
inline SpanBasis build_span(const MahlerEquation& eqA, const MahlerEquation& eqB,
                            long range) {
  detail::span_preconditions(eqA, "the base-a equation");
  detail::span_preconditions(eqB, "the base-b equation");
  require(range >= 0, Errc::invalid_argument, "negative range bound");
  Rational a = eqA.base_value();
  Rational b = eqB.base_value();
  ScaleContext ctx = ScaleContext::rational(a, b);
  long d1 = eqA.degree(), d2 = eqB.degree();
  detail::SpanWork w{eqA, eqB, ctx, d1, d2, a, b, {}};
  long bound = d1 * d2 * range;
  for (long i = -bound; i <= bound; ++i)
    for (long j = -bound; j <= bound; ++j) w.rep(i, j);

  SpanBasis out{std::move(ctx), {d1, d2}, Int(1), {}};
  for (auto& [key, coords] : w.memo) {
    if (out.in_window(key.first, key.second)) continue;
    for (const RatFunc& r : coords) {
      out.denom = lcm(out.denom, poly_exponent_denominator(r.num));
      out.denom = lcm(out.denom, poly_exponent_denominator(r.den));
    }
    out.rules.emplace(key, std::move(coords));
  }
  return out;
}

// Expands the rule for (i, j) on a candidate common solution: with L clearing
// the rule's denominators, L * f(x^(a^i b^j)) minus the rewritten combination
// must vanish below the guaranteed window.
inline Verdict check_rule(const SpanBasis& basis, const HahnSeries& f, long i, long j) {
  const ScaleContext& ctx = basis.ctx;
  Rational a = ctx.alpha.value();
  Rational b = ctx.beta->value();
  auto coords = basis.coords(i, j);

  HahnSeries L = poly_one(ctx);
  for (const RatFunc& r : coords)
    if (!rf_is_zero(r)) L = poly_lcm(L, r.den, ctx);

  Rational target = rational_pow(a, i) * rational_pow(b, j);
  HahnSeries residual = series_mul(L, series_substitute(f, Exponent(target), ctx), ctx);
  std::vector<std::pair<Rational, HahnSeries>> pieces;  // (generator exponent, polynomial)
  pieces.push_back({target, L});
  for (long ii = 0; ii < basis.dims.first; ++ii)
    for (long jj = 0; jj < basis.dims.second; ++jj) {
      const RatFunc& c = coords[static_cast<std::size_t>(ii * basis.dims.second + jj)];
      if (rf_is_zero(c)) continue;
      HahnSeries poly = series_mul(poly_exact_divide(L, c.den, ctx), c.num, ctx);
      Rational ge = rational_pow(a, ii) * rational_pow(b, jj);
      residual = series_sub(
          residual, series_mul(poly, series_substitute(f, Exponent(ge), ctx), ctx), ctx);
      pieces.push_back({ge, poly});
    }

  Verdict v;
  if (!residual.empty()) {
    v.kind = VerdictKind::refuted;
    v.checked_below = residual.cutoff();
    v.first_failure = residual.terms().front().first;
    v.failure_coefficient = residual.terms().front().second;
    v.detail = "rule residual has a nonzero term at " + v.first_failure->to_string();
    return v;
  }
  if (residual.is_exact()) {
    v.kind = VerdictKind::verified;
    v.detail = "rule residual is exactly zero";
    return v;
  }
  const Exponent& theta = *residual.cutoff();
  bool window_nonempty = false;
  auto vb = valuation_bound(f);
  if (vb)
    for (const auto& [ge, poly] : pieces) {
      Exponent lower = vb->scaled(ge) + valuation(poly);
      if (exp_less(lower, theta, ctx)) {
        window_nonempty = true;
        break;
      }
    }
  if (window_nonempty) {
    v.kind = VerdictKind::verified;
    v.checked_below = theta;
    v.detail = "rule residual vanishes below " + theta.to_string();
  } else {
    v.kind = VerdictKind::inconclusive;
    v.checked_below = theta;
    v.detail = "guaranteed window below " + theta.to_string() + " saw no term of the rule";
  }
  return v;
}

struct CombinedEquation {
  MahlerEquation equation;
  Int l;
};

namespace detail {

// Three-way structural comparison of polynomials, for deterministic kernel
// element selection only; unrelated to the value order on exponents.
inline int cmp_poly(const HahnSeries& x, const HahnSeries& y) {
  std::size_t n = std::min(x.terms().size(), y.terms().size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& [ex, cx] = x.terms()[k];
    const auto& [ey, cy] = y.terms()[k];
    Rational rx = ex.rational_value(), ry = ey.rational_value();
    if (rx != ry) return rx < ry ? -1 : 1;
    if (cx != cy) return cx < cy ? -1 : 1;
  }
  if (x.terms().size() != y.terms().size())
    return x.terms().size() < y.terms().size() ? -1 : 1;
  return 0;
}

}  // namespace detail

// Linear dependence among f(x^(g^j)) for g = a^n b^m, j = 0..d1*d2, read off
// the span module: rows are the window coordinates of each power, their
// denominators cleared row by row; a left kernel vector of the resulting
// polynomial matrix gives the coefficients.  The kernel row is chosen by
// least total degree, then lexicographic order, so the output is canonical.
// Exponents are cleared by x -> x^l at the end: the returned equation, of
// degree at most d1*d2, is satisfied by G(x) = F(x^l) whenever F solves both
// inputs.
inline CombinedEquation combine_from_span(const SpanBasis& basis, long n, long m) {
  require(n != 0 || m != 0, Errc::invalid_argument,
          "power pair (0, 0) makes the combined base 1");
  const ScaleContext& ctx = basis.ctx;
  long window = basis.dims.first * basis.dims.second;

  std::vector<std::vector<HahnSeries>> rows;
  std::vector<HahnSeries> clears;
  for (long jdx = 0; jdx <= window; ++jdx) {
    auto coords = basis.coords(jdx * n, jdx * m);
    HahnSeries L = poly_one(ctx);
    for (const RatFunc& r : coords)
      if (!rf_is_zero(r)) L = poly_lcm(L, r.den, ctx);
    std::vector<HahnSeries> row;
    for (const RatFunc& r : coords)
      row.push_back(rf_is_zero(r)
                        ? HahnSeries::zero()
                        : series_mul(poly_exact_divide(L, r.den, ctx), r.num, ctx));
    rows.push_back(std::move(row));
    clears.push_back(std::move(L));
  }

  auto kernel = poly_left_kernel(rows, ctx);
  require(!kernel.empty(), Errc::kernel_empty,
          "no dependence among " + std::to_string(window + 1) +
              " powers in a rank-" + std::to_string(window) + " module");
  auto row_degree = [](const std::vector<HahnSeries>& v) {
    Rational total = 0;
    for (const auto& p : v)
      if (!p.empty()) total += poly_degree(p);
    return total;
  };
  std::size_t best = 0;
  for (std::size_t k = 1; k < kernel.size(); ++k) {
    Rational dk = row_degree(kernel[k]), db = row_degree(kernel[best]);
    if (dk != db) {
      if (dk < db) best = k;
      continue;
    }
    for (std::size_t e = 0; e < kernel[k].size(); ++e) {
      int c = detail::cmp_poly(kernel[k][e], kernel[best][e]);
      if (c != 0) {
        if (c < 0) best = k;
        break;
      }
    }
  }

  // undo the row clearing: the dependence on the original coordinate rows
  // uses w_j * L_j
  std::vector<HahnSeries> coeffs;
  for (long jdx = 0; jdx <= window; ++jdx)
    coeffs.push_back(series_mul(kernel[best][static_cast<std::size_t>(jdx)],
                                clears[static_cast<std::size_t>(jdx)], ctx));
  while (coeffs.size() > 1 && coeffs.back().empty()) coeffs.pop_back();
  require(coeffs.size() >= 2, Errc::degenerate_equation,
          "dependence collapsed to a single power; no functional equation results");

  std::vector<HahnSeries> nonzero;
  for (const auto& p : coeffs)
    if (!p.empty()) nonzero.push_back(p);
  HahnSeries g = poly_gcd_many(nonzero, ctx);
  if (!detail::poly_is_one(g))
    for (auto& p : coeffs)
      if (!p.empty()) p = poly_exact_divide(p, g, ctx);
  Int cn = 0, cd = 1;
  for (const auto& p : coeffs)
    for (const auto& [e, c] : p.terms()) {
      (void)e;
      cn = gcd(cn, num(c));
      cd = lcm(cd, den(c));
    }
  if (cn < 0) cn = -cn;
  Rational content(cn, cd);
  if (coeffs.back().terms().back().second < 0) content = -content;
  if (content != 1)
    for (auto& p : coeffs) p = series_scalar_mul(p, 1 / content, ctx);

  Int l = 1;
  for (const auto& p : coeffs) l = lcm(l, poly_exponent_denominator(p));
  Rational base = rational_pow(ctx.alpha.value(), n) * rational_pow(ctx.beta->value(), m);
  require(base != 1, Errc::invalid_argument,
          "a^n b^m = 1; the combined substitution is trivial");
  std::vector<HahnSeries> out_coeffs;
  for (const auto& p : coeffs)
    out_coeffs.push_back(series_substitute(p, Exponent(Rational(l)), ctx));
  MahlerEquation eq(ScaleContext::rational(base), {1, 0}, std::move(out_coeffs),
                    HahnSeries::zero());
  return {std::move(eq), l};
}

inline CombinedEquation combine_bases(const MahlerEquation& eqA, const MahlerEquation& eqB,
                                      long n, long m) {
  long range = std::max(std::labs(n), std::labs(m));
  if (range == 0) range = 1;
  return combine_from_span(build_span(eqA, eqB, range), n, m);
}

}  // namespace mahler
