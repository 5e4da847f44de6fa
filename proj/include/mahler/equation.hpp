#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/frac_poly.hpp"
#include "mahler/hahn_series.hpp"

namespace mahler {

// A functional equation sum_{i=0..d} P_i(x) * F(x^(g^i)) = A(x), where the
// base g is alpha^pow_a * beta^pow_b in some scale context, the P_i are exact
// polynomials in x^(1/l), and A is an exact polynomial right-hand side
// (possibly zero).  P_d is nonzero; lower coefficients may vanish.
//
// When every scale in the context is rational the base collapses to a single
// rational and the equation is renormalized to pow (1, 0) over that value, so
// syntactically different descriptions of the same base compare equal.
class MahlerEquation {
 public:
  MahlerEquation(ScaleContext ctx, std::pair<long, long> base_pow,
                 std::vector<HahnSeries> coeffs, HahnSeries rhs)
      : ctx_(std::move(ctx)),
        pow_a_(base_pow.first),
        pow_b_(base_pow.second),
        coeffs_(std::move(coeffs)),
        rhs_(std::move(rhs)) {
    require(coeffs_.size() >= 2, Errc::degenerate_equation,
            "an equation needs degree at least 1");
    require(!coeffs_.back().empty(), Errc::degenerate_equation,
            "the top coefficient P_d must be nonzero");
    require(pow_a_ != 0 || pow_b_ != 0, Errc::invalid_argument,
            "base exponent pair (0, 0) makes the base 1");
    require(pow_b_ == 0 || ctx_.has_beta(), Errc::invalid_argument,
            "base uses beta but the context has no beta scale");
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      validate_coefficient_poly(coeffs_[i], ctx_, "P_" + std::to_string(i));
    validate_coefficient_poly(rhs_, ctx_, "rhs");
    if (ctx_.all_rational()) {
      Rational g = rational_pow(ctx_.alpha.value(), pow_a_);
      if (ctx_.has_beta()) g *= rational_pow(ctx_.beta->value(), pow_b_);
      require(g != 1, Errc::invalid_argument,
              "base collapses to 1; the equation is not a functional equation");
      ctx_ = ScaleContext::rational(g);
      pow_a_ = 1;
      pow_b_ = 0;
    }
  }

  const ScaleContext& context() const { return ctx_; }
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<HahnSeries>& coeffs() const { return coeffs_; }
  const HahnSeries& rhs() const { return rhs_; }
  std::pair<long, long> base_pow() const { return {pow_a_, pow_b_}; }
  bool homogeneous() const { return rhs_.is_exact_zero(); }

  // The base raised to the i-th power, as an exponent-group element.
  Exponent base_exponent(long i) const {
    return exp_base_shift(Exponent(1), ctx_, i * pow_a_, i * pow_b_);
  }

  bool base_rational() const { return ctx_.all_rational(); }

  Rational base_value() const {
    require(base_rational(), Errc::symbolic_base_unsupported,
            "exact base value requested for a symbolic base");
    return base_exponent(1).rational_value();
  }

  bool base_above_one() const {
    return exp_compare(base_exponent(1), Exponent(1), ctx_) == Ordering::greater;
  }

 private:
  ScaleContext ctx_;
  long pow_a_, pow_b_;
  std::vector<HahnSeries> coeffs_;
  HahnSeries rhs_;
};

enum class VerdictKind { verified, refuted, inconclusive };

inline const char* verdict_kind_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::verified: return "Verified";
    case VerdictKind::refuted: return "Refuted";
    case VerdictKind::inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

// Outcome of checking a series against an equation.  checked_below is the
// exponent up to which the residual is guaranteed; absent means the residual
// was exact, so the verdict holds everywhere.
struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  std::optional<Exponent> checked_below;
  std::optional<Exponent> first_failure;
  std::optional<Rational> failure_coefficient;
  std::string detail;
};

// Substitutes F into the equation and inspects the residual
// sum_i P_i * F(x^(g^i)) - A below the largest honestly known cutoff.
//
// An empty residual whose guaranteed window cannot contain any term of the
// defining sum is reported Inconclusive rather than Verified: checking an
// empty window is not evidence.
inline Verdict check_equation(const HahnSeries& F, const MahlerEquation& eq) {
  const ScaleContext& ctx = eq.context();
  HahnSeries residual = eq.rhs().is_exact_zero()
                            ? HahnSeries::zero()
                            : series_neg(eq.rhs(), ctx);
  for (long i = 0; i <= eq.degree(); ++i) {
    const HahnSeries& P = eq.coeffs()[i];
    if (P.empty()) continue;
    HahnSeries term = series_mul(P, series_substitute(F, eq.base_exponent(i), ctx), ctx);
    residual = series_add(residual, term, ctx);
  }

  Verdict v;
  if (!residual.empty()) {
    v.kind = VerdictKind::refuted;
    v.checked_below = residual.cutoff();
    v.first_failure = residual.terms().front().first;
    v.failure_coefficient = residual.terms().front().second;
    v.detail = "residual has a nonzero term at " + v.first_failure->to_string();
    return v;
  }
  if (residual.is_exact()) {
    v.kind = VerdictKind::verified;
    v.detail = "residual is exactly zero";
    return v;
  }

  // Empty truncated residual: decide whether the window saw anything.
  // Each term of the sum is supported at or above g^i * vbound(F) + v(P_i),
  // and the right-hand side at or above its own valuation.
  const Exponent& theta = *residual.cutoff();
  bool window_nonempty = false;
  auto vb_F = valuation_bound(F);
  for (long i = 0; i <= eq.degree() && !window_nonempty; ++i) {
    const HahnSeries& P = eq.coeffs()[i];
    if (P.empty()) continue;
    if (!vb_F) continue;  // exact zero F contributes nothing anywhere
    Exponent lower = exp_mul(eq.base_exponent(i), *vb_F) + valuation(P);
    if (exp_less(lower, theta, ctx)) window_nonempty = true;
  }
  if (!eq.rhs().empty() && exp_less(valuation(eq.rhs()), theta, ctx))
    window_nonempty = true;

  if (window_nonempty) {
    v.kind = VerdictKind::verified;
    v.checked_below = theta;
    v.detail = "residual vanishes below " + theta.to_string();
  } else {
    v.kind = VerdictKind::inconclusive;
    v.checked_below = theta;
    v.detail = "guaranteed window below " + theta.to_string() +
               " contains no term of the equation; nothing was actually checked";
  }
  return v;
}

// Turns an inhomogeneous equation into a homogeneous one of degree d+1 whose
// solution set contains every solution of the original: cross-multiply the
// equation by the image of A under x -> x^g and subtract the g-substituted
// equation multiplied by A.  Common monomial factors are cleared and the sign
// fixed so the top coefficient leads with a positive coefficient.
inline MahlerEquation homogenize(const MahlerEquation& eq) {
  require(!eq.homogeneous(), Errc::already_homogeneous,
          "equation already has zero right-hand side");
  require(eq.base_rational(), Errc::symbolic_base_unsupported,
          "homogenization is a rational-base reduction");
  const ScaleContext& ctx = eq.context();
  const HahnSeries& A = eq.rhs();
  Exponent g = eq.base_exponent(1);
  HahnSeries A_up = series_substitute(A, g, ctx);
  long d = eq.degree();

  std::vector<HahnSeries> out(static_cast<std::size_t>(d) + 2, HahnSeries::zero());
  for (long i = 0; i <= d + 1; ++i) {
    HahnSeries q = HahnSeries::zero();
    if (i <= d && !eq.coeffs()[i].empty())
      q = series_mul(A_up, eq.coeffs()[i], ctx);
    if (i >= 1 && !eq.coeffs()[i - 1].empty()) {
      HahnSeries shifted = series_substitute(eq.coeffs()[i - 1], g, ctx);
      q = series_sub(q, series_mul(A, shifted, ctx), ctx);
    }
    out[static_cast<std::size_t>(i)] = q;
  }

  // Clear the common monomial factor x^m with m the least exponent present.
  std::optional<Rational> m;
  for (const auto& q : out)
    if (!q.empty()) {
      Rational t = poly_trailing_exponent(q);
      if (!m || t < *m) m = t;
    }
  require(m.has_value(), Errc::degenerate_equation,
          "homogenization produced the zero equation");
  if (*m != 0)
    for (auto& q : out) q = poly_shift_exponents(q, -*m, ctx);

  if (!out.back().empty() && out.back().terms().front().second < 0)
    for (auto& q : out) q = series_neg(q, ctx);

  return MahlerEquation(ctx, eq.base_pow(), std::move(out), HahnSeries::zero());
}

// Drops leading zero coefficients of a homogeneous equation by substituting
// x -> x^(g^-i0), so the result has P_0 != 0.  Returns the equation and the
// number of dropped slots.
inline std::pair<MahlerEquation, long> normalize_leading(const MahlerEquation& eq) {
  require(eq.homogeneous(), Errc::not_homogeneous,
          "leading normalization works on homogeneous equations");
  long i0 = 0;
  while (i0 <= eq.degree() && eq.coeffs()[static_cast<std::size_t>(i0)].empty()) ++i0;
  if (i0 == 0) return {eq, 0};
  require(eq.degree() - i0 >= 1, Errc::degenerate_equation,
          "only one nonzero coefficient remains; the equation forces F = 0");
  require(eq.base_rational(), Errc::symbolic_base_unsupported,
          "leading normalization is a rational-base reduction");
  const ScaleContext& ctx = eq.context();
  Exponent down = eq.base_exponent(-i0);
  std::vector<HahnSeries> out;
  for (long j = i0; j <= eq.degree(); ++j)
    out.push_back(series_substitute(eq.coeffs()[static_cast<std::size_t>(j)], down, ctx));
  return {MahlerEquation(eq.context(), eq.base_pow(), std::move(out), HahnSeries::zero()),
          i0};
}

// Replaces a rational base g < 1 by 1/g > 1: substitute x -> x^(g^-d) and
// read the coefficient list backwards.  Solutions are unchanged.
inline MahlerEquation invert_base(const MahlerEquation& eq) {
  require(eq.base_rational(), Errc::symbolic_base_unsupported,
          "base inversion needs an exact rational base");
  require(eq.base_value() < 1, Errc::base_already_above_one,
          "base " + format_rational(eq.base_value()) + " is already above 1");
  const ScaleContext& ctx = eq.context();
  long d = eq.degree();
  Exponent up = eq.base_exponent(-d);
  std::vector<HahnSeries> out;
  for (long j = d; j >= 0; --j)
    out.push_back(series_substitute(eq.coeffs()[static_cast<std::size_t>(j)], up, ctx));
  while (out.size() > 1 && out.back().empty()) out.pop_back();
  require(out.size() >= 2, Errc::degenerate_equation,
          "inversion left a single-coefficient equation");
  HahnSeries rhs = eq.rhs().is_exact_zero() ? HahnSeries::zero()
                                            : series_substitute(eq.rhs(), up, ctx);
  Rational inv = 1 / eq.base_value();
  return MahlerEquation(ScaleContext::rational(inv), {1, 0}, std::move(out),
                        std::move(rhs));
}

// Substitutes x -> x^r throughout; solutions transform as F(x) -> F(x^r).
inline MahlerEquation shift_equation(const MahlerEquation& eq, const Rational& r) {
  require(r > 0, Errc::non_positive_substitution, "shift exponent must be positive");
  const ScaleContext& ctx = eq.context();
  Exponent re(r);
  std::vector<HahnSeries> out;
  for (const auto& P : eq.coeffs()) out.push_back(series_substitute(P, re, ctx));
  HahnSeries rhs = eq.rhs().is_exact_zero() ? HahnSeries::zero()
                                            : series_substitute(eq.rhs(), re, ctx);
  return MahlerEquation(eq.context(), eq.base_pow(), std::move(out), std::move(rhs));
}

// Valuations a nonzero solution could have: balancing the two lowest-order
// terms of slots i < j forces v * (g^i - g^j) = v(P_j) - v(P_i).  For a
// symbolic base the quotient lies in the exponent group only when the two
// valuations agree, in which case v = 0.
inline std::vector<Rational> admissible_valuations(const MahlerEquation& eq) {
  require(eq.homogeneous(), Errc::not_homogeneous,
          "admissible valuations are defined for homogeneous equations");
  std::vector<long> idx;
  for (long i = 0; i <= eq.degree(); ++i)
    if (!eq.coeffs()[static_cast<std::size_t>(i)].empty()) idx.push_back(i);
  require(idx.size() >= 2, Errc::degenerate_equation,
          "need at least two nonzero coefficients");
  std::vector<Rational> out;
  bool rational = eq.base_rational();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      long i = idx[a], j = idx[b];
      Rational ci = poly_trailing_exponent(eq.coeffs()[static_cast<std::size_t>(i)]);
      Rational cj = poly_trailing_exponent(eq.coeffs()[static_cast<std::size_t>(j)]);
      if (rational) {
        Rational g = eq.base_value();
        out.push_back((ci - cj) / (rational_pow(g, j) - rational_pow(g, i)));
      } else if (ci == cj) {
        out.push_back(Rational(0));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace mahler
