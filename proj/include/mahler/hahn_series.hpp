#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/exponent.hpp"
#include "mahler/rational.hpp"
#include "mahler/scale.hpp"

namespace mahler {

using SupportSet = std::vector<Exponent>;

// Truncated Hahn series: an exact list of (exponent, coefficient) terms that
// is complete strictly below the cutoff, plus the cutoff itself.  A missing
// cutoff means the series is exact everywhere.  Terms are strictly increasing
// in the exponent order of the context that built them, never zero, and never
// at or above the cutoff.
//
// The cutoff is exclusive: nothing is asserted about coefficients at or above
// it.  Operations compute the largest cutoff they can honestly guarantee.
class HahnSeries {
 public:
  using Term = std::pair<Exponent, Rational>;

  HahnSeries() = default;  // exact zero

  static HahnSeries zero() { return HahnSeries(); }

  static HahnSeries zero_below(Exponent theta) {
    HahnSeries s;
    s.cutoff_ = std::move(theta);
    return s;
  }

  // Canonicalizes: folds scale values into exponents, merges duplicate
  // exponents, drops zero coefficients, sorts.  A term at or above the cutoff
  // is rejected, because accepting it would silently change the asserted
  // value.
  static HahnSeries from_terms(std::vector<Term> terms,
                               std::optional<Exponent> cutoff,
                               const ScaleContext& ctx) {
    if (cutoff) *cutoff = exp_normalize(*cutoff, ctx);
    std::map<Exponent, Rational, ExpLess> acc{ExpLess(ctx)};
    for (auto& [e, c] : terms) acc[exp_normalize(e, ctx)] += c;
    HahnSeries s;
    s.cutoff_ = std::move(cutoff);
    for (auto& [e, c] : acc) {
      if (c == 0) continue;
      require(!s.cutoff_ || exp_less(e, *s.cutoff_, ctx), Errc::invalid_argument,
              "term at exponent " + e.to_string() + " is not below the cutoff");
      s.terms_.push_back({e, c});
    }
    return s;
  }

  const std::vector<Term>& terms() const { return terms_; }
  const std::optional<Exponent>& cutoff() const { return cutoff_; }
  bool is_exact() const { return !cutoff_.has_value(); }
  bool empty() const { return terms_.empty(); }
  bool is_exact_zero() const { return terms_.empty() && is_exact(); }

 private:
  friend class SeriesBuilder;

  std::vector<Term> terms_;
  std::optional<Exponent> cutoff_;
};

// Internal accumulate-then-truncate builder used by the arithmetic below.
// Unlike from_terms it quietly discards material at or above the cutoff,
// which is exactly right when the cutoff was derived from the operands.
class SeriesBuilder {
 public:
  explicit SeriesBuilder(const ScaleContext& ctx) : ctx_(&ctx), acc_(ExpLess(ctx)) {}

  void add(const Exponent& e, const Rational& c) {
    if (c != 0) acc_[exp_normalize(e, *ctx_)] += c;
  }

  void add_series(const HahnSeries& s, const Rational& scale = Rational(1)) {
    for (const auto& [e, c] : s.terms()) add(e, c * scale);
  }

  void restrict_cutoff(const std::optional<Exponent>& theta) {
    if (!theta) return;
    Exponent t = exp_normalize(*theta, *ctx_);
    if (!cutoff_ || exp_less(t, *cutoff_, *ctx_)) cutoff_ = std::move(t);
  }

  HahnSeries build() {
    HahnSeries s;
    s.cutoff_ = cutoff_;
    for (auto& [e, c] : acc_) {
      if (c == 0) continue;
      if (cutoff_ && !exp_less(e, *cutoff_, *ctx_)) break;
      s.terms_.push_back({e, c});
    }
    return s;
  }

 private:
  const ScaleContext* ctx_;
  std::map<Exponent, Rational, ExpLess> acc_;
  std::optional<Exponent> cutoff_;
};

// Smallest exponent with a (possibly) nonzero coefficient is at least this:
// the first term's exponent if any, otherwise the cutoff, otherwise +infinity
// (nullopt), for the exact zero series.
inline std::optional<Exponent> valuation_bound(const HahnSeries& s) {
  if (!s.empty()) return s.terms().front().first;
  return s.cutoff();
}

// Valuation of a series known to be nonzero below its cutoff.
inline Exponent valuation(const HahnSeries& s) {
  require(!s.empty(), Errc::zero_series,
          "valuation requested of a series with no visible terms");
  return s.terms().front().first;
}

inline Rational leading_coefficient(const HahnSeries& s) {
  require(!s.empty(), Errc::zero_series, "leading coefficient of an empty series");
  return s.terms().front().second;
}

inline HahnSeries monomial(const Exponent& e, const Rational& c,
                           const ScaleContext& ctx) {
  return HahnSeries::from_terms({{e, c}}, std::nullopt, ctx);
}

inline HahnSeries series_add(const HahnSeries& a, const HahnSeries& b,
                             const ScaleContext& ctx) {
  SeriesBuilder sb(ctx);
  sb.add_series(a);
  sb.add_series(b);
  sb.restrict_cutoff(a.cutoff());
  sb.restrict_cutoff(b.cutoff());
  return sb.build();
}

inline HahnSeries series_scalar_mul(const HahnSeries& a, const Rational& c,
                                    const ScaleContext& ctx) {
  SeriesBuilder sb(ctx);
  sb.add_series(a, c);
  sb.restrict_cutoff(a.cutoff());
  return sb.build();
}

inline HahnSeries series_neg(const HahnSeries& a, const ScaleContext& ctx) {
  return series_scalar_mul(a, Rational(-1), ctx);
}

inline HahnSeries series_sub(const HahnSeries& a, const HahnSeries& b,
                             const ScaleContext& ctx) {
  SeriesBuilder sb(ctx);
  sb.add_series(a);
  sb.add_series(b, Rational(-1));
  sb.restrict_cutoff(a.cutoff());
  sb.restrict_cutoff(b.cutoff());
  return sb.build();
}

// Product cutoff: a term of a at exponent >= theta_a lands at >= theta_a + v(b)
// once multiplied into b, and symmetrically; below the minimum of those two
// shifted cutoffs the product is fully determined.
inline HahnSeries series_mul(const HahnSeries& a, const HahnSeries& b,
                             const ScaleContext& ctx) {
  SeriesBuilder sb(ctx);
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) sb.add(ea + eb, ca * cb);
  auto shifted = [&](const std::optional<Exponent>& theta,
                     const std::optional<Exponent>& vb) -> std::optional<Exponent> {
    if (!theta || !vb) return std::nullopt;
    return *theta + *vb;
  };
  sb.restrict_cutoff(shifted(a.cutoff(), valuation_bound(b)));
  sb.restrict_cutoff(shifted(b.cutoff(), valuation_bound(a)));
  return sb.build();
}

// F(x) -> F(x^r) for r > 0: exponents and cutoff are multiplied by r.  The
// exponent map is strictly monotone, so the support stays well ordered.
inline HahnSeries series_substitute(const HahnSeries& a, const Exponent& r,
                                    const ScaleContext& ctx) {
  require(exp_compare(r, Exponent(0), ctx) == Ordering::greater,
          Errc::non_positive_substitution,
          "substitution exponent " + r.to_string() + " must be positive");
  SeriesBuilder sb(ctx);
  for (const auto& [e, c] : a.terms()) sb.add(exp_mul(r, e), c);
  if (a.cutoff()) sb.restrict_cutoff(exp_mul(r, *a.cutoff()));
  return sb.build();
}

inline HahnSeries series_truncate(const HahnSeries& a, const Exponent& theta,
                                  const ScaleContext& ctx) {
  SeriesBuilder sb(ctx);
  sb.add_series(a);
  sb.restrict_cutoff(a.cutoff());
  sb.restrict_cutoff(theta);
  return sb.build();
}

// Keeps the terms whose exponent satisfies the predicate.  The cutoff is
// unchanged: a filtered series is still complete below it.
inline HahnSeries series_filter(const HahnSeries& a,
                                const std::function<bool(const Exponent&)>& keep,
                                const ScaleContext& ctx) {
  SeriesBuilder sb(ctx);
  for (const auto& [e, c] : a.terms())
    if (keep(e)) sb.add(e, c);
  sb.restrict_cutoff(a.cutoff());
  return sb.build();
}

inline Rational series_coefficient(const HahnSeries& a, const Exponent& e,
                                   const ScaleContext& ctx) {
  Exponent en = exp_normalize(e, ctx);
  require(!a.cutoff() || exp_less(en, *a.cutoff(), ctx), Errc::invalid_argument,
          "coefficient at " + e.to_string() + " queried at or above the cutoff");
  for (const auto& [te, tc] : a.terms())
    if (te == en) return tc;
  return Rational(0);
}

inline SupportSet series_support(const HahnSeries& a) {
  SupportSet s;
  s.reserve(a.terms().size());
  for (const auto& [e, c] : a.terms()) s.push_back(e);
  return s;
}

// True when the two series agree strictly below the smaller of their cutoffs.
inline bool series_same_prefix(const HahnSeries& a, const HahnSeries& b,
                               const ScaleContext& ctx) {
  std::optional<Exponent> theta;
  if (a.cutoff()) theta = a.cutoff();
  if (b.cutoff() && (!theta || exp_less(*b.cutoff(), *theta, ctx))) theta = b.cutoff();
  HahnSeries ta = theta ? series_truncate(a, *theta, ctx) : a;
  HahnSeries tb = theta ? series_truncate(b, *theta, ctx) : b;
  const auto& xs = ta.terms();
  const auto& ys = tb.terms();
  if (xs.size() != ys.size()) return false;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(xs[i].first == ys[i].first) || xs[i].second != ys[i].second) return false;
  return true;
}

}  // namespace mahler
