#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/rational.hpp"
#include "mahler/scale.hpp"

namespace mahler {

// Multiplicative part of one exponent term: alpha^m * beta^n * s^(s ? 1 : 0),
// where s is the distinguished free generator used for unresolved support
// class offsets.
struct ExpKey {
  int m = 0;
  int n = 0;
  bool s = false;

  auto operator<=>(const ExpKey&) const = default;
};

// Element of the exponent group: a finite formal sum of rational multiples of
// alpha^m beta^n s.  Plain rationals are the special case with a single term
// at key (0,0,false) or no terms at all.  Terms are kept sorted by key with
// no zero coefficients, so formal identity is plain vector equality.
class Exponent {
 public:
  using Term = std::pair<ExpKey, Rational>;

  Exponent() = default;

  Exponent(const Rational& r) {  // NOLINT: implicit by design, exponents embed Q
    if (r != 0) terms_.push_back({ExpKey{}, r});
  }
  Exponent(long v) : Exponent(Rational(v)) {}
  Exponent(int v) : Exponent(Rational(v)) {}

  static Exponent alpha(int m = 1, const Rational& coeff = Rational(1)) {
    return single(ExpKey{m, 0, false}, coeff);
  }
  static Exponent beta(int n = 1, const Rational& coeff = Rational(1)) {
    return single(ExpKey{0, n, false}, coeff);
  }
  static Exponent class_symbol(const Rational& coeff = Rational(1)) {
    return single(ExpKey{0, 0, true}, coeff);
  }
  static Exponent from_terms(std::vector<Term> terms) {
    Exponent e;
    std::map<ExpKey, Rational> acc;
    for (auto& [k, c] : terms) acc[k] += c;
    for (auto& [k, c] : acc)
      if (c != 0) e.terms_.push_back({k, c});
    return e;
  }

  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }

  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first == ExpKey{});
  }

  Rational rational_value() const {
    require(is_rational(), Errc::invalid_argument,
            "exponent " + to_string() + " is not a plain rational");
    return terms_.empty() ? Rational(0) : terms_[0].second;
  }

  bool has_class_symbol() const {
    for (const auto& [k, c] : terms_)
      if (k.s) return true;
    return false;
  }

  friend Exponent operator+(const Exponent& a, const Exponent& b) {
    std::vector<Term> merged = a.terms_;
    merged.insert(merged.end(), b.terms_.begin(), b.terms_.end());
    return from_terms(std::move(merged));
  }

  Exponent operator-() const {
    Exponent e = *this;
    for (auto& [k, c] : e.terms_) c = -c;
    return e;
  }

  friend Exponent operator-(const Exponent& a, const Exponent& b) {
    return a + (-b);
  }

  // Scalar multiple k * e.
  Exponent scaled(const Rational& k) const {
    if (k == 0) return Exponent();
    Exponent e = *this;
    for (auto& [key, c] : e.terms_) c *= k;
    return e;
  }

  // Formal identity of canonical forms.  Semantic equality under a context is
  // exp_compare; the two agree on context-normalized exponents.
  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.terms_ == b.terms_;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      std::string part;
      bool has_sym = k.m != 0 || k.n != 0 || k.s;
      if (!has_sym || c != 1) {
        if (c == -1 && has_sym)
          part += "-";
        else
          part += format_rational(c);
      }
      auto add_sym = [&](const std::string& sym, int pow) {
        if (pow == 0) return;
        if (!part.empty() && part != "-") part += "*";
        part += sym;
        if (pow != 1) part += "^" + std::to_string(pow);
      };
      add_sym("a", k.m);
      add_sym("b", k.n);
      if (k.s) {
        if (!part.empty() && part != "-") part += "*";
        part += "s";
      }
      if (!first && part[0] != '-') out += "+";
      out += part;
      first = false;
    }
    return out;
  }

 private:
  static Exponent single(ExpKey k, const Rational& c) {
    Exponent e;
    if (c != 0) e.terms_.push_back({k, c});
    return e;
  }

  std::vector<Term> terms_;
};

// Group product of two exponents viewed as Laurent polynomials in alpha and
// beta.  The class symbol s may appear in at most one factor per term pair;
// s*s has no meaning here.
inline Exponent exp_mul(const Exponent& a, const Exponent& b) {
  std::vector<Exponent::Term> out;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      require(!(ka.s && kb.s), Errc::invalid_argument,
              "product would square the class symbol s");
      out.push_back({ExpKey{ka.m + kb.m, ka.n + kb.n, ka.s || kb.s}, ca * cb});
    }
  }
  return Exponent::from_terms(std::move(out));
}

// Folds powers of rational scales into the coefficients, so that exponents in
// a fully rational context collapse to plain rationals.
inline Exponent exp_normalize(const Exponent& e, const ScaleContext& ctx) {
  bool fold_a = ctx.alpha.is_rational();
  bool fold_b = ctx.has_beta() && ctx.beta->is_rational();
  if (!fold_a && !fold_b) return e;
  std::vector<Exponent::Term> out;
  for (const auto& [k, c] : e.terms()) {
    ExpKey nk = k;
    Rational nc = c;
    if (fold_a && k.m != 0) {
      nc *= rational_pow(ctx.alpha.value(), k.m);
      nk.m = 0;
    }
    if (k.n != 0) {
      require(ctx.has_beta(), Errc::invalid_argument,
              "exponent uses beta but the context has none");
      if (fold_b) {
        nc *= rational_pow(ctx.beta->value(), k.n);
        nk.n = 0;
      }
    }
    out.push_back({nk, nc});
  }
  return Exponent::from_terms(std::move(out));
}

// Multiplies by alpha^da * beta^db, folding rational scale values into the
// coefficients so rational contexts stay on plain rationals.
inline Exponent exp_base_shift(const Exponent& e, const ScaleContext& ctx,
                               long da, long db) {
  require(db == 0 || ctx.has_beta(), Errc::invalid_argument,
          "beta shift requested but the context has no beta");
  std::vector<Exponent::Term> out;
  for (const auto& [k, c] : e.terms()) {
    ExpKey nk = k;
    Rational nc = c;
    if (da != 0) {
      if (ctx.alpha.is_rational())
        nc *= rational_pow(ctx.alpha.value(), da);
      else
        nk.m = static_cast<int>(nk.m + da);
    }
    if (db != 0) {
      if (ctx.beta->is_rational())
        nc *= rational_pow(ctx.beta->value(), db);
      else
        nk.n = static_cast<int>(nk.n + db);
    }
    out.push_back({nk, nc});
  }
  return Exponent::from_terms(std::move(out));
}

// Rational enclosure of an exponent's real value at a refinement level.
// Exponents carrying the class symbol have no numeric value.
inline Interval exp_interval(const Exponent& e, const ScaleContext& ctx, int level) {
  Interval acc = iv_point(Rational(0));
  Interval ia = ctx.alpha.approx(level);
  Interval ib = ctx.has_beta() ? ctx.beta->approx(level) : iv_point(Rational(1));
  for (const auto& [k, c] : e.terms()) {
    require(!k.s, Errc::invalid_argument,
            "exponent " + e.to_string() + " has no numeric value: contains s");
    require(k.n == 0 || ctx.has_beta(), Errc::invalid_argument,
            "exponent uses beta but the context has none");
    Interval t = iv_point(Rational(1));
    if (k.m != 0) t = iv_mul(t, iv_pow(ia, k.m));
    if (k.n != 0) t = iv_mul(t, iv_pow(ib, k.n));
    acc = iv_add(acc, iv_scale(t, c));
  }
  return acc;
}

enum class Ordering { less, equal, greater };

// Total order on exponent values.  Rational differences are decided exactly;
// symbolic differences by interval refinement.  Formally identical operands
// compare equal without any numeric work, which is what makes equality checks
// safe even when the symbolic value could not be separated from a rational.
inline Ordering exp_compare(const Exponent& a, const Exponent& b,
                            const ScaleContext& ctx) {
  Exponent d = exp_normalize(a - b, ctx);
  if (d.is_zero()) return Ordering::equal;
  if (d.is_rational())
    return d.rational_value() < 0 ? Ordering::less : Ordering::greater;
  require(!d.has_class_symbol(), Errc::refinement_exhausted,
          "cannot order exponents whose difference contains the class symbol s");
  for (int level = 0; level <= ctx.refinement_cap; ++level) {
    Interval iv = exp_interval(d, ctx, level);
    if (iv.lo > 0) return Ordering::greater;
    if (iv.hi < 0) return Ordering::less;
    bool can_refine = ctx.alpha.refinable() || (ctx.has_beta() && ctx.beta->refinable());
    if (!can_refine) break;
  }
  fail(Errc::refinement_exhausted,
       "intervals never separated " + a.to_string() + " from " + b.to_string() +
           " within the refinement cap; the scales may be algebraically dependent");
}

inline bool exp_less(const Exponent& a, const Exponent& b, const ScaleContext& ctx) {
  return exp_compare(a, b, ctx) == Ordering::less;
}

inline bool exp_eq(const Exponent& a, const Exponent& b, const ScaleContext& ctx) {
  return exp_compare(a, b, ctx) == Ordering::equal;
}

// Strict-weak-ordering functor for ordered containers keyed by exponent value.
struct ExpLess {
  const ScaleContext* ctx;

  explicit ExpLess(const ScaleContext& c) : ctx(&c) {}
  bool operator()(const Exponent& a, const Exponent& b) const {
    return exp_less(a, b, *ctx);
  }
};

// Context-free structural order: by term vectors.  Used only for deterministic
// serialization, never for value comparisons.
struct ExpFormalLess {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t n = std::min(ta.size(), tb.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (ta[i].first != tb[i].first) return ta[i].first < tb[i].first;
      if (ta[i].second != tb[i].second) return ta[i].second < tb[i].second;
    }
    return ta.size() < tb.size();
  }
};

}  // namespace mahler
