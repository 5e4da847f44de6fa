#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "mahler/errors.hpp"
#include "mahler/rational.hpp"

namespace mahler {

// Closed interval with exact rational endpoints.
struct Interval {
  Rational lo;
  Rational hi;

  bool contains(const Rational& r) const { return lo <= r && r <= hi; }
  Rational width() const { return hi - lo; }
};

inline Interval iv_point(const Rational& r) { return {r, r}; }

inline Interval iv_add(const Interval& a, const Interval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

inline Interval iv_neg(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval iv_scale(const Interval& a, const Rational& c) {
  if (c >= 0) return {a.lo * c, a.hi * c};
  return {a.hi * c, a.lo * c};
}

// Sign-agnostic product: min/max of the four endpoint products.
inline Interval iv_mul(const Interval& a, const Interval& b) {
  Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {std::min(std::min(p1, p2), std::min(p3, p4)),
          std::max(std::max(p1, p2), std::max(p3, p4))};
}

// a^e for integer e; negative powers require 0 < a.lo.
inline Interval iv_pow(const Interval& a, long e) {
  if (e == 0) return iv_point(Rational(1));
  Interval base = a;
  long k = e;
  if (k < 0) {
    require(a.lo > 0, Errc::invalid_argument,
            "interval power: negative exponent needs a positive interval");
    base = {1 / a.hi, 1 / a.lo};
    k = -k;
  }
  Interval acc = iv_point(Rational(1));
  while (k > 0) {
    if (k & 1) acc = iv_mul(acc, base);
    base = iv_mul(base, base);
    k >>= 1;
  }
  return acc;
}

inline Interval iv_intersect(const Interval& a, const Interval& b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  require(r.lo <= r.hi, Errc::invalid_argument, "empty interval intersection");
  return r;
}

// A multiplicative base for functional equations: either an exact positive
// rational != 1, or a named symbolic real known only through a shrinking
// chain of rational enclosures.
class Scale {
 public:
  // refiner(level) returns an enclosure; level 0 is the declared interval and
  // successive levels must narrow.
  using Refiner = std::function<Interval(int)>;

  static Scale rational(const Rational& v) {
    require(v > 0, Errc::invalid_argument, "scale must be positive");
    require(v != 1, Errc::invalid_argument, "scale 1 makes the substitution trivial");
    Scale s;
    s.value_ = v;
    s.base_ = iv_point(v);
    return s;
  }

  static Scale symbolic(std::string name, Interval approx, Refiner refiner = nullptr) {
    require(approx.lo > 0, Errc::invalid_argument, "scale enclosure must be positive");
    require(approx.lo < approx.hi, Errc::invalid_argument, "scale enclosure must have width");
    require(!(approx.lo <= 1 && 1 <= approx.hi) || refiner != nullptr,
            Errc::invalid_argument,
            "enclosure containing 1 needs a refiner to be usable");
    Scale s;
    s.name_ = std::move(name);
    s.base_ = approx;
    s.refiner_ = std::move(refiner);
    return s;
  }

  // sqrt(r) for r > 0 not a perfect square, enclosed by floor-sqrt intervals
  // of width 1/(den(r) * 2^level).
  static Scale symbolic_sqrt(std::string name, const Rational& r) {
    require(r > 0, Errc::invalid_argument, "sqrt scale needs a positive radicand");
    Int n = num(r), d = den(r);
    {
      Int prod = n * d;
      Int s = sqrt(prod);
      require(s * s != prod, Errc::invalid_argument,
              "radicand is a perfect square; declare the scale rational");
    }
    Refiner ref = [n, d](int level) -> Interval {
      // floor(2^level * sqrt(n*d)) brackets sqrt(n/d) after dividing by d*2^level.
      Int shifted = (n * d) << (2 * level);
      Int scaled = sqrt(shifted);
      Rational denom = Rational(d) * rational_pow(Rational(2), level);
      return {Rational(scaled) / denom, Rational(scaled + 1) / denom};
    };
    Interval base = ref(4);
    Scale s = symbolic(std::move(name), base, std::move(ref));
    s.sqrt_ = r;
    return s;
  }

  bool is_rational() const { return value_.has_value(); }
  bool refinable() const { return static_cast<bool>(refiner_); }

  const Rational& value() const {
    require(is_rational(), Errc::symbolic_base_unsupported,
            "exact value of a symbolic scale requested");
    return *value_;
  }

  const std::string& name() const { return name_; }

  // Radicand when the scale was declared as a square root, letting a
  // serialized scale rebuild the same refiner instead of freezing its
  // current enclosure.
  const std::optional<Rational>& sqrt_radicand() const { return sqrt_; }

  // Enclosure at the given refinement level; level 0 is the declared interval.
  // The refiner output is clipped to the declared interval, so enclosures are
  // monotone in the declared one even for sloppy refiners.
  Interval approx(int level) const {
    if (level <= 0 || !refiner_) return base_;
    return iv_intersect(refiner_(level), base_);
  }

 private:
  Scale() : base_{Rational(0), Rational(0)} {}

  std::optional<Rational> value_;
  std::string name_;
  Interval base_;
  Refiner refiner_;
  std::optional<Rational> sqrt_;
};

// Ambient data every exponent comparison needs: the base alpha, an optional
// second base beta, whether the pair was asserted algebraically independent,
// and how far interval refinement may go before giving up.
struct ScaleContext {
  Scale alpha;
  std::optional<Scale> beta;
  bool independent = false;
  int refinement_cap = 64;

  explicit ScaleContext(Scale a) : alpha(std::move(a)) {}
  ScaleContext(Scale a, Scale b, bool indep = false)
      : alpha(std::move(a)), beta(std::move(b)), independent(indep) {}

  static ScaleContext rational(const Rational& a) {
    return ScaleContext(Scale::rational(a));
  }
  static ScaleContext rational(const Rational& a, const Rational& b) {
    return ScaleContext(Scale::rational(a), Scale::rational(b));
  }

  bool has_beta() const { return beta.has_value(); }
  bool all_rational() const {
    return alpha.is_rational() && (!beta || beta->is_rational());
  }
};

}  // namespace mahler
