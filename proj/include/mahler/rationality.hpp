#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mahler/equation.hpp"
#include "mahler/errors.hpp"
#include "mahler/frac_poly.hpp"
#include "mahler/hahn_series.hpp"
#include "mahler/linalg.hpp"
#include "mahler/span.hpp"

namespace mahler {

// Witness that a truncated series agrees with U/V below theta, normalized to
// V(0) = 1 so the expansion of U/V at the origin is well defined.
struct RationalCertificate {
  HahnSeries numerator;
  HahnSeries denominator;
  Exponent theta;
};

// Searches for polynomials U, V of degree at most deg_max with V * f = U
// below the cutoff.  Each integer exponent under the cutoff contributes one
// exact rational condition; margin is the required excess of conditions over
// the 2 * (deg_max + 1) unknowns.  A returned certificate is re-verified on
// the input, never trusted from the elimination alone.
inline std::optional<RationalCertificate> certify_rational(const HahnSeries& f,
                                                           long deg_max,
                                                           const ScaleContext& ctx,
                                                           long margin = 8) {
  require(deg_max >= 0 && margin >= 0, Errc::invalid_argument,
          "certification needs deg_max >= 0 and margin >= 0");
  require(f.cutoff().has_value(), Errc::invalid_argument,
          "certification reads a truncated window; an exact input has none");
  require(f.cutoff()->is_rational(), Errc::invalid_argument,
          "certification needs a rational cutoff");
  std::map<long, Rational> coeff;
  for (const auto& [e, c] : f.terms()) {
    require(e.is_rational(), Errc::invalid_argument,
            "certification needs integer support; " + e.to_string() + " is not an integer");
    Rational r = e.rational_value();
    require(den(r) == 1 && r >= 0, Errc::invalid_argument,
            "certification needs nonnegative integer support; " + format_rational(r) +
                " is not");
    coeff[static_cast<long>(num(r))] = c;
  }

  Rational theta = f.cutoff()->rational_value();
  long rows = 0;
  while (Rational(rows) < theta) ++rows;  // rows = number of integers in [0, theta)
  long per = deg_max + 1;
  std::size_t unknowns = static_cast<std::size_t>(2 * per);
  require(rows >= static_cast<long>(unknowns) + margin, Errc::window_too_small,
          "only " + std::to_string(rows) + " conditions for " + std::to_string(unknowns) +
              " unknowns; extend the series or lower deg_max");

  // unknown order: v_0..v_D, then u_0..u_D; condition at exponent e reads
  // sum_k v_k f_(e-k) - u_e = 0
  std::vector<std::vector<Rational>> m(unknowns,
                                       std::vector<Rational>(static_cast<std::size_t>(rows),
                                                             Rational(0)));
  for (long k = 0; k <= deg_max; ++k) {
    for (long e = k; e < rows; ++e) {
      auto it = coeff.find(e - k);
      if (it != coeff.end()) m[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] = it->second;
    }
    if (k < rows) m[static_cast<std::size_t>(per + k)][static_cast<std::size_t>(k)] = Rational(-1);
  }
  auto kernel = rational_left_kernel(m);
  if (kernel.empty()) return std::nullopt;

  struct Candidate {
    HahnSeries v, u;
    Rational total_degree;
  };
  std::vector<Candidate> cands;
  for (const auto& vec : kernel) {
    std::vector<HahnSeries::Term> vt, ut;
    for (long k = 0; k <= deg_max; ++k) {
      const Rational& cv = vec[static_cast<std::size_t>(k)];
      const Rational& cu = vec[static_cast<std::size_t>(per + k)];
      if (cv != 0) vt.push_back({Exponent(k), cv});
      if (cu != 0) ut.push_back({Exponent(k), cu});
    }
    Candidate c{HahnSeries::from_terms(std::move(vt), std::nullopt, ctx),
                HahnSeries::from_terms(std::move(ut), std::nullopt, ctx), Rational(0)};
    if (c.v.empty()) continue;
    c.total_degree = poly_degree(c.v) + (c.u.empty() ? Rational(0) : poly_degree(c.u));
    cands.push_back(std::move(c));
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.total_degree != y.total_degree) return x.total_degree < y.total_degree;
    int c = detail::cmp_poly(x.v, y.v);
    if (c != 0) return c < 0;
    return detail::cmp_poly(x.u, y.u) < 0;
  });

  for (auto& c : cands) {
    HahnSeries v = c.v, u = c.u;
    if (u.empty()) {
      v = poly_one(ctx);
    } else {
      HahnSeries g = poly_gcd(v, u, ctx);
      if (!detail::poly_is_one(g)) {
        v = poly_exact_divide(v, g, ctx);
        u = poly_exact_divide(u, g, ctx);
      }
    }
    if (!v.terms().front().first.is_zero()) continue;  // V(0) = 0 cannot be normalized
    Rational v0 = v.terms().front().second;
    if (v0 != 1) {
      v = series_scalar_mul(v, 1 / v0, ctx);
      u = series_scalar_mul(u, 1 / v0, ctx);
    }
    HahnSeries residual = series_sub(series_mul(v, f, ctx), u, ctx);
    if (!residual.empty()) continue;
    return RationalCertificate{std::move(u), std::move(v), *f.cutoff()};
  }
  return std::nullopt;
}

// Undoes x -> x^(q^d): every exponent must be an integer multiple of q^d and
// gets divided through, cutoff included, so substituting back reproduces the
// input exactly.
inline HahnSeries extract_inner_series(const HahnSeries& f, long q, long d,
                                       const ScaleContext& ctx) {
  require(q >= 2, Errc::invalid_argument, "inner extraction needs q >= 2");
  require(d >= 1, Errc::invalid_argument, "inner extraction needs d >= 1");
  Int modulus = 1;
  for (long i = 0; i < d; ++i) modulus *= q;
  std::vector<HahnSeries::Term> terms;
  for (const auto& [e, c] : f.terms()) {
    require(e.is_rational(), Errc::invalid_argument,
            "inner extraction needs integer support; " + e.to_string() + " is not an integer");
    Rational r = e.rational_value();
    require(den(r) == 1, Errc::invalid_argument,
            "inner extraction needs integer support; " + format_rational(r) +
                " is not an integer");
    require(num(r) % modulus == 0, Errc::support_not_divisible,
            "exponent " + format_rational(r) + " is not divisible by " +
                std::to_string(q) + "^" + std::to_string(d));
    terms.push_back({Exponent(r / modulus), c});
  }
  std::optional<Exponent> theta;
  if (f.cutoff()) theta = f.cutoff()->scaled(Rational(1) / modulus);
  return HahnSeries::from_terms(std::move(terms), std::move(theta), ctx);
}

// Smallest pair (n, m) != (0, 0) with |n|, |m| <= bound killing the p-adic
// valuation of alpha^n beta^m.  Ordered by |n| + |m|, sign-normalized so the
// first nonzero component is positive, then lexicographic; nullopt means the
// bound was too small.
inline std::optional<std::pair<long, long>> padic_witness(const Rational& alpha,
                                                          const Rational& beta,
                                                          const Int& p, long bound) {
  require(alpha > 0 && beta > 0, Errc::invalid_argument, "bases must be positive");
  require(is_prime(p), Errc::invalid_argument,
          "p-adic witness needs a prime; got " + p.str());
  require(bound >= 0, Errc::invalid_argument, "negative witness bound");
  long va = ell_adic_valuation(alpha, p);
  long vb = ell_adic_valuation(beta, p);
  for (long s = 1; s <= 2 * bound; ++s)
    for (long n = 0; n <= std::min(s, bound); ++n) {
      long am = s - n;
      if (am > bound) continue;
      std::vector<long> ms = am == 0 ? std::vector<long>{0} : std::vector<long>{-am, am};
      for (long m : ms) {
        if (n == 0 && m <= 0) continue;  // sign normalization, and (0, 0) excluded
        if (n * va + m * vb == 0) return std::pair<long, long>{n, m};
      }
    }
  return std::nullopt;
}

// Keeps the exponents lying in Z[g, 1/g] for every g = alpha^n beta^m over
// the supplied pairs.  Membership of a rational in Z[p/q, q/p] = Z[1/(pq)]
// means its denominator has no prime factor outside pq.
inline std::vector<Exponent> lattice_intersection_filter(
    const std::vector<Exponent>& support, const std::vector<std::pair<long, long>>& pairs,
    const Rational& alpha, const Rational& beta) {
  require(alpha > 0 && beta > 0, Errc::invalid_argument, "bases must be positive");
  std::vector<Int> radicals;
  for (const auto& [n, m] : pairs) {
    Rational g = rational_pow(alpha, n) * rational_pow(beta, m);
    radicals.push_back(num(g) * den(g));
  }
  std::vector<Exponent> out;
  for (const Exponent& e : support) {
    require(e.is_rational(), Errc::undecidable_membership,
            "membership of " + e.to_string() + " in an integer lattice ring is undecidable");
    Int d = den(e.rational_value());
    bool keep = true;
    for (const Int& rad : radicals)
      if (strip_factors(d, rad) != 1) {
        keep = false;
        break;
      }
    if (keep) out.push_back(e);
  }
  return out;
}

// Record of why no single valuation can satisfy two equations with
// independent symbolic bases: every candidate must balance two slots of each
// equation, and the listed index pairs are the ones available.
struct ValuationObstruction {
  std::string base_a;
  std::string base_b;
  std::vector<std::pair<long, long>> pairs_a;
  std::vector<std::pair<long, long>> pairs_b;
  std::string detail;
};

using JointValuation = std::variant<std::vector<Exponent>, ValuationObstruction>;

namespace detail {

struct SlotData {
  std::vector<std::pair<long, long>> pairs;
  bool zero_admissible = false;
};

inline SlotData slot_pairs(const MahlerEquation& eq) {
  std::vector<long> idx;
  for (long i = 0; i <= eq.degree(); ++i)
    if (!eq.coeffs()[static_cast<std::size_t>(i)].empty()) idx.push_back(i);
  require(idx.size() >= 2, Errc::degenerate_equation,
          "need at least two nonzero coefficients");
  SlotData out;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      out.pairs.push_back({idx[a], idx[b]});
      Rational ca = poly_trailing_exponent(eq.coeffs()[static_cast<std::size_t>(idx[a])]);
      Rational cb = poly_trailing_exponent(eq.coeffs()[static_cast<std::size_t>(idx[b])]);
      if (ca == cb) out.zero_admissible = true;
    }
  return out;
}

}  // namespace detail

// A common solution of two homogeneous equations with algebraically
// independent symbolic bases must balance the lowest-order terms of both, so
// (a^l1 - a^l2) v and (b^k1 - b^k2) v are integers for some slot pairs.  In
// the graded exponent group either quantity evaluates to 0 under a -> 1
// (respectively b -> 1), so both integers vanish and v = 0 is the only
// candidate, available exactly when each equation has two slots with equal
// coefficient valuation.  The verdict assumes the declared bases are
// algebraically independent reals.
inline JointValuation joint_valuation_consistency(const MahlerEquation& eqA,
                                                  const MahlerEquation& eqB) {
  require(eqA.homogeneous() && eqB.homogeneous(), Errc::not_homogeneous,
          "the joint valuation argument needs homogeneous equations");
  require(!eqA.base_rational() && !eqB.base_rational(), Errc::symbolic_only,
          "rational bases go through the lattice pipeline, not the joint obstruction");
  std::string na = eqA.context().alpha.name();
  std::string nb = eqB.context().alpha.name();
  require(na != nb, Errc::invalid_argument,
          "both equations use the base " + na + "; independence needs distinct reals");

  detail::SlotData sa = detail::slot_pairs(eqA);
  detail::SlotData sb = detail::slot_pairs(eqB);
  if (sa.zero_admissible && sb.zero_admissible)
    return std::vector<Exponent>{Exponent(Rational(0))};

  ValuationObstruction ob;
  ob.base_a = na;
  ob.base_b = nb;
  ob.pairs_a = sa.pairs;
  ob.pairs_b = sb.pairs;
  std::string missing = !sa.zero_admissible && !sb.zero_admissible
                            ? "either equation"
                            : (!sa.zero_admissible ? "the base-" + na + " equation"
                                                   : "the base-" + nb + " equation");
  ob.detail = "a nonzero common solution needs (" + na + "^l1 - " + na +
              "^l2) v and (" + nb + "^k1 - " + nb +
              "^k2) v integral for some listed pairs, which forces v = 0; no slot pair of " +
              missing + " has equal coefficient valuations, so v = 0 is excluded too";
  return ob;
}

}  // namespace mahler
