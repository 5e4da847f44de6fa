#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mahler/equation.hpp"
#include "mahler/errors.hpp"
#include "mahler/hahn_series.hpp"
#include "mahler/linalg.hpp"
#include "mahler/span.hpp"

namespace mahler {

// Searches for a homogeneous equation sum_i P_i(x) f(x^(base^i)) = 0 with
// polynomial coefficients of degree at most deg_max and order at most d_max,
// given a truncated series.  Every exponent below the trusted window
// theta* = min_i base^i * cutoff yields one linear condition on the unknown
// coefficients; a kernel vector of the resulting exact rational system is a
// candidate, kept only if check_equation confirms it on the input.  The
// margin is the required excess of conditions over unknowns, the insurance
// against reading patterns into a window that is too short.
inline std::optional<MahlerEquation> guess_equation(const HahnSeries& f,
                                                    const Rational& base, long d_max,
                                                    long deg_max, long margin = 8) {
  require(!f.empty(), Errc::zero_series,
          "the zero series satisfies everything; guessing needs a nonzero input");
  require(f.cutoff().has_value(), Errc::invalid_argument,
          "guessing reads a truncated window; an exact input has none");
  require(d_max >= 1 && deg_max >= 0 && margin >= 0, Errc::invalid_argument,
          "guessing needs d_max >= 1, deg_max >= 0, margin >= 0");
  ScaleContext ctx = ScaleContext::rational(base);
  require(f.cutoff()->is_rational(), Errc::invalid_argument,
          "guessing needs a rational cutoff");
  for (const auto& [e, c] : f.terms()) {
    (void)c;
    require(e.is_rational(), Errc::invalid_argument,
            "guessing needs rational support; " + e.to_string() + " is not");
  }

  Rational theta = f.cutoff()->rational_value();
  Rational theta_star = theta;
  for (long i = 1; i <= d_max; ++i)
    theta_star = std::min(theta_star, rational_pow(base, i) * theta);

  // unknown (i, k) multiplies x^k * f(x^(base^i))
  long per = deg_max + 1;
  std::size_t unknowns = static_cast<std::size_t>((d_max + 1) * per);
  std::map<Rational, std::size_t> row_of;
  std::vector<std::vector<Rational>> cols(unknowns);
  for (long i = 0; i <= d_max; ++i) {
    Rational gi = rational_pow(base, i);
    for (long k = 0; k <= deg_max; ++k) {
      auto& col = cols[static_cast<std::size_t>(i * per + k)];
      for (const auto& [e, c] : f.terms()) {
        Rational pos = gi * e.rational_value() + k;
        if (!(pos < theta_star)) continue;
        auto [it, fresh] = row_of.insert({pos, row_of.size()});
        if (it->second >= col.size()) col.resize(it->second + 1, Rational(0));
        col[it->second] += c;
      }
    }
  }
  std::size_t rows = row_of.size();
  require(rows >= unknowns + static_cast<std::size_t>(margin), Errc::window_too_small,
          "only " + std::to_string(rows) + " conditions for " +
              std::to_string(unknowns) + " unknowns; extend the series or shrink the bounds");

  std::vector<std::vector<Rational>> m(unknowns);
  for (std::size_t u = 0; u < unknowns; ++u) {
    m[u] = std::move(cols[u]);
    m[u].resize(rows, Rational(0));
  }
  auto kernel = rational_left_kernel(m);
  if (kernel.empty()) return std::nullopt;

  struct Candidate {
    std::vector<HahnSeries> coeffs;
    long order;
    Rational total_degree;
  };
  std::vector<Candidate> cands;
  for (const auto& v : kernel) {
    std::vector<HahnSeries> ps;
    for (long i = 0; i <= d_max; ++i) {
      std::vector<HahnSeries::Term> terms;
      for (long k = 0; k <= deg_max; ++k) {
        const Rational& cell = v[static_cast<std::size_t>(i * per + k)];
        if (cell == 0) continue;
        terms.push_back({Exponent(Rational(k)), cell});
      }
      ps.push_back(HahnSeries::from_terms(std::move(terms), std::nullopt, ctx));
    }
    while (ps.size() > 1 && ps.back().empty()) ps.pop_back();
    if (ps.size() < 2 || ps.back().empty()) continue;
    if (ps.back().terms().back().second < 0)
      for (auto& p : ps) p = series_neg(p, ctx);
    Candidate c{std::move(ps), 0, Rational(0)};
    c.order = static_cast<long>(c.coeffs.size()) - 1;
    for (const auto& p : c.coeffs)
      if (!p.empty()) c.total_degree += poly_degree(p);
    cands.push_back(std::move(c));
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.order != y.order) return x.order < y.order;
    if (x.total_degree != y.total_degree) return x.total_degree < y.total_degree;
    for (std::size_t k = 0; k < std::min(x.coeffs.size(), y.coeffs.size()); ++k) {
      int c = detail::cmp_poly(x.coeffs[k], y.coeffs[k]);
      if (c != 0) return c < 0;
    }
    return false;
  });

  for (auto& c : cands) {
    MahlerEquation eq(ctx, {1, 0}, c.coeffs, HahnSeries::zero());
    if (check_equation(f, eq).kind == VerdictKind::verified) return eq;
  }
  return std::nullopt;
}

}  // namespace mahler
