#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mahler/errors.hpp"
#include "mahler/frac_poly.hpp"
#include "mahler/hahn_series.hpp"

namespace mahler {

inline HahnSeries poly_one(const ScaleContext& ctx) {
  return HahnSeries::from_terms({{Exponent(Rational(0)), Rational(1)}}, std::nullopt, ctx);
}

inline HahnSeries poly_constant(const Rational& c, const ScaleContext& ctx) {
  if (c == 0) return HahnSeries::zero();
  return HahnSeries::from_terms({{Exponent(Rational(0)), c}}, std::nullopt, ctx);
}

namespace detail {

inline bool poly_is_one(const HahnSeries& p) {
  return p.terms().size() == 1 && p.terms()[0].first.is_zero() &&
         p.terms()[0].second == 1;
}

// Divides a whole row by the gcd of its entries and scales the rational
// content to 1 with the first nonzero entry's leading coefficient positive.
// Preserves the spanned direction; keeps elimination intermediates small.
inline void reduce_row(std::vector<HahnSeries>& row, const ScaleContext& ctx) {
  std::vector<HahnSeries> nz;
  for (const auto& p : row)
    if (!p.empty()) nz.push_back(p);
  if (nz.empty()) return;
  HahnSeries g = poly_gcd_many(nz, ctx);
  if (!poly_is_one(g))
    for (auto& p : row)
      if (!p.empty()) p = poly_exact_divide(p, g, ctx);

  Int cn = 0, cd = 1;
  for (const auto& p : row)
    for (const auto& [e, c] : p.terms()) {
      (void)e;
      cn = gcd(cn, num(c));
      cd = lcm(cd, den(c));
    }
  if (cn < 0) cn = -cn;
  Rational content(cn, cd);
  for (const auto& p : row)
    if (!p.empty()) {
      if (p.terms().back().second < 0) content = -content;
      break;
    }
  if (content != 1)
    for (auto& p : row) p = series_scalar_mul(p, 1 / content, ctx);
}

}  // namespace detail

// Left kernel of a polynomial matrix: all vectors v (up to scalar multiples)
// with sum_r v[r] * m[r] = 0 entrywise.  Elimination runs on [m | I] with
// cross-multiplication updates and per-row gcd stripping, so every step is
// exact without Bareiss bookkeeping; rows left without a pivot end up zero
// across m and their identity parts span the kernel.  Output rows are
// canonical: entrywise gcd 1, content 1, first nonzero entry positive-leading,
// ordered by original row index.
inline std::vector<std::vector<HahnSeries>> poly_left_kernel(
    const std::vector<std::vector<HahnSeries>>& m, const ScaleContext& ctx) {
  std::size_t rows = m.size();
  require(rows > 0, Errc::invalid_argument, "left kernel of an empty matrix");
  std::size_t cols = m[0].size();
  for (const auto& r : m)
    require(r.size() == cols, Errc::invalid_argument, "matrix rows have unequal lengths");

  std::vector<std::vector<HahnSeries>> work(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    work[i] = m[i];
    for (std::size_t j = 0; j < rows; ++j)
      work[i].push_back(i == j ? poly_one(ctx) : HahnSeries::zero());
  }

  std::vector<bool> used(rows, false);
  for (std::size_t col = 0; col < cols; ++col) {
    std::size_t pivot = rows;
    for (std::size_t i = 0; i < rows; ++i)
      if (!used[i] && !work[i][col].empty()) {
        pivot = i;
        break;
      }
    if (pivot == rows) continue;
    used[pivot] = true;
    for (std::size_t r = 0; r < rows; ++r) {
      if (used[r] || work[r][col].empty()) continue;
      HahnSeries pe = work[pivot][col];
      HahnSeries re = work[r][col];
      for (std::size_t k = 0; k < work[r].size(); ++k)
        work[r][k] = series_sub(series_mul(pe, work[r][k], ctx),
                                series_mul(re, work[pivot][k], ctx), ctx);
      detail::reduce_row(work[r], ctx);
    }
  }

  std::vector<std::vector<HahnSeries>> kernel;
  for (std::size_t i = 0; i < rows; ++i) {
    if (used[i]) continue;
    for (std::size_t col = 0; col < cols; ++col)
      require(work[i][col].empty(), Errc::invalid_argument,
              "elimination left a pivotless row with a nonzero entry");
    detail::reduce_row(work[i], ctx);
    kernel.push_back(
        std::vector<HahnSeries>(work[i].begin() + static_cast<long>(cols), work[i].end()));
  }
  return kernel;
}

namespace detail {

// Scales a rational vector to integer entries with content 1 and a positive
// first nonzero entry.
inline void reduce_rational_row(std::vector<Rational>& row) {
  Int cn = 0, cd = 1;
  for (const Rational& c : row) {
    if (c == 0) continue;
    cn = gcd(cn, num(c));
    cd = lcm(cd, den(c));
  }
  if (cn == 0) return;
  if (cn < 0) cn = -cn;
  Rational content(cn, cd);
  for (const Rational& c : row)
    if (c != 0) {
      if (c < 0) content = -content;
      break;
    }
  if (content != 1)
    for (Rational& c : row) c /= content;
}

}  // namespace detail

// Same contract as poly_left_kernel for a matrix of scalars.  Separate
// because guessing and certification build systems with thousands of columns,
// where plain rational row reduction is far cheaper than constant-polynomial
// arithmetic.
inline std::vector<std::vector<Rational>> rational_left_kernel(
    const std::vector<std::vector<Rational>>& m) {
  std::size_t rows = m.size();
  require(rows > 0, Errc::invalid_argument, "left kernel of an empty matrix");
  std::size_t cols = m[0].size();
  for (const auto& r : m)
    require(r.size() == cols, Errc::invalid_argument, "matrix rows have unequal lengths");

  std::vector<std::vector<Rational>> work(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    work[i] = m[i];
    for (std::size_t j = 0; j < rows; ++j)
      work[i].push_back(i == j ? Rational(1) : Rational(0));
  }

  std::vector<bool> used(rows, false);
  std::size_t remaining = rows;
  for (std::size_t col = 0; col < cols && remaining > 0; ++col) {
    std::size_t pivot = rows;
    for (std::size_t i = 0; i < rows; ++i)
      if (!used[i] && work[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot == rows) continue;
    used[pivot] = true;
    --remaining;
    for (std::size_t r = 0; r < rows; ++r) {
      if (used[r] || work[r][col] == 0) continue;
      Rational factor = work[r][col] / work[pivot][col];
      for (std::size_t k = col; k < work[r].size(); ++k)
        work[r][k] -= factor * work[pivot][k];
    }
  }

  std::vector<std::vector<Rational>> kernel;
  for (std::size_t i = 0; i < rows; ++i) {
    if (used[i]) continue;
    for (std::size_t col = 0; col < cols; ++col)
      require(work[i][col] == 0, Errc::invalid_argument,
              "elimination left a pivotless row with a nonzero entry");
    std::vector<Rational> v(work[i].begin() + static_cast<long>(cols), work[i].end());
    detail::reduce_rational_row(v);
    kernel.push_back(std::move(v));
  }
  return kernel;
}

}  // namespace mahler
