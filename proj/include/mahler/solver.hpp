#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mahler/equation.hpp"
#include "mahler/errors.hpp"
#include "mahler/hahn_series.hpp"

namespace mahler {

// A position in exponent space where the equation forces a nonzero sum that
// no coefficient of F below the cutoff can cancel.  This is the constructive
// form of "no solution with this prefix exists".
struct Obstruction {
  Exponent at;
  Rational residual;
  std::string detail;
};

using SolveResult = std::variant<HahnSeries, Obstruction>;

// Extends a prescribed prefix to the unique series solution of a homogeneous
// equation below the cutoff, position by position.
//
// Writing g for the base, a coefficient f_e of F feeds the residual at the
// positions g^i * e + k for every term x^k of P_i.  The smallest such
// position m(e) is where f_e first matters.  The solver walks positions in
// increasing order; at each position the accumulated contribution of known
// coefficients must be cancelled by exactly one not-yet-determined f_e whose
// first position lands there.  No candidate means the position is obstructed
// and an Obstruction certificate is returned.  Determining a coefficient
// strictly inside the prescribed prefix region means the prefix itself lied
// about being complete, a SeedInconsistent error.  Two candidates or a
// vanishing multiplier is a tie, an error rather than a silent choice.
// Positions never reached by any seed's orbit keep coefficient zero, the
// minimal-support reading of "determined by its prefix".
//
// Solution support may accumulate below the cutoff (the walk then visits
// infinitely many positions under a finite bound), so the walk carries a step
// budget; exceeding it raises StepLimit instead of looping forever.
inline SolveResult solve_equation(const MahlerEquation& eq,
                                  const std::vector<HahnSeries::Term>& seeds,
                                  const Exponent& cutoff, long max_steps = 10000) {
  require(eq.homogeneous(), Errc::not_homogeneous,
          "solving needs a homogeneous equation; homogenize first");
  require(!eq.coeffs().front().empty(), Errc::invalid_argument,
          "P_0 is zero; apply leading normalization first");
  require(eq.base_above_one(), Errc::base_not_above_one,
          "solving needs base above 1; invert the base first");
  require(max_steps > 0, Errc::invalid_argument, "step budget must be positive");

  const ScaleContext& ctx = eq.context();
  auto less = [&](const Exponent& a, const Exponent& b) { return exp_less(a, b, ctx); };

  std::vector<long> slots;
  for (long i = 0; i <= eq.degree(); ++i)
    if (!eq.coeffs()[static_cast<std::size_t>(i)].empty()) slots.push_back(i);

  std::vector<Exponent> g_pow;  // g^i for each slot, indexed like slots
  std::vector<Exponent> c_val;  // v(P_i)
  for (long i : slots) {
    g_pow.push_back(eq.base_exponent(i));
    c_val.push_back(Exponent(poly_trailing_exponent(eq.coeffs()[static_cast<std::size_t>(i)])));
  }

  // Positions at or beyond this bound may involve coefficients of F at or
  // beyond the cutoff, so nothing there can be asserted.
  std::optional<Exponent> pos_bound;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    Exponent b = exp_mul(g_pow[s], cutoff) + c_val[s];
    if (!pos_bound || less(b, *pos_bound)) pos_bound = b;
  }

  std::map<Exponent, Rational, ExpLess> known{ExpLess(ctx)};
  std::map<Exponent, Rational, ExpLess> queue{ExpLess(ctx)};

  auto first_position = [&](const Exponent& e) {
    std::optional<Exponent> m;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      Exponent p = exp_mul(g_pow[s], e) + c_val[s];
      if (!m || less(p, *m)) m = p;
    }
    return *m;
  };

  // Pushes every residual contribution of a determined coefficient, skipping
  // positions at or before after_pos (those are being resolved right now).
  auto push = [&](const Exponent& e, const Rational& f,
                  const std::optional<Exponent>& after_pos) {
    for (std::size_t s = 0; s < slots.size(); ++s) {
      Exponent base = exp_mul(g_pow[s], e);
      for (const auto& [k, pk] : eq.coeffs()[static_cast<std::size_t>(slots[s])].terms()) {
        Exponent pos = base + k;
        if (!less(pos, *pos_bound)) continue;
        if (after_pos && !less(*after_pos, pos)) continue;
        queue[pos] += f * pk;
      }
    }
  };

  std::optional<Exponent> max_seed;
  for (const auto& [e, c] : seeds) {
    if (c == 0) continue;
    require(less(e, cutoff), Errc::invalid_argument,
            "seed at " + e.to_string() + " is not below the cutoff");
    auto [it, fresh] = known.insert({e, c});
    require(fresh, Errc::invalid_argument, "duplicate seed at " + e.to_string());
    if (!max_seed || less(*max_seed, e)) max_seed = e;
  }
  if (known.empty()) return HahnSeries::zero_below(cutoff);
  for (const auto& [e, c] : known) push(e, c, std::nullopt);

  long steps = 0;
  while (!queue.empty()) {
    if (++steps > max_steps)
      fail(Errc::step_limit,
           "no progress after " + std::to_string(max_steps) +
               " positions; the solution support accumulates below the cutoff");
    auto it = queue.begin();
    Exponent eps = it->first;
    Rational total = it->second;
    queue.erase(it);

    std::vector<Exponent> cands;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      Exponent e = exp_base_shift(eps - c_val[s], ctx, -slots[s] * eq.base_pow().first,
                                  -slots[s] * eq.base_pow().second);
      if (known.count(e)) continue;
      bool seen = false;
      for (const auto& c : cands)
        if (exp_eq(c, e, ctx)) seen = true;
      if (seen) continue;
      if (exp_eq(first_position(e), eps, ctx)) cands.push_back(e);
    }

    if (cands.size() > 1)
      fail(Errc::solver_tie, "two coefficients first appear at position " +
                                 eps.to_string() + "; the step is not determined");
    if (total == 0) continue;  // lone candidate, if any, is forced to zero
    if (cands.empty())
      return Obstruction{eps, total,
                         "forced sum " + format_rational(total) + " at position " +
                             eps.to_string() +
                             " has no coefficient left to cancel it"};

    const Exponent& e = cands.front();
    Rational mult = 0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      Exponent base = exp_mul(g_pow[s], e);
      for (const auto& [k, pk] : eq.coeffs()[static_cast<std::size_t>(slots[s])].terms())
        if (exp_eq(base + k, eps, ctx)) mult += pk;
    }
    if (mult == 0)
      fail(Errc::solver_tie, "multiplier of the coefficient at " + e.to_string() +
                                 " vanishes at position " + eps.to_string());

    if (max_seed && less(e, *max_seed))
      fail(Errc::seed_inconsistent,
           "equation forces a nonzero coefficient at " + e.to_string() +
               ", inside the prescribed prefix region");

    Rational f = -total / mult;
    known.insert({e, f});
    push(e, f, eps);
  }

  std::vector<HahnSeries::Term> terms(known.begin(), known.end());
  return HahnSeries::from_terms(std::move(terms), cutoff, ctx);
}

}  // namespace mahler
