#include "test_util.hpp"

#include "mahler/rationality.hpp"

using namespace mahler;
using namespace mt;

namespace {

bool same_poly(const HahnSeries& x, const HahnSeries& y) {
  return x.terms() == y.terms();
}

HahnSeries geometric(const ScaleContext& ctx, long n) {
  std::vector<HahnSeries::Term> terms;
  for (long k = 0; k < n; ++k) terms.push_back({Exponent(k), Rational(1)});
  return HahnSeries::from_terms(std::move(terms), Exponent(n), ctx);
}

HahnSeries lacunary(const ScaleContext& ctx, long lo, long n) {
  std::vector<HahnSeries::Term> terms;
  for (long e = lo; e < n; e *= 2) terms.push_back({Exponent(e), Rational(1)});
  return HahnSeries::from_terms(std::move(terms), Exponent(n), ctx);
}

// Taylor expansion of u/v below n, for polynomial coefficient maps with
// v[0] = 1.
HahnSeries expand_fraction(const ScaleContext& ctx, const std::vector<Rational>& u,
                           const std::vector<Rational>& v, long n) {
  std::vector<Rational> f(static_cast<std::size_t>(n), Rational(0));
  for (long e = 0; e < n; ++e) {
    Rational acc = e < static_cast<long>(u.size()) ? u[static_cast<std::size_t>(e)]
                                                   : Rational(0);
    for (long k = 1; k < static_cast<long>(v.size()) && k <= e; ++k)
      acc -= v[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(e - k)];
    f[static_cast<std::size_t>(e)] = acc;
  }
  std::vector<HahnSeries::Term> terms;
  for (long e = 0; e < n; ++e)
    if (f[static_cast<std::size_t>(e)] != 0)
      terms.push_back({Exponent(e), f[static_cast<std::size_t>(e)]});
  return HahnSeries::from_terms(std::move(terms), Exponent(n), ctx);
}

HahnSeries from_coeffs(const ScaleContext& ctx, const std::vector<Rational>& c) {
  std::vector<HahnSeries::Term> terms;
  for (long e = 0; e < static_cast<long>(c.size()); ++e)
    if (c[static_cast<std::size_t>(e)] != 0)
      terms.push_back({Exponent(e), c[static_cast<std::size_t>(e)]});
  return HahnSeries::from_terms(std::move(terms), std::nullopt, ctx);
}

}  // namespace

TEST_CASE("certification recovers simple rational functions") {
  ScaleContext ctx = ctx_of("2");

  SECTION("geometric series") {
    auto cert = certify_rational(geometric(ctx, 64), 1, ctx);
    REQUIRE(cert.has_value());
    REQUIRE(same_poly(cert->numerator, series(ctx, {{"0", "1"}})));
    REQUIRE(same_poly(cert->denominator, series(ctx, {{"0", "1"}, {"1", "-1"}})));
    REQUIRE(cert->theta == Exponent(64));
  }

  SECTION("a fraction with nontrivial numerator and denominator") {
    // (1+x)/(1-x^3) = sum of x^(3n) + x^(3n+1)
    HahnSeries f = expand_fraction(ctx, {Rational(1), Rational(1)},
                                   {Rational(1), Rational(0), Rational(0), Rational(-1)},
                                   48);
    auto cert = certify_rational(f, 3, ctx);
    REQUIRE(cert.has_value());
    REQUIRE(same_poly(cert->numerator, series(ctx, {{"0", "1"}, {"1", "1"}})));
    REQUIRE(same_poly(cert->denominator, series(ctx, {{"0", "1"}, {"3", "-1"}})));
  }

  SECTION("the zero window certifies as 0/1") {
    auto cert = certify_rational(HahnSeries::zero_below(E(30)), 2, ctx);
    REQUIRE(cert.has_value());
    REQUIRE(cert->numerator.empty());
    REQUIRE(same_poly(cert->denominator, series(ctx, {{"0", "1"}})));
  }
}

TEST_CASE("certification rejects the lacunary series") {
  ScaleContext ctx = ctx_of("2");
  REQUIRE(!certify_rational(lacunary(ctx, 1, 4096), 20, ctx).has_value());
}

TEST_CASE("certification windows and inputs are validated") {
  ScaleContext ctx = ctx_of("2");

  SECTION("window too small") {
    require_error([&] { certify_rational(geometric(ctx, 8), 3, ctx); },
                  Errc::window_too_small);
  }

  SECTION("exact input") {
    require_error([&] { certify_rational(series(ctx, {{"0", "1"}}), 1, ctx); },
                  Errc::invalid_argument);
  }

  SECTION("fractional support") {
    require_error(
        [&] { certify_rational(series(ctx, {{"1/2", "1"}}, "40"), 1, ctx); },
        Errc::invalid_argument);
  }
}

TEST_CASE("planted rational functions are always certified") {
  ScaleContext ctx = ctx_of("2");
  Rng rng(411);
  for (int trial = 0; trial < 40; ++trial) {
    long du = rng.range(0, 4), dv = rng.range(0, 4);
    std::vector<Rational> u, v;
    for (long k = 0; k <= du; ++k) u.push_back(Rational(rng.range(-3, 3)));
    v.push_back(Rational(1));
    for (long k = 1; k <= dv; ++k) v.push_back(Rational(rng.range(-3, 3)));
    HahnSeries f = expand_fraction(ctx, u, v, 64);

    auto cert = certify_rational(f, 4, ctx);
    REQUIRE(cert.has_value());
    // same rational function: cross-multiplied polynomials agree
    HahnSeries lhs = series_mul(cert->numerator, from_coeffs(ctx, v), ctx);
    HahnSeries rhs = series_mul(cert->denominator, from_coeffs(ctx, u), ctx);
    REQUIRE(same_poly(lhs, rhs));
    // and the certificate really matches the window
    HahnSeries residual =
        series_sub(series_mul(cert->denominator, f, ctx), cert->numerator, ctx);
    REQUIRE(residual.empty());
  }
}

TEST_CASE("inner series extraction divides the support through") {
  ScaleContext ctx = ctx_of("2");

  SECTION("plain divisible support") {
    HahnSeries g = extract_inner_series(series(ctx, {{"2", "1"}, {"4", "1"}}), 2, 1, ctx);
    REQUIRE(same_poly(g, series(ctx, {{"1", "1"}, {"2", "1"}})));
    REQUIRE(g.is_exact());
  }

  SECTION("witness for a non-divisible exponent") {
    require_error([&] { extract_inner_series(series(ctx, {{"3", "1"}}), 2, 1, ctx); },
                  Errc::support_not_divisible);
  }

  SECTION("deep extraction with cutoff scaling and round trip") {
    HahnSeries f = lacunary(ctx, 8, 128);  // x^8 + x^16 + x^32 + x^64, exact below 128
    HahnSeries g = extract_inner_series(f, 2, 3, ctx);
    REQUIRE(same_poly(g, series(ctx, {{"1", "1"}, {"2", "1"}, {"4", "1"}, {"8", "1"}})));
    REQUIRE(g.cutoff() == Exponent(16));

    HahnSeries back = series_substitute(g, Exponent(8), ctx);
    REQUIRE(same_poly(back, f));
    REQUIRE(back.cutoff() == f.cutoff());
  }

  SECTION("fractional and non-integer support is rejected") {
    require_error([&] { extract_inner_series(series(ctx, {{"1/2", "1"}}), 2, 1, ctx); },
                  Errc::invalid_argument);
  }

  SECTION("q below 2 is rejected") {
    require_error([&] { extract_inner_series(series(ctx, {{"2", "1"}}), 1, 1, ctx); },
                  Errc::invalid_argument);
  }
}

TEST_CASE("p-adic witnesses are minimal and sign-normalized") {
  SECTION("shared negative valuation") {
    auto w = padic_witness(R("2/3"), R("5/3"), Int(3), 2);
    REQUIRE(w.has_value());
    REQUIRE(*w == std::pair<long, long>{1, -1});
  }

  SECTION("prime touching neither base") {
    auto w = padic_witness(R("2"), R("3"), Int(5), 1);
    REQUIRE(w.has_value());
    REQUIRE(*w == std::pair<long, long>{0, 1});
  }

  SECTION("multiplicatively dependent pair") {
    auto w = padic_witness(R("2"), R("4"), Int(2), 2);
    REQUIRE(w.has_value());
    REQUIRE(*w == std::pair<long, long>{2, -1});
  }

  SECTION("bound too small") {
    REQUIRE(!padic_witness(R("2"), R("8"), Int(2), 2).has_value());
    auto w = padic_witness(R("2"), R("8"), Int(2), 3);
    REQUIRE(w.has_value());
    REQUIRE(*w == std::pair<long, long>{3, -1});
  }

  SECTION("the witness always kills the valuation") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      Rational a = Rational(rng.range(1, 40)) / rng.range(1, 40);
      Rational b = Rational(rng.range(1, 40)) / rng.range(1, 40);
      if (a == 1 || b == 1) continue;
      Int p = trial % 2 == 0 ? Int(2) : Int(3);
      auto w = padic_witness(a, b, p, 6);
      if (!w.has_value()) continue;
      REQUIRE(w->first * ell_adic_valuation(a, p) +
                  w->second * ell_adic_valuation(b, p) ==
              0);
      REQUIRE((w->first > 0 || (w->first == 0 && w->second > 0)));
    }
  }

  SECTION("composite p is rejected") {
    require_error([&] { padic_witness(R("2"), R("3"), Int(6), 2); },
                  Errc::invalid_argument);
  }
}

TEST_CASE("lattice intersection filtering") {
  SECTION("ring membership cuts non-smooth denominators") {
    std::vector<Exponent> s = {E(1, 2), E(1), E(3)};
    auto out = lattice_intersection_filter(s, {{1, 0}, {0, 1}}, R("6"), R("15"));
    REQUIRE(out == std::vector<Exponent>{E(1), E(3)});
  }

  SECTION("integer support passes untouched") {
    std::vector<Exponent> s = {E(-2), E(0), E(7)};
    auto out = lattice_intersection_filter(s, {{1, 1}, {2, -1}}, R("2"), R("3"));
    REQUIRE(out == s);
  }

  SECTION("a single hostile ring can empty the support") {
    std::vector<Exponent> s = {E(1, 5)};
    REQUIRE(lattice_intersection_filter(s, {{1, 0}}, R("6"), R("7")).empty());
  }

  SECTION("inverse powers give the same ring") {
    std::vector<Exponent> s = {E(1, 6), E(1, 5)};
    auto up = lattice_intersection_filter(s, {{1, 0}}, R("6"), R("7"));
    auto down = lattice_intersection_filter(s, {{-1, 0}}, R("6"), R("7"));
    REQUIRE(up == down);
    REQUIRE(up == std::vector<Exponent>{E(1, 6)});
  }

  SECTION("symbolic exponents cannot be filtered") {
    std::vector<Exponent> s = {Exponent::alpha(1)};
    require_error([&] { lattice_intersection_filter(s, {{1, 0}}, R("2"), R("3")); },
                  Errc::undecidable_membership);
  }
}

TEST_CASE("joint valuation consistency for independent symbolic bases") {
  ScaleContext actx = ctx_sqrt("a", "2");
  ScaleContext bctx = ctx_sqrt("b", "3");

  auto sym_eq = [](const ScaleContext& c, std::initializer_list<const char*> trailing) {
    std::vector<HahnSeries> coeffs;
    int k = 0;
    for (const char* t : trailing) {
      coeffs.push_back(t == nullptr ? HahnSeries::zero()
                                    : series(c, {{t, k % 2 == 0 ? "1" : "-2"}}));
      ++k;
    }
    return MahlerEquation(c, {1, 0}, std::move(coeffs), HahnSeries::zero());
  };

  SECTION("equal trailing exponents in both equations leave v = 0") {
    MahlerEquation eqA = sym_eq(actx, {"0", "0"});
    MahlerEquation eqB = sym_eq(bctx, {"0", "1", "0"});
    auto res = joint_valuation_consistency(eqA, eqB);
    auto* feasible = std::get_if<std::vector<Exponent>>(&res);
    REQUIRE(feasible != nullptr);
    REQUIRE(*feasible == std::vector<Exponent>{E(0)});
  }

  SECTION("generic distinct valuations are infeasible") {
    MahlerEquation eqA = sym_eq(actx, {"0", "1"});
    MahlerEquation eqB = sym_eq(bctx, {"0", "2"});
    auto res = joint_valuation_consistency(eqA, eqB);
    auto* ob = std::get_if<ValuationObstruction>(&res);
    REQUIRE(ob != nullptr);
    REQUIRE(ob->base_a == "a");
    REQUIRE(ob->base_b == "b");
    REQUIRE(ob->pairs_a == std::vector<std::pair<long, long>>{{0, 1}});
    REQUIRE(ob->pairs_b == std::vector<std::pair<long, long>>{{0, 1}});
    REQUIRE(ob->detail.find("either equation") != std::string::npos);
  }

  SECTION("one rigid equation is enough to obstruct") {
    MahlerEquation eqA = sym_eq(actx, {"0", "0"});
    MahlerEquation eqB = sym_eq(bctx, {"0", "2"});
    auto res = joint_valuation_consistency(eqA, eqB);
    auto* ob = std::get_if<ValuationObstruction>(&res);
    REQUIRE(ob != nullptr);
    REQUIRE(ob->detail.find("base-b equation") != std::string::npos);
  }

  SECTION("all slot pairs are recorded") {
    MahlerEquation eqA = sym_eq(actx, {"2", "3", "2"});
    MahlerEquation eqB = sym_eq(bctx, {"0", "2"});
    auto res = joint_valuation_consistency(eqA, eqB);
    auto* ob = std::get_if<ValuationObstruction>(&res);
    REQUIRE(ob != nullptr);
    REQUIRE(ob->pairs_a ==
            std::vector<std::pair<long, long>>{{0, 1}, {0, 2}, {1, 2}});
  }

  SECTION("rational bases are diverted to the lattice pipeline") {
    ScaleContext r2 = ctx_of("2");
    MahlerEquation rat(r2, {1, 0},
                       {series(r2, {{"0", "1"}}), series(r2, {{"0", "-1"}, {"1", "-1"}})},
                       HahnSeries::zero());
    MahlerEquation sym = sym_eq(bctx, {"0", "1"});
    require_error([&] { joint_valuation_consistency(rat, sym); }, Errc::symbolic_only);
  }

  SECTION("a base is never independent of itself") {
    MahlerEquation eqA = sym_eq(actx, {"0", "1"});
    MahlerEquation eqA2 = sym_eq(actx, {"0", "2"});
    require_error([&] { joint_valuation_consistency(eqA, eqA2); },
                  Errc::invalid_argument);
  }

  SECTION("inhomogeneous equations are rejected") {
    MahlerEquation inhom(actx, {1, 0},
                         {series(actx, {{"0", "1"}}), series(actx, {{"1", "1"}})},
                         series(actx, {{"0", "1"}}));
    MahlerEquation eqB = sym_eq(bctx, {"0", "1"});
    require_error([&] { joint_valuation_consistency(inhom, eqB); },
                  Errc::not_homogeneous);
  }
}
