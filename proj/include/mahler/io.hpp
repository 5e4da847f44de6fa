#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mahler/equation.hpp"
#include "mahler/errors.hpp"
#include "mahler/exponent.hpp"
#include "mahler/hahn_series.hpp"
#include "mahler/rationality.hpp"
#include "mahler/scale.hpp"
#include "mahler/solver.hpp"
#include "mahler/span.hpp"

// JSON formats, shared by the command line front-end and golden-file tests:
//   rational   "num/den" (or "num" when the denominator is 1)
//   exponent   rational string, or {"terms": [{"m", "n", "s", "c"}...]}
//   series     {"terms": [[exponent, coeff]...], "cutoff": exponent | "inf"}
//   equation   {"base": {"p", "q"} | {"symbol", "pow"}, "coeffs": [...],
//               "rhs": series, "scales": context for symbolic bases}
// Serialization is deterministic: object keys in fixed order, terms sorted.

namespace mahler {

using Json = nlohmann::ordered_json;

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::parse_error, e.what());
  }
}

inline Json exponent_to_json(const Exponent& e) {
  if (e.is_rational()) return Json(format_rational(e.rational_value()));
  Json terms = Json::array();
  for (const auto& [k, c] : e.terms())
    terms.push_back(Json{{"m", k.m}, {"n", k.n}, {"s", k.s ? 1 : 0},
                         {"c", format_rational(c)}});
  return Json{{"terms", std::move(terms)}};
}

inline Exponent exponent_from_json(const Json& j) {
  try {
    if (j.is_string()) return Exponent(parse_rational(j.get<std::string>()));
    if (j.is_number_integer()) return Exponent(Rational(j.get<long>()));
    require(j.is_object() && j.contains("terms"), Errc::parse_error,
            "exponent must be a rational string or an object with \"terms\"");
    std::vector<Exponent::Term> ts;
    for (const Json& t : j.at("terms")) {
      ExpKey k{t.at("m").get<int>(), t.at("n").get<int>(), t.at("s").get<int>() != 0};
      ts.push_back({k, parse_rational(t.at("c").get<std::string>())});
    }
    return Exponent::from_terms(std::move(ts));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad exponent: ") + e.what());
  }
}

inline Json series_to_json(const HahnSeries& f) {
  Json terms = Json::array();
  for (const auto& [e, c] : f.terms())
    terms.push_back(Json::array({exponent_to_json(e), format_rational(c)}));
  Json out;
  out["terms"] = std::move(terms);
  out["cutoff"] = f.cutoff() ? exponent_to_json(*f.cutoff()) : Json("inf");
  return out;
}

inline HahnSeries series_from_json(const Json& j, const ScaleContext& ctx) {
  try {
    require(j.is_object() && j.contains("terms"), Errc::parse_error,
            "series must be an object with \"terms\"");
    std::vector<HahnSeries::Term> terms;
    for (const Json& t : j.at("terms")) {
      require(t.is_array() && t.size() == 2, Errc::parse_error,
              "series term must be [exponent, coefficient]");
      terms.push_back({exponent_from_json(t[0]), parse_rational(t[1].get<std::string>())});
    }
    std::optional<Exponent> cutoff;
    if (j.contains("cutoff") && !(j.at("cutoff").is_string() && j.at("cutoff") == "inf"))
      cutoff = exponent_from_json(j.at("cutoff"));
    return HahnSeries::from_terms(std::move(terms), std::move(cutoff), ctx);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad series: ") + e.what());
  }
}

inline Json scale_to_json(const Scale& s) {
  if (s.is_rational()) return Json{{"value", format_rational(s.value())}};
  if (s.sqrt_radicand())
    return Json{{"name", s.name()}, {"sqrt", format_rational(*s.sqrt_radicand())}};
  Interval iv = s.approx(0);
  return Json{{"name", s.name()},
              {"lo", format_rational(iv.lo)},
              {"hi", format_rational(iv.hi)}};
}

inline Scale scale_from_json(const Json& j) {
  try {
    require(j.is_object(), Errc::parse_error, "scale must be an object");
    if (j.contains("value")) return Scale::rational(parse_rational(j.at("value").get<std::string>()));
    std::string name = j.at("name").get<std::string>();
    if (j.contains("sqrt"))
      return Scale::symbolic_sqrt(std::move(name),
                                  parse_rational(j.at("sqrt").get<std::string>()));
    Interval iv{parse_rational(j.at("lo").get<std::string>()),
                parse_rational(j.at("hi").get<std::string>())};
    return Scale::symbolic(std::move(name), iv);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad scale: ") + e.what());
  }
}

inline Json context_to_json(const ScaleContext& ctx) {
  Json out;
  out["alpha"] = scale_to_json(ctx.alpha);
  if (ctx.has_beta()) out["beta"] = scale_to_json(*ctx.beta);
  out["independent"] = ctx.independent;
  out["refinement_cap"] = ctx.refinement_cap;
  return out;
}

inline ScaleContext context_from_json(const Json& j) {
  try {
    require(j.is_object() && j.contains("alpha"), Errc::parse_error,
            "scale context must be an object with \"alpha\"");
    Scale a = scale_from_json(j.at("alpha"));
    std::optional<ScaleContext> ctx;
    if (j.contains("beta"))
      ctx.emplace(std::move(a), scale_from_json(j.at("beta")),
                  j.value("independent", false));
    else
      ctx.emplace(std::move(a));
    if (j.contains("refinement_cap")) ctx->refinement_cap = j.at("refinement_cap").get<int>();
    return *ctx;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad scale context: ") + e.what());
  }
}

inline Json equation_to_json(const MahlerEquation& eq) {
  Json out;
  if (eq.base_rational()) {
    Rational b = eq.base_value();
    out["base"] = Json{{"p", num(b).convert_to<long long>()},
                       {"q", den(b).convert_to<long long>()}};
  } else {
    auto [pa, pb] = eq.base_pow();
    out["base"] = Json{{"symbol", eq.context().alpha.name()},
                       {"pow", Json::array({pa, pb})}};
    out["scales"] = context_to_json(eq.context());
  }
  Json coeffs = Json::array();
  for (const auto& p : eq.coeffs()) coeffs.push_back(series_to_json(p));
  out["coeffs"] = std::move(coeffs);
  out["rhs"] = series_to_json(eq.rhs());
  return out;
}

inline MahlerEquation equation_from_json(const Json& j) {
  try {
    require(j.is_object() && j.contains("base") && j.contains("coeffs"), Errc::parse_error,
            "equation must be an object with \"base\" and \"coeffs\"");
    const Json& base = j.at("base");
    std::optional<ScaleContext> ctx;
    std::pair<long, long> pow{1, 0};
    if (base.contains("p")) {
      Rational b = Rational(Int(base.at("p").get<long long>())) /
                   Int(base.at("q").get<long long>());
      ctx.emplace(ScaleContext::rational(b));
    } else {
      require(j.contains("scales"), Errc::parse_error,
              "a symbolic base needs a \"scales\" block declaring its reals");
      ctx.emplace(context_from_json(j.at("scales")));
      const Json& p = base.at("pow");
      require(p.is_array() && p.size() == 2, Errc::parse_error,
              "\"pow\" must be a pair of integers");
      pow = {p[0].get<long>(), p[1].get<long>()};
    }
    std::vector<HahnSeries> coeffs;
    for (const Json& c : j.at("coeffs")) coeffs.push_back(series_from_json(c, *ctx));
    HahnSeries rhs = j.contains("rhs") && !j.at("rhs").is_null()
                         ? series_from_json(j.at("rhs"), *ctx)
                         : HahnSeries::zero();
    return MahlerEquation(*ctx, pow, std::move(coeffs), std::move(rhs));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad equation: ") + e.what());
  }
}

inline Json verdict_to_json(const Verdict& v) {
  Json out;
  out["kind"] = verdict_kind_name(v.kind);
  out["checked_below"] = v.checked_below ? exponent_to_json(*v.checked_below) : Json("inf");
  if (v.first_failure) out["first_failure"] = exponent_to_json(*v.first_failure);
  if (v.failure_coefficient) out["failure_coefficient"] = format_rational(*v.failure_coefficient);
  out["detail"] = v.detail;
  return out;
}

inline Json obstruction_to_json(const Obstruction& o) {
  return Json{{"at", exponent_to_json(o.at)},
              {"residual", format_rational(o.residual)},
              {"detail", o.detail}};
}

inline Json certificate_to_json(const RationalCertificate& c) {
  Json out;
  out["U"] = series_to_json(c.numerator);
  out["V"] = series_to_json(c.denominator);
  out["theta"] = exponent_to_json(c.theta);
  return out;
}

inline RationalCertificate certificate_from_json(const Json& j, const ScaleContext& ctx) {
  try {
    return RationalCertificate{series_from_json(j.at("U"), ctx),
                               series_from_json(j.at("V"), ctx),
                               exponent_from_json(j.at("theta"))};
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad certificate: ") + e.what());
  }
}

inline Json valuation_obstruction_to_json(const ValuationObstruction& o) {
  auto pairs = [](const std::vector<std::pair<long, long>>& ps) {
    Json out = Json::array();
    for (const auto& [a, b] : ps) out.push_back(Json::array({a, b}));
    return out;
  };
  Json out;
  out["base_a"] = o.base_a;
  out["base_b"] = o.base_b;
  out["pairs_a"] = pairs(o.pairs_a);
  out["pairs_b"] = pairs(o.pairs_b);
  out["detail"] = o.detail;
  return out;
}

}  // namespace mahler
