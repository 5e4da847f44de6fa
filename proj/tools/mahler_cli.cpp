// Batch front-end over JSON files.  One subcommand per library operation,
// every verdict emitted as JSON on standard output, and a fixed exit-code
// taxonomy:
//   0  success (Verified, solution found, certificate found, feasible)
//   2  definite negative (Refuted, Obstruction, NotFound, infeasible)
//   3  inconclusive (not enough truncation or precision to decide)
//   1  usage or input errors
// Output is deterministic for fixed inputs and parameters: keys appear in a
// fixed order, terms are sorted, and no timestamps or paths enter the payload.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "mahler/equation.hpp"
#include "mahler/guess.hpp"
#include "mahler/io.hpp"
#include "mahler/rationality.hpp"
#include "mahler/solver.hpp"
#include "mahler/span.hpp"
#include "mahler/support.hpp"

namespace {

using namespace mahler;

struct Opts {
  bool compact = false;
  long seed = 0;
  int precision_cap = -1;  // -1 means "not given on the command line"

  std::string series_path;
  std::string equation_path;
  std::string equation_a_path;
  std::string equation_b_path;
  std::string seeds_path;
  std::string support_path;
  std::string pairs_path;

  std::string cutoff;
  std::string base;
  std::string alpha;
  std::string beta;
  std::string exponent;
  long d_max = 1;
  long deg_max = 0;
  long margin = 8;
  long window = 10;
  long pow_n = 1;
  long pow_m = 0;
  long long prime = 2;
  long max_steps = 10000;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::parse_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json load_json(const std::string& path) { return parse_json_text(read_file(path)); }

// The precision cap travels inside the equation's "scales" block; a command
// line override rewrites that block before the context is built.
void apply_cap(Json& j, int cap) {
  if (cap >= 0 && j.is_object() && j.contains("scales"))
    j["scales"]["refinement_cap"] = cap;
}

int effective_cap(const Opts& o, const ScaleContext& ctx) {
  return o.precision_cap >= 0 ? o.precision_cap : ctx.refinement_cap;
}

ScaleContext rational_context(const Opts& o, const Rational& base) {
  ScaleContext ctx = ScaleContext::rational(base);
  if (o.precision_cap >= 0) ctx.refinement_cap = o.precision_cap;
  return ctx;
}

Json envelope(const std::string& command, Json params) {
  Json out;
  out["command"] = command;
  out["params"] = std::move(params);
  return out;
}

int emit(const Opts& o, const Json& out, int code) {
  std::cout << (o.compact ? out.dump() : out.dump(2)) << "\n";
  return code;
}

std::vector<HahnSeries::Term> seeds_from_json(const Json& j) {
  try {
    const Json& arr = j.is_object() && j.contains("seeds") ? j.at("seeds") : j;
    require(arr.is_array(), Errc::parse_error,
            "seeds must be an array of [exponent, coefficient] pairs");
    std::vector<HahnSeries::Term> out;
    for (const Json& t : arr) {
      require(t.is_array() && t.size() == 2, Errc::parse_error,
              "seed entry must be [exponent, coefficient]");
      out.push_back({exponent_from_json(t[0]), parse_rational(t[1].get<std::string>())});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad seeds: ") + e.what());
  }
}

std::vector<Exponent> support_from_json(const Json& j) {
  try {
    const Json& arr = j.is_object() && j.contains("exponents") ? j.at("exponents") : j;
    require(arr.is_array(), Errc::parse_error, "support must be an array of exponents");
    std::vector<Exponent> out;
    for (const Json& e : arr) out.push_back(exponent_from_json(e));
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad support: ") + e.what());
  }
}

std::vector<std::pair<long, long>> pairs_from_json(const Json& j) {
  try {
    const Json& arr = j.is_object() && j.contains("pairs") ? j.at("pairs") : j;
    require(arr.is_array(), Errc::parse_error, "pairs must be an array of [n, m] pairs");
    std::vector<std::pair<long, long>> out;
    for (const Json& t : arr) {
      require(t.is_array() && t.size() == 2, Errc::parse_error,
              "pair entry must be [n, m]");
      out.push_back({t[0].get<long>(), t[1].get<long>()});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("bad pairs: ") + e.what());
  }
}

MahlerEquation load_equation(const Opts& o, const std::string& path) {
  Json j = load_json(path);
  apply_cap(j, o.precision_cap);
  return equation_from_json(j);
}

int run_verify(const Opts& o) {
  MahlerEquation eq = load_equation(o, o.equation_path);
  HahnSeries f = series_from_json(load_json(o.series_path), eq.context());
  Verdict v = check_equation(f, eq);
  Json params;
  params["precision_cap"] = effective_cap(o, eq.context());
  params["seed"] = o.seed;
  Json out = envelope("verify", std::move(params));
  out["verdict"] = verdict_to_json(v);
  int code = v.kind == VerdictKind::verified ? 0
             : v.kind == VerdictKind::refuted ? 2
                                              : 3;
  return emit(o, out, code);
}

int run_solve(const Opts& o) {
  MahlerEquation eq = load_equation(o, o.equation_path);
  std::vector<HahnSeries::Term> seeds;
  if (!o.seeds_path.empty()) seeds = seeds_from_json(load_json(o.seeds_path));
  Exponent cutoff(parse_rational(o.cutoff));
  Json params;
  params["cutoff"] = exponent_to_json(cutoff);
  params["max_steps"] = o.max_steps;
  params["precision_cap"] = effective_cap(o, eq.context());
  params["seed"] = o.seed;
  Json out = envelope("solve", std::move(params));
  SolveResult r = solve_equation(eq, seeds, cutoff, o.max_steps);
  if (const HahnSeries* f = std::get_if<HahnSeries>(&r)) {
    out["solution"] = series_to_json(*f);
    return emit(o, out, 0);
  }
  out["obstruction"] = obstruction_to_json(std::get<Obstruction>(r));
  return emit(o, out, 2);
}

int run_homogenize(const Opts& o) {
  MahlerEquation eq = load_equation(o, o.equation_path);
  Json params;
  params["precision_cap"] = effective_cap(o, eq.context());
  params["seed"] = o.seed;
  Json out = envelope("homogenize", std::move(params));
  out["equation"] = equation_to_json(homogenize(eq));
  return emit(o, out, 0);
}

int run_normalize(const Opts& o) {
  MahlerEquation eq = load_equation(o, o.equation_path);
  Json params;
  params["precision_cap"] = effective_cap(o, eq.context());
  params["seed"] = o.seed;
  Json out = envelope("normalize", std::move(params));
  auto [normalized, dropped] = normalize_leading(eq);
  out["equation"] = equation_to_json(normalized);
  out["dropped"] = dropped;
  return emit(o, out, 0);
}

int run_invert_base(const Opts& o) {
  MahlerEquation eq = load_equation(o, o.equation_path);
  Json params;
  params["precision_cap"] = effective_cap(o, eq.context());
  params["seed"] = o.seed;
  Json out = envelope("invert-base", std::move(params));
  out["equation"] = equation_to_json(invert_base(eq));
  return emit(o, out, 0);
}

int run_shift(const Opts& o) {
  MahlerEquation eq = load_equation(o, o.equation_path);
  Rational r = parse_rational(o.exponent);
  Json params;
  params["exponent"] = format_rational(r);
  params["precision_cap"] = effective_cap(o, eq.context());
  params["seed"] = o.seed;
  Json out = envelope("shift", std::move(params));
  out["equation"] = equation_to_json(shift_equation(eq, r));
  return emit(o, out, 0);
}

int run_decompose(const Opts& o) {
  Rational base = parse_rational(o.base);
  ScaleContext ctx = rational_context(o, base);
  HahnSeries f = series_from_json(load_json(o.series_path), ctx);
  Json params;
  params["base"] = format_rational(base);
  params["precision_cap"] = ctx.refinement_cap;
  params["seed"] = o.seed;
  Json out = envelope("decompose", std::move(params));
  Json classes = Json::array();
  for (const auto& [cls, part] : decompose(f, ctx))
    classes.push_back(Json{{"representative", exponent_to_json(cls.representative)},
                           {"series", series_to_json(part)}});
  out["classes"] = std::move(classes);
  return emit(o, out, 0);
}

int run_rescale(const Opts& o) {
  Rational base = parse_rational(o.base);
  ScaleContext ctx = rational_context(o, base);
  HahnSeries f = series_from_json(load_json(o.series_path), ctx);
  Json params;
  params["base"] = format_rational(base);
  params["precision_cap"] = ctx.refinement_cap;
  params["seed"] = o.seed;
  Json out = envelope("rescale", std::move(params));
  RescaleResult r = rescale_to_lattice(f, ctx.alpha, ctx);
  out["factor"] = r.factor.str();
  out["series"] = series_to_json(r.series);
  return emit(o, out, 0);
}

int run_combine(const Opts& o) {
  MahlerEquation eqA = load_equation(o, o.equation_a_path);
  MahlerEquation eqB = load_equation(o, o.equation_b_path);
  Json params;
  params["n"] = o.pow_n;
  params["m"] = o.pow_m;
  params["precision_cap"] = effective_cap(o, eqA.context());
  params["seed"] = o.seed;
  Json out = envelope("combine", std::move(params));
  CombinedEquation ce = combine_bases(eqA, eqB, o.pow_n, o.pow_m);
  out["equation"] = equation_to_json(ce.equation);
  out["l"] = ce.l.str();
  return emit(o, out, 0);
}

int run_guess(const Opts& o) {
  Rational base = parse_rational(o.base);
  ScaleContext ctx = rational_context(o, base);
  HahnSeries f = series_from_json(load_json(o.series_path), ctx);
  Json params;
  params["base"] = format_rational(base);
  params["d_max"] = o.d_max;
  params["deg_max"] = o.deg_max;
  params["margin"] = o.margin;
  params["precision_cap"] = ctx.refinement_cap;
  params["seed"] = o.seed;
  Json out = envelope("guess", std::move(params));
  if (auto eq = guess_equation(f, base, o.d_max, o.deg_max, o.margin)) {
    out["equation"] = equation_to_json(*eq);
    return emit(o, out, 0);
  }
  out["result"] = "not-found";
  return emit(o, out, 2);
}

int run_certify(const Opts& o) {
  ScaleContext ctx = rational_context(o, Rational(2));
  HahnSeries f = series_from_json(load_json(o.series_path), ctx);
  Json params;
  params["deg_max"] = o.deg_max;
  params["margin"] = o.margin;
  params["precision_cap"] = ctx.refinement_cap;
  params["seed"] = o.seed;
  Json out = envelope("certify", std::move(params));
  if (auto cert = certify_rational(f, o.deg_max, ctx, o.margin)) {
    out["certificate"] = certificate_to_json(*cert);
    return emit(o, out, 0);
  }
  out["result"] = "not-found";
  return emit(o, out, 2);
}

int run_witness(const Opts& o) {
  Rational a = parse_rational(o.alpha);
  Rational b = parse_rational(o.beta);
  Json params;
  params["alpha"] = format_rational(a);
  params["beta"] = format_rational(b);
  params["p"] = o.prime;
  params["window"] = o.window;
  params["seed"] = o.seed;
  Json out = envelope("witness", std::move(params));
  if (auto w = padic_witness(a, b, Int(o.prime), o.window)) {
    out["witness"] = Json::array({w->first, w->second});
    return emit(o, out, 0);
  }
  out["result"] = "not-found";
  return emit(o, out, 2);
}

int run_filter(const Opts& o) {
  Rational a = parse_rational(o.alpha);
  Rational b = parse_rational(o.beta);
  std::vector<Exponent> support = support_from_json(load_json(o.support_path));
  std::vector<std::pair<long, long>> pairs = pairs_from_json(load_json(o.pairs_path));
  Json params;
  params["alpha"] = format_rational(a);
  params["beta"] = format_rational(b);
  params["seed"] = o.seed;
  Json out = envelope("filter", std::move(params));
  Json kept = Json::array();
  for (const Exponent& e : lattice_intersection_filter(support, pairs, a, b))
    kept.push_back(exponent_to_json(e));
  out["support"] = std::move(kept);
  return emit(o, out, 0);
}

int run_obstruct(const Opts& o) {
  MahlerEquation eqA = load_equation(o, o.equation_a_path);
  MahlerEquation eqB = load_equation(o, o.equation_b_path);
  Json params;
  params["precision_cap"] = effective_cap(o, eqA.context());
  params["seed"] = o.seed;
  Json out = envelope("obstruct", std::move(params));
  JointValuation jv = joint_valuation_consistency(eqA, eqB);
  if (const auto* vs = std::get_if<std::vector<Exponent>>(&jv)) {
    out["result"] = "feasible";
    Json arr = Json::array();
    for (const Exponent& e : *vs) arr.push_back(exponent_to_json(e));
    out["valuations"] = std::move(arr);
    return emit(o, out, 0);
  }
  out["result"] = "infeasible";
  out["obstruction"] = valuation_obstruction_to_json(std::get<ValuationObstruction>(jv));
  return emit(o, out, 2);
}

int run_valuations(const Opts& o) {
  MahlerEquation eq = load_equation(o, o.equation_path);
  Json params;
  params["precision_cap"] = effective_cap(o, eq.context());
  params["seed"] = o.seed;
  Json out = envelope("valuations", std::move(params));
  Json arr = Json::array();
  for (const Rational& v : admissible_valuations(eq)) arr.push_back(format_rational(v));
  out["valuations"] = std::move(arr);
  return emit(o, out, 0);
}

}  // namespace

int main(int argc, char** argv) {
  Opts o;
  CLI::App app{"Exact toolkit for Hahn series and Mahler functional equations"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", o.compact, "compact single-line JSON output");
  app.add_option("--seed", o.seed, "seed echoed into output headers (reserved)");
  app.add_option("--precision-cap", o.precision_cap,
                 "override the interval refinement cap for symbolic scales");

  CLI::App* verify = app.add_subcommand("verify", "check a series against an equation");
  verify->add_option("--series", o.series_path, "series JSON file")->required();
  verify->add_option("--equation", o.equation_path, "equation JSON file")->required();

  CLI::App* solve = app.add_subcommand("solve", "extend a seed prefix to a solution");
  solve->add_option("--equation", o.equation_path, "equation JSON file")->required();
  solve->add_option("--seeds", o.seeds_path, "seed terms JSON file");
  solve->add_option("--cutoff", o.cutoff, "rational cutoff exponent")->required();
  solve->add_option("--max-steps", o.max_steps, "position walk step budget");

  CLI::App* homogenize =
      app.add_subcommand("homogenize", "eliminate a nonzero right-hand side");
  homogenize->add_option("--equation", o.equation_path, "equation JSON file")->required();

  CLI::App* normalize =
      app.add_subcommand("normalize", "drop leading zero coefficients");
  normalize->add_option("--equation", o.equation_path, "equation JSON file")->required();

  CLI::App* invert =
      app.add_subcommand("invert-base", "turn a base below one into its inverse");
  invert->add_option("--equation", o.equation_path, "equation JSON file")->required();

  CLI::App* shift = app.add_subcommand("shift", "substitute x -> x^r throughout");
  shift->add_option("--equation", o.equation_path, "equation JSON file")->required();
  shift->add_option("--exponent", o.exponent, "positive rational r")->required();

  CLI::App* decompose =
      app.add_subcommand("decompose", "split a series into support classes");
  decompose->add_option("--series", o.series_path, "series JSON file")->required();
  decompose->add_option("--base", o.base, "rational base p/q")->required();

  CLI::App* rescale =
      app.add_subcommand("rescale", "substitute x -> x^l to clear foreign denominators");
  rescale->add_option("--series", o.series_path, "series JSON file")->required();
  rescale->add_option("--base", o.base, "rational base p/q")->required();

  CLI::App* combine =
      app.add_subcommand("combine", "derive an equation for base a^n b^m from two inputs");
  combine->add_option("--equation-a", o.equation_a_path, "first equation JSON file")
      ->required();
  combine->add_option("--equation-b", o.equation_b_path, "second equation JSON file")
      ->required();
  combine->add_option("--n", o.pow_n, "power of the first base")->required();
  combine->add_option("--m", o.pow_m, "power of the second base")->required();

  CLI::App* guess =
      app.add_subcommand("guess", "recover an equation from a series prefix");
  guess->add_option("--series", o.series_path, "series JSON file")->required();
  guess->add_option("--base", o.base, "rational base p/q")->required();
  guess->add_option("--d-max", o.d_max, "largest equation degree to try")->required();
  guess->add_option("--deg-max", o.deg_max, "largest coefficient degree to try")
      ->required();
  guess->add_option("--margin", o.margin, "extra conditions beyond unknowns");

  CLI::App* certify =
      app.add_subcommand("certify", "find polynomials U, V with V*f = U on the prefix");
  certify->add_option("--series", o.series_path, "series JSON file")->required();
  certify->add_option("--deg-max", o.deg_max, "largest numerator/denominator degree")
      ->required();
  certify->add_option("--margin", o.margin, "extra conditions beyond unknowns");

  CLI::App* witness =
      app.add_subcommand("witness", "find (n, m) with alpha^n beta^m a p-adic unit");
  witness->add_option("--alpha", o.alpha, "first rational base")->required();
  witness->add_option("--beta", o.beta, "second rational base")->required();
  witness->add_option("--p", o.prime, "prime to balance")->required();
  witness->add_option("--window", o.window, "search |n|, |m| up to this bound");

  CLI::App* filter =
      app.add_subcommand("filter", "intersect a support with witness lattices");
  filter->add_option("--support", o.support_path, "support JSON file")->required();
  filter->add_option("--pairs", o.pairs_path, "witness pairs JSON file")->required();
  filter->add_option("--alpha", o.alpha, "first rational base")->required();
  filter->add_option("--beta", o.beta, "second rational base")->required();

  CLI::App* obstruct = app.add_subcommand(
      "obstruct", "joint valuation consistency for two symbolic-base equations");
  obstruct->add_option("--equation-a", o.equation_a_path, "first equation JSON file")
      ->required();
  obstruct->add_option("--equation-b", o.equation_b_path, "second equation JSON file")
      ->required();

  CLI::App* valuations =
      app.add_subcommand("valuations", "admissible valuations of a homogeneous equation");
  valuations->add_option("--equation", o.equation_path, "equation JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (verify->parsed()) return run_verify(o);
    if (solve->parsed()) return run_solve(o);
    if (homogenize->parsed()) return run_homogenize(o);
    if (normalize->parsed()) return run_normalize(o);
    if (invert->parsed()) return run_invert_base(o);
    if (shift->parsed()) return run_shift(o);
    if (decompose->parsed()) return run_decompose(o);
    if (rescale->parsed()) return run_rescale(o);
    if (combine->parsed()) return run_combine(o);
    if (guess->parsed()) return run_guess(o);
    if (certify->parsed()) return run_certify(o);
    if (witness->parsed()) return run_witness(o);
    if (filter->parsed()) return run_filter(o);
    if (obstruct->parsed()) return run_obstruct(o);
    if (valuations->parsed()) return run_valuations(o);
  } catch (const Error& e) {
    std::string message = e.what();
    std::string prefix = std::string(errc_name(e.code())) + ": ";
    if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
    Json err;
    err["error"] = Json{{"code", errc_name(e.code())}, {"message", message}};
    std::cout << (o.compact ? err.dump() : err.dump(2)) << "\n";
    std::cerr << "mahler: " << e.what() << "\n";
    bool inconclusive = e.code() == Errc::window_too_small ||
                        e.code() == Errc::refinement_exhausted ||
                        e.code() == Errc::step_limit;
    return inconclusive ? 3 : 1;
  }
  return 1;
}
