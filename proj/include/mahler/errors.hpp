#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mahler {

// Failure taxonomy for the whole library.  Codes are part of the contract:
// callers (and the CLI exit-code mapping) dispatch on the code, never on
// message text.
enum class Errc {
  refinement_exhausted,    // interval refinement hit the cap without separating
  zero_input,              // an operation required a nonzero argument
  zero_series,             // valuation of the zero series requested
  non_positive_substitution,  // substitution exponent must be positive
  undecidable_membership,  // ring membership cannot be decided for this exponent
  already_homogeneous,
  not_homogeneous,
  degenerate_equation,     // fewer than two nonzero coefficients
  base_already_above_one,
  base_not_above_one,
  seed_inconsistent,       // prescribed prefix contradicts the equation
  solver_tie,              // two unknowns first appear at the same position
  step_limit,              // position walk exhausted its step budget
  symbolic_base_unsupported,
  irrational_class_present,
  coefficient_vanishes,    // a rewrite step would divide by a zero coefficient
  kernel_empty,
  window_too_small,
  support_not_divisible,
  symbolic_only,           // operation is defined only for symbolic bases
  invalid_argument,
  parse_error,
};

inline const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::refinement_exhausted: return "RefinementExhausted";
    case Errc::zero_input: return "ZeroInput";
    case Errc::zero_series: return "ZeroSeries";
    case Errc::non_positive_substitution: return "NonPositiveSubstitution";
    case Errc::undecidable_membership: return "UndecidableMembership";
    case Errc::already_homogeneous: return "AlreadyHomogeneous";
    case Errc::not_homogeneous: return "NotHomogeneous";
    case Errc::degenerate_equation: return "DegenerateEquation";
    case Errc::base_already_above_one: return "BaseAlreadyAboveOne";
    case Errc::base_not_above_one: return "BaseNotAboveOne";
    case Errc::seed_inconsistent: return "SeedInconsistent";
    case Errc::solver_tie: return "SolverTie";
    case Errc::step_limit: return "StepLimit";
    case Errc::symbolic_base_unsupported: return "SymbolicBaseUnsupported";
    case Errc::irrational_class_present: return "IrrationalClassPresent";
    case Errc::coefficient_vanishes: return "CoefficientVanishes";
    case Errc::kernel_empty: return "KernelEmpty";
    case Errc::window_too_small: return "WindowTooSmall";
    case Errc::support_not_divisible: return "SupportNotDivisible";
    case Errc::symbolic_only: return "SymbolicOnly";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace mahler
