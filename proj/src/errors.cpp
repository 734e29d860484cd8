#include "rkhsdiag/errors.hpp"

namespace rkhsdiag {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::non_convergence: return "NonConvergence";
    case Errc::non_finite_evaluation: return "NonFiniteEvaluation";
    case Errc::oscillation_budget: return "OscillationBudget";
    case Errc::aliasing_suspected: return "AliasingSuspected";
    case Errc::normalization_failure: return "NormalizationFailure";
    case Errc::unknown_model: return "UnknownModel";
    case Errc::invalid_param: return "InvalidParam";
    case Errc::invalid_symbol: return "InvalidSymbol";
    case Errc::domain_violation: return "DomainViolation";
    case Errc::frequency_outside_omega: return "FrequencyOutsideOmega";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::non_scalar_fiber: return "NonScalarFiber";
    case Errc::degenerate_samples: return "DegenerateSamples";
    case Errc::anchor_degenerate: return "AnchorDegenerate";
    case Errc::singular_anchor_matrix: return "SingularAnchorMatrix";
    case Errc::denominator_underflow: return "DenominatorUnderflow";
  }
  return "Unknown";
}

bool is_numeric_failure(Errc code) noexcept {
  switch (code) {
    case Errc::non_convergence:
    case Errc::non_finite_evaluation:
    case Errc::oscillation_budget:
    case Errc::aliasing_suspected:
    case Errc::normalization_failure:
    case Errc::degenerate_samples:
    case Errc::singular_anchor_matrix:
    case Errc::denominator_underflow:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace rkhsdiag
