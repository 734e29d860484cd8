#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rkhsdiag {

/// Failure categories raised by the library. Every throw site uses one of these,
/// so callers (and the CLI exit-code mapping) can branch on the category.
enum class Errc {
  non_convergence,
  non_finite_evaluation,
  oscillation_budget,
  aliasing_suspected,
  normalization_failure,
  unknown_model,
  invalid_param,
  invalid_symbol,
  domain_violation,
  frequency_outside_omega,
  index_out_of_range,
  non_scalar_fiber,
  degenerate_samples,
  anchor_degenerate,
  singular_anchor_matrix,
  denominator_underflow,
};

std::string_view to_string(Errc code) noexcept;

/// True for the categories that indicate a numerical (rather than usage) failure.
bool is_numeric_failure(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rkhsdiag
