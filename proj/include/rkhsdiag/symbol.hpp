#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rkhsdiag/point.hpp"

namespace rkhsdiag {

enum class SymbolFamily { constant, indicator, expdecay, power, callback };

/// A generating symbol psi on Y. Builtin families act on the first coordinate of
/// a point of Y; callbacks see the whole point.
class SymbolSpec {
 public:
  static SymbolSpec constant(double c);
  /// 1 on the open interval (a, b), 0 elsewhere. Either end may be infinite.
  static SymbolSpec indicator(double a, double b);
  static SymbolSpec expdecay(double alpha);
  static SymbolSpec power(double p);
  static SymbolSpec callback(std::function<cplx(const Point&)> fn, std::string label = "callback",
                             bool real_valued = false);

  cplx operator()(const Point& v) const;

  SymbolFamily family() const noexcept { return family_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  bool is_real() const noexcept { return real_; }
  /// Discontinuities of psi along the first coordinate.
  std::vector<double> breakpoints() const;
  /// Canonical text form, parseable by parse_symbol for builtin families.
  std::string to_string() const;

  /// Throws InvalidSymbol when a builtin psi is unbounded on the coordinate range
  /// [lower, upper] of Y. Callbacks are trusted.
  void check_bounded(double lower, double upper) const;

 private:
  SymbolFamily family_ = SymbolFamily::constant;
  std::vector<double> params_;
  std::function<cplx(const Point&)> fn_;
  std::string label_;
  bool real_ = true;
};

/// Parses `const:c`, `indicator:a,b`, `expdecay:alpha` or `power:p`.
/// Throws InvalidSymbol on malformed input.
SymbolSpec parse_symbol(std::string_view text);

}  // namespace rkhsdiag
