#pragma once

#include <functional>
#include <limits>

namespace rkhsdiag::quad {

enum class DomainKind {
  interval,   // [a, b]
  half_line,  // (a, inf)
  line,       // R
  circle,     // [0, 2 pi), periodic
  integers,   // Z
};

/// Underlying one-dimensional set of a measure.
class Domain1D {
 public:
  static Domain1D interval(double a, double b);
  static Domain1D half_line(double a);
  static Domain1D line();
  static Domain1D circle();
  static Domain1D integers();

  DomainKind kind() const noexcept { return kind_; }
  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  bool contains(double x) const noexcept;

 private:
  Domain1D(DomainKind k, double a, double b) : kind_(k), a_(a), b_(b) {}

  DomainKind kind_;
  double a_;
  double b_;
};

enum class Substitution {
  none,
  /// v = e^t on (0, inf); removes the v -> 0 singular weight of dv/v^2 style measures.
  log,
};

/// scale * density(x) * (Lebesgue | counting) on a Domain1D.
struct WeightedMeasure {
  Domain1D domain = Domain1D::line();
  std::function<double(double)> density;  // empty means 1
  double scale = 1.0;
  Substitution substitution = Substitution::none;

  double weight(double x) const { return scale * (density ? density(x) : 1.0); }

  static WeightedMeasure lebesgue(Domain1D d, double scale = 1.0);
  /// Normalized Haar measure du/(2 pi) on the circle.
  static WeightedMeasure normalized_circle();
  static WeightedMeasure counting();

  /// Throws InvalidParam when the measure is malformed.
  void validate() const;
};

}  // namespace rkhsdiag::quad
