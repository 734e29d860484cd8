#pragma once

#include <numbers>

#include "rkhsdiag/measure.hpp"
#include "rkhsdiag/point.hpp"

namespace rkhsdiag {

enum class GroupKind {
  /// G = R, E(x, xi) = exp(i x xi), nu = nu_hat = Lebesgue / sqrt(2 pi).
  real_angular,
  /// G = R, E(x, xi) = exp(2 pi i x xi), nu = nu_hat = Lebesgue.
  real_two_pi,
  /// G = R / 2 pi Z with normalized Haar measure, dual Z with counting measure.
  circle,
};

/// Group, dual group, pairing and Plancherel-consistent Haar measures, applied
/// coordinate-wise for dimension n.
class GroupModel {
 public:
  GroupModel(GroupKind kind, int dimension = 1);

  GroupKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dim_; }
  bool dual_is_integer() const noexcept { return kind_ == GroupKind::circle; }

  /// Angular frequency of the character exp(i omega x) for the coordinate value xi.
  double angular(double xi) const noexcept {
    return kind_ == GroupKind::real_two_pi ? 2.0 * std::numbers::pi * xi : xi;
  }
  /// E(x, xi).
  cplx pairing(const Point& x, const Frequency& xi) const;

  /// u - x in G (reduced to [0, 2 pi) on the circle).
  Point subtract(const Point& u, const Point& x) const;
  Point canonicalize(const Point& x) const;

  /// One coordinate factor of nu and nu_hat.
  quad::WeightedMeasure haar_factor() const;
  quad::WeightedMeasure dual_factor() const;

  /// Throws DomainViolation when xi is not an element of the dual group.
  void check_frequency(const Frequency& xi) const;

 private:
  GroupKind kind_;
  int dim_;
};

}  // namespace rkhsdiag
