#include "rkhsdiag/measure.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rkhsdiag/errors.hpp"
#include "rkhsdiag/group.hpp"

namespace rkhsdiag::quad {

Domain1D Domain1D::interval(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(Errc::invalid_param, "interval requires finite a < b");
  return {DomainKind::interval, a, b};
}

Domain1D Domain1D::half_line(double a) {
  if (!std::isfinite(a)) throw Error(Errc::invalid_param, "half-line needs a finite endpoint");
  return {DomainKind::half_line, a, std::numeric_limits<double>::infinity()};
}

Domain1D Domain1D::line() {
  return {DomainKind::line, -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
}

Domain1D Domain1D::circle() { return {DomainKind::circle, 0.0, 2.0 * std::numbers::pi}; }

Domain1D Domain1D::integers() {
  return {DomainKind::integers, -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
}

bool Domain1D::contains(double x) const noexcept {
  switch (kind_) {
    case DomainKind::interval: return x >= a_ && x <= b_;
    case DomainKind::half_line: return x > a_;
    case DomainKind::line: return std::isfinite(x);
    case DomainKind::circle: return x >= 0.0 && x < b_;
    case DomainKind::integers: return std::isfinite(x) && x == std::round(x);
  }
  return false;
}

WeightedMeasure WeightedMeasure::lebesgue(Domain1D d, double scale) {
  WeightedMeasure m;
  m.domain = d;
  m.scale = scale;
  return m;
}

WeightedMeasure WeightedMeasure::normalized_circle() {
  return lebesgue(Domain1D::circle(), 1.0 / (2.0 * std::numbers::pi));
}

WeightedMeasure WeightedMeasure::counting() { return lebesgue(Domain1D::integers(), 1.0); }

void WeightedMeasure::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(Errc::invalid_param, "measure scale must be positive");
  if (substitution == Substitution::log &&
      !(domain.kind() == DomainKind::half_line && domain.lower() == 0.0))
    throw Error(Errc::invalid_param, "log substitution requires the domain (0, inf)");
}

}  // namespace rkhsdiag::quad

namespace rkhsdiag {

GroupModel::GroupModel(GroupKind kind, int dimension) : kind_(kind), dim_(dimension) {
  if (dimension < 1 || dimension > static_cast<int>(kMaxDim))
    throw Error(Errc::invalid_param, "group dimension must be 1 or 2");
}

cplx GroupModel::pairing(const Point& x, const Frequency& xi) const {
  double phase = 0.0;
  for (int j = 0; j < dim_; ++j) phase += angular(xi[j]) * x[j];
  return std::polar(1.0, phase);
}

Point GroupModel::canonicalize(const Point& x) const {
  if (kind_ != GroupKind::circle) return x;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Point out = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double r = std::fmod(x[j], two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    out[j] = r;
  }
  return out;
}

Point GroupModel::subtract(const Point& u, const Point& x) const {
  Point d = u;
  for (std::size_t j = 0; j < u.size(); ++j) d[j] = u[j] - x[j];
  return canonicalize(d);
}

quad::WeightedMeasure GroupModel::haar_factor() const {
  using quad::Domain1D;
  using quad::WeightedMeasure;
  switch (kind_) {
    case GroupKind::real_angular:
      return WeightedMeasure::lebesgue(Domain1D::line(), 1.0 / std::sqrt(2.0 * std::numbers::pi));
    case GroupKind::real_two_pi: return WeightedMeasure::lebesgue(Domain1D::line(), 1.0);
    case GroupKind::circle: return WeightedMeasure::normalized_circle();
  }
  return WeightedMeasure::lebesgue(Domain1D::line());
}

quad::WeightedMeasure GroupModel::dual_factor() const {
  if (kind_ == GroupKind::circle) return quad::WeightedMeasure::counting();
  return haar_factor();
}

void GroupModel::check_frequency(const Frequency& xi) const {
  if (static_cast<int>(xi.size()) != dim_)
    throw Error(Errc::domain_violation, "frequency has " + std::to_string(xi.size()) +
                                            " components, group dimension is " +
                                            std::to_string(dim_));
  for (std::size_t j = 0; j < xi.size(); ++j) {
    if (!std::isfinite(xi[j])) throw Error(Errc::domain_violation, "non-finite frequency");
    if (dual_is_integer() && xi[j] != std::round(xi[j]))
      throw Error(Errc::domain_violation, "frequencies of the circle group are integers");
  }
}

}  // namespace rkhsdiag
