#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "rkhsdiag/catalog.hpp"

namespace testsupport {

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline rkhsdiag::Point random_g(const rkhsdiag::KernelModel& m, std::mt19937_64& rng) {
  const bool circle = m.group().kind() == rkhsdiag::GroupKind::circle;
  const double hi = circle ? 2.0 * std::numbers::pi : 3.0;
  const double lo = circle ? 0.0 : -3.0;
  rkhsdiag::Point p = rkhsdiag::Point::filled(static_cast<std::size_t>(m.group().dimension()), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = uniform(rng, lo, hi);
  return p;
}

inline rkhsdiag::Point random_y(const rkhsdiag::KernelModel& m, std::mt19937_64& rng) {
  const auto [lo, hi] = m.sample_region();
  rkhsdiag::Point p = rkhsdiag::Point::filled(static_cast<std::size_t>(m.y_dimension()), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = uniform(rng, lo, hi);
  return p;
}

inline rkhsdiag::Frequency xi_of(const rkhsdiag::KernelModel& m, double x) {
  return rkhsdiag::Frequency(
      rkhsdiag::Point::filled(static_cast<std::size_t>(m.group().dimension()), x));
}

inline double rel_diff(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}  // namespace testsupport
