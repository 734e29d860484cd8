#pragma once

#include <functional>
#include <span>

#include "rkhsdiag/group.hpp"
#include "rkhsdiag/measure.hpp"
#include "rkhsdiag/point.hpp"

/// Adaptive integration over weighted real domains, Fourier integrals over R^n
/// and Fourier coefficients over the circle.
///
/// Finite intervals use globally adaptive 21-point Gauss-Kronrod subdivision.
/// Infinite domains are truncated where the integrand envelope, sampled on a
/// geometric grid and weighted by the width of each dyadic shell, drops below
/// truncation_eps times its observed peak. When the envelope decays only
/// algebraically the tail is mapped onto a finite interval
/// (non-oscillatory case) or summed over half periods with Wynn epsilon
/// extrapolation (oscillatory case).
namespace rkhsdiag::quad {

struct QuadSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  double truncation_eps = 1e-14;
  int circle_nodes = 512;
  /// Largest angular frequency |omega| accepted by fourier_integral.
  double xi_max = 64.0;

  /// Throws InvalidParam when an invariant is violated.
  void validate() const;
  /// Same QuadSpec with both tolerances multiplied by factor.
  QuadSpec scaled(double factor) const;
  double target(double magnitude) const;
};

/// Defaults, with abs_tol = t and rel_tol = 100 t when RKHSDIAG_QUAD_TOL=t is set.
QuadSpec default_spec();

struct IntegralResult {
  cplx value{};
  double error_estimate = 0.0;
  bool converged = true;
  long evaluations = 0;

  IntegralResult& operator+=(const IntegralResult& other);
};

using Integrand = std::function<cplx(double)>;
using Integrand2D = std::function<cplx(double, double)>;
using IntegrandND = std::function<cplx(const Point&)>;

/// Integral of f against m. NonConvergence is reported through converged=false;
/// a NaN/inf integrand value throws Error(non_finite_evaluation). `breakpoints`
/// mark jumps or kinks of f (ignored on the circle and on Z).
IntegralResult integrate(const Integrand& f, const WeightedMeasure& m, const QuadSpec& spec,
                         std::span<const double> breakpoints = {});

/// Iterated integral of f(u, v) d m1(u) d m2(v); the inner (v) tolerance is ten
/// times tighter than the outer one.
IntegralResult integrate_2d(const Integrand2D& f, const WeightedMeasure& m1,
                            const WeightedMeasure& m2, const QuadSpec& spec);

/// (F f)(xi) = int_G conj(E(x, xi)) f(x) d nu(x) under the conventions of g.
IntegralResult fourier_integral(const IntegrandND& f, const Frequency& xi, const GroupModel& g,
                                const QuadSpec& spec);

/// (1 / 2 pi) int_0^{2 pi} exp(-i xi u) f(u) du by the trapezoidal rule.
IntegralResult fourier_coefficient(const Integrand& f, int xi, const QuadSpec& spec);

/// int_R exp(-i omega x) f(x) dx (no measure scale). `breakpoints` are points
/// where f may be non-smooth. Throws OscillationBudget when |omega| > spec.xi_max.
IntegralResult oscillatory_integral(const Integrand& f, double omega, const QuadSpec& spec,
                                    std::span<const double> breakpoints = {});

/// Globally adaptive Gauss-Kronrod on [a, b] with the given initial breakpoints.
IntegralResult adaptive_gauss_kronrod(const Integrand& f, double a, double b, double abs_tol,
                                      double rel_tol, int max_subdivisions,
                                      std::span<const double> breakpoints = {});

}  // namespace rkhsdiag::quad
