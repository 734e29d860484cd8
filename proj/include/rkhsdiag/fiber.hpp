#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rkhsdiag/catalog.hpp"
#include "rkhsdiag/quadrature.hpp"

namespace rkhsdiag {

struct YVPair {
  Point y;
  Point v;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

enum class Verdict { commutative, non_commutative, outside_omega };
std::string to_string(Verdict v);

struct FiberTolerances {
  double dimension = 1e-6;
  double schwarz = 1e-8;
  double fourier = 1e-6;
  double repro = 1e-8;
};

struct FiberReport {
  Frequency xi;
  double numeric_dimension = 0.0;
  int declared_dimension = 0;
  /// max |<q_j, q_k> - delta_jk|.
  double normalization_residual = 0.0;
  double schwarz_residual_max = 0.0;
  double repro_residual_max = 0.0;
  double fourier_residual_max = 0.0;
  int gram_rank = 0;
  Verdict verdict = Verdict::outside_omega;
  /// False when a quadrature did not converge or threw; `error` says which.
  bool converged = true;
  std::string error;
};

/// L_{xi,y}(v) = int_G conj(E(u, xi)) K_{0,y}(u, v) d nu(u) by numerical Fourier integration.
quad::IntegralResult compute_L_numeric(const KernelModel& m, const Frequency& xi, const Point& y,
                                       const Point& v, const quad::QuadSpec& spec);

/// int_Omega L_{xi,y}(v) E(x, xi) d nu_hat(xi) from the closed-form L (a sum over Z on the circle).
quad::IntegralResult reconstruct_K(const KernelModel& m, const Point& x, const Point& y,
                                   const Point& v, const quad::QuadSpec& spec);

/// int_Y L_{xi,y}(y) d lambda(y).
quad::IntegralResult fiber_dimension(const KernelModel& m, const Frequency& xi,
                                     const quad::QuadSpec& spec);

/// max over the grid of | |L_y(v)|^2 - L_y(y) L_v(v) |, divided by L_y(y) L_v(v) when that
/// exceeds 1e-30. Throws FrequencyOutsideOmega.
double schwarz_residual(const KernelModel& m, const Frequency& xi, const std::vector<YVPair>& grid);

/// |L_{xi,y}(v) - int_Y L_{xi,y}(w) conj(L_{xi,v}(w)) d lambda(w)|. Throws FrequencyOutsideOmega.
double repro_residual(const KernelModel& m, const Frequency& xi, const Point& y, const Point& v,
                      const quad::QuadSpec& spec);

/// Number of singular values of [L_{xi,y_i}(y_j)] above threshold times the largest.
/// Throws DegenerateSamples when the matrix is not numerically Hermitian PSD.
int gram_rank(const KernelModel& m, const Frequency& xi, const std::vector<Point>& samples,
              double threshold = 1e-8);

using YFunction = std::function<cplx(const Point&)>;

/// (P_xi h)(v) = int_Y h(w) conj(L_{xi,v}(w)) d lambda(w).
quad::IntegralResult project_fiber(const KernelModel& m, const Frequency& xi, const YFunction& h,
                                   const Point& v, const quad::QuadSpec& spec);

/// ((F x I) P (f x h))(xi, v) / (F f)(xi) computed from K alone, with f a Gaussian
/// (or the character itself on the circle). A triple integral: use sparingly.
quad::IntegralResult projection_fiber_oracle(const KernelModel& m, const Frequency& xi,
                                             const YFunction& h, const Point& v,
                                             const quad::QuadSpec& spec);

/// Points of Y at the given quantiles of the fiber density L_{xi,v}(v) d lambda(v)
/// (coordinate-wise for several coordinates).
std::vector<Point> fiber_quantiles(const KernelModel& m, const Frequency& xi,
                                   const std::vector<double>& probabilities);

/// Default frequencies: {0.25, 0.5, 1, 2, 4} on R^n, {-4, ..., 4} on Z.
std::vector<Frequency> default_xi_grid(const KernelModel& m);
/// Latin-hypercube (y, v) pairs in the model's sample region.
std::vector<YVPair> default_yv_grid(const KernelModel& m, std::uint64_t seed = kDefaultSeed,
                                    int count = 12);

struct ReportOptions {
  FiberTolerances tol;
  bool parallel = true;
  /// Pairs of the grid used for the (more expensive) reproducing-identity check.
  int repro_pairs = 12;
  int gram_samples = 0;  // 0: declared dimension + 4
};

/// One report per frequency, sorted by frequency. A failing frequency yields a report
/// with converged = false instead of aborting the batch.
std::vector<FiberReport> commutativity_report(const KernelModel& m,
                                              const std::vector<Frequency>& xi_grid,
                                              const std::vector<YVPair>& yv_grid,
                                              const quad::QuadSpec& spec,
                                              const ReportOptions& options = {});

/// As integrate_y, restricted to the fiber extent of the model at xi.
quad::IntegralResult integrate_fiber_extent(const KernelModel& m, const Frequency& xi,
                                            const YFunction& f, const quad::QuadSpec& spec,
                                            const std::vector<double>& breakpoints = {});
/// As integrate_y, but the density of lambda is left to f (only its scale is applied).
quad::IntegralResult integrate_y_density(const KernelModel& m, const YFunction& f,
                                         const quad::QuadSpec& spec,
                                         const std::vector<double>& breakpoints = {});
/// Integral of f over Y (all coordinates) against lambda.
quad::IntegralResult integrate_y(const KernelModel& m, const YFunction& f,
                                 const quad::QuadSpec& spec,
                                 const std::vector<double>& breakpoints = {});

/// Integral of f over Omega against nu_hat (all coordinates; a sum on Z).
quad::IntegralResult integrate_dual(const KernelModel& m,
                                    const std::function<cplx(const Frequency&)>& f,
                                    const quad::QuadSpec& spec);

}  // namespace rkhsdiag
