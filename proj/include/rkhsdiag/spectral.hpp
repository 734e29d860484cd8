#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rkhsdiag/catalog.hpp"
#include "rkhsdiag/quadrature.hpp"
#include "rkhsdiag/symbol.hpp"

namespace rkhsdiag {

using MatrixValue = Eigen::MatrixXcd;

/// gamma(xi) or Lambda^{-1}(S)(xi): 1x1 for scalar fibers, d_xi x d_xi otherwise.
struct SpectralSample {
  Frequency xi;
  MatrixValue value;
  bool converged = true;
};

/// gamma_psi(xi) = int_Y psi |q_xi|^2 d lambda. Throws FrequencyOutsideOmega,
/// NonScalarFiber, InvalidSymbol (psi unbounded on Y), NonConvergence.
cplx gamma_scalar(const KernelModel& m, const SymbolSpec& psi, const Frequency& xi,
                  const quad::QuadSpec& spec);

/// Gamma_jk = int_Y psi conj(q_j) q_k d lambda.
MatrixValue gamma_matrix(const KernelModel& m, const SymbolSpec& psi, const Frequency& xi,
                         const quad::QuadSpec& spec);

/// (R K_{0,y})(xi) = int_Y L_num(xi, y, v) conj(q_xi(v)) d lambda(v), with L_num
/// the Fourier integral of K. Equals conj(q_xi(y)).
cplx apply_R_to_kernel(const KernelModel& m, const Point& y, const Frequency& xi,
                       const quad::QuadSpec& spec);
/// Vector form: entries int_Y L_num(xi, y, v) conj(q_j(v)) d lambda(v) = conj(Q_j(y)).
Eigen::VectorXcd apply_R_to_kernel_vector(const KernelModel& m, const Point& y,
                                          const Frequency& xi, const quad::QuadSpec& spec);

/// int_Omega sum_j |q_j(xi, y)|^2 d nu_hat(xi), the squared norm of R K_{0,y}.
quad::IntegralResult transform_norm_squared(const KernelModel& m, const Point& y,
                                            const quad::QuadSpec& spec);

/// sigma(xi) = int_Y psi(v) L_num(xi, y, v) conj(q(v)) d lambda(v) / conj(q(y)).
/// Throws AnchorDegenerate when |q_xi(y)| < 1e-8.
cplx lambda_inverse_toeplitz(const KernelModel& m, const SymbolSpec& psi, const Frequency& xi,
                             const Point& y_anchor, const quad::QuadSpec& spec);

struct AnchorSolution {
  MatrixValue value;
  double condition = 0.0;
  std::vector<Point> anchors;
};

/// Solves Gamma [conj(Q(y_1)) ... conj(Q(y_d))] = [R T K_{0,y_1} ... R T K_{0,y_d}].
/// Throws SingularAnchorMatrix when the anchor matrix has condition number > 1e8.
AnchorSolution lambda_inverse_matrix(const KernelModel& m, const SymbolSpec& psi,
                                     const Frequency& xi, const std::vector<Point>& anchors,
                                     const quad::QuadSpec& spec);
/// Anchors at fiber-density quantiles 20% ... 80%, re-drawn (seeded) while ill-conditioned.
AnchorSolution lambda_inverse_matrix(const KernelModel& m, const SymbolSpec& psi,
                                     const Frequency& xi, const quad::QuadSpec& spec);

struct BerezinResult {
  cplx value;
  cplx numerator;
  /// int_Omega L_{xi,y}(y) d nu_hat(xi); equals K_{0,y}(0, y).
  double denominator = 0.0;
  bool converged = true;
};

/// Berezin transform of T_psi at (x, y); independent of x. The numerator integrates
/// tr(Gamma(xi) conj(Q(y)) Q(y)^T), with Gamma memoized per node.
/// Throws DenominatorUnderflow when the denominator is below 1e-30.
BerezinResult berezin(const KernelModel& m, const SymbolSpec& psi, const Point& y,
                      const quad::QuadSpec& spec);

/// Inner estimate of the essential range of gamma over a finite grid (eigenvalues for
/// matrix fibers). Grid points outside Omega are skipped.
struct SpectrumRange {
  double min = 0.0;
  double max = 0.0;
  double sup = 0.0;
  std::vector<Frequency> grid;
};
SpectrumRange spectrum_range(const KernelModel& m, const SymbolSpec& psi,
                             const std::vector<Frequency>& xi_grid, const quad::QuadSpec& spec);

}  // namespace rkhsdiag
