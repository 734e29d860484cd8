#pragma once

#include <functional>

#include "rkhsdiag/quadrature.hpp"

namespace rkhsdiag::special {

/// Laguerre polynomial L_k(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
double laguerre(int k, double x);

/// Jacobi polynomial P_n^{(0,1)}(x) by the standard Jacobi recurrence.
double jacobi01(int n, double x);

/// A real wavelet psi normalized so that int_0^inf |F psi(t xi)|^2 dt/t = 1 for xi != 0,
/// with F taken under the exp(2 pi i x xi) pairing.
struct WaveletModel {
  std::function<double(double)> time_profile;
  std::function<double(double)> freq_profile;
  /// Factor c applied to the raw profiles.
  double admissibility_constant = 1.0;
  /// int_0^inf |F psi_raw(t)|^2 dt/t before normalization (equals 1/c^2).
  double raw_admissibility = 1.0;
};

/// Normalizes user-supplied raw profiles numerically. Throws NormalizationFailure
/// when the admissibility integral does not converge or is not positive.
WaveletModel make_wavelet(std::function<double(double)> time_raw,
                          std::function<double(double)> freq_raw,
                          const quad::QuadSpec& spec = {});

/// Mexican hat c (1 - t^2) exp(-t^2/2); its constant is computed once on first use.
const WaveletModel& mexican_hat();

/// int_0^inf |F psi(t xi)|^2 dt / t.
quad::IntegralResult admissibility_integral(const WaveletModel& w, double xi,
                                            const quad::QuadSpec& spec = {});

}  // namespace rkhsdiag::special
