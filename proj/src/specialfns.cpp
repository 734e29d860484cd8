#include "rkhsdiag/specialfns.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rkhsdiag/errors.hpp"

namespace rkhsdiag::special {

double laguerre(int k, double x) {
  if (k < 0) throw Error(Errc::invalid_param, "laguerre degree must be nonnegative");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 - x) * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double jacobi01(int n, double x) {
  if (n < 0) throw Error(Errc::invalid_param, "jacobi degree must be nonnegative");
  constexpr double a = 0.0;
  constexpr double b = 1.0;
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (int m = 2; m <= n; ++m) {
    const double s = 2.0 * m + a + b;
    const double c1 = 2.0 * m * (m + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * s;
    const double next = (c2 * cur - c3 * prev) / c1;
    prev = cur;
    cur = next;
  }
  return cur;
}

quad::IntegralResult admissibility_integral(const WaveletModel& w, double xi,
                                            const quad::QuadSpec& spec) {
  quad::WeightedMeasure dt_over_t = quad::WeightedMeasure::lebesgue(quad::Domain1D::half_line(0.0));
  dt_over_t.density = [](double t) { return 1.0 / t; };
  dt_over_t.substitution = quad::Substitution::log;
  const auto f = [&](double t) -> cplx {
    const double g = w.freq_profile(t * xi);
    return g * g;
  };
  return quad::integrate(f, dt_over_t, spec);
}

WaveletModel make_wavelet(std::function<double(double)> time_raw,
                          std::function<double(double)> freq_raw, const quad::QuadSpec& spec) {
  WaveletModel raw{time_raw, freq_raw, 1.0, 1.0};
  const quad::IntegralResult r = admissibility_integral(raw, 1.0, spec.scaled(1e-2));
  const double c2 = r.value.real();
  if (!r.converged || !(c2 > 0.0) || !std::isfinite(c2))
    throw Error(Errc::normalization_failure,
                "admissibility integral did not converge (value " + std::to_string(c2) + ")");
  const double c = 1.0 / std::sqrt(c2);
  WaveletModel w;
  w.admissibility_constant = c;
  w.raw_admissibility = c2;
  w.time_profile = [time_raw = std::move(time_raw), c](double t) { return c * time_raw(t); };
  w.freq_profile = [freq_raw = std::move(freq_raw), c](double s) { return c * freq_raw(s); };
  return w;
}

const WaveletModel& mexican_hat() {
  // Function-local static: initialized exactly once, immutable afterwards.
  static const WaveletModel w = make_wavelet(
      [](double t) { return (1.0 - t * t) * std::exp(-0.5 * t * t); },
      [](double s) {
        constexpr double pi = std::numbers::pi;
        const double s2 = s * s;
        return 4.0 * pi * pi * std::sqrt(2.0 * pi) * s2 * std::exp(-2.0 * pi * pi * s2);
      });
  return w;
}

}  // namespace rkhsdiag::special
