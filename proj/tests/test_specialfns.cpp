#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rkhsdiag/errors.hpp"
#include "rkhsdiag/specialfns.hpp"

using namespace rkhsdiag;
using namespace rkhsdiag::special;

TEST(Laguerre, Examples) {
  for (double x : {-3.0, 0.0, 1.7, 40.0}) EXPECT_EQ(laguerre(0, x), 1.0);
  EXPECT_DOUBLE_EQ(laguerre(1, 2.0), -1.0);
  EXPECT_DOUBLE_EQ(laguerre(2, 2.0), -1.0);
  EXPECT_DOUBLE_EQ(laguerre(3, 0.0), 1.0);
  // L_3(x) = 1 - 3x + 3x^2/2 - x^3/6
  EXPECT_NEAR(laguerre(3, 1.5), 1.0 - 4.5 + 3.375 - 0.5625, 1e-14);
  EXPECT_THROW(laguerre(-1, 0.0), Error);
}

TEST(Laguerre, RecurrenceHolds) {
  for (int k = 1; k < 30; ++k) {
    for (double x = -50.0; x <= 50.0; x += 6.25) {
      const double lhs = (k + 1) * laguerre(k + 1, x);
      const double rhs = (2.0 * k + 1.0 - x) * laguerre(k, x) - k * laguerre(k - 1, x);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs))) << k << " " << x;
    }
  }
}

TEST(Laguerre, OrthonormalityUnderExponentialWeight) {
  const auto m = quad::WeightedMeasure::lebesgue(quad::Domain1D::half_line(0.0));
  for (double xi : {0.5, 1.0, 3.0}) {
    for (int j = 0; j <= 4; ++j) {
      for (int k = 0; k <= 4; ++k) {
        const auto r = quad::integrate(
            [=](double v) {
              return cplx(2.0 * xi * std::exp(-2.0 * xi * v) * laguerre(j, 2.0 * xi * v) *
                          laguerre(k, 2.0 * xi * v));
            },
            m, quad::QuadSpec{});
        EXPECT_NEAR(r.value.real(), j == k ? 1.0 : 0.0, 1e-8) << xi << " " << j << " " << k;
      }
    }
  }
}

TEST(Jacobi, Examples) {
  for (double x : {-1.0, 0.3, 2.0}) EXPECT_EQ(jacobi01(0, x), 1.0);
  for (int n = 0; n <= 12; ++n) EXPECT_NEAR(jacobi01(n, 1.0), 1.0, 1e-13) << n;
  EXPECT_DOUBLE_EQ(jacobi01(1, 0.0), -0.5);
  // P_n^{(0,1)}(-1) = (-1)^n (n + 1)
  for (int n = 0; n <= 8; ++n) EXPECT_NEAR(jacobi01(n, -1.0), (n % 2 ? -1.0 : 1.0) * (n + 1), 1e-12);
}

TEST(Jacobi, DegreeIsExact) {
  // The n-th finite difference on a uniform grid equals n! h^n times the leading
  // coefficient, and the (n+1)-th vanishes.
  for (int n = 0; n <= 10; ++n) {
    const double h = 0.2;
    auto diff = [&](int order) {
      double s = 0.0;
      double binom = 1.0;
      for (int i = 0; i <= order; ++i) {
        s += ((order - i) % 2 ? -1.0 : 1.0) * binom * jacobi01(n, -1.0 + i * h);
        binom = binom * (order - i) / (i + 1);
      }
      return s;
    };
    EXPECT_GT(std::abs(diff(n)), 1e-6) << n;
    EXPECT_LT(std::abs(diff(n + 1)), 1e-9 * std::max(1.0, std::abs(diff(n)))) << n;
  }
}

TEST(Jacobi, OrthogonalUnderWeightOnePlusX) {
  for (int j = 0; j <= 5; ++j) {
    for (int k = 0; k < j; ++k) {
      const auto r = quad::adaptive_gauss_kronrod(
          [=](double x) { return cplx((1.0 + x) * jacobi01(j, x) * jacobi01(k, x)); }, -1.0, 1.0,
          1e-13, 1e-12, 100);
      EXPECT_NEAR(r.value.real(), 0.0, 1e-12) << j << " " << k;
    }
  }
}

TEST(MexicanHat, Profiles) {
  const WaveletModel& w = mexican_hat();
  EXPECT_EQ(w.freq_profile(0.0), 0.0);
  EXPECT_EQ(w.freq_profile(-2.0), w.freq_profile(2.0));
  EXPECT_NEAR(w.admissibility_constant, 1.0 / std::sqrt(std::numbers::pi), 1e-9);
  EXPECT_EQ(&w, &mexican_hat());
}

TEST(MexicanHat, FrequencyProfileIsFourierTransformOfTimeProfile) {
  const WaveletModel& w = mexican_hat();
  for (double s : {0.0, 0.1, 0.25, 0.6}) {
    const auto r = quad::oscillatory_integral(
        [&](double t) { return cplx(w.time_profile(t)); }, 2.0 * std::numbers::pi * s,
        quad::QuadSpec{});
    EXPECT_NEAR(r.value.real(), w.freq_profile(s), 1e-9) << s;
  }
}

TEST(MexicanHat, AdmissibilityAtSeveralScales) {
  const WaveletModel& w = mexican_hat();
  for (double xi : {0.5, 1.0, 4.0, -2.0}) {
    const auto r = admissibility_integral(w, xi);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value.real(), 1.0, 1e-8) << xi;
  }
}

TEST(MexicanHat, UserWaveletNormalization) {
  // Second derivative of a Gaussian with a different width: same family, rescaled.
  const double a = 2.0;
  const WaveletModel w = make_wavelet(
      [=](double t) { return (1.0 - a * t * t) * std::exp(-0.5 * a * t * t); },
      [=](double s) {
        const double p2 = std::numbers::pi * std::numbers::pi;
        return s * s * std::exp(-2.0 * p2 * s * s / a);
      });
  EXPECT_NEAR(admissibility_integral(w, 1.7).value.real(), 1.0, 1e-8);
}

TEST(MexicanHat, NormalizationFailure) {
  try {
    make_wavelet([](double) { return 0.0; }, [](double) { return 0.0; });
    FAIL() << "expected NormalizationFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::normalization_failure);
  }
}
