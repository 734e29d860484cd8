#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rkhsdiag/errors.hpp"
#include "rkhsdiag/fiber.hpp"
#include "rkhsdiag/spectral.hpp"
#include "test_support.hpp"

using namespace rkhsdiag;

namespace {

constexpr double pi = std::numbers::pi;
const quad::QuadSpec spec = quad::default_spec();

void expect_code(Errc code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

std::vector<ModelPtr> scalar_models() {
  std::vector<ModelPtr> out;
  for (const auto& id : list_models())
    if (id != "vertical-poly") out.push_back(get_model(id));
  return out;
}

std::vector<Frequency> three_frequencies(const KernelModel& m) {
  if (m.group().dual_is_integer()) {
    const bool harmonic = m.omega_contains(-1.0);
    return harmonic ? std::vector<Frequency>{-2.0, 0.0, 3.0} : std::vector<Frequency>{0.0, 1.0, 3.0};
  }
  return {0.5, 1.0, 2.0};
}

// Symbols bounded on every Y of the catalog: exp-decay needs a finite lower end.
std::vector<SymbolSpec> symbols_for(const KernelModel& m) {
  std::vector<SymbolSpec> out{SymbolSpec::indicator(0.2, 0.7),
                              SymbolSpec::callback([](const Point& v) { return cplx(std::cos(v[0])); },
                                                   "cos")};
  out.push_back(std::isfinite(m.y_bounds().first) ? SymbolSpec::expdecay(1.0)
                                                  : SymbolSpec::indicator(-0.5, INFINITY));
  return out;
}

// Gamma-integral oracle for the vertical-analytic kernel at y = v:
// int_0^inf (sqrt(2/pi) xi e^{-2 xi y}) d xi / sqrt(2 pi) = 1 / (4 pi y^2).
double vertical_diag(double y) { return 1.0 / (4.0 * pi * y * y); }

}  // namespace

TEST(Spectral, GammaScalarExamples) {
  for (const auto& m : scalar_models()) {
    for (const Frequency& xi : three_frequencies(*m)) {
      if (!m->omega_contains(xi)) continue;
      EXPECT_NEAR(std::abs(gamma_scalar(*m, SymbolSpec::constant(1.0), xi, spec) - 1.0), 0.0, 1e-10)
          << m->spec_string();
    }
  }
  const auto va = get_model("vertical-analytic");
  EXPECT_NEAR(gamma_scalar(*va, SymbolSpec::indicator(0, 1), 1.0, spec).real(), 1.0 - std::exp(-2.0),
              1e-9);
  EXPECT_NEAR(gamma_scalar(*va, SymbolSpec::indicator(0, 1), 1.0, spec).real(), 0.8646647168, 1e-9);
  const auto ra = get_model("radial-analytic");
  for (int k : {0, 1, 2})
    EXPECT_NEAR(gamma_scalar(*ra, SymbolSpec::power(2), k, spec).real(), (k + 1.0) / (k + 2.0), 1e-10);
}

TEST(Spectral, GammaScalarErrors) {
  const auto va = get_model("vertical-analytic");
  expect_code(Errc::frequency_outside_omega,
              [&] { gamma_scalar(*va, SymbolSpec::constant(1), -1.0, spec); });
  expect_code(Errc::non_scalar_fiber, [&] {
    gamma_scalar(*get_model("vertical-poly", {{"n", 2}}), SymbolSpec::constant(1), 1.0, spec);
  });
  expect_code(Errc::invalid_symbol,
              [&] { gamma_scalar(*va, SymbolSpec::power(1.0), 1.0, spec); });
  expect_code(Errc::invalid_symbol,
              [&] { gamma_scalar(*get_model("gaussian-rbf"), SymbolSpec::expdecay(1.0), 1.0, spec); });
}

TEST(Spectral, GammaMatrixExamples) {
  const auto vp = get_model("vertical-poly", {{"n", 2}});
  const MatrixValue id = gamma_matrix(*vp, SymbolSpec::constant(1.0), 1.0, spec);
  ASSERT_EQ(id.rows(), 2);
  EXPECT_LE((id - MatrixValue::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
  const MatrixValue whole = gamma_matrix(*vp, SymbolSpec::indicator(0, INFINITY), 1.0, spec);
  EXPECT_LE((whole - MatrixValue::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
  const MatrixValue g = gamma_matrix(*vp, SymbolSpec::expdecay(1.0), 1.0, spec);
  EXPECT_LE((g - g.adjoint()).cwiseAbs().maxCoeff(), 1e-10);

  const auto va = get_model("vertical-analytic");
  const MatrixValue one = gamma_matrix(*va, SymbolSpec::indicator(0, 1), 1.0, spec);
  ASSERT_EQ(one.rows(), 1);
  EXPECT_EQ(one(0, 0), gamma_scalar(*va, SymbolSpec::indicator(0, 1), 1.0, spec));
}

TEST(Spectral, MatrixEntriesFromTheLaguerreBasis) {
  // Gamma_jk = 2 xi int psi(v) e^{-2 xi v} L_{j-1}(2 xi v) L_{k-1}(2 xi v) dv up to basis signs;
  // for psi = e^{-v} the Laguerre polynomials of degree <= 1 expand into moments.
  const auto vp = get_model("vertical-poly", {{"n", 2}});
  const double xi = 1.0;
  const MatrixValue g = gamma_matrix(*vp, SymbolSpec::expdecay(1.0), xi, spec);
  // With s = 2 xi v and c = 1 + 2 xi: int_0^inf e^{-c v} v^k dv = k! / c^{k+1}.
  const double c = 1.0 + 2.0 * xi;
  const auto mom = [&](int k) { return std::tgamma(k + 1.0) / std::pow(c, k + 1); };
  const double a = 2.0 * xi;
  const double g11 = a * mom(0);
  const double g12 = a * (mom(0) - a * mom(1));
  const double g22 = a * (mom(0) - 2.0 * a * mom(1) + a * a * mom(2));
  EXPECT_NEAR(std::abs(g(0, 0)), g11, 1e-9);
  EXPECT_NEAR(std::abs(g(0, 1)), std::abs(g12), 1e-9);
  EXPECT_NEAR(std::abs(g(1, 1)), g22, 1e-9);
}

TEST(Spectral, ApplyRExamples) {
  const auto va = get_model("vertical-analytic");
  EXPECT_NEAR(apply_R_to_kernel(*va, 1.0, 1.0, spec).real(), 0.3286060453, 1e-9);
  EXPECT_NEAR(apply_R_to_kernel(*va, 1.0, 1.0, spec).real(), std::pow(2.0 / pi, 0.25) * std::exp(-1.0),
              1e-8);
  const auto ra = get_model("radial-analytic");
  EXPECT_NEAR(apply_R_to_kernel(*ra, 0.5, 2.0, spec).real(), std::sqrt(6.0) * 0.25, 1e-9);
  EXPECT_NEAR(apply_R_to_kernel(*ra, 0.5, 2.0, spec).real(), 0.6123724357, 1e-9);

  const auto tn = transform_norm_squared(*va, 1.0, spec);
  EXPECT_NEAR(tn.value.real(), 1.0 / (4.0 * pi), 1e-9);
}

TEST(Spectral, ApplyRMatchesConjugateBasis) {
  std::mt19937_64 rng(kDefaultSeed);
  for (const auto& id : list_models()) {
    const auto m = get_model(id);
    const Frequency xi = three_frequencies(*m)[1];
    if (!m->omega_contains(xi)) continue;
    const Point y = testsupport::random_y(*m, rng);
    const Eigen::VectorXcd r = apply_R_to_kernel_vector(*m, y, xi, spec);
    for (int j = 1; j <= m->fiber_count(xi); ++j)
      EXPECT_LE(std::abs(r(j - 1) - std::conj(eval_q(*m, xi, j, y))), 1e-6) << id;
  }
}

TEST(Spectral, ParsevalAtTheKernel) {
  for (const auto& id : list_models()) {
    const auto m = get_model(id);
    const auto [lo, hi] = m->sample_region();
    for (double t : {0.25, 0.5, 0.75}) {
      const Point y = Point::filled(static_cast<std::size_t>(m->y_dimension()), lo + t * (hi - lo));
      const Point zero = Point::filled(static_cast<std::size_t>(m->group().dimension()), 0.0);
      const auto r = transform_norm_squared(*m, y, spec);
      EXPECT_LE(std::abs(r.value - eval_K(*m, zero, y, zero, y)), 1e-6) << id << " y=" << y[0];
    }
  }
  EXPECT_NEAR(transform_norm_squared(*get_model("vertical-analytic"), 0.5, spec).value.real(),
              vertical_diag(0.5), 1e-8);
}

TEST(Spectral, LambdaInverseToeplitzExamples) {
  const auto va = get_model("vertical-analytic");
  EXPECT_NEAR(std::abs(lambda_inverse_toeplitz(*va, SymbolSpec::constant(1), 1.0, 0.7, spec) - 1.0), 0.0,
              1e-8);
  EXPECT_NEAR(lambda_inverse_toeplitz(*va, SymbolSpec::indicator(0, 1), 1.0, 0.5, spec).real(),
              1.0 - std::exp(-2.0), 1e-7);
  expect_code(Errc::anchor_degenerate, [&] {
    lambda_inverse_toeplitz(*get_model("radial-analytic"), SymbolSpec::constant(1), 3.0, 1e-6, spec);
  });
  expect_code(Errc::frequency_outside_omega, [&] {
    lambda_inverse_toeplitz(*va, SymbolSpec::constant(1), -1.0, 0.5, spec);
  });
}

TEST(Spectral, TwoRoutesAgreeOnScalarModels) {
  for (const auto& m : scalar_models()) {
    for (const Frequency& xi : three_frequencies(*m)) {
      if (!m->omega_contains(xi)) continue;
      const Point anchor = fiber_quantiles(*m, xi, {0.5})[0];
      for (const SymbolSpec& psi : symbols_for(*m)) {
        const cplx a = gamma_scalar(*m, psi, xi, spec);
        const cplx b = lambda_inverse_toeplitz(*m, psi, xi, anchor, spec);
        EXPECT_LE(std::abs(a - b), 1e-6) << m->spec_string() << " " << psi.to_string();
      }
    }
  }
}

TEST(Spectral, LambdaInverseMatrixExamples) {
  const auto vp = get_model("vertical-poly", {{"n", 2}});
  const auto id = lambda_inverse_matrix(*vp, SymbolSpec::constant(1), 1.0, spec);
  EXPECT_LE((id.value - MatrixValue::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_GE(id.condition, 1.0);
  EXPECT_EQ(id.anchors.size(), 2u);

  const SymbolSpec psi = SymbolSpec::expdecay(1.0);
  const auto sol = lambda_inverse_matrix(*vp, psi, 1.0, {0.3, 1.1}, spec);
  const MatrixValue g = gamma_matrix(*vp, psi, 1.0, spec);
  EXPECT_LE((sol.value - g).cwiseAbs().maxCoeff(), 1e-6);

  expect_code(Errc::singular_anchor_matrix,
              [&] { lambda_inverse_matrix(*vp, psi, 1.0, {0.4, 0.4}, spec); });
  expect_code(Errc::invalid_param, [&] { lambda_inverse_matrix(*vp, psi, 1.0, {0.4}, spec); });
}

TEST(Spectral, BerezinExamples) {
  const auto va = get_model("vertical-analytic");
  const auto ones = berezin(*va, SymbolSpec::constant(1), 1.0, spec);
  EXPECT_NEAR(ones.value.real(), 1.0, 1e-8);
  EXPECT_NEAR(ones.denominator, 1.0 / (4.0 * pi), 1e-9);

  // 1-D oracle: gamma(xi) = 1 - e^{-2 xi}, L_{xi,1}(1) = sqrt(2/pi) xi e^{-2 xi}, d nu_hat = d xi / sqrt(2 pi).
  const auto b = berezin(*va, SymbolSpec::indicator(0, 1), 1.0, spec);
  const double num =
      quad::integrate(
          [](double x) { return (1.0 - std::exp(-2.0 * x)) * x * std::exp(-2.0 * x) / pi; },
          quad::WeightedMeasure::lebesgue(quad::Domain1D::half_line(0.0)), spec)
          .value.real();
  EXPECT_NEAR(b.value.real(), num * 4.0 * pi, 1e-6);
  // int x e^{-2x} - x e^{-4x} = 1/4 - 1/16, times 4 pi / pi.
  EXPECT_NEAR(b.value.real(), 0.75, 1e-6);

  for (const auto& id : list_models()) {
    const auto m = get_model(id);
    const auto [lo, hi] = m->sample_region();
    const Point y = Point::filled(static_cast<std::size_t>(m->y_dimension()), 0.5 * (lo + hi));
    EXPECT_NEAR(std::abs(berezin(*m, SymbolSpec::constant(1), y, spec).value - 1.0), 0.0, 1e-8) << id;
  }
}

TEST(Spectral, BerezinMatrixFiberUsesTracePairing) {
  const auto vp = get_model("vertical-poly", {{"n", 2}});
  const SymbolSpec psi = SymbolSpec::indicator(0, 1);
  const Point y(0.6);
  const auto b = berezin(*vp, psi, y, spec);
  EXPECT_TRUE(b.converged);
  // Direct route: <T_psi k, k> = int_G int_Y psi(v) |K_{0,y}(u, v)|^2 d lambda d nu.
  auto lam01 = vp->y_measure();
  lam01.domain = quad::Domain1D::interval(0.0, 1.0);
  const auto direct = quad::integrate_2d(
      [&](double u, double v) { return cplx(std::norm(vp->K0(Point(u), Point(v), y))); },
      vp->group().haar_factor(), lam01, spec);
  ASSERT_TRUE(direct.converged);
  EXPECT_NEAR(std::abs(b.numerator - direct.value), 0.0, 1e-6);
  // Only the diagonal kernel splits over the true-poly pieces m = 1, 2.
  const auto t1 = get_model("vertical-true-poly", {{"m", 1}});
  const auto t2 = get_model("vertical-true-poly", {{"m", 2}});
  EXPECT_NEAR(b.denominator,
              berezin(*t1, psi, y, spec).denominator + berezin(*t2, psi, y, spec).denominator, 1e-8);
  EXPECT_GE(b.value.real(), 0.0);
  EXPECT_LE(b.value.real(), 1.0);
}

TEST(Spectral, SpectrumRangeExamples) {
  const auto va = get_model("vertical-analytic");
  const auto r = spectrum_range(*va, SymbolSpec::indicator(0, 1), {0.25, 4.0}, spec);
  EXPECT_NEAR(r.min, 1.0 - std::exp(-0.5), 1e-9);
  EXPECT_NEAR(r.max, 1.0 - std::exp(-8.0), 1e-9);
  EXPECT_NEAR(r.min, 0.3934693403, 1e-9);
  EXPECT_NEAR(r.max, 0.9996645374, 1e-9);

  const auto c = spectrum_range(*va, SymbolSpec::constant(-2.5), {0.25, 1.0, 4.0}, spec);
  EXPECT_NEAR(c.min, -2.5, 1e-9);
  EXPECT_NEAR(c.max, -2.5, 1e-9);
  EXPECT_NEAR(c.sup, 2.5, 1e-9);

  const auto skip = spectrum_range(*va, SymbolSpec::indicator(0, 1), {-1.0, 1.0}, spec);
  EXPECT_EQ(skip.grid.size(), 1u);
  expect_code(Errc::frequency_outside_omega,
              [&] { spectrum_range(*va, SymbolSpec::constant(1), {-1.0}, spec); });

  const auto vp = get_model("vertical-poly", {{"n", 2}});
  const auto e = spectrum_range(*vp, SymbolSpec::indicator(0, 1), {0.5, 1.0, 2.0}, spec);
  EXPECT_GE(e.min, 0.0);
  EXPECT_LE(e.max, 1.0);
}

TEST(Spectral, AveragingBoundsAndLinearity) {
  const SymbolSpec p1 = SymbolSpec::indicator(0.1, 0.6);
  const SymbolSpec p2 = SymbolSpec::callback([](const Point& v) { return cplx(std::sin(3.0 * v[0])); }, "sin3");
  const SymbolSpec mix = SymbolSpec::callback(
      [&](const Point& v) { return 2.0 * p1(v) - 0.5 * p2(v); }, "mix");
  for (const auto& m : scalar_models()) {
    for (const Frequency& xi : three_frequencies(*m)) {
      if (!m->omega_contains(xi)) continue;
      const cplx g1 = gamma_scalar(*m, p1, xi, spec);
      const cplx g2 = gamma_scalar(*m, p2, xi, spec);
      EXPECT_GE(g1.real(), -1e-12);
      EXPECT_LE(g1.real(), 1.0 + 1e-12);
      EXPECT_GE(g2.real(), -1.0 - 1e-12);
      EXPECT_LE(g2.real(), 1.0 + 1e-12);
      EXPECT_LE(std::abs(g1.imag()), 1e-10);
      EXPECT_LE(std::abs(gamma_scalar(*m, mix, xi, spec) - (2.0 * g1 - 0.5 * g2)), 1e-9)
          << m->spec_string();
    }
  }
}

TEST(Spectral, ClosedFormsMatchQuadrature) {
  for (const auto& id : {"vertical-analytic", "vertical-harmonic", "vertical-true-poly",
                         "radial-analytic", "radial-harmonic", "angular-analytic", "wavelet-affine"}) {
    const auto m = get_model(id);
    for (const Frequency& xi : three_frequencies(*m)) {
      if (!m->omega_contains(xi)) continue;
      for (const SymbolSpec& psi : {SymbolSpec::indicator(0.2, 0.7), SymbolSpec::expdecay(1.5)}) {
        const auto closed = m->gamma_closed(psi, xi, spec);
        ASSERT_TRUE(closed.has_value()) << id;
        EXPECT_LE(std::abs(gamma_scalar(*m, psi, xi, spec) - closed->value), 1e-7)
            << id << " " << psi.to_string();
      }
    }
  }
}

TEST(Spectral, RadialHarmonicIsEven) {
  const auto rh = get_model("radial-harmonic");
  const SymbolSpec psi = SymbolSpec::expdecay(0.7);
  for (int k : {1, 2, 5})
    EXPECT_EQ(gamma_scalar(*rh, psi, k, spec), gamma_scalar(*rh, psi, -k, spec));
}
