#include "rkhsdiag/catalog.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "rkhsdiag/errors.hpp"
#include "rkhsdiag/specialfns.hpp"

namespace rkhsdiag {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const cplx kI{0.0, 1.0};

// (2/pi)^{1/4} and sqrt(2/pi).
const double kQ0 = std::pow(2.0 / kPi, 0.25);
const double kL0 = std::sqrt(2.0 / kPi);

std::string format_number(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(x);
}

double param(const ModelParams& p, const std::string& name) {
  for (const auto& [k, v] : p)
    if (k == name) return v;
  throw Error(Errc::invalid_param, "missing parameter " + name);
}

quad::IntegralResult integrate_with(const quad::Integrand& f, const quad::WeightedMeasure& m,
                                    const SymbolSpec& psi, const quad::QuadSpec& spec) {
  const std::vector<double> bp = psi.breakpoints();
  return quad::integrate(f, m, spec, bp);
}

// ---------------------------------------------------------------------------
// Upper half-plane models: G = R with exp(i x xi), Y = (0, inf), lambda = sqrt(2 pi) dv.

quad::WeightedMeasure vertical_lambda() {
  return quad::WeightedMeasure::lebesgue(quad::Domain1D::half_line(0.0), std::sqrt(2.0 * kPi));
}

class VerticalBase : public KernelModel {
 protected:
  explicit VerticalBase(ModelParams p)
      : KernelModel(GroupModel(GroupKind::real_angular), vertical_lambda(), {0.0, kInf},
                    std::move(p)) {}

  std::pair<double, double> sample_region() const override { return {0.05, 2.5}; }

  // Support of exp(-2 a v) times a polynomial of degree 2 k in 2 a v.
  static std::pair<double, double> laguerre_support(double a, int k) {
    return {0.0, (30.0 + 8.0 * k) / (2.0 * a)};
  }

  // 2 a int psi(v) exp(-2 a v) L_k(2 a v)^2 dv, the printed half-plane formula.
  static quad::IntegralResult half_plane_gamma(const SymbolSpec& psi, double a, int k,
                                               const quad::QuadSpec& spec) {
    const auto m = quad::WeightedMeasure::lebesgue(quad::Domain1D::half_line(0.0));
    return integrate_with(
        [&](double v) {
          const double l = special::laguerre(k, 2.0 * a * v);
          return 2.0 * a * psi(Point(v)) * std::exp(-2.0 * a * v) * l * l;
        },
        m, psi, spec);
  }
};

class VerticalAnalytic final : public VerticalBase {
 public:
  VerticalAnalytic() : VerticalBase({}) {}
  std::string id() const override { return "vertical-analytic"; }
  int fiber_count(const Frequency& xi) const override { return xi[0] > 0.0 ? 1 : 0; }
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    const cplx w = u[0] + kI * (v[0] + y[0]);
    return -1.0 / (kPi * w * w);
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    return kL0 * xi[0] * std::exp(-xi[0] * (y[0] + v[0]));
  }
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    return kQ0 * std::sqrt(xi[0]) * std::exp(-xi[0] * v[0]);
  }
  std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi, const Frequency& xi,
                                                   const quad::QuadSpec& spec) const override {
    return half_plane_gamma(psi, xi[0], 0, spec);
  }
  std::pair<double, double> fiber_support(const Frequency& xi, int) const override {
    return laguerre_support(std::abs(xi[0]), 0);
  }
};

class VerticalHarmonic final : public VerticalBase {
 public:
  VerticalHarmonic() : VerticalBase({}) {}
  std::string id() const override { return "vertical-harmonic"; }
  int fiber_count(const Frequency& xi) const override { return xi[0] != 0.0 ? 1 : 0; }
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    const double s = v[0] + y[0];
    const cplx w1 = u[0] + kI * s;
    const cplx w2 = u[0] - kI * s;
    return -1.0 / (kPi * w1 * w1) - 1.0 / (kPi * w2 * w2);
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    const double a = std::abs(xi[0]);
    return kL0 * a * std::exp(-a * (y[0] + v[0]));
  }
  // Normalized form: rate |xi|, so that conj(q(y)) q(v) reproduces L.
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    const double a = std::abs(xi[0]);
    return kQ0 * std::sqrt(a) * std::exp(-a * v[0]);
  }
  std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi, const Frequency& xi,
                                                   const quad::QuadSpec& spec) const override {
    return half_plane_gamma(psi, std::abs(xi[0]), 0, spec);
  }
  std::pair<double, double> fiber_support(const Frequency& xi, int) const override {
    return laguerre_support(std::abs(xi[0]), 0);
  }
};

class VerticalTruePoly final : public VerticalBase {
 public:
  explicit VerticalTruePoly(int m)
      : VerticalBase({{"m", static_cast<double>(m)}}), m_(m), coef_(m * m) {
    auto fact = [](int k) { return std::tgamma(k + 1.0); };
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        coef_[j * m + k] = ((j + k) % 2 ? -1.0 : 1.0) * fact(m - 1) * fact(m - 1) * fact(j + k + 1) /
                           (fact(j) * fact(j) * fact(k) * fact(k) * fact(m - 1 - j) *
                            fact(m - 1 - k));
  }
  std::string id() const override { return "vertical-true-poly"; }
  int fiber_count(const Frequency& xi) const override { return xi[0] > 0.0 ? 1 : 0; }
  // z = i y, w = u + i v:
  // K = -1/(pi (w - conj z)^2) sum_{j,k} c_jk ((w - conj w)/(w - conj z))^j ((z - conj z)/(w - conj z))^k
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    const cplx w = u[0] + kI * (v[0] + y[0]);
    const cplx a = 2.0 * kI * v[0] / w;
    const cplx b = 2.0 * kI * y[0] / w;
    cplx sum = 0.0;
    cplx aj = 1.0;
    for (int j = 0; j < m_; ++j) {
      cplx bk = 1.0;
      for (int k = 0; k < m_; ++k) {
        sum += coef_[j * m_ + k] * aj * bk;
        bk *= b;
      }
      aj *= a;
    }
    return -sum / (kPi * w * w);
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    const double x = xi[0];
    return kL0 * x * std::exp(-x * (y[0] + v[0])) * special::laguerre(m_ - 1, 2.0 * x * y[0]) *
           special::laguerre(m_ - 1, 2.0 * x * v[0]);
  }
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    const double x = xi[0];
    return kQ0 * std::sqrt(x) * std::exp(-x * v[0]) * special::laguerre(m_ - 1, 2.0 * x * v[0]);
  }
  std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi, const Frequency& xi,
                                                   const quad::QuadSpec& spec) const override {
    return half_plane_gamma(psi, xi[0], m_ - 1, spec);
  }
  std::pair<double, double> fiber_support(const Frequency& xi, int) const override {
    return laguerre_support(std::abs(xi[0]), m_ - 1);
  }

 private:
  int m_;
  std::vector<double> coef_;
};

class VerticalPoly final : public VerticalBase {
 public:
  explicit VerticalPoly(int n) : VerticalBase({{"n", static_cast<double>(n)}}), n_(n) {}
  std::string id() const override { return "vertical-poly"; }
  int fiber_count(const Frequency& xi) const override { return xi[0] > 0.0 ? n_ : 0; }
  // n (-1)^n / pi (z - conj w)^{n-1} / (w - conj z)^{n+1} P_{n-1}^{(0,1)}(2 |w - z|^2 / |w - conj z|^2 - 1)
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    const cplx w_minus_zbar = u[0] + kI * (v[0] + y[0]);
    const cplx z_minus_wbar = -u[0] + kI * (v[0] + y[0]);
    const double d_same = u[0] * u[0] + (v[0] - y[0]) * (v[0] - y[0]);
    const double d_mirror = std::norm(w_minus_zbar);
    const double p = special::jacobi01(n_ - 1, 2.0 * d_same / d_mirror - 1.0);
    const double sign = n_ % 2 ? -1.0 : 1.0;
    return sign * n_ / kPi * std::pow(z_minus_wbar, n_ - 1) / std::pow(w_minus_zbar, n_ + 1) * p;
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    const double x = xi[0];
    double s = 0.0;
    for (int k = 0; k < n_; ++k)
      s += special::laguerre(k, 2.0 * x * y[0]) * special::laguerre(k, 2.0 * x * v[0]);
    return kL0 * x * std::exp(-x * (y[0] + v[0])) * s;
  }
  cplx Q_closed(const Frequency& xi, int j, const Point& v) const override {
    const double x = xi[0];
    return kQ0 * std::sqrt(x) * std::exp(-x * v[0]) * special::laguerre(j - 1, 2.0 * x * v[0]);
  }
  std::pair<double, double> fiber_support(const Frequency& xi, int) const override {
    return laguerre_support(std::abs(xi[0]), n_ - 1);
  }

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// Wavelet space of the Mexican hat: G = R with exp(2 pi i x xi), Y = (0, inf), dlambda = dv / v^2.

quad::WeightedMeasure wavelet_lambda() {
  auto m = quad::WeightedMeasure::lebesgue(quad::Domain1D::half_line(0.0));
  m.density = [](double v) { return 1.0 / (v * v); };
  m.substitution = quad::Substitution::log;
  return m;
}

class WaveletAffine final : public KernelModel {
 public:
  WaveletAffine()
      : KernelModel(GroupModel(GroupKind::real_two_pi), wavelet_lambda(), {0.0, kInf}, {}),
        w_(special::mexican_hat()) {}
  std::string id() const override { return "wavelet-affine"; }
  void check_y(const Point& v) const override {
    KernelModel::check_y(v);
    if (!(v[0] > 0.0)) throw Error(Errc::domain_violation, "wavelet scale must be positive");
  }
  // F psi vanishes at 0, so the fiber at xi = 0 is trivial.
  int fiber_count(const Frequency& xi) const override { return xi[0] != 0.0 ? 1 : 0; }
  // <psi_{u,v}, psi_{0,y}> = sqrt(v y) int exp(-2 pi i u w) F psi(v w) F psi(y w) dw in closed form.
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    const double c = w_.admissibility_constant;
    const double yy = y[0];
    const double vv = v[0];
    const double a = 2.0 * kPi * kPi * (vv * vv + yy * yy);
    const double s = 1.0 / (2.0 * a);
    const double b = 2.0 * kPi * u[0];
    const double b2 = b * b;
    const double amp = c * c * 32.0 * std::pow(kPi, 5) * vv * vv * yy * yy;
    return std::sqrt(vv * yy) * amp * std::sqrt(kPi / a) * s * s *
           (s * s * b2 * b2 - 6.0 * s * b2 + 3.0) * std::exp(-0.5 * s * b2);
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    return std::sqrt(y[0] * v[0]) * w_.freq_profile(y[0] * xi[0]) * w_.freq_profile(v[0] * xi[0]);
  }
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    return std::sqrt(v[0]) * w_.freq_profile(v[0] * xi[0]);
  }
  std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi, const Frequency& xi,
                                                   const quad::QuadSpec& spec) const override {
    auto dv_over_v = quad::WeightedMeasure::lebesgue(quad::Domain1D::half_line(0.0));
    dv_over_v.density = [](double v) { return 1.0 / v; };
    dv_over_v.substitution = quad::Substitution::log;
    return integrate_with(
        [&](double v) {
          const double f = w_.freq_profile(v * xi[0]);
          return psi(Point(v)) * f * f;
        },
        dv_over_v, psi, spec);
  }
  std::pair<double, double> sample_region() const override { return {0.05, 2.0}; }
  std::pair<double, double> fiber_support(const Frequency& xi, int) const override {
    return {0.0, 2.0 / std::abs(xi[0])};
  }

 private:
  const special::WaveletModel& w_;
};

// ---------------------------------------------------------------------------
// Unit disk in polar coordinates: G = R / 2 pi Z, dual Z, Y = [0, 1), dlambda = v dv.

quad::WeightedMeasure disk_lambda() {
  auto m = quad::WeightedMeasure::lebesgue(quad::Domain1D::interval(0.0, 1.0));
  m.density = [](double v) { return v; };
  return m;
}

class RadialBase : public KernelModel {
 protected:
  RadialBase() : KernelModel(GroupModel(GroupKind::circle), disk_lambda(), {0.0, 1.0}, {}) {}

 public:
  void check_y(const Point& v) const override {
    KernelModel::check_y(v);
    if (!(v[0] >= 0.0 && v[0] < 1.0))
      throw Error(Errc::domain_violation, "radius must lie in [0, 1)");
  }
  std::pair<double, double> sample_region() const override { return {0.05, 0.9}; }
  std::pair<double, double> fiber_support(const Frequency&, int) const override {
    return {0.0, 1.0};
  }

 protected:
  static cplx bergman_term(double u, double r) {
    const cplx d = 1.0 - r * std::polar(1.0, u);
    return 2.0 / (d * d);
  }
  static cplx L_of(int k, double y, double v) { return 2.0 * (k + 1) * std::pow(y * v, k); }
  static cplx q_of(int k, double v) { return std::sqrt(2.0 * (k + 1)) * std::pow(v, k); }
  // (k + 1) int_0^1 psi(sqrt r) r^k dr.
  static quad::IntegralResult disk_gamma(const SymbolSpec& psi, int k, const quad::QuadSpec& spec) {
    const auto m = quad::WeightedMeasure::lebesgue(quad::Domain1D::interval(0.0, 1.0));
    std::vector<double> bp;
    for (double b : psi.breakpoints())
      if (b > 0.0) bp.push_back(b * b);
    return quad::integrate(
        [&](double r) { return (k + 1.0) * psi(Point(std::sqrt(r))) * std::pow(r, k); }, m, spec,
        bp);
  }
};

class RadialAnalytic final : public RadialBase {
 public:
  std::string id() const override { return "radial-analytic"; }
  int fiber_count(const Frequency& xi) const override { return xi[0] >= 0.0 ? 1 : 0; }
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    return bergman_term(u[0], y[0] * v[0]);
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    return L_of(static_cast<int>(xi[0]), y[0], v[0]);
  }
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    return q_of(static_cast<int>(xi[0]), v[0]);
  }
  std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi, const Frequency& xi,
                                                   const quad::QuadSpec& spec) const override {
    return disk_gamma(psi, static_cast<int>(xi[0]), spec);
  }
};

class RadialHarmonic final : public RadialBase {
 public:
  std::string id() const override { return "radial-harmonic"; }
  int fiber_count(const Frequency&) const override { return 1; }
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    const double r = y[0] * v[0];
    return bergman_term(u[0], r) + bergman_term(-u[0], r) - 2.0;
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    return L_of(std::abs(static_cast<int>(xi[0])), y[0], v[0]);
  }
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    return q_of(std::abs(static_cast<int>(xi[0])), v[0]);
  }
  std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi, const Frequency& xi,
                                                   const quad::QuadSpec& spec) const override {
    return disk_gamma(psi, std::abs(static_cast<int>(xi[0])), spec);
  }
};

// ---------------------------------------------------------------------------
// Angular (dilation-invariant) operators: G = R with exp(i x xi), Y = (0, pi), Lebesgue.

class AngularAnalytic final : public KernelModel {
 public:
  AngularAnalytic()
      : KernelModel(GroupModel(GroupKind::real_angular),
                    quad::WeightedMeasure::lebesgue(quad::Domain1D::interval(0.0, kPi)),
                    {0.0, kPi}, {}) {}
  std::string id() const override { return "angular-analytic"; }
  void check_y(const Point& v) const override {
    KernelModel::check_y(v);
    if (!(v[0] >= 0.0 && v[0] <= kPi)) throw Error(Errc::domain_violation, "angle must lie in (0, pi)");
  }
  int fiber_count(const Frequency&) const override { return 1; }
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    const cplx sh = std::sinh(0.5 * (u[0] + kI * (v[0] + y[0])));
    return -kL0 / (4.0 * sh * sh);
  }
  // 2 xi / (1 - exp(-2 pi xi)), continuous at 0 with value 1 / pi.
  static double weight(double xi) {
    if (xi == 0.0) return 1.0 / kPi;
    return -2.0 * xi / std::expm1(-2.0 * kPi * xi);
  }
  // log weight(xi); for xi < 0 the factor exp(2 pi xi) is split off so that
  // weight * exp(-xi s) stays finite for s < 2 pi.
  static double log_weight(double xi) {
    if (xi == 0.0) return -std::log(kPi);
    if (xi > 0.0) return std::log(2.0 * xi) - std::log(-std::expm1(-2.0 * kPi * xi));
    return std::log(-2.0 * xi) + 2.0 * kPi * xi - std::log1p(-std::exp(2.0 * kPi * xi));
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    return std::exp(log_weight(xi[0]) - xi[0] * (y[0] + v[0]));
  }
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    return std::exp(0.5 * log_weight(xi[0]) - xi[0] * v[0]);
  }
  std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi, const Frequency& xi,
                                                   const quad::QuadSpec& spec) const override {
    const double x = xi[0];
    const double c = weight(x);
    const auto m = quad::WeightedMeasure::lebesgue(quad::Domain1D::interval(0.0, kPi));
    return integrate_with([&](double v) { return c * psi(Point(v)) * std::exp(-2.0 * x * v); }, m,
                          psi, spec);
  }
  std::pair<double, double> sample_region() const override { return {0.1, 2.9}; }
  std::pair<double, double> fiber_support(const Frequency&, int) const override {
    return {0.0, kPi};
  }
};

// ---------------------------------------------------------------------------
// Complex Gaussian kernel on C^n = R^n x R^n: exp(2 pi i <x, xi>), nu = Lebesgue,
// dlambda = (2 alpha^2 / pi)^n exp(-4 alpha^2 |v|^2) dv.

quad::WeightedMeasure gaussian_lambda(double alpha) {
  auto m = quad::WeightedMeasure::lebesgue(quad::Domain1D::line(), 2.0 * alpha * alpha / kPi);
  m.density = [alpha](double v) { return std::exp(-4.0 * alpha * alpha * v * v); };
  return m;
}

class GaussianRbf final : public KernelModel {
 public:
  GaussianRbf(int n, double alpha)
      : KernelModel(GroupModel(GroupKind::real_two_pi, n), gaussian_lambda(alpha), {-kInf, kInf},
                    {{"n", static_cast<double>(n)}, {"alpha", alpha}}, n),
        n_(n),
        alpha_(alpha) {}
  std::string id() const override { return "gaussian-rbf"; }
  int fiber_count(const Frequency&) const override { return 1; }
  cplx K0(const Point& u, const Point& v, const Point& y) const override {
    cplx e = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double s = v[j] + y[j];
      e += u[j] * u[j] - s * s + 2.0 * kI * u[j] * s;
    }
    return std::exp(-alpha_ * alpha_ * e);
  }
  cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const override {
    double e = 0.0;
    for (int j = 0; j < n_; ++j)
      e += 2.0 * kPi * (v[j] + y[j]) * xi[j] + kPi * kPi * xi[j] * xi[j] / (alpha_ * alpha_);
    return std::pow(std::sqrt(kPi) / alpha_, n_) * std::exp(-e);
  }
  cplx Q_closed(const Frequency& xi, int, const Point& v) const override {
    double e = 0.0;
    for (int j = 0; j < n_; ++j)
      e += 2.0 * kPi * v[j] * xi[j] + kPi * kPi * xi[j] * xi[j] / (2.0 * alpha_ * alpha_);
    return std::pow(std::sqrt(kPi) / alpha_, 0.5 * n_) * std::exp(-e);
  }
  // |q|^2 exp(-4 alpha^2 |v|^2) in one exponent.
  cplx gram_density(const Frequency& xi, int, int, const Point& v) const override {
    double e = 0.0;
    for (int j = 0; j < n_; ++j)
      e += 4.0 * kPi * v[j] * xi[j] + kPi * kPi * xi[j] * xi[j] / (alpha_ * alpha_) +
           4.0 * alpha_ * alpha_ * v[j] * v[j];
    return std::pow(std::sqrt(kPi) / alpha_, n_) * std::exp(-e);
  }
  std::pair<double, double> sample_region() const override { return {-1.5 / alpha_, 1.5 / alpha_}; }
  // |q|^2 lambda is a Gaussian centred at -pi xi / (2 alpha^2) with deviation 1 / (2 sqrt 2 alpha).
  std::pair<double, double> fiber_support(const Frequency& xi, int coord) const override {
    const double c = -kPi * xi[coord] / (2.0 * alpha_ * alpha_);
    return {c - 3.0 / alpha_, c + 3.0 / alpha_};
  }
  // About 11 standard deviations; K0 grows like exp(alpha^2 |v|^2) beyond it.
  std::pair<double, double> fiber_extent(const Frequency& xi, int coord) const override {
    const double c = -kPi * xi[coord] / (2.0 * alpha_ * alpha_);
    return {c - 4.0 / alpha_, c + 4.0 / alpha_};
  }

 private:
  int n_;
  double alpha_;
};

// ---------------------------------------------------------------------------

int integer_param(const ModelParams& p, const std::string& name, int lo, int hi) {
  const double v = param(p, name);
  if (v != std::round(v) || v < lo || v > hi)
    throw Error(Errc::invalid_param, name + " must be an integer in [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "], got " + format_number(v));
  return static_cast<int>(v);
}

// Defaults overridden by the supplied values; unknown names are rejected.
ModelParams merge_params(const ModelFamily& fam, const ModelParams& given) {
  ModelParams out = fam.defaults;
  for (const auto& [k, v] : given) {
    bool found = false;
    for (auto& [dk, dv] : out) {
      if (dk == k) {
        dv = v;
        found = true;
      }
    }
    if (!found) throw Error(Errc::invalid_param, "model " + fam.id + " has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw Error(Errc::invalid_param, "parameter " + k + " must be finite");
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

KernelModel::KernelModel(GroupModel g, quad::WeightedMeasure lambda,
                         std::pair<double, double> bounds, ModelParams params, int y_dim)
    : group_(g),
      y_measure_(std::move(lambda)),
      y_bounds_(bounds),
      params_(std::move(params)),
      y_dim_(y_dim) {}

std::string KernelModel::spec_string() const {
  std::string s = id();
  char sep = ':';
  for (const auto& [k, v] : params_) {
    s += sep;
    s += k + "=" + format_number(v);
    sep = ',';
  }
  return s;
}

void KernelModel::check_y(const Point& v) const {
  if (static_cast<int>(v.size()) != y_dim_)
    throw Error(Errc::domain_violation, "point of Y has " + std::to_string(v.size()) +
                                            " coordinates, expected " + std::to_string(y_dim_));
  for (double c : v) {
    if (!std::isfinite(c) || c < y_bounds_.first || c > y_bounds_.second)
      throw Error(Errc::domain_violation,
                  "coordinate " + format_number(c) + " is outside Y of " + id());
  }
}

std::pair<double, double> KernelModel::fiber_extent(const Frequency&, int) const {
  return y_bounds_;
}

cplx KernelModel::gram_density(const Frequency& xi, int j, int k, const Point& v) const {
  double w = 1.0;
  if (y_measure_.density)
    for (int i = 0; i < y_dim_; ++i) w *= y_measure_.density(v[static_cast<std::size_t>(i)]);
  if (w == 0.0) return 0.0;
  return std::conj(Q_closed(xi, j, v)) * Q_closed(xi, k, v) * w;
}

std::optional<quad::IntegralResult> KernelModel::gamma_closed(const SymbolSpec&, const Frequency&,
                                                              const quad::QuadSpec&) const {
  return std::nullopt;
}

const std::vector<ModelFamily>& model_families() {
  static const std::vector<ModelFamily> families = {
      {"vertical-analytic", {}, "analytic Bergman space over the upper half-plane, horizontal translations"},
      {"vertical-harmonic", {}, "harmonic Bergman space over the upper half-plane, horizontal translations"},
      {"vertical-true-poly", {{"m", 2}}, "true-polyanalytic Bergman space of order m over the upper half-plane"},
      {"vertical-poly", {{"n", 2}}, "polyanalytic Bergman space of order n over the upper half-plane"},
      {"wavelet-affine", {}, "Mexican-hat wavelet space over the positive affine group"},
      {"radial-analytic", {}, "analytic Bergman space over the unit disk, rotations"},
      {"radial-harmonic", {}, "harmonic Bergman space over the unit disk, rotations"},
      {"angular-analytic", {}, "analytic Bergman space over the upper half-plane, dilations"},
      {"gaussian-rbf", {{"n", 1}, {"alpha", 1.0}}, "complex Gaussian (RBF) kernel on C^n, n in {1, 2}"},
  };
  return families;
}

std::vector<std::string> list_models() {
  std::vector<std::string> ids;
  for (const auto& f : model_families()) ids.push_back(f.id);
  return ids;
}

ModelPtr get_model(std::string_view id, const ModelParams& params) {
  const ModelFamily* fam = nullptr;
  for (const auto& f : model_families())
    if (f.id == id) fam = &f;
  if (fam == nullptr) throw Error(Errc::unknown_model, "unknown model '" + std::string(id) + "'");
  const ModelParams p = merge_params(*fam, params);
  if (id == "vertical-analytic") return std::make_shared<VerticalAnalytic>();
  if (id == "vertical-harmonic") return std::make_shared<VerticalHarmonic>();
  if (id == "vertical-true-poly")
    return std::make_shared<VerticalTruePoly>(integer_param(p, "m", 1, 20));
  if (id == "vertical-poly") return std::make_shared<VerticalPoly>(integer_param(p, "n", 1, 20));
  if (id == "wavelet-affine") return std::make_shared<WaveletAffine>();
  if (id == "radial-analytic") return std::make_shared<RadialAnalytic>();
  if (id == "radial-harmonic") return std::make_shared<RadialHarmonic>();
  if (id == "angular-analytic") return std::make_shared<AngularAnalytic>();
  const int n = integer_param(p, "n", 1, 2);
  const double alpha = param(p, "alpha");
  if (!(alpha > 0.0)) throw Error(Errc::invalid_param, "alpha must be positive");
  return std::make_shared<GaussianRbf>(n, alpha);
}

ModelPtr parse_model_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view id = text.substr(0, colon);
  ModelParams params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw Error(Errc::invalid_param, "expected name=value, got '" + std::string(item) + "'");
      const std::string_view val = item.substr(eq + 1);
      double v = 0.0;
      const auto [end, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (val.empty() || ec != std::errc{} || end != val.data() + val.size())
        throw Error(Errc::invalid_param, "cannot parse value '" + std::string(val) + "'");
      params.emplace_back(std::string(item.substr(0, eq)), v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return get_model(id, params);
}

namespace {

void check_group_point(const KernelModel& m, const Point& x) {
  if (static_cast<int>(x.size()) != m.group().dimension())
    throw Error(Errc::domain_violation, "point of G has " + std::to_string(x.size()) +
                                            " coordinates, expected " +
                                            std::to_string(m.group().dimension()));
  for (double c : x)
    if (!std::isfinite(c)) throw Error(Errc::domain_violation, "non-finite point of G");
}

}  // namespace

cplx eval_K(const KernelModel& m, const Point& x, const Point& y, const Point& u, const Point& v) {
  check_group_point(m, x);
  check_group_point(m, u);
  m.check_y(y);
  m.check_y(v);
  return m.K0(m.group().subtract(u, x), v, y);
}

cplx eval_L(const KernelModel& m, const Frequency& xi, const Point& y, const Point& v) {
  m.group().check_frequency(xi);
  m.check_y(y);
  m.check_y(v);
  if (!m.omega_contains(xi)) return 0.0;
  return m.L_closed(xi, y, v);
}

cplx eval_q(const KernelModel& m, const Frequency& xi, int j, const Point& v) {
  m.group().check_frequency(xi);
  m.check_y(v);
  const int d = m.fiber_count(xi);
  if (d == 0) throw Error(Errc::frequency_outside_omega, "frequency outside Omega of " + m.id());
  if (j < 1 || j > d)
    throw Error(Errc::index_out_of_range,
                "basis index " + std::to_string(j) + " outside 1.." + std::to_string(d));
  return m.Q_closed(xi, j, v);
}

}  // namespace rkhsdiag
