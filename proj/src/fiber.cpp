#include "rkhsdiag/fiber.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

#include "rkhsdiag/errors.hpp"

namespace rkhsdiag {

namespace {

constexpr double kPi = std::numbers::pi;

void require_omega(const KernelModel& m, const Frequency& xi) {
  m.group().check_frequency(xi);
  if (!m.omega_contains(xi))
    throw Error(Errc::frequency_outside_omega, "frequency outside Omega of " + m.spec_string());
}

Point with_coord(std::size_t n, std::size_t c, double t) {
  Point p = Point::filled(n, 0.0);
  p[c] = t;
  return p;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Fisher-Yates with a portable index draw.
std::vector<int> permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = std::min(i, static_cast<int>(uniform01(rng) * (i + 1)));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::commutative: return "commutative";
    case Verdict::non_commutative: return "non-commutative";
    case Verdict::outside_omega: return "outside-omega";
  }
  return "unknown";
}

namespace {

quad::IntegralResult integrate_y_with(const quad::WeightedMeasure& lam,
                                      const quad::WeightedMeasure& lam1, int dim,
                                      const YFunction& f, const quad::QuadSpec& spec,
                                      const std::vector<double>& breakpoints) {
  if (dim == 1)
    return quad::integrate([&](double t) { return f(Point(t)); }, lam, spec, breakpoints);
  // Two coordinates, iterated; builtin symbols only depend on the first one.
  const quad::QuadSpec inner_spec = spec.scaled(0.1);
  bool inner_ok = true;
  long inner_evals = 0;
  quad::IntegralResult r = quad::integrate(
      [&](double t0) {
        const quad::IntegralResult in =
            quad::integrate([&](double t1) { return f(Point{t0, t1}); }, lam1, inner_spec);
        inner_ok = inner_ok && in.converged;
        inner_evals += in.evaluations;
        return in.value;
      },
      lam, spec, breakpoints);
  r.converged = r.converged && inner_ok;
  r.evaluations += inner_evals;
  return r;
}

}  // namespace

quad::IntegralResult integrate_y(const KernelModel& m, const YFunction& f,
                                 const quad::QuadSpec& spec,
                                 const std::vector<double>& breakpoints) {
  return integrate_y_with(m.y_measure(), m.y_measure(), m.y_dimension(), f, spec, breakpoints);
}

quad::IntegralResult integrate_fiber_extent(const KernelModel& m, const Frequency& xi,
                                            const YFunction& f, const quad::QuadSpec& spec,
                                            const std::vector<double>& breakpoints) {
  const auto restrict_to = [&](int coord) {
    quad::WeightedMeasure lam = m.y_measure();
    const auto ext = m.fiber_extent(xi, coord);
    if (ext != m.y_bounds()) lam.domain = quad::Domain1D::interval(ext.first, ext.second);
    return lam;
  };
  return integrate_y_with(restrict_to(0), restrict_to(m.y_dimension() > 1 ? 1 : 0),
                          m.y_dimension(), f, spec, breakpoints);
}

quad::IntegralResult integrate_y_density(const KernelModel& m, const YFunction& f,
                                         const quad::QuadSpec& spec,
                                         const std::vector<double>& breakpoints) {
  quad::WeightedMeasure lam = m.y_measure();
  lam.density = nullptr;
  return integrate_y_with(lam, lam, m.y_dimension(), f, spec, breakpoints);
}

quad::IntegralResult integrate_dual(const KernelModel& m,
                                    const std::function<cplx(const Frequency&)>& f,
                                    const quad::QuadSpec& spec) {
  const GroupModel& g = m.group();
  const quad::WeightedMeasure dual = g.dual_factor();
  const double origin[] = {0.0};
  if (g.dimension() == 1)
    return quad::integrate([&](double x) { return f(Frequency(x)); }, dual, spec, origin);
  const quad::QuadSpec inner_spec = spec.scaled(0.1);
  bool inner_ok = true;
  long inner_evals = 0;
  quad::IntegralResult r = quad::integrate(
      [&](double x0) {
        const quad::IntegralResult in = quad::integrate(
            [&](double x1) { return f(Frequency{x0, x1}); }, dual, inner_spec, origin);
        inner_ok = inner_ok && in.converged;
        inner_evals += in.evaluations;
        return in.value;
      },
      dual, spec, origin);
  r.converged = r.converged && inner_ok;
  r.evaluations += inner_evals;
  return r;
}

quad::IntegralResult compute_L_numeric(const KernelModel& m, const Frequency& xi, const Point& y,
                                       const Point& v, const quad::QuadSpec& spec) {
  m.group().check_frequency(xi);
  m.check_y(y);
  m.check_y(v);
  return quad::fourier_integral([&](const Point& u) { return m.K0(u, v, y); }, xi, m.group(), spec);
}

quad::IntegralResult reconstruct_K(const KernelModel& m, const Point& x, const Point& y,
                                   const Point& v, const quad::QuadSpec& spec) {
  m.check_y(y);
  m.check_y(v);
  const GroupModel& g = m.group();
  if (static_cast<int>(x.size()) != g.dimension())
    throw Error(Errc::domain_violation, "point of G has the wrong dimension");
  const auto L = [&](const Frequency& xi) -> cplx {
    return m.omega_contains(xi) ? m.L_closed(xi, y, v) : cplx(0.0);
  };
  if (g.dual_is_integer()) {
    return integrate_dual(m, [&](const Frequency& xi) { return L(xi) * g.pairing(x, xi); }, spec);
  }
  // nu_hat = nu and E is symmetric, so the inverse transform at x is the forward one at -x.
  Point minus_x = x;
  for (std::size_t i = 0; i < x.size(); ++i) minus_x[i] = -x[i];
  return quad::fourier_integral([&](const Point& p) { return L(Frequency(p)); },
                                Frequency(minus_x), g, spec);
}

quad::IntegralResult fiber_dimension(const KernelModel& m, const Frequency& xi,
                                     const quad::QuadSpec& spec) {
  m.group().check_frequency(xi);
  if (!m.omega_contains(xi)) return {};
  return integrate_y(m, [&](const Point& y) { return m.L_closed(xi, y, y); }, spec);
}

double schwarz_residual(const KernelModel& m, const Frequency& xi, const std::vector<YVPair>& grid) {
  require_omega(m, xi);
  double worst = 0.0;
  for (const auto& [y, v] : grid) {
    const double lyy = eval_L(m, xi, y, y).real();
    const double lvv = eval_L(m, xi, v, v).real();
    const double lyv2 = std::norm(eval_L(m, xi, y, v));
    const double scale = lyy * lvv;
    const double r = std::abs(lyv2 - scale);
    worst = std::max(worst, scale > 1e-30 ? r / scale : r);
  }
  return worst;
}

double repro_residual(const KernelModel& m, const Frequency& xi, const Point& y, const Point& v,
                      const quad::QuadSpec& spec) {
  require_omega(m, xi);
  m.check_y(y);
  m.check_y(v);
  const quad::IntegralResult r = integrate_y(
      m, [&](const Point& w) { return m.L_closed(xi, y, w) * std::conj(m.L_closed(xi, v, w)); },
      spec);
  if (!r.converged)
    throw Error(Errc::non_convergence, "reproducing-identity integral did not converge");
  return std::abs(m.L_closed(xi, y, v) - r.value);
}

int gram_rank(const KernelModel& m, const Frequency& xi, const std::vector<Point>& samples,
              double threshold) {
  m.group().check_frequency(xi);
  const auto n = static_cast<Eigen::Index>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    m.check_y(samples[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (samples[i] == samples[j])
        throw Error(Errc::degenerate_samples, "Gram samples must be distinct");
  }
  if (n == 0 || !m.omega_contains(xi)) return 0;
  Eigen::MatrixXcd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      G(i, j) = m.L_closed(xi, samples[static_cast<std::size_t>(i)],
                           samples[static_cast<std::size_t>(j)]);
  const double norm = G.norm();
  if (norm == 0.0) return 0;
  if ((G - G.adjoint()).norm() > 1e-10 * norm)
    throw Error(Errc::degenerate_samples, "Gram matrix is not Hermitian");
  const Eigen::MatrixXcd H = 0.5 * (G + G.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * norm)
    throw Error(Errc::degenerate_samples, "Gram matrix is not positive semidefinite");
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > threshold * s(0)) ++rank;
  return rank;
}

quad::IntegralResult project_fiber(const KernelModel& m, const Frequency& xi, const YFunction& h,
                                   const Point& v, const quad::QuadSpec& spec) {
  m.group().check_frequency(xi);
  m.check_y(v);
  if (!m.omega_contains(xi)) return {};
  return integrate_y(m, [&](const Point& w) { return h(w) * std::conj(m.L_closed(xi, v, w)); },
                     spec);
}

quad::IntegralResult projection_fiber_oracle(const KernelModel& m, const Frequency& xi,
                                             const YFunction& h, const Point& v,
                                             const quad::QuadSpec& spec) {
  const GroupModel& g = m.group();
  g.check_frequency(xi);
  m.check_y(v);
  if (g.dimension() != 1)
    throw Error(Errc::invalid_param, "the projection oracle supports one-dimensional groups");
  const quad::QuadSpec mid = spec.scaled(0.1);
  const quad::QuadSpec inner = spec.scaled(0.01);
  bool ok = true;
  long evals = 0;
  const bool circle = g.dual_is_integer();
  const double xi0 = xi[0];
  // Auxiliary f: a Gaussian on R (nonvanishing transform), the character itself on the circle.
  const auto f = [&](double u) -> cplx {
    return circle ? std::polar(1.0, xi0 * u) : cplx(std::exp(-0.5 * u * u));
  };
  // P(f x h)(x, v) = int_G int_Y f(u) h(w) K_{0,w}(x - u, v) d lambda(w) d nu(u).
  const auto projected = [&](double x) -> cplx {
    const quad::IntegralResult r = quad::integrate(
        [&](double u) -> cplx {
          const cplx fu = f(u);
          if (!circle && std::abs(fu) < 1e-18) return 0.0;
          const quad::IntegralResult in = integrate_y(
              m,
              [&](const Point& w) { return h(w) * m.K0(g.subtract(Point(x), Point(u)), v, w); },
              inner);
          ok = ok && in.converged;
          evals += in.evaluations;
          return fu * in.value;
        },
        g.haar_factor(), mid);
    ok = ok && r.converged;
    evals += r.evaluations;
    return r.value;
  };
  quad::IntegralResult num =
      quad::fourier_integral([&](const Point& x) { return projected(x[0]); }, xi, g, spec);
  cplx denom = 1.0;
  if (!circle) {
    const quad::IntegralResult ff =
        quad::fourier_integral([&](const Point& x) { return f(x[0]); }, xi, g, inner);
    ok = ok && ff.converged;
    denom = ff.value;
  }
  if (std::abs(denom) < 1e-12)
    throw Error(Errc::denominator_underflow, "transform of the auxiliary Gaussian is too small");
  num.value /= denom;
  num.error_estimate /= std::abs(denom);
  num.converged = num.converged && ok;
  num.evaluations += evals;
  return num;
}

std::vector<Point> fiber_quantiles(const KernelModel& m, const Frequency& xi,
                                   const std::vector<double>& probabilities) {
  m.group().check_frequency(xi);
  if (!m.omega_contains(xi))
    throw Error(Errc::frequency_outside_omega, "no fiber density outside Omega");
  constexpr int kCells = 2048;
  const auto n = static_cast<std::size_t>(m.y_dimension());
  std::vector<Point> out(probabilities.size(), Point::filled(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    const auto [a, b] = m.fiber_support(xi, static_cast<int>(c));
    const double h = (b - a) / kCells;
    std::vector<double> cdf(kCells + 1, 0.0);
    for (int i = 0; i < kCells; ++i) {
      const double t = a + (i + 0.5) * h;
      const Point p = with_coord(n, c, t);
      const double rho = m.L_closed(xi, p, p).real() * m.y_measure().weight(t);
      cdf[static_cast<std::size_t>(i) + 1] = cdf[static_cast<std::size_t>(i)] + std::max(rho, 0.0) * h;
    }
    const double total = cdf.back();
    if (!(total > 0.0) || !std::isfinite(total))
      throw Error(Errc::degenerate_samples, "fiber density has no mass on its support");
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
      const double target = std::clamp(probabilities[k], 0.0, 1.0) * total;
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
      const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cdf.begin(), 1));
      const double lo = cdf[i - 1], hi = cdf[i];
      const double frac = hi > lo ? (target - lo) / (hi - lo) : 0.5;
      out[k][c] = a + (static_cast<double>(i - 1) + frac) * h;
    }
  }
  return out;
}

std::vector<Frequency> default_xi_grid(const KernelModel& m) {
  const auto n = static_cast<std::size_t>(m.group().dimension());
  std::vector<Frequency> out;
  if (m.group().dual_is_integer()) {
    for (int k = -4; k <= 4; ++k) out.emplace_back(Point::filled(n, k));
  } else {
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) out.emplace_back(Point::filled(n, x));
  }
  return out;
}

std::vector<YVPair> default_yv_grid(const KernelModel& m, std::uint64_t seed, int count) {
  if (count < 1) throw Error(Errc::invalid_param, "need at least one (y, v) pair");
  std::mt19937_64 rng(seed);
  const auto [lo, hi] = m.sample_region();
  const auto n = static_cast<std::size_t>(m.y_dimension());
  std::vector<YVPair> out(static_cast<std::size_t>(count),
                          YVPair{Point::filled(n, 0.0), Point::filled(n, 0.0)});
  const double width = (hi - lo) / count;
  for (int which = 0; which < 2; ++which) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::vector<int> perm = permutation(count, rng);
      for (int i = 0; i < count; ++i) {
        const double t = lo + (perm[static_cast<std::size_t>(i)] + uniform01(rng)) * width;
        YVPair& pr = out[static_cast<std::size_t>(i)];
        (which == 0 ? pr.y : pr.v)[c] = t;
      }
    }
  }
  return out;
}

namespace {

FiberReport single_report(const KernelModel& m, const Frequency& xi,
                          const std::vector<YVPair>& grid, const quad::QuadSpec& spec,
                          const ReportOptions& opt) {
  FiberReport rep;
  rep.xi = xi;
  try {
    m.group().check_frequency(xi);
    rep.declared_dimension = m.fiber_count(xi);
    const bool inside = rep.declared_dimension > 0;

    const quad::IntegralResult dim = fiber_dimension(m, xi, spec);
    rep.numeric_dimension = dim.value.real();
    rep.converged = rep.converged && dim.converged;

    for (const auto& [y, v] : grid) {
      const quad::IntegralResult num = compute_L_numeric(m, xi, y, v, spec);
      const cplx closed = eval_L(m, xi, y, v);
      double r = std::abs(num.value - closed);
      if (std::abs(closed) > 1.0) r /= std::abs(closed);
      rep.fourier_residual_max = std::max(rep.fourier_residual_max, r);
      rep.converged = rep.converged && num.converged;
    }

    if (inside) {
      const int d = rep.declared_dimension;
      for (int j = 1; j <= d; ++j) {
        for (int k = j; k <= d; ++k) {
          const quad::IntegralResult ip = integrate_y(
              m, [&](const Point& w) { return std::conj(m.Q_closed(xi, j, w)) * m.Q_closed(xi, k, w); },
              spec);
          rep.converged = rep.converged && ip.converged;
          rep.normalization_residual =
              std::max(rep.normalization_residual, std::abs(ip.value - (j == k ? 1.0 : 0.0)));
        }
      }
      rep.schwarz_residual_max = schwarz_residual(m, xi, grid);
      const std::size_t nrep = std::min(grid.size(), static_cast<std::size_t>(std::max(opt.repro_pairs, 0)));
      for (std::size_t i = 0; i < nrep; ++i)
        rep.repro_residual_max =
            std::max(rep.repro_residual_max, repro_residual(m, xi, grid[i].y, grid[i].v, spec));
      const int count = opt.gram_samples > 0 ? opt.gram_samples : d + 4;
      std::vector<double> probs;
      for (int i = 0; i < count; ++i) probs.push_back((i + 0.5) / count);
      rep.gram_rank = gram_rank(m, xi, fiber_quantiles(m, xi, probs));
      const bool one = std::abs(rep.numeric_dimension - 1.0) <= opt.tol.dimension &&
                       rep.schwarz_residual_max <= opt.tol.schwarz;
      rep.verdict = one ? Verdict::commutative : Verdict::non_commutative;
    } else {
      rep.verdict = Verdict::outside_omega;
    }
  } catch (const Error& e) {
    rep.converged = false;
    rep.error = e.what();
  }
  return rep;
}

}  // namespace

std::vector<FiberReport> commutativity_report(const KernelModel& m,
                                              const std::vector<Frequency>& xi_grid,
                                              const std::vector<YVPair>& yv_grid,
                                              const quad::QuadSpec& spec,
                                              const ReportOptions& options) {
  if (xi_grid.empty() || yv_grid.empty())
    throw Error(Errc::invalid_param, "frequency and (y, v) grids must be nonempty");
  spec.validate();
  for (const auto& [y, v] : yv_grid) {
    m.check_y(y);
    m.check_y(v);
  }
  std::vector<FiberReport> out;
  if (options.parallel && xi_grid.size() > 1) {
    std::vector<std::future<FiberReport>> jobs;
    for (const Frequency& xi : xi_grid)
      jobs.push_back(std::async(std::launch::async, single_report, std::cref(m), xi,
                                std::cref(yv_grid), std::cref(spec), std::cref(options)));
    for (auto& j : jobs) out.push_back(j.get());
  } else {
    for (const Frequency& xi : xi_grid) out.push_back(single_report(m, xi, yv_grid, spec, options));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FiberReport& a, const FiberReport& b) { return a.xi < b.xi; });
  return out;
}

}  // namespace rkhsdiag
