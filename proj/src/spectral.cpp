#include "rkhsdiag/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "rkhsdiag/errors.hpp"
#include "rkhsdiag/fiber.hpp"

namespace rkhsdiag {

namespace {

void require_omega(const KernelModel& m, const Frequency& xi) {
  m.group().check_frequency(xi);
  if (!m.omega_contains(xi))
    throw Error(Errc::frequency_outside_omega, "frequency outside Omega of " + m.spec_string());
}

void require_bounded(const KernelModel& m, const SymbolSpec& psi) {
  const auto [lo, hi] = m.y_bounds();
  psi.check_bounded(lo, hi);
}

cplx checked(const quad::IntegralResult& r, const char* what) {
  if (!r.converged) throw Error(Errc::non_convergence, std::string(what) + " did not converge");
  return r.value;
}

// Numeric L_{xi,y}(v), cached by v so the entries of a vector share the Fourier integrals.
class NumericL {
 public:
  NumericL(const KernelModel& m, const Frequency& xi, const Point& y, const quad::QuadSpec& spec)
      : m_(m), xi_(xi), y_(y), spec_(spec) {}
  const quad::IntegralResult& operator()(const Point& v) {
    const std::pair<double, double> key{v[0], v.size() > 1 ? v[1] : 0.0};
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, compute_L_numeric(m_, xi_, y_, v, spec_)).first;
    return it->second;
  }

 private:
  const KernelModel& m_;
  Frequency xi_;
  Point y_;
  quad::QuadSpec spec_;
  std::map<std::pair<double, double>, quad::IntegralResult> cache_;
};

MatrixValue gamma_unchecked(const KernelModel& m, const SymbolSpec& psi, const Frequency& xi,
                            const quad::QuadSpec& spec) {
  const int d = m.fiber_count(xi);
  const std::vector<double> bps = psi.breakpoints();
  const auto entry = [&](int j, int k) {
    return checked(integrate_y_density(
                       m, [&](const Point& w) { return psi(w) * m.gram_density(xi, j, k, w); },
                       spec, bps),
                   "spectral function integral");
  };
  MatrixValue g(d, d);
  for (int j = 1; j <= d; ++j) {
    for (int k = j; k <= d; ++k) {
      g(j - 1, k - 1) = entry(j, k);
      if (k != j) g(k - 1, j - 1) = psi.is_real() ? std::conj(g(j - 1, k - 1)) : entry(k, j);
    }
  }
  return g;
}

// Columns r_i = R T_psi K_{0,y_i}, entries int_Y psi L_num(xi, y_i, v) conj(q_k(v)) d lambda.
// An unconverged L_num is accepted where its error, times the rest of the integrand,
// stays below the inner absolute tolerance.
Eigen::VectorXcd toeplitz_on_kernel(const KernelModel& m, const SymbolSpec& psi,
                                    const Frequency& xi, const Point& y,
                                    const quad::QuadSpec& spec) {
  const int d = m.fiber_count(xi);
  const quad::QuadSpec inner = spec.scaled(0.1);
  NumericL L(m, xi, y, inner);
  const quad::WeightedMeasure& lam = m.y_measure();
  const std::vector<double> bps = psi.breakpoints();
  // |r_k| is of the order of |Q(y)|; unconverged nodes are judged against that size.
  double qy = 0.0;
  for (int k = 1; k <= d; ++k) qy += std::norm(m.Q_closed(xi, k, y));
  const double node_tol = std::max(inner.abs_tol, inner.rel_tol * std::sqrt(qy));
  Eigen::VectorXcd r(d);
  for (int k = 1; k <= d; ++k)
    r(k - 1) = checked(
        integrate_fiber_extent(m, xi,
                    [&](const Point& v) -> cplx {
                      const cplx w = psi(v) * std::conj(m.Q_closed(xi, k, v));
                      if (w == cplx(0.0)) return w;
                      const quad::IntegralResult& l = L(v);
                      if (!l.converged) {
                        double dens = 1.0;
                        for (std::size_t i = 0; i < v.size(); ++i) dens *= lam.weight(v[i]);
                        if (!(l.error_estimate * std::abs(w) * dens <= node_tol))
                          throw Error(Errc::non_convergence, "Fourier integral of K did not converge");
                      }
                      return w * l.value;
                    },
                    spec, bps),
        "Toeplitz action on the kernel");
  return r;
}

}  // namespace

cplx gamma_scalar(const KernelModel& m, const SymbolSpec& psi, const Frequency& xi,
                  const quad::QuadSpec& spec) {
  require_omega(m, xi);
  if (m.fiber_count(xi) != 1)
    throw Error(Errc::non_scalar_fiber, "fiber dimension exceeds one; use gamma_matrix");
  require_bounded(m, psi);
  return gamma_unchecked(m, psi, xi, spec)(0, 0);
}

MatrixValue gamma_matrix(const KernelModel& m, const SymbolSpec& psi, const Frequency& xi,
                         const quad::QuadSpec& spec) {
  require_omega(m, xi);
  require_bounded(m, psi);
  return gamma_unchecked(m, psi, xi, spec);
}

Eigen::VectorXcd apply_R_to_kernel_vector(const KernelModel& m, const Point& y,
                                          const Frequency& xi, const quad::QuadSpec& spec) {
  require_omega(m, xi);
  m.check_y(y);
  return toeplitz_on_kernel(m, SymbolSpec::constant(1.0), xi, y, spec);
}

cplx apply_R_to_kernel(const KernelModel& m, const Point& y, const Frequency& xi,
                       const quad::QuadSpec& spec) {
  require_omega(m, xi);
  if (m.fiber_count(xi) != 1)
    throw Error(Errc::non_scalar_fiber, "fiber dimension exceeds one; use the vector form");
  return apply_R_to_kernel_vector(m, y, xi, spec)(0);
}

quad::IntegralResult transform_norm_squared(const KernelModel& m, const Point& y,
                                            const quad::QuadSpec& spec) {
  m.check_y(y);
  return integrate_dual(
      m,
      [&](const Frequency& xi) -> cplx {
        const int d = m.fiber_count(xi);
        double s = 0.0;
        for (int j = 1; j <= d; ++j) s += std::norm(m.Q_closed(xi, j, y));
        return s;
      },
      spec);
}

cplx lambda_inverse_toeplitz(const KernelModel& m, const SymbolSpec& psi, const Frequency& xi,
                             const Point& y_anchor, const quad::QuadSpec& spec) {
  require_omega(m, xi);
  if (m.fiber_count(xi) != 1)
    throw Error(Errc::non_scalar_fiber, "fiber dimension exceeds one; use lambda_inverse_matrix");
  require_bounded(m, psi);
  m.check_y(y_anchor);
  const cplx q = m.Q_closed(xi, 1, y_anchor);
  if (std::abs(q) < 1e-8)
    throw Error(Errc::anchor_degenerate, "q_xi vanishes (below 1e-8) at the anchor");
  return toeplitz_on_kernel(m, psi, xi, y_anchor, spec)(0) / std::conj(q);
}

AnchorSolution lambda_inverse_matrix(const KernelModel& m, const SymbolSpec& psi,
                                     const Frequency& xi, const std::vector<Point>& anchors,
                                     const quad::QuadSpec& spec) {
  require_omega(m, xi);
  require_bounded(m, psi);
  const int d = m.fiber_count(xi);
  if (static_cast<int>(anchors.size()) != d)
    throw Error(Errc::invalid_param, "need exactly d_xi = " + std::to_string(d) + " anchors");
  MatrixValue A(d, d);
  for (int i = 0; i < d; ++i) {
    const Point& y = anchors[static_cast<std::size_t>(i)];
    m.check_y(y);
    for (int j = 1; j <= d; ++j) A(j - 1, i) = std::conj(m.Q_closed(xi, j, y));
  }
  const Eigen::JacobiSVD<MatrixValue> svd(A);
  const auto& s = svd.singularValues();
  const double cond = s(d - 1) > 0.0 ? s(0) / s(d - 1) : INFINITY;
  if (!(cond <= 1e8))
    throw Error(Errc::singular_anchor_matrix,
                "anchor matrix condition number " + std::to_string(cond) + " exceeds 1e8");
  MatrixValue R(d, d);
  for (int i = 0; i < d; ++i)
    R.col(i) = toeplitz_on_kernel(m, psi, xi, anchors[static_cast<std::size_t>(i)], spec);
  AnchorSolution out;
  // Gamma A = R, solved as A^T Gamma^T = R^T.
  out.value = A.transpose().fullPivLu().solve(R.transpose()).transpose();
  out.condition = cond;
  out.anchors = anchors;
  return out;
}

AnchorSolution lambda_inverse_matrix(const KernelModel& m, const SymbolSpec& psi,
                                     const Frequency& xi, const quad::QuadSpec& spec) {
  require_omega(m, xi);
  const int d = m.fiber_count(xi);
  std::vector<double> probs;
  for (int i = 0; i < d; ++i) probs.push_back(d == 1 ? 0.5 : 0.2 + 0.6 * i / (d - 1));
  std::mt19937_64 rng(kDefaultSeed);
  constexpr int kDraws = 8;
  for (int attempt = 0;; ++attempt) {
    try {
      return lambda_inverse_matrix(m, psi, xi, fiber_quantiles(m, xi, probs), spec);
    } catch (const Error& e) {
      if (e.code() != Errc::singular_anchor_matrix || attempt + 1 == kDraws) throw;
    }
    for (double& p : probs) p = 0.05 + 0.9 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    std::sort(probs.begin(), probs.end());
  }
}

BerezinResult berezin(const KernelModel& m, const SymbolSpec& psi, const Point& y,
                      const quad::QuadSpec& spec) {
  m.check_y(y);
  require_bounded(m, psi);
  BerezinResult out;
  const quad::IntegralResult den = integrate_dual(
      m, [&](const Frequency& xi) -> cplx { return eval_L(m, xi, y, y).real(); }, spec);
  out.denominator = den.value.real();
  if (!(std::abs(out.denominator) >= 1e-30))
    throw Error(Errc::denominator_underflow, "diagonal kernel value below 1e-30");

  const quad::QuadSpec inner = spec.scaled(0.1);
  std::map<Frequency, MatrixValue> memo;
  const quad::IntegralResult num = integrate_dual(
      m,
      [&](const Frequency& xi) -> cplx {
        if (!m.omega_contains(xi)) return 0.0;
        const auto d = m.fiber_count(xi);
        Eigen::VectorXcd Q(d);
        for (int j = 0; j < d; ++j) Q(j) = m.Q_closed(xi, j + 1, y);
        // |Gamma| <= sup |psi|, so nodes where Q(y) underflows contribute nothing.
        if (Q.squaredNorm() == 0.0) return 0.0;
        auto it = memo.find(xi);
        if (it == memo.end()) it = memo.emplace(xi, gamma_unchecked(m, psi, xi, inner)).first;
        const MatrixValue& g = it->second;
        // tr(Gamma conj(Q) Q^T) = sum_jk Gamma_jk conj(Q_k) Q_j.
        return Q.transpose() * g * Q.conjugate();
      },
      spec);
  out.numerator = num.value;
  out.value = num.value / out.denominator;
  out.converged = den.converged && num.converged;
  return out;
}

SpectrumRange spectrum_range(const KernelModel& m, const SymbolSpec& psi,
                             const std::vector<Frequency>& xi_grid, const quad::QuadSpec& spec) {
  if (!psi.is_real()) throw Error(Errc::invalid_symbol, "spectrum range needs a real symbol");
  require_bounded(m, psi);
  SpectrumRange out;
  out.min = INFINITY;
  out.max = -INFINITY;
  for (const Frequency& xi : xi_grid) {
    m.group().check_frequency(xi);
    if (!m.omega_contains(xi)) continue;
    const MatrixValue g = gamma_unchecked(m, psi, xi, spec);
    const Eigen::SelfAdjointEigenSolver<MatrixValue> eig(0.5 * (g + g.adjoint()),
                                                         Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    out.min = std::min(out.min, ev.minCoeff());
    out.max = std::max(out.max, ev.maxCoeff());
    out.grid.push_back(xi);
  }
  if (out.grid.empty())
    throw Error(Errc::frequency_outside_omega, "no grid frequency lies in Omega");
  out.sup = std::max(std::abs(out.min), std::abs(out.max));
  return out;
}

}  // namespace rkhsdiag
