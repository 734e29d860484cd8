#include "rkhsdiag/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "rkhsdiag/errors.hpp"

namespace rkhsdiag::quad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600501740620, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

cplx checked_eval(const Integrand& f, double x) {
  const cplx v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(Errc::non_finite_evaluation, "integrand is not finite at x = " + std::to_string(x));
  return v;
}

struct Segment {
  double a;
  double b;
  cplx value;
  double error;
};

struct ByError {
  bool operator()(const Segment& l, const Segment& r) const { return l.error < r.error; }
};

Segment gk21(const Integrand& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  std::array<cplx, 21> fv;
  fv[0] = checked_eval(f, centr);
  for (int j = 0; j < 10; ++j) {
    const double dx = hlgth * kXgk[j];
    fv[1 + 2 * j] = checked_eval(f, centr - dx);
    fv[2 + 2 * j] = checked_eval(f, centr + dx);
  }
  cplx resk = fv[0] * kWgk[10];
  cplx resg{};
  double resabs = std::abs(fv[0]) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    const cplx pair = fv[1 + 2 * j] + fv[2 + 2 * j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(fv[1 + 2 * j]) + std::abs(fv[2 + 2 * j]));
    if (j % 2 == 1) resg += kWg[j / 2] * pair;
  }
  const cplx reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fv[0] - reskh);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::abs(fv[1 + 2 * j] - reskh) + std::abs(fv[2 + 2 * j] - reskh));

  const double h = std::abs(hlgth);
  resasc *= h;
  resabs *= h;
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
    err = std::max(50.0 * kEps * resabs, err);
  return {a, b, resk * hlgth, err};
}

double target_of(double abs_tol, double rel_tol, double magnitude) {
  return std::max(abs_tol, rel_tol * magnitude);
}

// ---------------------------------------------------------------------------
// Envelope scan on a geometric grid origin + dir * 2^k.

struct SideScan {
  std::vector<double> x;    // scan abscissae, increasing distance from the origin
  std::vector<double> env;  // |f(x)|
  std::vector<double> mass;  // |f(x)| |x - origin|, a proxy for the integral over the dyadic shell
};

SideScan scan_side(const Integrand& f, double origin, double dir, int kmin, int kmax,
                   long& evals) {
  SideScan s;
  int zeros = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const double x = origin + dir * std::ldexp(1.0, k);
    const cplx v = f(x);
    ++evals;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) break;
    s.x.push_back(x);
    s.env.push_back(std::abs(v));
    s.mass.push_back(std::abs(v) * std::ldexp(1.0, k));
    // Past the peak, a run of exact zeros (underflow) ends the scan.
    zeros = v == cplx(0.0) ? zeros + 1 : 0;
    if (zeros >= 4 && k > 0) break;
  }
  return s;
}

// Index of the first scan point after which `values` stays below `level`;
// -1 if it never does.
int settle_index(const std::vector<double>& values, double level) {
  int idx = -1;
  for (int i = static_cast<int>(values.size()) - 1; i >= 0; --i) {
    if (values[static_cast<std::size_t>(i)] < level)
      idx = i;
    else
      break;
  }
  return idx;
}

struct SidePlan {
  double cut = 0.0;        // end of the directly integrated core
  bool truncated = false;  // tail below truncation_eps * peak
};

double peak_of(const std::vector<double>& a, const std::vector<double>& b, double extra) {
  double p = extra;
  for (double e : a) p = std::max(p, e);
  for (double e : b) p = std::max(p, e);
  return p;
}

// The tail is dropped once the shell mass stays below truncation_eps times its
// peak; otherwise the core ends where the envelope falls below core_ratio * peak.
SidePlan plan_side(const SideScan& s, double peak, double peak_mass, const QuadSpec& spec,
                   double core_ratio, bool scan_hit_nonfinite) {
  SidePlan plan;
  if (s.x.empty()) throw Error(Errc::non_finite_evaluation, "integrand not finite near origin");
  if (peak == 0.0) {
    plan.cut = s.x.front();
    plan.truncated = true;
    return plan;
  }
  const int t = settle_index(s.mass, spec.truncation_eps * peak_mass);
  if (t >= 0) {
    plan.cut = s.x[static_cast<std::size_t>(t)];
    plan.truncated = true;
    return plan;
  }
  if (scan_hit_nonfinite)
    throw Error(Errc::non_finite_evaluation,
                "integrand overflows before its envelope decays below truncation_eps");
  const int c = settle_index(s.env, core_ratio * peak);
  plan.cut = c >= 0 ? s.x[static_cast<std::size_t>(c)] : s.x.back();
  plan.truncated = false;
  return plan;
}

// ---------------------------------------------------------------------------
// Tails.

// int_B^inf h(u) du (dir = +1) or int_-inf^B h(u) du (dir = -1), u = B + dir s (1/t - 1).
IntegralResult mapped_tail(const Integrand& h, double cut, double origin, double dir,
                           double abs_tol, double rel_tol, int max_sub) {
  const double s = std::max(std::abs(cut - origin), 1.0);
  Integrand g = [&](double t) -> cplx {
    const double u = cut + dir * s * (1.0 / t - 1.0);
    return h(u) * (s / (t * t));
  };
  return adaptive_gauss_kronrod(g, 0.0, 1.0, abs_tol, rel_tol, max_sub);
}

cplx wynn_epsilon(std::span<const cplx> s) {
  const std::size_t n = s.size();
  std::vector<cplx> prev(n, cplx{});
  std::vector<cplx> cur(s.begin(), s.end());
  cplx best = s.back();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<cplx> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const cplx d = cur[i + 1] - cur[i];
      const double scale = std::max(std::abs(cur[i + 1]), std::abs(cur[i]));
      if (std::abs(d) <= 8.0 * kEps * scale) return best;
      next[i] = prev[i + 1] + 1.0 / d;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if ((k + 1) % 2 == 0) best = cur.back();
  }
  return best;
}

// Sum of integrals over consecutive half periods, accelerated with Wynn epsilon.
IntegralResult oscillatory_tail(const Integrand& g, double start, double dir, double half_period,
                                double abs_tol, double rel_tol, const QuadSpec& spec) {
  constexpr int kMaxTerms = 400;
  constexpr std::size_t kWindow = 31;
  IntegralResult out;
  std::vector<cplx> sums;
  std::vector<cplx> estimates;
  cplx s{};
  double piece_err = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double p = start + dir * k * half_period;
    const double q = p + dir * half_period;
    const IntegralResult r =
        adaptive_gauss_kronrod(g, std::min(p, q), std::max(p, q), 0.01 * abs_tol, 0.01 * rel_tol,
                               spec.max_subdivisions);
    out.evaluations += r.evaluations;
    s += r.value;
    piece_err += r.error_estimate;
    sums.push_back(s);
    if (!r.converged) {
      out.value = s;
      out.error_estimate = piece_err + std::abs(r.value);
      out.converged = false;
      return out;
    }
    if (k >= 2 && std::abs(r.value) <= spec.truncation_eps * std::max(std::abs(s), abs_tol)) {
      out.value = s;
      out.error_estimate = piece_err + std::abs(r.value);
      out.converged = true;
      return out;
    }
    if (sums.size() >= 3) {
      const std::size_t w = std::min(sums.size(), kWindow);
      estimates.push_back(wynn_epsilon(std::span<const cplx>(sums).last(w)));
      if (estimates.size() >= 3) {
        const std::size_t m = estimates.size();
        const double err = std::abs(estimates[m - 1] - estimates[m - 2]) +
                           std::abs(estimates[m - 1] - estimates[m - 3]);
        if (err + piece_err <= 0.5 * target_of(abs_tol, rel_tol, std::abs(estimates[m - 1]))) {
          out.value = estimates[m - 1];
          out.error_estimate = err + piece_err;
          out.converged = true;
          return out;
        }
      }
    }
  }
  out.value = estimates.empty() ? s : estimates.back();
  out.error_estimate = piece_err + (estimates.size() >= 2
                                        ? std::abs(estimates.back() - estimates[estimates.size() - 2])
                                        : std::abs(s));
  out.converged = false;
  return out;
}

// Scan points used as core breakpoints. Close to the origin a point is kept only
// where the envelope changes by more than a factor of two between neighbours;
// flat stretches are left to the adaptive bisection.
void append_core_points(const SideScan& s, double origin, std::vector<double>& out) {
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (std::abs(s.x[i] - origin) >= 0.125) {
      out.push_back(s.x[i]);
      continue;
    }
    if (i == 0) continue;
    const double a = s.env[i - 1], b = s.env[i];
    if (b > 2.0 * a || a > 2.0 * b) {
      out.push_back(s.x[i - 1]);
      out.push_back(s.x[i]);
    }
  }
}

// Splits [a, b] at the given points (kept if interior) and further into pieces no
// longer than max_piece.
std::vector<double> partition(double a, double b, std::span<const double> pts, double max_piece) {
  std::vector<double> cuts{a};
  for (double p : pts)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (!(max_piece > 0.0) || !std::isfinite(max_piece)) return cuts;
  std::vector<double> out{cuts.front()};
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double len = cuts[i] - cuts[i - 1];
    const auto n = static_cast<long>(std::ceil(len / max_piece));
    for (long j = 1; j < n; ++j) out.push_back(cuts[i - 1] + len * static_cast<double>(j) / n);
    out.push_back(cuts[i]);
  }
  return out;
}

IntegralResult finish(IntegralResult r, double abs_tol, double rel_tol) {
  r.converged = r.converged && r.error_estimate <= target_of(abs_tol, rel_tol, std::abs(r.value));
  return r;
}

// int over (origin, inf) (one_sided) or R of h(u) du.
IntegralResult integrate_infinite(const Integrand& h, double origin, bool one_sided,
                                  const QuadSpec& spec, int kmin, int kmax,
                                  std::span<const double> breakpoints) {
  IntegralResult total;
  const SideScan right = scan_side(h, origin, +1.0, kmin, kmax, total.evaluations);
  SideScan left;
  if (!one_sided) left = scan_side(h, origin, -1.0, kmin, kmax, total.evaluations);
  double at_origin = 0.0;
  if (!one_sided) {
    at_origin = std::abs(checked_eval(h, origin));
    ++total.evaluations;
  }
  const double peak = peak_of(right.env, left.env, at_origin);
  const double peak_mass = peak_of(right.mass, left.mass, at_origin);
  const int nscan = kmax - kmin + 1;
  const SidePlan rp =
      plan_side(right, peak, peak_mass, spec, 1e-3, static_cast<int>(right.x.size()) < nscan);
  SidePlan lp;
  if (!one_sided)
    lp = plan_side(left, peak, peak_mass, spec, 1e-3, static_cast<int>(left.x.size()) < nscan);

  std::vector<double> pts;
  append_core_points(right, origin, pts);
  append_core_points(left, origin, pts);
  pts.insert(pts.end(), breakpoints.begin(), breakpoints.end());
  // A sampled zero can look like a settled tail; the core always covers the breakpoints.
  double a = one_sided ? origin : lp.cut;
  double b = rp.cut;
  for (double p : breakpoints) {
    if (!std::isfinite(p)) continue;
    if (p > b) b = p;
    if (!one_sided && p < a) a = p;
  }
  const double core_abs = 0.5 * spec.abs_tol;
  const double core_rel = 0.5 * spec.rel_tol;
  total += adaptive_gauss_kronrod(h, a, b, core_abs, core_rel, spec.max_subdivisions,
                                  partition(a, b, pts, 0.0));
  if (!rp.truncated)
    total += mapped_tail(h, b, origin, +1.0, 0.25 * spec.abs_tol, 0.25 * spec.rel_tol,
                         spec.max_subdivisions);
  if (!one_sided && !lp.truncated)
    total += mapped_tail(h, a, origin, -1.0, 0.25 * spec.abs_tol, 0.25 * spec.rel_tol,
                         spec.max_subdivisions);
  return finish(total, spec.abs_tol, spec.rel_tol);
}

IntegralResult periodic_trapezoid(const Integrand& f, int base_nodes, const QuadSpec& spec) {
  // Mean of f over [0, 2 pi). The error estimate compares against half the nodes;
  // the node count doubles (at most kMaxDoublings times) until that estimate meets
  // the tolerance.
  constexpr int kMaxDoublings = 6;
  IntegralResult out;
  auto mean_over = [&](int nodes) {
    cplx acc{};
    for (int k = 0; k < nodes; ++k) acc += checked_eval(f, 2.0 * kPi * k / nodes);
    out.evaluations += nodes;
    return acc / static_cast<double>(nodes);
  };
  int n = base_nodes;
  cplx coarse = mean_over(n / 2);
  cplx fine = mean_over(n);
  for (int d = 0;; ++d) {
    const double floor = 64.0 * kEps * std::max(std::abs(fine), 1e-300);
    const double err = std::max(std::abs(fine - coarse), floor);
    const bool ok = err <= target_of(spec.abs_tol, spec.rel_tol, std::abs(fine));
    if (ok || d == kMaxDoublings) {
      out.value = fine;
      out.error_estimate = err;
      out.converged = ok;
      return out;
    }
    n *= 2;
    coarse = fine;
    fine = mean_over(n);
  }
}

IntegralResult lattice_sum(const Integrand& f, const QuadSpec& spec) {
  constexpr long kMaxTerms = 1000000;
  constexpr int kQuietRun = 8;
  IntegralResult out;
  cplx sum = checked_eval(f, 0.0);
  out.evaluations = 1;
  double peak = std::abs(sum);
  int quiet_pos = 0;
  int quiet_neg = 0;
  double tail_bound = 0.0;
  for (long k = 1; k <= kMaxTerms && (quiet_pos < kQuietRun || quiet_neg < kQuietRun); ++k) {
    for (int sgn : {+1, -1}) {
      int& quiet = sgn > 0 ? quiet_pos : quiet_neg;
      if (quiet >= kQuietRun) continue;
      const cplx t = checked_eval(f, static_cast<double>(sgn * k));
      ++out.evaluations;
      sum += t;
      peak = std::max(peak, std::abs(t));
      if (std::abs(t) <= spec.truncation_eps * peak) {
        ++quiet;
        tail_bound += std::abs(t);
      } else {
        quiet = 0;
        tail_bound = 0.0;
      }
    }
  }
  out.value = sum;
  out.error_estimate = tail_bound + 16.0 * kEps * peak;
  out.converged = quiet_pos >= kQuietRun && quiet_neg >= kQuietRun;
  return finish(out, spec.abs_tol, spec.rel_tol);
}

}  // namespace

// ---------------------------------------------------------------------------

void QuadSpec::validate() const {
  const bool pow2 = circle_nodes > 0 && (circle_nodes & (circle_nodes - 1)) == 0;
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1 || circle_nodes < 8 || !pow2 ||
      !(truncation_eps > 0.0) || !(xi_max > 0.0))
    throw Error(Errc::invalid_param,
                "QuadSpec requires abs_tol, rel_tol > 0, max_subdivisions >= 1 and a power-of-two "
                "circle_nodes >= 8");
}

QuadSpec QuadSpec::scaled(double factor) const {
  QuadSpec s = *this;
  s.abs_tol *= factor;
  s.rel_tol *= factor;
  return s;
}

double QuadSpec::target(double magnitude) const { return target_of(abs_tol, rel_tol, magnitude); }

QuadSpec default_spec() {
  QuadSpec s;
  if (const char* env = std::getenv("RKHSDIAG_QUAD_TOL")) {
    char* end = nullptr;
    const double t = std::strtod(env, &end);
    if (end != env && t > 0.0 && std::isfinite(t)) {
      s.abs_tol = t;
      s.rel_tol = 100.0 * t;
    }
  }
  return s;
}

IntegralResult& IntegralResult::operator+=(const IntegralResult& other) {
  value += other.value;
  error_estimate += other.error_estimate;
  converged = converged && other.converged;
  evaluations += other.evaluations;
  return *this;
}

IntegralResult adaptive_gauss_kronrod(const Integrand& f, double a, double b, double abs_tol,
                                      double rel_tol, int max_subdivisions,
                                      std::span<const double> breakpoints) {
  IntegralResult out;
  if (a == b) return out;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
  std::vector<Segment> frozen;
  cplx total{};
  double total_err = 0.0;
  const std::vector<double> cuts = partition(lo, hi, breakpoints, 0.0);
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    Segment s = gk21(f, cuts[i - 1], cuts[i]);
    out.evaluations += 21;
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }

  int subdivisions = 0;
  while (total_err > target_of(abs_tol, rel_tol, std::abs(total)) && !heap.empty()) {
    if (subdivisions >= max_subdivisions) break;
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 64.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    const Segment l = gk21(f, worst.a, mid);
    const Segment r = gk21(f, mid, worst.b);
    out.evaluations += 42;
    ++subdivisions;
    total += l.value + r.value - worst.value;
    total_err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }

  // Re-sum to shed incremental drift.
  total = {};
  total_err = 0.0;
  while (!heap.empty()) {
    frozen.push_back(heap.top());
    heap.pop();
  }
  std::sort(frozen.begin(), frozen.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
  for (const Segment& s : frozen) {
    total += s.value;
    total_err += s.error;
  }
  out.value = sign * total;
  out.error_estimate = total_err;
  out.converged = total_err <= target_of(abs_tol, rel_tol, std::abs(total));
  return out;
}

IntegralResult integrate(const Integrand& f, const WeightedMeasure& m, const QuadSpec& spec,
                         std::span<const double> breakpoints) {
  spec.validate();
  m.validate();
  // Where the weight underflows to zero f is not evaluated (it may overflow there).
  const Integrand h = [&](double x) -> cplx {
    const double w = m.weight(x);
    return w == 0.0 ? cplx(0.0) : f(x) * w;
  };
  switch (m.domain.kind()) {
    case DomainKind::interval:
      return adaptive_gauss_kronrod(h, m.domain.lower(), m.domain.upper(), spec.abs_tol,
                                    spec.rel_tol, spec.max_subdivisions, breakpoints);
    case DomainKind::half_line:
      if (m.substitution == Substitution::log) {
        const Integrand g = [&](double t) {
          const double v = std::exp(t);
          return h(v) * v;
        };
        std::vector<double> logs;
        for (double b : breakpoints)
          if (b > 0.0) logs.push_back(std::log(b));
        return integrate_infinite(g, 0.0, false, spec, -6, 9, logs);
      }
      return integrate_infinite(h, m.domain.lower(), true, spec, -30, 60, breakpoints);
    case DomainKind::line: return integrate_infinite(h, 0.0, false, spec, -30, 60, breakpoints);
    case DomainKind::circle: {
      IntegralResult r = periodic_trapezoid(h, spec.circle_nodes, spec);
      r.value *= 2.0 * kPi;
      r.error_estimate *= 2.0 * kPi;
      return r;
    }
    case DomainKind::integers: return lattice_sum(h, spec);
  }
  throw Error(Errc::invalid_param, "unsupported domain");
}

IntegralResult integrate_2d(const Integrand2D& f, const WeightedMeasure& m1,
                            const WeightedMeasure& m2, const QuadSpec& spec) {
  const QuadSpec inner_spec = spec.scaled(0.1);
  bool inner_ok = true;
  long inner_evals = 0;
  double inner_err = 0.0;
  const Integrand outer = [&](double u) {
    const IntegralResult r = integrate([&](double v) { return f(u, v); }, m2, inner_spec);
    inner_ok = inner_ok && r.converged;
    inner_evals += r.evaluations;
    inner_err = std::max(inner_err, r.error_estimate);
    return r.value;
  };
  IntegralResult r = integrate(outer, m1, spec);
  r.evaluations += inner_evals;
  r.converged = r.converged && inner_ok;
  return r;
}

IntegralResult oscillatory_integral(const Integrand& f, double omega, const QuadSpec& spec,
                                    std::span<const double> breakpoints) {
  spec.validate();
  if (std::abs(omega) > spec.xi_max)
    throw Error(Errc::oscillation_budget, "|omega| = " + std::to_string(std::abs(omega)) +
                                              " exceeds xi_max = " + std::to_string(spec.xi_max));
  constexpr int kmin = -8;
  constexpr int kmax = 50;
  constexpr double kMaxDirectPeriods = 4000.0;

  IntegralResult total;
  const SideScan right = scan_side(f, 0.0, +1.0, kmin, kmax, total.evaluations);
  const SideScan left = scan_side(f, 0.0, -1.0, kmin, kmax, total.evaluations);
  const double at_origin = std::abs(checked_eval(f, 0.0));
  ++total.evaluations;
  const double peak = peak_of(right.env, left.env, at_origin);
  const double peak_mass = peak_of(right.mass, left.mass, at_origin);
  const int nscan = kmax - kmin + 1;
  SidePlan rp =
      plan_side(right, peak, peak_mass, spec, 1e-3, static_cast<int>(right.x.size()) < nscan);
  SidePlan lp =
      plan_side(left, peak, peak_mass, spec, 1e-3, static_cast<int>(left.x.size()) < nscan);

  for (double p : breakpoints) {
    if (!std::isfinite(p)) continue;
    rp.cut = std::max(rp.cut, p);
    lp.cut = std::min(lp.cut, p);
  }

  const double w = std::abs(omega);
  auto periods = [&](double len) { return len * w / (2.0 * kPi); };
  // A truncated side is integrated directly only while the oscillation count stays bounded.
  auto demote = [&](SidePlan& p, const SideScan& s) {
    if (!p.truncated || w == 0.0 || periods(std::abs(p.cut)) <= kMaxDirectPeriods) return;
    const int c = settle_index(s.env, 1e-3 * peak);
    p.cut = c >= 0 ? s.x[static_cast<std::size_t>(c)] : p.cut;
    p.truncated = false;
  };
  demote(rp, right);
  demote(lp, left);

  const Integrand g = [&](double x) { return std::polar(1.0, -omega * x) * f(x); };
  std::vector<double> pts;
  append_core_points(right, 0.0, pts);
  append_core_points(left, 0.0, pts);
  pts.push_back(0.0);
  pts.insert(pts.end(), breakpoints.begin(), breakpoints.end());
  const double a = lp.cut;
  const double b = rp.cut;
  const double max_piece = w > 0.0 ? 2.0 * kPi / w : 0.0;
  const std::vector<double> cuts = partition(a, b, pts, max_piece);
  total += adaptive_gauss_kronrod(g, a, b, 0.5 * spec.abs_tol, 0.5 * spec.rel_tol,
                                  spec.max_subdivisions + static_cast<int>(cuts.size()), cuts);

  auto tail = [&](const SidePlan& p, double dir) {
    if (p.truncated) return;
    if (w == 0.0) {
      total += mapped_tail(g, p.cut, 0.0, dir, 0.25 * spec.abs_tol, 0.25 * spec.rel_tol,
                           spec.max_subdivisions);
    } else {
      total += oscillatory_tail(g, p.cut, dir, kPi / w, 0.25 * spec.abs_tol, 0.25 * spec.rel_tol,
                                spec);
    }
  };
  tail(rp, +1.0);
  tail(lp, -1.0);
  return finish(total, spec.abs_tol, spec.rel_tol);
}

IntegralResult fourier_coefficient(const Integrand& f, int xi, const QuadSpec& spec) {
  spec.validate();
  if (std::abs(xi) > spec.circle_nodes / 4)
    throw Error(Errc::aliasing_suspected, "|xi| = " + std::to_string(std::abs(xi)) +
                                              " exceeds circle_nodes / 4 = " +
                                              std::to_string(spec.circle_nodes / 4));
  const Integrand g = [&](double u) { return std::polar(1.0, -static_cast<double>(xi) * u) * f(u); };
  return periodic_trapezoid(g, spec.circle_nodes, spec);
}

IntegralResult fourier_integral(const IntegrandND& f, const Frequency& xi, const GroupModel& g,
                                const QuadSpec& spec) {
  g.check_frequency(xi);
  if (g.dimension() == 1) {
    const Integrand f1 = [&](double x) { return f(Point(x)); };
    if (g.kind() == GroupKind::circle) return fourier_coefficient(f1, static_cast<int>(xi[0]), spec);
    IntegralResult r = oscillatory_integral(f1, g.angular(xi[0]), spec);
    const double scale = g.haar_factor().scale;
    r.value *= scale;
    r.error_estimate *= scale;
    return r;
  }
  // Iterated over the two coordinates; the inner transform runs at a tighter tolerance.
  const QuadSpec inner_spec = spec.scaled(0.1);
  bool inner_ok = true;
  long inner_evals = 0;
  const GroupModel g1(g.kind(), 1);
  const Integrand outer = [&](double x0) {
    const IntegrandND inner = [&](const Point& p) { return f(Point{x0, p[0]}); };
    const IntegralResult r = fourier_integral(inner, Frequency(xi[1]), g1, inner_spec);
    inner_ok = inner_ok && r.converged;
    inner_evals += r.evaluations;
    return r.value;
  };
  IntegralResult r = fourier_integral([&](const Point& p) { return outer(p[0]); },
                                      Frequency(xi[0]), g1, spec);
  r.evaluations += inner_evals;
  r.converged = r.converged && inner_ok;
  return r;
}

}  // namespace rkhsdiag::quad
