#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rkhsdiag/group.hpp"
#include "rkhsdiag/measure.hpp"
#include "rkhsdiag/point.hpp"
#include "rkhsdiag/quadrature.hpp"
#include "rkhsdiag/symbol.hpp"

namespace rkhsdiag {

/// Ordered (name, value) list of model parameters.
using ModelParams = std::vector<std::pair<std::string, double>>;

/// One translation-invariant RKHS over G x Y with its fiber data. Instances are
/// immutable once constructed.
class KernelModel {
 public:
  virtual ~KernelModel() = default;

  /// Family id as listed by list_models().
  virtual std::string id() const = 0;
  const ModelParams& params() const noexcept { return params_; }
  /// id plus parameters, e.g. "vertical-poly:n=2"; accepted by parse_model_spec.
  std::string spec_string() const;

  const GroupModel& group() const noexcept { return group_; }
  /// Dimension of Y (equal to that of G for the Gaussian kernel, 1 otherwise).
  int y_dimension() const noexcept { return y_dim_; }
  /// One coordinate factor of lambda; lambda is its product over y_dimension() coordinates.
  const quad::WeightedMeasure& y_measure() const noexcept { return y_measure_; }
  /// Closure bounds of one Y coordinate (used for sampling and symbol checks).
  std::pair<double, double> y_bounds() const noexcept { return y_bounds_; }
  /// Throws DomainViolation unless v lies in (the closure of) Y.
  virtual void check_y(const Point& v) const;

  /// d_xi; zero outside Omega.
  virtual int fiber_count(const Frequency& xi) const = 0;
  bool omega_contains(const Frequency& xi) const { return fiber_count(xi) > 0; }

  /// K_{0,y}(u, v).
  virtual cplx K0(const Point& u, const Point& v, const Point& y) const = 0;
  /// Closed-form L_{xi,y}(v), valid for xi in Omega.
  virtual cplx L_closed(const Frequency& xi, const Point& y, const Point& v) const = 0;
  /// j-th orthonormal basis function of the fiber at xi (1 <= j <= d_xi).
  virtual cplx Q_closed(const Frequency& xi, int j, const Point& v) const = 0;
  /// conj(q_j(v)) q_k(v) times the density of lambda at v (scale excluded). Stays finite
  /// where q alone overflows.
  virtual cplx gram_density(const Frequency& xi, int j, int k, const Point& v) const;
  /// Printed closed-form spectral function evaluated by its own quadrature, when one exists.
  virtual std::optional<quad::IntegralResult> gamma_closed(const SymbolSpec& psi,
                                                           const Frequency& xi,
                                                           const quad::QuadSpec& spec) const;

  /// Coordinate box where the fiber kernels are of order one; (y, v) test pairs are drawn here.
  virtual std::pair<double, double> sample_region() const = 0;
  /// Interval of Y coordinate `coord` carrying all but a negligible part of the fiber
  /// density at xi.
  virtual std::pair<double, double> fiber_support(const Frequency& xi, int coord = 0) const = 0;
  /// Interval of coordinate `coord` outside which the fiber density at xi is below double
  /// precision relative to its peak; all of Y unless a model narrows it.
  virtual std::pair<double, double> fiber_extent(const Frequency& xi, int coord = 0) const;

 protected:
  KernelModel(GroupModel g, quad::WeightedMeasure lambda, std::pair<double, double> bounds,
              ModelParams params, int y_dim = 1);

 private:
  GroupModel group_;
  quad::WeightedMeasure y_measure_;
  std::pair<double, double> y_bounds_;
  ModelParams params_;
  int y_dim_;
};

using ModelPtr = std::shared_ptr<const KernelModel>;

struct ModelFamily {
  std::string id;
  /// Parameter names with their defaults.
  ModelParams defaults;
  std::string description;
};

/// The nine model families, in a fixed order.
const std::vector<ModelFamily>& model_families();
std::vector<std::string> list_models();

/// Throws UnknownModel for an unknown id and InvalidParam for bad or unknown parameters.
ModelPtr get_model(std::string_view id, const ModelParams& params = {});
/// "id" or "id:name=value,name=value".
ModelPtr parse_model_spec(std::string_view text);

/// K_{x,y}(u, v) = K_{0,y}(u - x, v).
cplx eval_K(const KernelModel& m, const Point& x, const Point& y, const Point& u, const Point& v);
/// Closed-form L, zero outside Omega.
cplx eval_L(const KernelModel& m, const Frequency& xi, const Point& y, const Point& v);
/// Throws FrequencyOutsideOmega or IndexOutOfRange.
cplx eval_q(const KernelModel& m, const Frequency& xi, int j, const Point& v);

}  // namespace rkhsdiag
