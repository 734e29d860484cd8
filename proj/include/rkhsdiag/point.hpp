#pragma once

#include <array>
#include <cassert>
#include <complex>
#include <cstddef>
#include <initializer_list>

namespace rkhsdiag {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxDim = 2;

/// A point of G or Y. The catalog only needs n <= 2, so coordinates live inline.
class Point {
 public:
  Point() = default;
  // NOLINTNEXTLINE(google-explicit-constructor): 1-D points read naturally as doubles.
  Point(double x) : n_(1) { c_[0] = x; }
  Point(std::initializer_list<double> xs) : n_(xs.size()) {
    assert(xs.size() <= kMaxDim);
    std::size_t i = 0;
    for (double x : xs) c_[i++] = x;
  }

  std::size_t size() const noexcept { return n_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  const double* begin() const noexcept { return c_.data(); }
  const double* end() const noexcept { return c_.data() + n_; }

  static Point filled(std::size_t n, double value) {
    Point p;
    p.n_ = n;
    for (std::size_t i = 0; i < n; ++i) p.c_[i] = value;
    return p;
  }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.n_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t n_ = 0;
};

/// An element of the dual group. Integer-valued when the dual is Z.
class Frequency {
 public:
  Frequency() = default;
  // NOLINTNEXTLINE(google-explicit-constructor)
  Frequency(double xi) : p_(xi) {}
  explicit Frequency(Point p) : p_(p) {}
  Frequency(std::initializer_list<double> xs) : p_(xs) {}

  const Point& components() const noexcept { return p_; }
  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }

  friend bool operator==(const Frequency& a, const Frequency& b) { return a.p_ == b.p_; }
  friend bool operator<(const Frequency& a, const Frequency& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (b[i] < a[i]) return false;
    }
    return a.size() < b.size();
  }

 private:
  Point p_;
};

}  // namespace rkhsdiag
