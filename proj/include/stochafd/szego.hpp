#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochafd/circle.hpp"

namespace stochafd {

inline constexpr double kDefaultRMax = 0.998;

/// A point of the open unit disc.
class DiscPoint {
 public:
  DiscPoint() = default;
  explicit DiscPoint(cplx a);
  DiscPoint(double re, double im) : DiscPoint(cplx(re, im)) {}

  cplx value() const { return a_; }
  double modulus() const { return std::abs(a_); }

  friend bool operator==(const DiscPoint&, const DiscPoint&) = default;

 private:
  cplx a_ = 0.0;
};

/// Polar lattice r_i = i*r_max/(R-1), theta_m = 2*pi*m/A. The origin is a
/// single point; index order is radius-major then angle.
class DiscGrid {
 public:
  DiscGrid(std::size_t radial, std::size_t angular, double r_max = kDefaultRMax);

  std::size_t size() const { return points_.size(); }
  std::size_t radial() const { return radial_; }
  std::size_t angular() const { return angular_; }
  double r_max() const { return r_max_; }
  const DiscPoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const DiscPoint> points() const { return points_; }

  double radius(std::size_t ring) const;
  std::size_t ring_of(std::size_t index) const;
  /// Outermost ring.
  bool boundary_flag(std::size_t index) const;

  /// Values of sum_k taylor[k] a^k at every grid point, one FFT per ring.
  std::vector<cplx> evaluate(std::span<const cplx> taylor) const;

 private:
  std::size_t radial_;
  std::size_t angular_;
  double r_max_;
  std::vector<DiscPoint> points_;
};

/// sum_k taylor[k] (r e^{i theta_m})^k at theta_m = 2*pi*m/angular.
std::vector<cplx> evaluate_ring(std::span<const cplx> taylor, double r, std::size_t angular);

/// Smallest N*2^j with r_max^(N*2^j) <= 1e-14. Discrete inner products of
/// kernels with |a| <= r_max on a grid this fine are exact to rounding.
std::size_t quadrature_size(std::size_t n, double r_max);

/// e_a(z_j) = sqrt(1-|a|^2) / (1 - conj(a) z_j)
CircleSignal szego_eval(DiscPoint a, std::size_t n);

/// sqrt(1-|a|^2) g(a) for analytic g. Throws std::domain_error when g has
/// negative-frequency content above tol.
cplx reproducing_value(const CircleSignal& g, DiscPoint a, double tol = 1e-10);

/// prod_l (z - a_l)/(1 - conj(a_l) z) sampled on the N grid.
CircleSignal blaschke_product(std::span<const DiscPoint> params, std::size_t n);
/// Same product evaluated at one point z.
cplx blaschke_value(std::span<const DiscPoint> params, cplx z);

/// (l-1)-th derivative in conj(a) of k_a(z) = 1/(1 - conj(a) z):
/// (l-1)! z^(l-1) / (1 - conj(a) z)^l.
CircleSignal multiple_kernel(DiscPoint a, int order, std::size_t n);
cplx multiple_kernel_value(DiscPoint a, int order, cplx z);

/// Takenaka-Malmquist system B_k = e_{a_k} prod_{l<k} (z-a_l)/(1-conj(a_l) z)
/// sampled on an N-point grid, built incrementally.
class TMSystem {
 public:
  explicit TMSystem(std::size_t n);
  TMSystem(std::span<const DiscPoint> params, std::size_t n);

  void append(DiscPoint a);

  std::size_t size() const { return params_.size(); }
  std::size_t grid_size() const { return n_; }
  const std::vector<DiscPoint>& params() const { return params_; }
  const std::vector<int>& multiplicity() const { return multiplicity_; }
  const std::vector<CircleSignal>& basis() const { return basis_; }
  const CircleSignal& operator[](std::size_t k) const { return basis_[k]; }

  /// <f, B_k> for a signal on any grid whose size divides grid_size().
  /// Coarser signals are treated as band limited (spectral upsampling).
  cplx coefficient(const CircleSignal& f, std::size_t k) const;
  std::vector<cplx> coefficients(const CircleSignal& f) const;

  /// B_k(z) in closed form, any |z| <= 1.
  cplx value(std::size_t k, cplx z) const;

  /// sum_{l<k} coeffs[l] B_l on the TM grid.
  CircleSignal partial_sum(std::span<const cplx> coeffs, std::size_t k) const;

  /// max |<B_i,B_j> - delta_ij|
  double gram_deviation() const;

 private:
  std::size_t n_;
  std::vector<DiscPoint> params_;
  std::vector<int> multiplicity_;
  std::vector<CircleSignal> basis_;
  std::vector<Spectrum> spectra_;
  CircleSignal blaschke_;
};

inline TMSystem tm_system(std::span<const DiscPoint> params, std::size_t n) {
  return TMSystem(params, n);
}

}  // namespace stochafd
