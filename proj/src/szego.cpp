#include "stochafd/szego.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace stochafd {

DiscPoint::DiscPoint(cplx a) : a_(a) {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !(std::abs(a) < 1.0)) {
    throw std::domain_error("disc point must satisfy |a| < 1");
  }
}

DiscGrid::DiscGrid(std::size_t radial, std::size_t angular, double r_max)
    : radial_(radial), angular_(angular), r_max_(r_max) {
  if (radial == 0 || angular == 0) throw std::invalid_argument("disc grid needs R, A >= 1");
  if (!(r_max > 0.0 && r_max < 1.0)) throw std::invalid_argument("r_max must lie in (0, 1)");
  points_.reserve(1 + (radial - 1) * angular);
  points_.emplace_back(0.0, 0.0);
  for (std::size_t i = 1; i < radial; ++i) {
    const double r = radius(i);
    for (std::size_t m = 0; m < angular; ++m) {
      const double theta =
          2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(angular);
      points_.emplace_back(std::polar(r, theta));
    }
  }
}

double DiscGrid::radius(std::size_t ring) const {
  if (ring + 1 == radial_) return r_max_;
  return static_cast<double>(ring) * r_max_ / static_cast<double>(radial_ - 1);
}

std::size_t DiscGrid::ring_of(std::size_t index) const {
  return index == 0 ? 0 : 1 + (index - 1) / angular_;
}

bool DiscGrid::boundary_flag(std::size_t index) const {
  return radial_ > 1 && ring_of(index) + 1 == radial_;
}

std::vector<cplx> evaluate_ring(std::span<const cplx> taylor, double r, std::size_t angular) {
  if (angular == 0) throw std::invalid_argument("ring needs at least one angle");
  std::vector<cplx> bins(angular, cplx(0.0));
  double rk = 1.0;
  for (std::size_t k = 0; k < taylor.size(); ++k) {
    bins[k % angular] += taylor[k] * rk;
    rk *= r;
    if (rk < 1e-300) break;
  }
  // v_m = sum_s bins_s exp(2 pi i s m / A)
  std::vector<cplx> vals(angular);
  detail::dft(bins, vals, +1);
  return vals;
}

std::vector<cplx> DiscGrid::evaluate(std::span<const cplx> taylor) const {
  std::vector<cplx> out;
  out.reserve(points_.size());
  out.push_back(taylor.empty() ? cplx(0.0) : taylor[0]);
  for (std::size_t i = 1; i < radial_; ++i) {
    const std::vector<cplx> vals = evaluate_ring(taylor, radius(i), angular_);
    out.insert(out.end(), vals.begin(), vals.end());
  }
  return out;
}

std::size_t quadrature_size(std::size_t n, double r_max) {
  if (!(r_max >= 0.0 && r_max < 1.0)) throw std::invalid_argument("r_max must lie in [0, 1)");
  std::size_t m = n;
  if (r_max == 0.0) return m;
  const double needed = std::log(1e-14) / std::log(r_max);
  while (static_cast<double>(m) < needed) m *= 2;
  return m;
}

CircleSignal szego_eval(DiscPoint a, std::size_t n) {
  const cplx ab = std::conj(a.value());
  const double scale = std::sqrt(1.0 - std::norm(a.value()));
  return CircleSignal::from_function(n, [&](cplx z) { return scale / (1.0 - ab * z); });
}

cplx reproducing_value(const CircleSignal& g, DiscPoint a, double tol) {
  const Spectrum s = to_spectrum(g);
  const double leak = std::sqrt(s.negative_energy());
  if (leak > tol * std::max(1.0, std::sqrt(s.energy()))) {
    throw std::domain_error("reproducing_value: signal is not analytic (negative-frequency norm " +
                            std::to_string(leak) + "); apply analytic_projection first");
  }
  return std::sqrt(1.0 - std::norm(a.value())) * eval_analytic(s, a.value());
}

cplx blaschke_value(std::span<const DiscPoint> params, cplx z) {
  cplx acc = 1.0;
  for (const auto& p : params) {
    const cplx a = p.value();
    acc *= (z - a) / (1.0 - std::conj(a) * z);
  }
  return acc;
}

CircleSignal blaschke_product(std::span<const DiscPoint> params, std::size_t n) {
  return CircleSignal::from_function(n, [&](cplx z) { return blaschke_value(params, z); });
}

cplx multiple_kernel_value(DiscPoint a, int order, cplx z) {
  if (order < 1) throw std::invalid_argument("multiple kernel order must be >= 1");
  const cplx denom = 1.0 - std::conj(a.value()) * z;
  cplx num = 1.0;
  for (int j = 1; j < order; ++j) num *= static_cast<double>(j) * z;
  return num / std::pow(denom, order);
}

CircleSignal multiple_kernel(DiscPoint a, int order, std::size_t n) {
  if (order < 1) throw std::invalid_argument("multiple kernel order must be >= 1");
  return CircleSignal::from_function(n, [&](cplx z) { return multiple_kernel_value(a, order, z); });
}

TMSystem::TMSystem(std::size_t n) : n_(n), blaschke_(CircleSignal::constant(n, 1.0)) {}

TMSystem::TMSystem(std::span<const DiscPoint> params, std::size_t n) : TMSystem(n) {
  for (const auto& a : params) append(a);
}

void TMSystem::append(DiscPoint a) {
  int mult = 1;
  for (const auto& p : params_) mult += (p == a) ? 1 : 0;
  CircleSignal e = szego_eval(a, n_);
  std::vector<cplx> b(n_);
  std::vector<cplx> phi(n_);
  const cplx av = a.value();
  for (std::size_t j = 0; j < n_; ++j) {
    const cplx z = CircleSignal::grid_point(j, n_);
    b[j] = e[j] * blaschke_[j];
    phi[j] = blaschke_[j] * (z - av) / (1.0 - std::conj(av) * z);
  }
  params_.push_back(a);
  multiplicity_.push_back(mult);
  basis_.emplace_back(std::move(b));
  spectra_.push_back(to_spectrum(basis_.back()));
  blaschke_ = CircleSignal(std::move(phi));
}

cplx TMSystem::coefficient(const CircleSignal& f, std::size_t k) const {
  if (k >= basis_.size()) throw std::out_of_range("TM index out of range");
  if (f.size() == n_) return inner_product(f, basis_[k]);
  if (f.size() > n_ || n_ % f.size() != 0) {
    throw std::invalid_argument("signal grid does not divide the TM grid");
  }
  const Spectrum s = to_spectrum(f);
  const Spectrum& b = spectra_[k];
  cplx acc = 0.0;
  for (int m = s.min_frequency(); m <= s.max_frequency(); ++m) acc += s[m] * std::conj(b[m]);
  return acc;
}

std::vector<cplx> TMSystem::coefficients(const CircleSignal& f) const {
  std::vector<cplx> out(basis_.size());
  if (f.size() == n_) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = inner_product(f, basis_[k]);
    return out;
  }
  if (f.size() > n_ || n_ % f.size() != 0) {
    throw std::invalid_argument("signal grid does not divide the TM grid");
  }
  const Spectrum s = to_spectrum(f);
  for (std::size_t k = 0; k < out.size(); ++k) {
    cplx acc = 0.0;
    for (int m = s.min_frequency(); m <= s.max_frequency(); ++m) {
      acc += s[m] * std::conj(spectra_[k][m]);
    }
    out[k] = acc;
  }
  return out;
}

cplx TMSystem::value(std::size_t k, cplx z) const {
  if (k >= params_.size()) throw std::out_of_range("TM index out of range");
  const cplx a = params_[k].value();
  const cplx e = std::sqrt(1.0 - std::norm(a)) / (1.0 - std::conj(a) * z);
  return e * blaschke_value(std::span(params_).first(k), z);
}

CircleSignal TMSystem::partial_sum(std::span<const cplx> coeffs, std::size_t k) const {
  if (k > basis_.size() || k > coeffs.size()) throw std::out_of_range("partial sum index");
  CircleSignal acc = CircleSignal::zeros(n_);
  for (std::size_t l = 0; l < k; ++l) acc.add_scaled(coeffs[l], basis_[l]);
  return acc;
}

double TMSystem::gram_deviation() const {
  double dev = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const cplx g = inner_product(basis_[i], basis_[j]);
      dev = std::max(dev, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return dev;
}

}  // namespace stochafd
