#include "stochafd/circle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace stochafd {
namespace {

void check_size(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("circle signal size must be even and >= 4, got " +
                                std::to_string(n));
  }
}

void check_same_size(const CircleSignal& a, const CircleSignal& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("circle signals of different sizes: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
}

}  // namespace

CircleSignal::CircleSignal(std::vector<cplx> samples) : samples_(std::move(samples)) {
  check_size(samples_.size());
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    if (!std::isfinite(samples_[j].real()) || !std::isfinite(samples_[j].imag())) {
      throw std::invalid_argument("non-finite sample at index " + std::to_string(j));
    }
  }
}

CircleSignal CircleSignal::zeros(std::size_t n) { return constant(n, 0.0); }

CircleSignal CircleSignal::constant(std::size_t n, cplx value) {
  return CircleSignal(std::vector<cplx>(n, value));
}

CircleSignal CircleSignal::from_function(std::size_t n, const std::function<cplx(cplx)>& f) {
  check_size(n);
  std::vector<cplx> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = f(grid_point(j, n));
  return CircleSignal(std::move(s));
}

cplx CircleSignal::grid_point(std::size_t j, std::size_t n) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
}

bool CircleSignal::is_real(double tol) const {
  for (const auto& v : samples_) {
    if (std::abs(v.imag()) > tol) return false;
  }
  return true;
}

CircleSignal& CircleSignal::operator+=(const CircleSignal& other) {
  check_same_size(*this, other);
  for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] += other.samples_[j];
  return *this;
}

CircleSignal& CircleSignal::operator-=(const CircleSignal& other) {
  check_same_size(*this, other);
  for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] -= other.samples_[j];
  return *this;
}

CircleSignal& CircleSignal::operator*=(cplx scale) {
  for (auto& v : samples_) v *= scale;
  return *this;
}

CircleSignal& CircleSignal::add_scaled(cplx scale, const CircleSignal& other) {
  check_same_size(*this, other);
  for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] += scale * other.samples_[j];
  return *this;
}

Spectrum::Spectrum(std::vector<cplx> fft_ordered) : coeffs_(std::move(fft_ordered)) {
  check_size(coeffs_.size());
}

std::size_t Spectrum::index(int k) const {
  const int n = static_cast<int>(coeffs_.size());
  if (k < -n / 2 || k >= n / 2) {
    throw std::out_of_range("frequency " + std::to_string(k) + " outside [-N/2, N/2)");
  }
  return static_cast<std::size_t>(k < 0 ? k + n : k);
}

double Spectrum::energy() const {
  double e = 0.0;
  for (const auto& c : coeffs_) e += std::norm(c);
  return e;
}

double Spectrum::negative_energy() const {
  double e = 0.0;
  for (std::size_t j = coeffs_.size() / 2; j < coeffs_.size(); ++j) e += std::norm(coeffs_[j]);
  return e;
}

std::vector<cplx> Spectrum::taylor_coefficients() const {
  return {coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(coeffs_.size() / 2)};
}

Spectrum to_spectrum(const CircleSignal& f) {
  std::vector<cplx> out(f.size());
  detail::dft(f.samples(), out, -1);
  const double scale = 1.0 / static_cast<double>(f.size());
  for (auto& c : out) c *= scale;
  return Spectrum(std::move(out));
}

Spectrum to_spectrum_direct(const CircleSignal& f) {
  const std::size_t n = f.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      // (j*k) mod n keeps the twiddle angle in [0, 2pi) for accuracy.
      acc += f[j] * std::conj(CircleSignal::grid_point((j * k) % n, n));
    }
    out[k] = acc / static_cast<double>(n);
  }
  return Spectrum(std::move(out));
}

CircleSignal to_signal(const Spectrum& spec) {
  std::vector<cplx> out(spec.size());
  detail::dft(spec.fft_order(), out, +1);
  return CircleSignal(std::move(out));
}

cplx inner_product(const CircleSignal& f, const CircleSignal& g) {
  check_same_size(f, g);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * std::conj(g[j]);
  return acc / static_cast<double>(f.size());
}

double norm_sq(const CircleSignal& f) {
  double acc = 0.0;
  for (const auto& v : f.samples()) acc += std::norm(v);
  return acc / static_cast<double>(f.size());
}

double norm(const CircleSignal& f) { return std::sqrt(norm_sq(f)); }

CircleSignal hilbert_transform(const CircleSignal& f) {
  Spectrum s = to_spectrum(f);
  const int half = static_cast<int>(f.size() / 2);
  s[0] = 0.0;
  s[-half] = 0.0;
  for (int k = 1; k < half; ++k) {
    s[k] *= cplx(0.0, -1.0);
    s[-k] *= cplx(0.0, 1.0);
  }
  return to_signal(s);
}

CircleSignal analytic_projection(const CircleSignal& f) {
  Spectrum s = to_spectrum(f);
  const int half = static_cast<int>(f.size() / 2);
  for (int k = -half; k < 0; ++k) s[k] = 0.0;
  return to_signal(s);
}

CircleSignal real_from_analytic(const CircleSignal& f_plus) {
  cplx c0 = 0.0;
  for (const auto& v : f_plus.samples()) c0 += v;
  c0 /= static_cast<double>(f_plus.size());
  std::vector<cplx> out(f_plus.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = 2.0 * f_plus[j].real() - c0;
  return CircleSignal(std::move(out));
}

CircleSignal band_limit(const CircleSignal& f) {
  Spectrum s = to_spectrum(f);
  s[-static_cast<int>(f.size() / 2)] = 0.0;
  return to_signal(s);
}

cplx eval_analytic(const Spectrum& spec, cplx a) {
  if (!(std::abs(a) < 1.0)) {
    throw std::domain_error("eval_analytic: |a| must be < 1");
  }
  cplx acc = 0.0;
  for (int k = spec.max_frequency(); k >= 0; --k) acc = acc * a + spec[k];
  return acc;
}

double negative_frequency_norm(const CircleSignal& f) {
  return std::sqrt(to_spectrum(f).negative_energy());
}

CircleSignal upsample(const CircleSignal& f, std::size_t m) {
  const std::size_t n = f.size();
  if (m < n || m % n != 0) {
    throw std::invalid_argument("upsample: target size must be a multiple of the source size");
  }
  if (m == n) return f;
  const Spectrum s = to_spectrum(f);
  Spectrum out(std::vector<cplx>(m, 0.0));
  for (int k = s.min_frequency(); k <= s.max_frequency(); ++k) out[k] = s[k];
  return to_signal(out);
}

CircleSignal decimate(const CircleSignal& f, std::size_t n) {
  if (n == 0 || n > f.size() || f.size() % n != 0) {
    throw std::invalid_argument("decimate: target size must divide the source size");
  }
  const std::size_t step = f.size() / n;
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = f[j * step];
  return CircleSignal(std::move(out));
}

}  // namespace stochafd
