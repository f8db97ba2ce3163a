#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stochafd {

using cplx = std::complex<double>;

/// Complex samples of a signal at t_j = 2*pi*j/N on the unit circle.
///
/// N is even and at least 4; every sample is finite. Arithmetic between
/// signals requires matching N.
class CircleSignal {
 public:
  explicit CircleSignal(std::vector<cplx> samples);

  static CircleSignal zeros(std::size_t n);
  static CircleSignal constant(std::size_t n, cplx value);
  /// Samples f(z_j) with z_j = exp(i t_j).
  static CircleSignal from_function(std::size_t n, const std::function<cplx(cplx)>& f);

  /// exp(2*pi*i*j/n)
  static cplx grid_point(std::size_t j, std::size_t n);

  std::size_t size() const { return samples_.size(); }
  std::span<const cplx> samples() const { return samples_; }
  cplx operator[](std::size_t j) const { return samples_[j]; }

  /// max_j |Im f_j| <= tol
  bool is_real(double tol = 0.0) const;

  CircleSignal& operator+=(const CircleSignal& other);
  CircleSignal& operator-=(const CircleSignal& other);
  CircleSignal& operator*=(cplx scale);
  /// this += scale * other, the workhorse of every expansion loop.
  CircleSignal& add_scaled(cplx scale, const CircleSignal& other);

  friend CircleSignal operator+(CircleSignal a, const CircleSignal& b) { return a += b; }
  friend CircleSignal operator-(CircleSignal a, const CircleSignal& b) { return a -= b; }
  friend CircleSignal operator*(cplx s, CircleSignal a) { return a *= s; }

 private:
  std::vector<cplx> samples_;
};

/// Two-sided Fourier coefficients c_k, k in [-N/2, N/2).
class Spectrum {
 public:
  /// Coefficients in FFT order: entry j holds c_k for k = j mod N.
  explicit Spectrum(std::vector<cplx> fft_ordered);

  std::size_t size() const { return coeffs_.size(); }
  int min_frequency() const { return -static_cast<int>(coeffs_.size() / 2); }
  int max_frequency() const { return static_cast<int>(coeffs_.size() / 2) - 1; }

  cplx operator[](int k) const { return coeffs_[index(k)]; }
  cplx& operator[](int k) { return coeffs_[index(k)]; }

  std::span<const cplx> fft_order() const { return coeffs_; }

  /// Sum of |c_k|^2 over all stored k.
  double energy() const;
  /// Sum of |c_k|^2 for k < 0 (Nyquist bin included).
  double negative_energy() const;
  /// c_0 .. c_{N/2-1}.
  std::vector<cplx> taylor_coefficients() const;

 private:
  std::size_t index(int k) const;
  std::vector<cplx> coeffs_;
};

Spectrum to_spectrum(const CircleSignal& f);
/// O(N^2) DFT with the same normalization as to_spectrum.
Spectrum to_spectrum_direct(const CircleSignal& f);
CircleSignal to_signal(const Spectrum& spec);

/// (1/N) sum_j f_j conj(g_j); conjugate-linear in g.
cplx inner_product(const CircleSignal& f, const CircleSignal& g);
double norm_sq(const CircleSignal& f);
double norm(const CircleSignal& f);

/// Fourier multiplier (-i) sgn(k); sgn(0) = 0 and the Nyquist bin is
/// annihilated so that real signals map to real signals.
CircleSignal hilbert_transform(const CircleSignal& f);

/// Keeps c_k for 0 <= k < N/2, zeroes the rest.
CircleSignal analytic_projection(const CircleSignal& f);

/// 2 Re(f+) - c_0: the real signal whose analytic projection is f+.
CircleSignal real_from_analytic(const CircleSignal& f_plus);

/// Drops the Nyquist bin, leaving the |k| < N/2 model band.
CircleSignal band_limit(const CircleSignal& f);

/// sum_{k=0}^{N/2-1} c_k a^k; requires |a| < 1.
cplx eval_analytic(const Spectrum& spec, cplx a);

/// sqrt(sum_{k<0} |c_k|^2): distance of f from the analytic subspace.
double negative_frequency_norm(const CircleSignal& f);

/// Spectral zero padding to m samples (m a multiple of N). Sampling the
/// result at every (m/N)-th point returns f.
CircleSignal upsample(const CircleSignal& f, std::size_t m);
/// Keeps every (N/n)-th sample.
CircleSignal decimate(const CircleSignal& f, std::size_t n);

}  // namespace stochafd
