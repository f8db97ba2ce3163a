#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stochafd/circle.hpp"
#include "stochafd/szego.hpp"

namespace stochafd {

/// Element of a dictionary's ambient inner-product space.
using Vector = std::vector<cplx>;

/// A finite parameter domain q = 0..size()-1 of kernels K_q in some
/// Hilbert space. The engine never computes an inner product itself.
class Dictionary {
 public:
  virtual ~Dictionary() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual cplx inner(std::span<const cplx> u, std::span<const cplx> v) const = 0;
  double norm_sq(std::span<const cplx> u) const { return inner(u, u).real(); }

  virtual Vector kernel(std::size_t q) const = 0;
  virtual double kernel_norm_sq(std::size_t q) const;
  /// <v, K_q> for every q. The default loops over kernel(q).
  virtual std::vector<cplx> kernel_products(std::span<const cplx> v) const;

  virtual bool has_derivative_kernels() const { return false; }
  /// (order-1)-th derivative of K_q in conj(q).
  virtual Vector derivative_kernel(std::size_t q, int order) const;

  virtual bool boundary_flag(std::size_t /*q*/) const { return false; }
};

/// Explicit columns with <u,v> = weight * sum_i u_i conj(v_i).
class MatrixDictionary final : public Dictionary {
 public:
  explicit MatrixDictionary(std::vector<Vector> columns, double weight = 1.0);

  std::size_t size() const override { return columns_.size(); }
  std::size_t dimension() const override { return columns_.front().size(); }
  cplx inner(std::span<const cplx> u, std::span<const cplx> v) const override;
  Vector kernel(std::size_t q) const override { return columns_.at(q); }
  std::vector<cplx> kernel_products(std::span<const cplx> v) const override;

  double weight() const { return weight_; }

 private:
  std::vector<Vector> columns_;
  double weight_;
};

/// Unnormalized Szegő kernels k_q(z) = 1/(1 - conj(q) z) over a DiscGrid,
/// sampled on the quadrature grid for signals of size n.
class SzegoDictionary final : public Dictionary {
 public:
  SzegoDictionary(DiscGrid grid, std::size_t n);

  std::size_t size() const override { return grid_.size(); }
  std::size_t dimension() const override { return m_; }
  cplx inner(std::span<const cplx> u, std::span<const cplx> v) const override;
  Vector kernel(std::size_t q) const override;
  double kernel_norm_sq(std::size_t q) const override;
  /// Reproducing property: <v, k_q> = v(q), evaluated ring by ring.
  std::vector<cplx> kernel_products(std::span<const cplx> v) const override;
  bool has_derivative_kernels() const override { return true; }
  Vector derivative_kernel(std::size_t q, int order) const override;
  bool boundary_flag(std::size_t q) const override { return grid_.boundary_flag(q); }

  const DiscGrid& grid() const { return grid_; }
  DiscPoint point(std::size_t q) const { return grid_[q]; }
  std::size_t signal_size() const { return n_; }

  Vector embed(const CircleSignal& f) const;
  CircleSignal to_signal(std::span<const cplx> v) const;

 private:
  DiscGrid grid_;
  std::size_t n_;
  std::size_t m_;
};

inline constexpr double kDegenerateRatio = 1e-12;

/// Normalized Gram-Schmidt residual of the order-`order` kernel at q
/// against an orthonormal prior basis (two passes). nullopt marks a
/// kernel inside span(prior).
std::optional<Vector> candidate_basis(const Dictionary& dict, std::span<const Vector> prior_basis,
                                      std::size_t q, int order = 1,
                                      double eps = kDegenerateRatio);

struct Selection {
  std::size_t param = 0;
  int order = 1;     // multiple-kernel order (multiplicity after selection)
  Vector basis;      // B_n^{q_n}
  double energy = 0.0;     // weighted sum of |<G_w, B_n^q>|^2 at the selection
  double supremum = 0.0;   // best energy over the scanned candidates
};

/// Pre-orthogonal maximal selection. Previously selected parameters are
/// rescanned with their next multiple kernel when the dictionary has
/// derivative kernels, and skipped otherwise.
Selection pomsp_select(std::span<const cplx> g, const Dictionary& dict,
                       std::span<const Vector> prior_basis,
                       std::span<const std::size_t> prior_params);

/// First not-yet-selected parameter in domain order whose objective
/// reaches rho times the supremum over not-yet-selected parameters.
Selection weak_select(std::span<const cplx> g, const Dictionary& dict,
                      std::span<const Vector> prior_basis,
                      std::span<const std::size_t> prior_params, double rho);

struct PoafdOptions {
  double stop_ratio = 1e-12;
  double eps_gs = kDegenerateRatio;
};

/// POAFD / SPOAFD output. Rows of coeffs are realizations (one row for a
/// deterministic run); residual_energy is in the weighted (EE) norm.
struct PoafdResult {
  std::vector<std::size_t> params;
  std::vector<int> multiplicity;
  std::vector<Vector> basis;
  std::vector<std::vector<cplx>> coeffs;
  std::vector<double> weights;
  std::vector<double> residual_energy;  // [0] = E_w ||F_w||^2
  std::vector<double> energy;           // selection objective per step
  double rho = 1.0;
  bool exhausted = false;               // stopped because no candidate remained

  std::size_t steps() const { return params.size(); }
  const std::vector<cplx>& coefficients() const { return coeffs.front(); }
};

PoafdResult poafd_decompose(std::span<const cplx> f, const Dictionary& dict, std::size_t n_iter,
                            double rho = 1.0, const PoafdOptions& opts = {});

/// Stochastic POAFD: the selection maximizes sum_w p_w |<(G_k)_w, B_k^q>|^2.
PoafdResult spoafd_decompose(std::span<const Vector> realizations, std::span<const double> weights,
                             const Dictionary& dict, std::size_t n_iter, double rho = 1.0,
                             const PoafdOptions& opts = {});

struct PoafdChecks {
  double gram = 0.0;          // max |Gram - I|
  double bookkeeping = 0.0;   // |E||F||^2 - sum_k E|c_k|^2 - E||G_{n+1}||^2|
  bool monotone = true;
};
PoafdChecks check_poafd(const PoafdResult& r, std::span<const Vector> realizations,
                        const Dictionary& dict);

struct AppendixReport {
  std::size_t quadrature = 0;
  std::vector<double> alignment;       // |<B_k^GS, B_k^TM>|
  double max_deviation = 0.0;          // max |alignment_k - 1|
  std::vector<DiscPoint> probes;
  std::vector<double> identity_residual;  // pointwise (5.65)-type residual per probe
  double max_identity_residual = 0.0;
};

/// Compares the Gram-Schmidt orthonormalization of the multiple kernels
/// with the TM system and checks
///   k_a - sum_l <k_a,B_l> B_l = conj(phi(a)) phi k_a
/// for probe points a distinct from the parameters.
AppendixReport appendix_equivalence(std::span<const DiscPoint> params, std::size_t n,
                                    std::span<const DiscPoint> probes = {});

}  // namespace stochafd
