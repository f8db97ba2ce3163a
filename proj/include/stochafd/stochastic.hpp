#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stochafd/afd.hpp"
#include "stochafd/circle.hpp"
#include "stochafd/poafd.hpp"
#include "stochafd/szego.hpp"

namespace stochafd {

/// W realizations on a shared grid with probability weights.
class Ensemble {
 public:
  /// Empty weights mean uniform 1/W. Weights must be non-negative and sum
  /// to 1 within 1e-12.
  explicit Ensemble(std::vector<CircleSignal> realizations, std::vector<double> weights = {},
                    std::string label = {});

  std::size_t size() const { return realizations_.size(); }
  std::size_t signal_size() const { return realizations_.front().size(); }
  const std::vector<CircleSignal>& realizations() const { return realizations_; }
  const std::vector<double>& weights() const { return weights_; }
  const CircleSignal& operator[](std::size_t w) const { return realizations_[w]; }
  double weight(std::size_t w) const { return weights_[w]; }
  const std::string& label() const { return label_; }

 private:
  std::vector<CircleSignal> realizations_;
  std::vector<double> weights_;
  std::string label_;
};

double ee_norm_sq(const Ensemble& e);
/// sqrt(E_w ||f_w||^2)
double ee_norm(const Ensemble& e);
/// Pointwise E_w f_w.
CircleSignal expectation_signal(const Ensemble& e);
/// f_w - E_w f, same weights.
Ensemble remainder_ensemble(const Ensemble& e);
/// Per-realization analytic projection.
Ensemble analytic_projection(const Ensemble& e);

/// max_j |H(E_w f)(t_j) - E_w(H f)(t_j)|
double commute_check(const Ensemble& e);

/// Energy of the analytic part of the remainder ensemble, for real input.
/// The band-limited remainder is used so the Nyquist bin, which has no
/// analytic counterpart, is reported separately.
struct PlusNormReport {
  double plus_energy = 0.0;       // A = ||r+||_N^2
  double spectral_energy = 0.0;   // B = sum_{k>=0} E_w |d_k|^2
  double symmetric_energy = 0.0;  // C = (||r||_N^2 + E_w |d_0|^2) / 2
  double printed_formula = 0.0;   // ||r + d_0||_N^2 / 2
  double nyquist_energy = 0.0;    // E_w |d_{-N/2}|^2 of the raw remainder
  double ab_deviation = 0.0;
  double bc_deviation = 0.0;
};
PlusNormReport plus_norm_relation(const Ensemble& e);

/// Output of the ensemble decompositions. coeffs[w][k] = <f_w, B_k>.
struct EnsembleDecomposition {
  std::vector<DiscPoint> params;
  std::vector<std::size_t> grid_indices;
  TMSystem tm;
  std::vector<std::vector<cplx>> coeffs;
  std::vector<double> weights;
  std::vector<double> residual_energy;   // EE-norm^2, [0] = ||f||_N^2
  std::vector<double> difference_norms;  // ||d_f(., w)||^2 (SAFDI only)

  std::size_t steps() const { return params.size(); }
};

/// Expectation-first decomposition: AFD on E_w f, then every realization
/// is expanded in the resulting TM system.
///
/// The expectation is treated as fully represented by its AFD expansion,
/// so d_f(., w) = r_w - sum_k <r_w, B_k> B_k with r_w = f_w - E_w f.
struct Safd1Result {
  EnsembleDecomposition ensemble;
  Decomposition expectation;            // AFD of E_w f
  double mean_difference = 0.0;         // max_j |E_w d_f(t_j, w)|
  double expectation_truncation = 0.0;  // max_j |(E_w f - P_n E_w f)(t_j)|
  double difference_energy = 0.0;       // ||d_f||_N^2
  double pythagoras = 0.0;              // max_m residual of the truncation split
  double difference_estimate = 0.0;     // | ||d_f||^2 - (||r||^2 - sum_k E|<r_w,B_k>|^2) |
  std::vector<double> truncation_error; // E_w ||f_w - P_m f_w||^2, m = 0..n
};
Safd1Result safd1_decompose(const Ensemble& e, std::size_t n_iter, const DiscGrid& grid,
                            const AfdOptions& opts = {});

/// sum_w p_w (1-|a|^2) |(f_k)_w(a)|^2
double smsp_objective(std::span<const CircleSignal> remainders, std::span<const double> weights,
                      DiscPoint a);
/// The same objective over a whole grid.
std::vector<double> smsp_objective(std::span<const CircleSignal> remainders,
                                   std::span<const double> weights, const DiscGrid& grid);

/// Expectation-second decomposition with the stochastic maximal selection.
struct Safd2Result {
  EnsembleDecomposition ensemble;
  std::vector<std::vector<CircleSignal>> remainders;  // [k][w], k = 0..n
  std::vector<double> objective;                     // SMSP value of each a_k
  double consistency = 0.0;  // max_{k,w} |<(f_k)_w, e_{a_k}> - <f_w, B_k>|
  double energy_step = 0.0;  // max_k |E|<(f_k)_w, e_{a_k}>|^2 - E|<f_w, B_k>|^2|
  bool monotone = true;
};
Safd2Result safd2_decompose(const Ensemble& e, std::size_t n_iter, const DiscGrid& grid,
                            const AfdOptions& opts = {});

/// SPOAFD over the Szegő dictionary; realizations are embedded on the
/// dictionary's quadrature grid.
PoafdResult spoafd_decompose(const Ensemble& e, const SzegoDictionary& dict, std::size_t n_iter,
                             double rho = 1.0, const PoafdOptions& opts = {});
std::vector<Vector> embed(const Ensemble& e, const SzegoDictionary& dict);

struct SbvcRow {
  double radius = 0.0;
  double measured = 0.0;  // max over angles of E_w |<f_w, e_a>|^2
  double bound = 0.0;     // (1-r^2) E_w[(sum_k |c_k(w)|)^2]
};
/// Boundary decay table for analytic realizations.
std::vector<SbvcRow> sbvc_probe(const Ensemble& e, std::span<const double> radii,
                                std::size_t angles = 128);

/// gamma_ij = sum_w p_w r_w(t_i) conj(r_w(t_j)), row-major.
struct Autocorrelation {
  std::size_t n = 0;
  std::vector<cplx> gamma;
  /// max over circular diagonals d of max_i |gamma_{i,i+d} - mean_d|
  double stationarity_score = 0.0;

  cplx operator()(std::size_t i, std::size_t j) const { return gamma[i * n + j]; }
};
Autocorrelation autocorrelation(const Ensemble& e);

}  // namespace stochafd
