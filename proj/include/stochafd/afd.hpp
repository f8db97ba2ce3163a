#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochafd/circle.hpp"
#include "stochafd/szego.hpp"

namespace stochafd {

/// Relative window within which two grid objectives count as tied; the
/// smaller grid index wins a tie.
inline constexpr double kTieTolerance = 1e-10;

/// Index of the first entry within kTieTolerance of the maximum.
std::size_t argmax_first(std::span<const double> objective);

struct AfdOptions {
  /// Stop once the residual energy drops below stop_ratio * ||f||^2.
  double stop_ratio = 1e-12;
  /// Largest negative-frequency norm (relative) tolerated on a reduced
  /// remainder before it is hard-zeroed.
  double leakage_tol = 1e-8;
  /// Negative-frequency norm (relative) above which an input is rejected.
  double input_tol = 1e-10;
  /// Skip grid points chosen at earlier steps.
  bool exclude_selected = false;
};

/// Core AFD output. Every per-step sequence is indexed by step k = 0..n.
struct Decomposition {
  std::vector<DiscPoint> params;
  std::vector<std::size_t> grid_indices;  // empty for expand_with_params
  std::vector<cplx> coeffs;               // <f_k, e_{a_k}>
  /// residual_energy[k] = ||f||^2 - sum_{l<=k} |coeffs_l|^2; [0] = ||f||^2.
  std::vector<double> residual_energy;
  /// Reduced remainders f_1 = f, ..., f_{n+1} on the input grid.
  std::vector<CircleSignal> remainders;
  /// TM system of params on the quadrature grid.
  TMSystem tm;
  /// Input on the quadrature grid.
  CircleSignal signal;

  std::size_t steps() const { return params.size(); }
};

/// (1-|a|^2) |f(a)|^2 at every grid point.
std::vector<double> msp_objective(const CircleSignal& f_k, const DiscGrid& grid);
/// Grid index maximizing |<f_k, e_a>|^2.
std::size_t msp_select(const CircleSignal& f_k, const DiscGrid& grid);

/// (f - <f,e_a> e_a) / ((z-a)/(1-conj(a) z)), computed pointwise.
/// Throws std::domain_error if f or the quotient is not analytic.
CircleSignal reduce_remainder(const CircleSignal& f_k, DiscPoint a, const AfdOptions& opts = {});

Decomposition afd_decompose(const CircleSignal& f, std::size_t n_iter, const DiscGrid& grid,
                            const AfdOptions& opts = {});

/// TM expansion with fixed parameters: coeffs are <f, B_k>.
Decomposition expand_with_params(const CircleSignal& f, std::span<const DiscPoint> params,
                                 const AfdOptions& opts = {});

/// sum_{l<=k} coeffs_l B_l on the quadrature grid; k = 0 gives zero.
CircleSignal reconstruct(const Decomposition& d, std::size_t k);

/// g_k = f - sum_{l<k} coeffs_l B_l, 2 <= k <= n+1 (1-based as in the
/// AFD literature). f may be given on the input or the quadrature grid.
CircleSignal standard_remainder(const CircleSignal& f, const Decomposition& d, std::size_t k);
CircleSignal standard_remainder(const Decomposition& d, std::size_t k);

/// Diagnostics shared by the CLI and the test suites.
struct AfdChecks {
  double energy_step = 0.0;      // max_k | ||f_k||^2 - |c_k|^2 - ||f_{k+1}||^2 |
  double consistency = 0.0;      // max_k |<f_k,e_{a_k}> - <f,B_k>|
  double gram = 0.0;             // max |Gram - I|
  double reconstruction = 0.0;   // max_k | ||f - S_k||^2 - residual_energy[k] |
  bool monotone = true;          // residual_energy non-increasing (1e-12 slack)
};
AfdChecks check_decomposition(const Decomposition& d);

}  // namespace stochafd
