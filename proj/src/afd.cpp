#include "stochafd/afd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stochafd {
namespace {

void require_analytic(const CircleSignal& f, double tol, const char* what) {
  const Spectrum s = to_spectrum(f);
  const double leak = std::sqrt(s.negative_energy());
  if (leak > tol * std::max(1.0, std::sqrt(s.energy()))) {
    throw std::domain_error(std::string(what) + ": signal is not analytic (negative-frequency norm " +
                            std::to_string(leak) + ")");
  }
}

double max_modulus(std::span<const DiscPoint> params) {
  double r = 0.0;
  for (const auto& p : params) r = std::max(r, p.modulus());
  return r;
}

}  // namespace

std::size_t argmax_first(std::span<const double> objective) {
  if (objective.empty()) throw std::invalid_argument("argmax over an empty candidate set");
  const double best = *std::max_element(objective.begin(), objective.end());
  const double threshold = best - kTieTolerance * std::abs(best);
  for (std::size_t i = 0; i < objective.size(); ++i) {
    if (objective[i] >= threshold) return i;
  }
  return 0;  // unreachable: best itself passes
}

std::vector<double> msp_objective(const CircleSignal& f_k, const DiscGrid& grid) {
  const std::vector<cplx> taylor = to_spectrum(f_k).taylor_coefficients();
  const std::vector<cplx> vals = grid.evaluate(taylor);
  std::vector<double> obj(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    obj[i] = (1.0 - std::norm(grid[i].value())) * std::norm(vals[i]);
  }
  return obj;
}

std::size_t msp_select(const CircleSignal& f_k, const DiscGrid& grid) {
  if (grid.size() == 0) throw std::invalid_argument("msp_select: empty grid");
  return argmax_first(msp_objective(f_k, grid));
}

CircleSignal reduce_remainder(const CircleSignal& f_k, DiscPoint a, const AfdOptions& opts) {
  require_analytic(f_k, opts.input_tol, "reduce_remainder");
  const std::size_t n = f_k.size();
  const cplx av = a.value();
  const double s = std::sqrt(1.0 - std::norm(av));
  const cplx c = s * eval_analytic(to_spectrum(f_k), av);
  // (1 - conj(a) z) e_a(z) = s, so the quotient needs no kernel samples.
  std::vector<cplx> q(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx z = CircleSignal::grid_point(j, n);
    q[j] = (f_k[j] * (1.0 - std::conj(av) * z) - c * s) / (z - av);
  }
  Spectrum spec = to_spectrum(CircleSignal(std::move(q)));
  const double leak = std::sqrt(spec.negative_energy());
  if (leak > opts.leakage_tol * std::max(1.0, norm(f_k))) {
    throw std::domain_error("reduce_remainder: quotient is not analytic (negative-frequency norm " +
                            std::to_string(leak) + ")");
  }
  for (int k = spec.min_frequency(); k < 0; ++k) spec[k] = 0.0;
  return to_signal(spec);
}

Decomposition afd_decompose(const CircleSignal& f, std::size_t n_iter, const DiscGrid& grid,
                            const AfdOptions& opts) {
  if (n_iter < 1) throw std::invalid_argument("afd_decompose: n_iter must be >= 1");
  if (grid.size() == 0) throw std::invalid_argument("afd_decompose: empty grid");
  require_analytic(f, opts.input_tol, "afd_decompose");

  const std::size_t m = quadrature_size(f.size(), grid.r_max());
  Decomposition d{.params = {},
                  .grid_indices = {},
                  .coeffs = {},
                  .residual_energy = {norm_sq(f)},
                  .remainders = {f},
                  .tm = TMSystem(m),
                  .signal = upsample(f, m)};
  const double energy = d.residual_energy.front();

  for (std::size_t step = 0; step < n_iter; ++step) {
    const CircleSignal& fk = d.remainders.back();
    std::vector<double> obj = msp_objective(fk, grid);
    if (opts.exclude_selected) {
      for (std::size_t i : d.grid_indices) obj[i] = -std::numeric_limits<double>::infinity();
      if (d.grid_indices.size() >= grid.size()) throw std::invalid_argument("afd_decompose: grid exhausted");
    }
    const std::size_t idx = argmax_first(obj);
    const DiscPoint a = grid[idx];
    const cplx c = std::sqrt(1.0 - std::norm(a.value())) * eval_analytic(to_spectrum(fk), a.value());
    CircleSignal next = reduce_remainder(fk, a, opts);

    d.params.push_back(a);
    d.grid_indices.push_back(idx);
    d.coeffs.push_back(c);
    d.residual_energy.push_back(d.residual_energy.back() - std::norm(c));
    d.remainders.push_back(std::move(next));
    d.tm.append(a);

    if (d.residual_energy.back() <= opts.stop_ratio * energy) break;
  }
  return d;
}

Decomposition expand_with_params(const CircleSignal& f, std::span<const DiscPoint> params,
                                 const AfdOptions& opts) {
  require_analytic(f, opts.input_tol, "expand_with_params");
  const std::size_t m = quadrature_size(f.size(), max_modulus(params));
  Decomposition d{.params = {params.begin(), params.end()},
                  .grid_indices = {},
                  .coeffs = {},
                  .residual_energy = {norm_sq(f)},
                  .remainders = {f},
                  .tm = TMSystem(params, m),
                  .signal = upsample(f, m)};
  d.coeffs = d.tm.coefficients(f);
  for (std::size_t k = 0; k < params.size(); ++k) {
    d.residual_energy.push_back(d.residual_energy.back() - std::norm(d.coeffs[k]));
    d.remainders.push_back(reduce_remainder(d.remainders.back(), params[k], opts));
  }
  return d;
}

CircleSignal reconstruct(const Decomposition& d, std::size_t k) {
  if (k > d.steps()) {
    throw std::out_of_range("reconstruct: k = " + std::to_string(k) + " exceeds " +
                            std::to_string(d.steps()) + " steps");
  }
  return d.tm.partial_sum(d.coeffs, k);
}

CircleSignal standard_remainder(const CircleSignal& f, const Decomposition& d, std::size_t k) {
  if (k < 2 || k > d.steps() + 1) {
    throw std::out_of_range("standard_remainder: k must lie in [2, n+1]");
  }
  const std::size_t m = d.tm.grid_size();
  CircleSignal g = f.size() == m ? f : upsample(f, m);
  g -= d.tm.partial_sum(d.coeffs, k - 1);
  return g;
}

CircleSignal standard_remainder(const Decomposition& d, std::size_t k) {
  return standard_remainder(d.signal, d, k);
}

AfdChecks check_decomposition(const Decomposition& d) {
  AfdChecks out;
  const std::size_t n = d.steps();
  for (std::size_t k = 0; k < n; ++k) {
    const double lhs = norm_sq(d.remainders[k]);
    const double rhs = std::norm(d.coeffs[k]) + norm_sq(d.remainders[k + 1]);
    out.energy_step = std::max(out.energy_step, std::abs(lhs - rhs));
  }
  const std::vector<cplx> direct = d.tm.coefficients(d.signal);
  for (std::size_t k = 0; k < n; ++k) {
    out.consistency = std::max(out.consistency, std::abs(direct[k] - d.coeffs[k]));
  }
  out.gram = d.tm.gram_deviation();
  CircleSignal g = d.signal;
  for (std::size_t k = 0; k <= n; ++k) {
    out.reconstruction = std::max(out.reconstruction, std::abs(norm_sq(g) - d.residual_energy[k]));
    if (k < n) g.add_scaled(-d.coeffs[k], d.tm[k]);
  }
  for (std::size_t k = 1; k <= n; ++k) {
    if (d.residual_energy[k] > d.residual_energy[k - 1] + 1e-12) out.monotone = false;
  }
  return out;
}

}  // namespace stochafd
