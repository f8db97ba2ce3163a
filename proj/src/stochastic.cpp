#include "stochafd/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stochafd {
namespace {

double max_abs(const CircleSignal& f) {
  double m = 0.0;
  for (const auto& v : f.samples()) m = std::max(m, std::abs(v));
  return m;
}

void require_analytic(const Ensemble& e, double tol, const char* what) {
  for (std::size_t w = 0; w < e.size(); ++w) {
    const Spectrum s = to_spectrum(e[w]);
    const double leak = std::sqrt(s.negative_energy());
    if (leak > tol * std::max(1.0, std::sqrt(s.energy()))) {
      throw std::domain_error(std::string(what) + ": realization " + std::to_string(w) +
                              " is not analytic (negative-frequency norm " + std::to_string(leak) +
                              ")");
    }
  }
}

}  // namespace

Ensemble::Ensemble(std::vector<CircleSignal> realizations, std::vector<double> weights,
                   std::string label)
    : realizations_(std::move(realizations)), weights_(std::move(weights)), label_(std::move(label)) {
  if (realizations_.empty()) throw std::invalid_argument("ensemble needs at least one realization");
  const std::size_t n = realizations_.front().size();
  for (std::size_t w = 0; w < realizations_.size(); ++w) {
    if (realizations_[w].size() != n) {
      throw std::invalid_argument("realization " + std::to_string(w) + " has " +
                                  std::to_string(realizations_[w].size()) + " samples, expected " +
                                  std::to_string(n));
    }
  }
  if (weights_.empty()) {
    weights_.assign(realizations_.size(), 1.0 / static_cast<double>(realizations_.size()));
    return;
  }
  if (weights_.size() != realizations_.size()) {
    throw std::invalid_argument("ensemble has " + std::to_string(realizations_.size()) +
                                " realizations but " + std::to_string(weights_.size()) + " weights");
  }
  double total = 0.0;
  for (std::size_t w = 0; w < weights_.size(); ++w) {
    if (!(weights_[w] >= 0.0) || !std::isfinite(weights_[w])) {
      throw std::invalid_argument("weight " + std::to_string(w) + " is negative or not finite");
    }
    total += weights_[w];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("ensemble weights sum to " + std::to_string(total) + ", not 1");
  }
}

double ee_norm_sq(const Ensemble& e) {
  double acc = 0.0;
  for (std::size_t w = 0; w < e.size(); ++w) acc += e.weight(w) * norm_sq(e[w]);
  return acc;
}

double ee_norm(const Ensemble& e) { return std::sqrt(ee_norm_sq(e)); }

CircleSignal expectation_signal(const Ensemble& e) {
  CircleSignal acc = CircleSignal::zeros(e.signal_size());
  for (std::size_t w = 0; w < e.size(); ++w) acc.add_scaled(e.weight(w), e[w]);
  return acc;
}

Ensemble remainder_ensemble(const Ensemble& e) {
  const CircleSignal mean = expectation_signal(e);
  std::vector<CircleSignal> out;
  out.reserve(e.size());
  for (const auto& f : e.realizations()) out.push_back(f - mean);
  return Ensemble(std::move(out), e.weights(), e.label());
}

Ensemble analytic_projection(const Ensemble& e) {
  std::vector<CircleSignal> out;
  out.reserve(e.size());
  for (const auto& f : e.realizations()) out.push_back(analytic_projection(f));
  return Ensemble(std::move(out), e.weights(), e.label());
}

double commute_check(const Ensemble& e) {
  const CircleSignal lhs = hilbert_transform(expectation_signal(e));
  CircleSignal rhs = CircleSignal::zeros(e.signal_size());
  for (std::size_t w = 0; w < e.size(); ++w) rhs.add_scaled(e.weight(w), hilbert_transform(e[w]));
  double dev = 0.0;
  for (std::size_t j = 0; j < lhs.size(); ++j) dev = std::max(dev, std::abs(lhs[j] - rhs[j]));
  return dev;
}

PlusNormReport plus_norm_relation(const Ensemble& e) {
  for (std::size_t w = 0; w < e.size(); ++w) {
    if (!e[w].is_real(1e-12 * std::max(1.0, max_abs(e[w])))) {
      throw std::domain_error("plus_norm_relation: realization " + std::to_string(w) +
                              " is not real-valued");
    }
  }
  const Ensemble r = remainder_ensemble(e);
  PlusNormReport rep;
  for (std::size_t w = 0; w < r.size(); ++w) {
    const double p = r.weight(w);
    const Spectrum d = to_spectrum(r[w]);
    rep.plus_energy += p * norm_sq(analytic_projection(r[w]));
    double b = 0.0;
    for (int k = 0; k <= d.max_frequency(); ++k) b += std::norm(d[k]);
    rep.spectral_energy += p * b;
    rep.symmetric_energy += p * 0.5 * (norm_sq(band_limit(r[w])) + std::norm(d[0]));
    rep.printed_formula += p * 0.5 * norm_sq(r[w] + CircleSignal::constant(r[w].size(), d[0]));
    rep.nyquist_energy += p * std::norm(d[d.min_frequency()]);
  }
  rep.ab_deviation = std::abs(rep.plus_energy - rep.spectral_energy);
  rep.bc_deviation = std::abs(rep.spectral_energy - rep.symmetric_energy);
  return rep;
}

Safd1Result safd1_decompose(const Ensemble& e, std::size_t n_iter, const DiscGrid& grid,
                            const AfdOptions& opts) {
  require_analytic(e, opts.input_tol, "safd1_decompose");
  const CircleSignal mean = expectation_signal(e);
  Safd1Result out{.ensemble = {.params = {},
                               .grid_indices = {},
                               .tm = TMSystem(4),
                               .coeffs = {},
                               .weights = e.weights(),
                               .residual_energy = {},
                               .difference_norms = {}},
                  .expectation = afd_decompose(mean, n_iter, grid, opts),
                  .truncation_error = {}};
  const Decomposition& afd = out.expectation;
  EnsembleDecomposition& ens = out.ensemble;
  ens.params = afd.params;
  ens.grid_indices = afd.grid_indices;
  ens.tm = afd.tm;
  const TMSystem& tm = ens.tm;
  const std::size_t n = tm.size();
  const std::size_t m = tm.grid_size();

  const std::vector<cplx> mean_coeffs = tm.coefficients(mean);
  {
    CircleSignal g = upsample(mean, m);
    g -= tm.partial_sum(mean_coeffs, n);
    out.expectation_truncation = max_abs(g);
  }
  const double mean_tail = norm_sq(upsample(mean, m) - tm.partial_sum(mean_coeffs, n));

  out.truncation_error.assign(n + 1, 0.0);
  std::vector<double> coeff_energy(n, 0.0);
  std::vector<double> rem_coeff_energy(n, 0.0);
  CircleSignal mean_difference = CircleSignal::zeros(m);
  double rem_energy = 0.0;
  for (std::size_t w = 0; w < e.size(); ++w) {
    const double p = e.weight(w);
    std::vector<cplx> c = tm.coefficients(e[w]);
    CircleSignal g = upsample(e[w], m);
    for (std::size_t k = 0; k <= n; ++k) {
      out.truncation_error[k] += p * norm_sq(g);
      if (k < n) g.add_scaled(-c[k], tm[k]);
    }
    CircleSignal d = upsample(e[w] - mean, m);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx rc = c[k] - mean_coeffs[k];
      d.add_scaled(-rc, tm[k]);
      coeff_energy[k] += p * std::norm(c[k]);
      rem_coeff_energy[k] += p * std::norm(rc);
    }
    rem_energy += p * norm_sq(e[w] - mean);
    const double dn = norm_sq(d);
    ens.difference_norms.push_back(dn);
    out.difference_energy += p * dn;
    mean_difference.add_scaled(p, d);
    ens.coeffs.push_back(std::move(c));
  }
  out.mean_difference = max_abs(mean_difference);

  ens.residual_energy.push_back(ee_norm_sq(e));
  for (std::size_t k = 0; k < n; ++k) {
    ens.residual_energy.push_back(ens.residual_energy.back() - coeff_energy[k]);
  }
  // E||f_w - P_m f_w||^2 = ||d_f||^2 + sum_{m<k<=n} E|<f_w,B_k>|^2 + ||E f - P_n E f||^2
  double tail = 0.0;
  for (std::size_t mm = n + 1; mm-- > 0;) {
    if (mm < n) tail += coeff_energy[mm];
    const double rhs = out.difference_energy + tail + mean_tail;
    out.pythagoras = std::max(out.pythagoras, std::abs(out.truncation_error[mm] - rhs));
  }
  double estimate = rem_energy;
  for (double v : rem_coeff_energy) estimate -= v;
  out.difference_estimate = std::abs(out.difference_energy - estimate);
  return out;
}

double smsp_objective(std::span<const CircleSignal> remainders, std::span<const double> weights,
                      DiscPoint a) {
  if (remainders.size() != weights.size()) {
    throw std::invalid_argument("weights and remainders differ in length");
  }
  double acc = 0.0;
  for (std::size_t w = 0; w < remainders.size(); ++w) {
    acc += weights[w] * std::norm(eval_analytic(to_spectrum(remainders[w]), a.value()));
  }
  return (1.0 - std::norm(a.value())) * acc;
}

std::vector<double> smsp_objective(std::span<const CircleSignal> remainders,
                                   std::span<const double> weights, const DiscGrid& grid) {
  if (remainders.size() != weights.size()) {
    throw std::invalid_argument("weights and remainders differ in length");
  }
  std::vector<double> obj(grid.size(), 0.0);
  for (std::size_t w = 0; w < remainders.size(); ++w) {
    const std::vector<cplx> vals = grid.evaluate(to_spectrum(remainders[w]).taylor_coefficients());
    for (std::size_t i = 0; i < vals.size(); ++i) obj[i] += weights[w] * std::norm(vals[i]);
  }
  for (std::size_t i = 0; i < obj.size(); ++i) obj[i] *= 1.0 - std::norm(grid[i].value());
  return obj;
}

Safd2Result safd2_decompose(const Ensemble& e, std::size_t n_iter, const DiscGrid& grid,
                            const AfdOptions& opts) {
  if (n_iter < 1) throw std::invalid_argument("safd2_decompose: n_iter must be >= 1");
  require_analytic(e, opts.input_tol, "safd2_decompose");
  const std::size_t m = quadrature_size(e.signal_size(), grid.r_max());
  Safd2Result out{.ensemble = {.params = {},
                               .grid_indices = {},
                               .tm = TMSystem(m),
                               .coeffs = std::vector<std::vector<cplx>>(e.size()),
                               .weights = e.weights(),
                               .residual_energy = {ee_norm_sq(e)},
                               .difference_norms = {}},
                  .remainders = {e.realizations()},
                  .objective = {}};
  EnsembleDecomposition& ens = out.ensemble;
  const double energy = ens.residual_energy.front();
  const std::span<const double> p = e.weights();

  for (std::size_t step = 0; step < n_iter; ++step) {
    const std::vector<CircleSignal>& rem = out.remainders.back();
    const std::vector<double> obj = smsp_objective(rem, p, grid);
    const std::size_t idx = argmax_first(obj);
    const DiscPoint a = grid[idx];
    const double s = std::sqrt(1.0 - std::norm(a.value()));
    ens.tm.append(a);
    const std::size_t k = ens.tm.size() - 1;

    std::vector<CircleSignal> next;
    next.reserve(e.size());
    double reduced_energy = 0.0;
    double standard_energy = 0.0;
    double residual = 0.0;
    for (std::size_t w = 0; w < e.size(); ++w) {
      const cplx c_red = s * eval_analytic(to_spectrum(rem[w]), a.value());
      const cplx c = ens.tm.coefficient(e[w], k);
      out.consistency = std::max(out.consistency, std::abs(c_red - c));
      reduced_energy += p[w] * std::norm(c_red);
      standard_energy += p[w] * std::norm(c);
      ens.coeffs[w].push_back(c);
      next.push_back(reduce_remainder(rem[w], a, opts));
      residual += p[w] * norm_sq(next.back());
    }
    out.energy_step = std::max(out.energy_step, std::abs(reduced_energy - standard_energy));
    ens.params.push_back(a);
    ens.grid_indices.push_back(idx);
    out.objective.push_back(obj[idx]);
    if (residual > ens.residual_energy.back() + 1e-12 * std::max(1.0, energy)) out.monotone = false;
    ens.residual_energy.push_back(residual);
    out.remainders.push_back(std::move(next));
    if (residual <= opts.stop_ratio * energy) break;
  }
  return out;
}

std::vector<Vector> embed(const Ensemble& e, const SzegoDictionary& dict) {
  std::vector<Vector> out;
  out.reserve(e.size());
  for (const auto& f : e.realizations()) out.push_back(dict.embed(f));
  return out;
}

PoafdResult spoafd_decompose(const Ensemble& e, const SzegoDictionary& dict, std::size_t n_iter,
                             double rho, const PoafdOptions& opts) {
  require_analytic(e, AfdOptions{}.input_tol, "spoafd_decompose");
  const std::vector<Vector> f = embed(e, dict);
  return spoafd_decompose(f, e.weights(), dict, n_iter, rho, opts);
}

std::vector<SbvcRow> sbvc_probe(const Ensemble& e, std::span<const double> radii,
                                std::size_t angles) {
  require_analytic(e, AfdOptions{}.input_tol, "sbvc_probe");
  std::vector<std::vector<cplx>> taylor;
  double l1 = 0.0;
  for (std::size_t w = 0; w < e.size(); ++w) {
    taylor.push_back(to_spectrum(e[w]).taylor_coefficients());
    double s = 0.0;
    for (const auto& c : taylor.back()) s += std::abs(c);
    l1 += e.weight(w) * s * s;
  }
  std::vector<SbvcRow> rows;
  for (double r : radii) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("probe radius must lie in [0, 1)");
    std::vector<double> acc(angles, 0.0);
    for (std::size_t w = 0; w < e.size(); ++w) {
      const std::vector<cplx> vals = evaluate_ring(taylor[w], r, angles);
      for (std::size_t j = 0; j < angles; ++j) acc[j] += e.weight(w) * std::norm(vals[j]);
    }
    const double scale = 1.0 - r * r;
    rows.push_back({.radius = r,
                    .measured = scale * *std::max_element(acc.begin(), acc.end()),
                    .bound = scale * l1});
  }
  return rows;
}

Autocorrelation autocorrelation(const Ensemble& e) {
  const std::size_t n = e.signal_size();
  Autocorrelation out{.n = n, .gamma = std::vector<cplx>(n * n, cplx(0.0)), .stationarity_score = 0.0};
  for (std::size_t w = 0; w < e.size(); ++w) {
    const double p = e.weight(w);
    const auto r = e[w].samples();
    for (std::size_t i = 0; i < n; ++i) {
      const cplx ri = p * r[i];
      cplx* row = out.gamma.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += ri * std::conj(r[j]);
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    cplx mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += out(i, (i + d) % n);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.stationarity_score = std::max(out.stationarity_score, std::abs(out(i, (i + d) % n) - mean));
    }
  }
  return out;
}

}  // namespace stochafd
