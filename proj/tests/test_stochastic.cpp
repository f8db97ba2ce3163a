#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stochafd/io.hpp"
#include "stochafd/stochastic.hpp"

using namespace stochafd;

namespace {

CircleSignal cos_t(std::size_t n, double shift = 0.0) {
  return CircleSignal::from_function(n, [shift](cplx z) { return cplx(z.real() + shift); });
}
CircleSignal sin_t(std::size_t n) {
  return CircleSignal::from_function(n, [](cplx z) { return cplx(z.imag()); });
}

double max_diff(const CircleSignal& a, const CircleSignal& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

Ensemble noisy_analytic(const CircleSignal& base, double sigma, std::size_t w, std::uint64_t seed) {
  return analytic_projection(generate_noisy(base, sigma, w, seed));
}

}  // namespace

TEST_CASE("ensemble validation") {
  CHECK_THROWS(Ensemble({}));
  CHECK_THROWS(Ensemble({cos_t(8), cos_t(16)}));
  CHECK_THROWS(Ensemble({cos_t(8), cos_t(8)}, {0.5, 0.6}));
  CHECK_THROWS(Ensemble({cos_t(8), cos_t(8)}, {1.5, -0.5}));
  CHECK_THROWS(Ensemble({cos_t(8)}, {0.5, 0.5}));
  const Ensemble e({cos_t(8), cos_t(8)});
  CHECK(e.weight(0) == 0.5);
}

TEST_CASE("EE-norm, expectation and remainder examples") {
  const std::size_t n = 64;
  CHECK(std::abs(ee_norm(Ensemble({cos_t(n), sin_t(n)})) - std::sqrt(0.5)) < 1e-14);
  CHECK(std::abs(ee_norm(Ensemble({cos_t(n)})) - norm(cos_t(n))) < 1e-15);
  CHECK(ee_norm(Ensemble({CircleSignal::zeros(n)})) == 0.0);

  const Ensemble pm({cos_t(n, 1.0), cos_t(n, -1.0)});
  CHECK(max_diff(expectation_signal(pm), cos_t(n)) < 1e-15);
  const Ensemble same({sin_t(n), sin_t(n), sin_t(n)});
  CHECK(max_diff(expectation_signal(same), sin_t(n)) < 1e-15);
  CHECK(norm(expectation_signal(Ensemble({sin_t(n), -1.0 * sin_t(n)}))) < 1e-15);

  const Ensemble rem = remainder_ensemble(pm);
  CHECK(max_diff(rem[0], CircleSignal::constant(n, 1.0)) < 1e-15);
  CHECK(max_diff(rem[1], CircleSignal::constant(n, -1.0)) < 1e-15);
  CHECK(ee_norm(remainder_ensemble(same)) < 1e-15);

  // ||f||^2 = ||E f||^2 + ||r||^2
  const Ensemble e = generate_noisy(cos_t(n), 0.3, 50, 4);
  CHECK(std::abs(ee_norm_sq(e) - norm_sq(expectation_signal(e)) - ee_norm_sq(remainder_ensemble(e))) <=
        1e-10);
}

TEST_CASE("Hilbert transform commutes with expectation") {
  const std::size_t n = 64;
  CHECK(commute_check(Ensemble({cos_t(n)})) <= 1e-15);
  CHECK(commute_check(generate_noisy(cos_t(n), 1.0, 100, 5)) <= 1e-12);
  CHECK(commute_check(Ensemble({cos_t(n, 2.0), sin_t(n)}, {0.3, 0.7})) <= 1e-12);
}

TEST_CASE("plus-norm relation") {
  const std::size_t n = 64;
  // d_0 = 0, single mode d_1
  const PlusNormReport single = plus_norm_relation(Ensemble({cos_t(n), -1.0 * cos_t(n)}));
  CHECK(std::abs(single.plus_energy - single.symmetric_energy) < 1e-14);
  CHECK(std::abs(single.plus_energy - 0.25) < 1e-14);
  const PlusNormReport zero = plus_norm_relation(Ensemble({CircleSignal::zeros(n)}));
  CHECK(zero.plus_energy == 0.0);
  CHECK(zero.spectral_energy == 0.0);
  CHECK(zero.symmetric_energy == 0.0);
  const PlusNormReport wn = plus_norm_relation(generate_noisy(CircleSignal::zeros(n), 0.5, 200, 6));
  CHECK(wn.ab_deviation <= 1e-10);
  CHECK(wn.bc_deviation <= 1e-10);
  CHECK(wn.nyquist_energy > 0.0);
  CHECK_THROWS(plus_norm_relation(Ensemble({CircleSignal::from_function(n, [](cplx z) { return z; })})));
}

TEST_CASE("SAFDI identities") {
  const std::size_t n = 64;
  const DiscGrid grid(16, 32);
  // noiseless exactly representable ensemble
  const CircleSignal base = szego_eval(grid[70], n);
  const Safd1Result clean = safd1_decompose(Ensemble({base, base, base}), 3, grid);
  CHECK(clean.difference_energy <= 1e-20);
  CHECK(clean.ensemble.residual_energy.back() <= 1e-12);

  const Safd1Result r = safd1_decompose(noisy_analytic(cos_t(n), 0.1, 40, 1), 8, grid);
  CHECK(r.mean_difference <= 1e-10);
  CHECK(r.pythagoras <= 1e-8);
  CHECK(r.difference_estimate <= 1e-8);
  CHECK(r.truncation_error.size() == r.ensemble.steps() + 1);
  for (std::size_t m = 1; m < r.truncation_error.size(); ++m) {
    CHECK(r.truncation_error[m] <= r.truncation_error[m - 1] + 1e-12);
  }
  CHECK_THROWS(safd1_decompose(generate_noisy(cos_t(n), 0.1, 3, 1), 3, grid));
}

TEST_CASE("SMSP objective") {
  const std::size_t n = 64;
  const DiscGrid grid(11, 16, 0.8);
  const CircleSignal eb = szego_eval(grid[60], n);
  const double w1[] = {1.0};
  const CircleSignal one[] = {eb};
  const auto det = msp_objective(eb, grid);
  const auto sto = smsp_objective(one, w1, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(det[i] - sto[i]) <= 1e-14);
  CHECK(std::abs(smsp_objective(one, w1, grid[7]) - det[7]) <= 1e-14);

  std::mt19937_64 gen(14);
  std::normal_distribution<double> nd;
  std::vector<CircleSignal> scaled;
  double ec2 = 0.0;
  for (int w = 0; w < 6; ++w) {
    const double c = nd(gen);
    ec2 += c * c / 6.0;
    scaled.push_back(c * eb);
  }
  const std::vector<double> uw(6, 1.0 / 6.0);
  const auto obj = smsp_objective(scaled, uw, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(obj[i] - ec2 * det[i]) <= 1e-12);
  CHECK(argmax_first(obj) == 60);
}

TEST_CASE("SAFDII behaviour") {
  const std::size_t n = 256;
  const DiscGrid grid(16, 32);
  std::mt19937_64 gen(3);
  const CircleSignal f = oracle::poly_signal(oracle::random_poly(gen, 12), n);

  // W = 1 reduction
  const Safd2Result s = safd2_decompose(Ensemble({f}), 6, grid);
  const Decomposition a = afd_decompose(f, 6, grid);
  REQUIRE(s.ensemble.steps() == a.steps());
  CHECK(s.ensemble.grid_indices == a.grid_indices);
  for (std::size_t k = 0; k < a.steps(); ++k) CHECK(std::abs(s.ensemble.coeffs[0][k] - a.coeffs[k]) <= 1e-8);

  // single kernel with random amplitude
  const CircleSignal eb = szego_eval(grid[100], n);
  std::vector<CircleSignal> amp;
  std::normal_distribution<double> nd;
  for (int w = 0; w < 10; ++w) amp.push_back(cplx(nd(gen), nd(gen)) * eb);
  const Safd2Result one = safd2_decompose(Ensemble(amp), 3, grid);
  CHECK(one.ensemble.grid_indices[0] == 100);
  CHECK(one.ensemble.residual_energy[1] <= 1e-10);

  // mixture
  const Ensemble mix({szego_eval(DiscPoint(0.31, 0.17), n), szego_eval(DiscPoint(-0.52, 0.44), n)});
  const Safd2Result m = safd2_decompose(mix, 8, grid);
  CHECK(m.monotone);
  CHECK(m.consistency <= 1e-8);
  CHECK(m.energy_step <= 1e-8);
  for (std::size_t k = 1; k < m.ensemble.residual_energy.size(); ++k) {
    CHECK(m.ensemble.residual_energy[k] < m.ensemble.residual_energy[k - 1]);
  }
  // frozen regression bound, see README
  CHECK(m.ensemble.residual_energy.back() <= 1e-3 * m.ensemble.residual_energy[0]);
}

TEST_CASE("SPOAFD examples") {
  const std::size_t n = 64;
  const DiscGrid grid(16, 32);
  const SzegoDictionary dict(grid, n);
  std::mt19937_64 gen(19);
  const CircleSignal f = oracle::poly_signal(oracle::random_poly(gen, 10), n);
  const PoafdResult s = spoafd_decompose(Ensemble({f}), dict, 5);
  const PoafdResult p = poafd_decompose(dict.embed(f), dict, 5);
  CHECK(s.params == p.params);
  for (std::size_t k = 0; k < p.steps(); ++k) CHECK(std::abs(s.coefficients()[k] - p.coefficients()[k]) <= 1e-8);

  std::vector<CircleSignal> amp;
  for (double c : {0.3, -1.2, 2.0}) amp.push_back(c * szego_eval(grid[222], n));
  const PoafdResult q = spoafd_decompose(Ensemble(amp), dict, 2);
  CHECK(q.params[0] == 222);
  CHECK(q.residual_energy[1] <= 1e-10);

  Vector u1(4, 0.0), u2(4, 0.0);
  u1[0] = 1.0;
  u2[1] = 1.0;
  const MatrixDictionary md({u1, u2});
  const std::vector<Vector> rs = {u1, u2};
  const double ws[] = {0.9, 0.1};
  const PoafdResult w = spoafd_decompose(rs, ws, md, 2);
  CHECK(w.params[0] == 0);
  CHECK(std::abs(w.energy[0] - 0.9) < 1e-15);

  // safd2 agreement over the Szego dictionary
  const Ensemble ens = noisy_analytic(cos_t(n), 0.2, 8, 2);
  const Safd2Result s2 = safd2_decompose(ens, 4, grid);
  const PoafdResult sp = spoafd_decompose(ens, dict, 4);
  REQUIRE(sp.steps() == s2.ensemble.steps());
  for (std::size_t k = 0; k < sp.steps(); ++k) {
    CHECK(sp.params[k] == s2.ensemble.grid_indices[k]);
    for (std::size_t r = 0; r < ens.size(); ++r) {
      CHECK(std::abs(std::abs(sp.coeffs[r][k]) - std::abs(s2.ensemble.coeffs[r][k])) <= 1e-8);
    }
  }
}

TEST_CASE("SBVC probe") {
  const std::size_t n = 64;
  const Ensemble c({analytic_projection(cos_t(n))});
  const double radii[] = {0.0, 0.5, 0.99};
  const auto rows = sbvc_probe(c, radii, 128);
  CHECK(std::abs(rows[2].measured - (1 - 0.9801) * 0.495 * 0.495) <= 1e-6);
  CHECK(std::abs(rows[2].measured - 4.876e-3) <= 1e-6);
  CHECK(std::abs(rows[0].measured) <= 1e-15);
  for (const auto& row : rows) CHECK(row.measured <= row.bound + 1e-10);

  const Ensemble e = noisy_analytic(cos_t(n, 0.5), 0.3, 20, 9);
  double ec0 = 0.0;
  for (std::size_t w = 0; w < e.size(); ++w) ec0 += e.weight(w) * std::norm(to_spectrum(e[w])[0]);
  const auto t = sbvc_probe(e, radii, 64);
  CHECK(std::abs(t[0].measured - ec0) <= 1e-12);
  for (const auto& row : t) CHECK(row.measured <= row.bound + 1e-10);
}

TEST_CASE("autocorrelation") {
  const Autocorrelation z = autocorrelation(Ensemble({CircleSignal::zeros(8)}));
  for (cplx g : z.gamma) CHECK(g == cplx(0.0));
  CHECK(z.stationarity_score == 0.0);
  const Ensemble e({cos_t(8, 1.0), cos_t(8, -1.0)});
  const Autocorrelation a = autocorrelation(remainder_ensemble(e));
  CHECK(std::abs(a(2, 5) - 1.0) < 1e-15);
}
