#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stochafd/afd.hpp"
#include "stochafd/poafd.hpp"

using namespace stochafd;

namespace {

Vector unit_vector(std::size_t d, std::size_t i) {
  Vector v(d, 0.0);
  v[i] = 1.0;
  return v;
}

// Random orthonormal columns via QR of a complex Gaussian matrix.
std::vector<Vector> orthonormal_columns(std::mt19937_64& gen, std::size_t d, std::size_t count) {
  std::normal_distribution<double> nd;
  std::vector<Vector> out;
  while (out.size() < count) {
    Vector v(d);
    for (auto& x : v) x = {nd(gen), nd(gen)};
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : out) {
        cplx c = 0.0;
        for (std::size_t i = 0; i < d; ++i) c += v[i] * std::conj(u[i]);
        for (std::size_t i = 0; i < d; ++i) v[i] -= c * u[i];
      }
    }
    double s = 0.0;
    for (auto x : v) s += std::norm(x);
    for (auto& x : v) x /= std::sqrt(s);
    out.push_back(v);
  }
  return out;
}

double residual_of(const MatrixDictionary& dict, const Vector& f, const PoafdResult& r) {
  Vector g = f;
  for (std::size_t k = 0; k < r.steps(); ++k) {
    const cplx c = dict.inner(f, r.basis[k]);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= c * r.basis[k][i];
  }
  return dict.norm_sq(g);
}

}  // namespace

TEST_CASE("matrix dictionary validation") {
  CHECK_THROWS(MatrixDictionary({}));
  CHECK_THROWS(MatrixDictionary({Vector{0.0, 0.0}}));
  CHECK_THROWS(MatrixDictionary({Vector{1.0, 0.0}, Vector{1.0}}));
  CHECK_THROWS(MatrixDictionary({Vector{1.0}}, 0.0));
  const MatrixDictionary d({Vector{1.0, 2.0}}, 0.5);
  CHECK(std::abs(d.kernel_norm_sq(0) - 2.5) < 1e-15);
}

TEST_CASE("candidate_basis examples") {
  const MatrixDictionary d({unit_vector(3, 0), unit_vector(3, 1), Vector{1.0, 1.0, 0.0}});
  const auto first = candidate_basis(d, {}, 2);
  REQUIRE(first);
  CHECK(std::abs((*first)[0] - 1 / std::sqrt(2.0)) < 1e-15);
  const std::vector<Vector> prior = {unit_vector(3, 0)};
  CHECK_FALSE(candidate_basis(d, prior, 0));
  const auto u2 = candidate_basis(d, prior, 1);
  REQUIRE(u2);
  CHECK(std::abs((*u2)[1] - 1.0) < 1e-15);
  const std::vector<Vector> both = {unit_vector(3, 0), unit_vector(3, 1)};
  CHECK_FALSE(candidate_basis(d, both, 2));
}

TEST_CASE("pomsp_select and weak_select on an orthonormal matrix dictionary") {
  const MatrixDictionary d({unit_vector(4, 0), unit_vector(4, 1), unit_vector(4, 2)});
  const Vector g = {2.0, 1.0, 0.0, 0.0};
  const Selection s = pomsp_select(g, d, {}, {});
  CHECK(s.param == 0);
  CHECK(std::abs(s.energy - 4.0) < 1e-15);
  const Selection w = weak_select(g, d, {}, {}, 1.0);
  CHECK(w.param == s.param);
  // rho^2 * 4 = 0.16 <= 1, so the first domain entry reaching it wins
  CHECK(weak_select(g, d, {}, {}, 0.2).param == 0);
  const Vector h = {1.0, 2.0, 0.0, 0.0};
  CHECK(weak_select(h, d, {}, {}, 0.4).param == 0);
  CHECK(weak_select(h, d, {}, {}, 0.6).param == 1);
}

TEST_CASE("poafd on matrix dictionaries") {
  const MatrixDictionary d({unit_vector(4, 0), unit_vector(4, 1), unit_vector(4, 2)});
  const PoafdResult r = poafd_decompose(unit_vector(4, 1), d, 3);
  REQUIRE(r.steps() >= 1);
  CHECK(r.params[0] == 1);
  CHECK(std::abs(r.coefficients()[0] - 1.0) < 1e-15);
  CHECK(r.residual_energy[1] < 1e-15);

  // matching pursuit reduction: greedy by |coefficient|
  std::mt19937_64 gen(12);
  const std::size_t dim = 24;
  const auto cols = orthonormal_columns(gen, dim, 16);
  const MatrixDictionary od(cols);
  std::normal_distribution<double> nd;
  Vector f(dim, 0.0);
  std::vector<double> mag(cols.size());
  for (std::size_t q = 0; q < cols.size(); ++q) {
    const cplx c(nd(gen), nd(gen));
    mag[q] = std::abs(c);
    for (std::size_t i = 0; i < dim; ++i) f[i] += c * cols[q][i];
  }
  const PoafdResult m = poafd_decompose(f, od, 10);
  std::vector<std::size_t> order(cols.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mag[a] > mag[b]; });
  for (std::size_t k = 0; k < m.steps(); ++k) CHECK(m.params[k] == order[k]);
  const std::vector<Vector> fs = {f};
  const PoafdChecks c = check_poafd(m, fs, od);
  CHECK(c.gram <= 1e-8);
  CHECK(c.bookkeeping <= 1e-8 * (1 + od.norm_sq(f)));
  CHECK(c.monotone);
  CHECK(std::abs(residual_of(od, f, m) - m.residual_energy.back()) <= 1e-10);
}

TEST_CASE("matrix dictionary exhaustion stops gracefully") {
  const MatrixDictionary d({unit_vector(3, 0), unit_vector(3, 1)});
  const PoafdResult r = poafd_decompose(Vector{1.0, 1.0, 1.0}, d, 5);
  CHECK(r.steps() == 2);
  CHECK(r.exhausted);
  CHECK(std::abs(r.residual_energy.back() - 1.0) < 1e-14);
}

TEST_CASE("Szego dictionary: kernel evaluation and selection") {
  const DiscGrid grid(11, 16, 0.8);
  const SzegoDictionary dict(grid, 64);
  const std::size_t q = 37;
  const Vector k = dict.kernel(q);
  CHECK(std::abs(dict.norm_sq(k) - dict.kernel_norm_sq(q)) <= 1e-12 * dict.kernel_norm_sq(q));
  CHECK(std::abs(dict.kernel_norm_sq(q) - 1.0 / (1.0 - std::norm(grid[q].value()))) < 1e-10);
  const auto prod = dict.kernel_products(k);
  for (std::size_t p = 0; p < dict.size(); p += 13) {
    CHECK(std::abs(prod[p] - dict.inner(k, dict.kernel(p))) <= 1e-10);
  }
  const Vector eb = dict.embed(szego_eval(grid[q], 64));
  const Selection s = pomsp_select(eb, dict, {}, {});
  CHECK(s.param == q);
  // brute force of |<e_b, e_p>|^2
  std::size_t best = 0;
  double bv = -1.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double v = std::norm(oracle::szego(grid[p].value(), grid[q].value()) *
                               std::sqrt(1.0 - std::norm(grid[q].value())));
    if (v > bv * (1 + kTieTolerance)) {
      bv = v;
      best = p;
    }
  }
  CHECK(best == q);

  const PoafdResult r = poafd_decompose(eb, dict, 3);
  CHECK(r.params[0] == q);
  CHECK(r.residual_energy[1] <= 1e-10);
}

TEST_CASE("repeat selection uses the order-2 multiple kernel") {
  const DiscGrid grid(11, 16, 0.8);
  const SzegoDictionary dict(grid, 64);
  const std::size_t b = 53;
  const DiscPoint bp = grid[b];
  // G = order-2 TM function at b: orthogonal to e_b, maximal at b itself
  const DiscPoint twice[] = {bp, bp};
  const TMSystem tm(twice, dict.dimension());
  const Vector e1 = dict.embed(szego_eval(bp, 64));
  const Vector g(tm[1].samples().begin(), tm[1].samples().end());
  const std::vector<Vector> prior = {e1};
  const std::size_t prior_params[] = {b};
  const Selection s = pomsp_select(g, dict, prior, prior_params);
  CHECK(s.param == b);
  CHECK(s.order == 2);
  // Gram-Schmidt of (k_b, d/dconj(a) k) computed independently
  const std::vector<CircleSignal> gs =
      oracle::gram_schmidt({szego_eval(bp, dict.dimension()), multiple_kernel(bp, 2, dict.dimension())});
  CHECK(std::abs(std::abs(oracle::inner(dict.to_signal(s.basis), gs[1])) - 1.0) <= 1e-8);
}

TEST_CASE("weak selection never repeats and honours the threshold") {
  std::mt19937_64 gen(77);
  const DiscGrid grid(16, 32);
  const SzegoDictionary dict(grid, 64);
  for (int t = 0; t < 3; ++t) {
    const CircleSignal f = oracle::poly_signal(oracle::random_poly(gen, 12), 64);
    const PoafdResult r = poafd_decompose(dict.embed(f), dict, 8, 0.95);
    for (std::size_t i = 0; i < r.steps(); ++i) {
      CHECK(r.multiplicity[i] == 1);
      for (std::size_t j = 0; j < i; ++j) CHECK(r.params[i] != r.params[j]);
    }
    // re-scan oracle on the first step
    const Vector fv = dict.embed(f);
    double sup = 0.0;
    for (std::size_t q = 0; q < dict.size(); ++q) {
      const auto e = candidate_basis(dict, {}, q);
      if (e) sup = std::max(sup, std::norm(dict.inner(fv, *e)));
    }
    CHECK(r.energy[0] >= 0.95 * 0.95 * sup * (1 - 1e-10));
  }
}

TEST_CASE("Szego POAFD agrees with AFD when selections are distinct") {
  std::mt19937_64 gen(9);
  const DiscGrid grid(16, 32);
  const SzegoDictionary dict(grid, 64);
  const CircleSignal f = oracle::poly_signal(oracle::random_poly(gen, 20), 64);
  const Decomposition a = afd_decompose(f, 6, grid);
  const PoafdResult p = poafd_decompose(dict.embed(f), dict, 6);
  bool distinct = true;
  for (std::size_t i = 0; i < a.steps(); ++i)
    for (std::size_t j = 0; j < i; ++j) distinct = distinct && a.grid_indices[i] != a.grid_indices[j];
  REQUIRE(distinct);
  REQUIRE(p.steps() == a.steps());
  for (std::size_t k = 0; k < a.steps(); ++k) {
    CHECK(p.params[k] == a.grid_indices[k]);
    CHECK(std::abs(std::abs(p.coefficients()[k]) - std::abs(a.coeffs[k])) <= 1e-8);
  }
}

TEST_CASE("rate bound on a sparse kernel combination") {
  const DiscGrid grid(16, 32);
  const SzegoDictionary dict(grid, 64);
  const std::size_t qs[] = {5, 40, 77, 120, 200, 260, 301, 333, 400, 470};
  Vector f(dict.dimension(), 0.0);
  double m = 0.0;
  for (std::size_t n = 0; n < 10; ++n) {
    const double c = std::ldexp(1.0, -static_cast<int>(n + 1));
    m += c;
    const Vector e = dict.kernel(qs[n]);
    const double s = std::sqrt(dict.kernel_norm_sq(qs[n]));
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += c * e[i] / s;
  }
  CHECK(std::abs(m - (1 - std::ldexp(1.0, -10))) < 1e-15);
  const PoafdResult r = poafd_decompose(f, dict, 12);
  for (std::size_t k = 1; k < r.residual_energy.size(); ++k) {
    CHECK(std::sqrt(std::max(0.0, r.residual_energy[k])) <= m / std::sqrt(static_cast<double>(k)) + 1e-8);
  }
}

TEST_CASE("appendix equivalence examples") {
  const DiscPoint zz[] = {DiscPoint(0.0), DiscPoint(0.0)};
  const AppendixReport a = appendix_equivalence(zz, 64);
  CHECK(a.max_deviation <= 1e-12);
  const DiscPoint hh[] = {DiscPoint(0.5), DiscPoint(0.5)};
  CHECK(appendix_equivalence(hh, 64).max_deviation <= 1e-6);
  const DiscPoint mixed[] = {DiscPoint(0.3), DiscPoint(0.0, -0.4), DiscPoint(0.3)};
  const DiscPoint probe[] = {DiscPoint(0.2, 0.1)};
  const AppendixReport r = appendix_equivalence(mixed, 256, probe);
  CHECK(r.max_deviation <= 1e-6);
  CHECK(r.max_identity_residual <= 1e-8);
}

TEST_CASE("BVC probe at boundary points") {
  std::mt19937_64 gen(21);
  const auto c = oracle::random_poly(gen, 16);
  double l1 = 0.0;
  for (const auto& x : c) l1 += std::abs(x);
  const DiscGrid grid(16, 32, 0.99);
  const SzegoDictionary dict(grid, 64);
  const Vector g = dict.embed(oracle::poly_signal(c, 64));
  const auto prod = dict.kernel_products(g);
  for (std::size_t q = 0; q < dict.size(); ++q) {
    if (!dict.boundary_flag(q)) continue;
    const double obj = std::norm(prod[q]) / dict.kernel_norm_sq(q);
    CHECK(obj <= (1 - 0.99 * 0.99) * l1 * l1 * (1 + 1e-12));
  }
}
