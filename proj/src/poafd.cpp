#include "stochafd/poafd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stochafd/afd.hpp"

namespace stochafd {
namespace {

constexpr double kExcluded = -std::numeric_limits<double>::infinity();

void axpy(Vector& y, cplx a, std::span<const cplx> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void check_param(const Dictionary& dict, std::size_t q) {
  if (q >= dict.size()) {
    throw std::out_of_range("unknown dictionary parameter " + std::to_string(q));
  }
}

std::optional<Vector> orthonormalize(const Dictionary& dict, std::span<const Vector> basis, Vector v,
                                     double eps) {
  const double n0 = dict.norm_sq(v);
  if (!(n0 > 0.0) || !std::isfinite(n0)) return std::nullopt;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) axpy(v, -dict.inner(v, b), b);
  }
  const double nr = dict.norm_sq(v);
  if (nr < eps * n0) return std::nullopt;
  const double s = 1.0 / std::sqrt(nr);
  for (auto& x : v) x *= s;
  return v;
}

// Kernel-product tables T_w[q] = <G_w, K_q> kept in step with the
// standard remainders, plus S_q = sum_k |<K_q, B_k>|^2.
class ScanState {
 public:
  ScanState(const Dictionary& dict, std::vector<Vector> remainders, std::vector<double> weights,
            double eps)
      : dict_(dict), g_(std::move(remainders)), p_(std::move(weights)), eps_(eps) {
    const std::size_t nq = dict.size();
    kn_.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) kn_[q] = dict.kernel_norm_sq(q);
    s_.assign(nq, 0.0);
    t_.reserve(g_.size());
    for (const auto& g : g_) t_.push_back(dict.kernel_products(g));
  }

  std::size_t realizations() const { return g_.size(); }
  const std::vector<Vector>& remainders() const { return g_; }
  const std::vector<Vector>& basis() const { return basis_; }

  // Adds b to the orthonormal system. When `deflate` the remainders lose
  // their b component and the coefficients are returned.
  std::vector<cplx> add(Vector b, std::size_t param, bool deflate) {
    const std::vector<cplx> beta = dict_.kernel_products(b);
    for (std::size_t q = 0; q < beta.size(); ++q) s_[q] += std::norm(beta[q]);
    std::vector<cplx> c(g_.size());
    for (std::size_t w = 0; w < g_.size(); ++w) {
      c[w] = dict_.inner(g_[w], b);
      if (!deflate) continue;
      axpy(g_[w], -c[w], b);
      for (std::size_t q = 0; q < beta.size(); ++q) t_[w][q] -= c[w] * beta[q];
    }
    for (auto& r : repeats_) {
      if (r.param != param) axpy(r.v, -dict_.inner(r.v, b), b);
    }
    basis_.push_back(std::move(b));
    params_.push_back(param);
    if (dict_.has_derivative_kernels()) track_repeat(param);
    return c;
  }

  double energy_of(std::span<const cplx> b) const {
    double e = 0.0;
    for (std::size_t w = 0; w < g_.size(); ++w) e += p_[w] * std::norm(dict_.inner(g_[w], b));
    return e;
  }

  int count(std::size_t q) const {
    return static_cast<int>(std::count(params_.begin(), params_.end(), q));
  }

  // Objective over the domain. Selected parameters get their next
  // multiple kernel when allowed, otherwise they are excluded.
  std::vector<double> objective(bool allow_repeats) const {
    const std::size_t nq = dict_.size();
    std::vector<double> obj(nq, 0.0);
    for (std::size_t w = 0; w < g_.size(); ++w) {
      const auto& t = t_[w];
      for (std::size_t q = 0; q < nq; ++q) obj[q] += p_[w] * std::norm(t[q]);
    }
    for (std::size_t q = 0; q < nq; ++q) {
      const double rest = kn_[q] - s_[q];
      obj[q] = rest < eps_ * kn_[q] ? kExcluded : obj[q] / rest;
    }
    for (std::size_t q : params_) obj[q] = kExcluded;
    if (!allow_repeats) return obj;
    for (const auto& r : repeats_) {
      const double nr = dict_.norm_sq(r.v);
      if (nr < eps_ * r.n0) continue;
      obj[r.param] = energy_of(r.v) / nr;
    }
    return obj;
  }

  // rho == 1 with repeats is the maximal selection; rho < 1 is the weak one.
  std::optional<Selection> select(double rho, bool allow_repeats) const {
    std::vector<double> obj = objective(allow_repeats);
    while (true) {
      const double s = *std::max_element(obj.begin(), obj.end());
      if (s == kExcluded) return std::nullopt;
      const double threshold = rho * rho * s - kTieTolerance * std::abs(s);
      std::size_t q = 0;
      while (!(obj[q] >= threshold)) ++q;
      Selection sel;
      sel.param = q;
      sel.supremum = s;
      sel.energy = obj[q];
      sel.order = count(q) + 1;
      // the winner is rebuilt by explicit two-pass Gram-Schmidt
      Vector k = sel.order == 1 ? dict_.kernel(q) : dict_.derivative_kernel(q, sel.order);
      auto b = orthonormalize(dict_, basis_, std::move(k), eps_);
      if (!b) {
        obj[q] = kExcluded;  // table said independent, explicit GS disagrees
        continue;
      }
      sel.basis = std::move(*b);
      return sel;
    }
  }

 private:
  const Dictionary& dict_;
  std::vector<Vector> g_;
  std::vector<double> p_;
  double eps_;
  std::vector<double> kn_;
  std::vector<double> s_;
  std::vector<std::vector<cplx>> t_;
  std::vector<Vector> basis_;
  std::vector<std::size_t> params_;

  // Next multiple kernel of a selected parameter, orthogonalized against
  // the basis one vector at a time as the basis grows.
  struct Repeat {
    std::size_t param;
    Vector v;
    double n0;
  };
  std::vector<Repeat> repeats_;

  void track_repeat(std::size_t q) {
    Vector d = dict_.derivative_kernel(q, count(q) + 1);
    const double n0 = dict_.norm_sq(d);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) axpy(d, -dict_.inner(d, b), b);
    }
    auto it = std::find_if(repeats_.begin(), repeats_.end(), [q](const Repeat& r) { return r.param == q; });
    if (it == repeats_.end()) repeats_.push_back({q, std::move(d), n0});
    else *it = {q, std::move(d), n0};
  }
};

ScanState prior_state(std::span<const cplx> g, const Dictionary& dict,
                      std::span<const Vector> prior_basis, std::span<const std::size_t> prior_params) {
  if (g.size() != dict.dimension()) throw std::invalid_argument("vector dimension mismatch");
  if (prior_basis.size() != prior_params.size()) {
    throw std::invalid_argument("prior basis and prior params differ in length");
  }
  ScanState st(dict, {Vector(g.begin(), g.end())}, {1.0}, kDegenerateRatio);
  for (std::size_t k = 0; k < prior_basis.size(); ++k) {
    check_param(dict, prior_params[k]);
    st.add(prior_basis[k], prior_params[k], true);
  }
  return st;
}

void validate_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
}

}  // namespace

double Dictionary::kernel_norm_sq(std::size_t q) const {
  const Vector k = kernel(q);
  return norm_sq(k);
}

std::vector<cplx> Dictionary::kernel_products(std::span<const cplx> v) const {
  std::vector<cplx> out(size());
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = inner(v, kernel(q));
  return out;
}

Vector Dictionary::derivative_kernel(std::size_t /*q*/, int /*order*/) const {
  throw std::logic_error("dictionary has no derivative kernels");
}

MatrixDictionary::MatrixDictionary(std::vector<Vector> columns, double weight)
    : columns_(std::move(columns)), weight_(weight) {
  if (columns_.empty()) throw std::invalid_argument("matrix dictionary needs at least one column");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("matrix dictionary weight must be positive");
  }
  const std::size_t d = columns_.front().size();
  if (d == 0) throw std::invalid_argument("matrix dictionary columns are empty");
  for (std::size_t q = 0; q < columns_.size(); ++q) {
    if (columns_[q].size() != d) {
      throw std::invalid_argument("column " + std::to_string(q) + " has dimension " +
                                  std::to_string(columns_[q].size()) + ", expected " +
                                  std::to_string(d));
    }
    const double n = norm_sq(columns_[q]);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("column " + std::to_string(q) + " is zero or not finite");
    }
  }
}

cplx MatrixDictionary::inner(std::span<const cplx> u, std::span<const cplx> v) const {
  if (u.size() != v.size()) throw std::invalid_argument("vector dimension mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * std::conj(v[i]);
  return weight_ * acc;
}

std::vector<cplx> MatrixDictionary::kernel_products(std::span<const cplx> v) const {
  std::vector<cplx> out(columns_.size());
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = inner(v, columns_[q]);
  return out;
}

SzegoDictionary::SzegoDictionary(DiscGrid grid, std::size_t n)
    : grid_(std::move(grid)), n_(n), m_(quadrature_size(n, grid_.r_max())) {
  CircleSignal::zeros(n);  // validates n
}

cplx SzegoDictionary::inner(std::span<const cplx> u, std::span<const cplx> v) const {
  if (u.size() != m_ || v.size() != m_) throw std::invalid_argument("vector dimension mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < m_; ++i) acc += u[i] * std::conj(v[i]);
  return acc / static_cast<double>(m_);
}

Vector SzegoDictionary::kernel(std::size_t q) const {
  check_param(*this, q);
  return derivative_kernel(q, 1);
}

double SzegoDictionary::kernel_norm_sq(std::size_t q) const {
  check_param(*this, q);
  const double r2 = std::norm(grid_[q].value());
  const double rm = std::pow(r2, static_cast<double>(m_) / 2.0);
  return (1.0 + rm) / ((1.0 - r2) * (1.0 - rm));
}

std::vector<cplx> SzegoDictionary::kernel_products(std::span<const cplx> v) const {
  const Spectrum s = to_spectrum(CircleSignal(Vector(v.begin(), v.end())));
  return grid_.evaluate(s.taylor_coefficients());
}

Vector SzegoDictionary::derivative_kernel(std::size_t q, int order) const {
  check_param(*this, q);
  const CircleSignal k = multiple_kernel(grid_[q], order, m_);
  return Vector(k.samples().begin(), k.samples().end());
}

Vector SzegoDictionary::embed(const CircleSignal& f) const {
  if (f.size() != n_) throw std::invalid_argument("signal size does not match the dictionary");
  const CircleSignal u = upsample(f, m_);
  return Vector(u.samples().begin(), u.samples().end());
}

CircleSignal SzegoDictionary::to_signal(std::span<const cplx> v) const {
  if (v.size() != m_) throw std::invalid_argument("vector dimension mismatch");
  return CircleSignal(Vector(v.begin(), v.end()));
}

std::optional<Vector> candidate_basis(const Dictionary& dict, std::span<const Vector> prior_basis,
                                      std::size_t q, int order, double eps) {
  check_param(dict, q);
  Vector k = order == 1 ? dict.kernel(q) : dict.derivative_kernel(q, order);
  return orthonormalize(dict, prior_basis, std::move(k), eps);
}

Selection pomsp_select(std::span<const cplx> g, const Dictionary& dict,
                       std::span<const Vector> prior_basis,
                       std::span<const std::size_t> prior_params) {
  const ScanState st = prior_state(g, dict, prior_basis, prior_params);
  auto sel = st.select(1.0, true);
  if (!sel) throw std::runtime_error("pomsp_select: dictionary exhausted");
  return *sel;
}

Selection weak_select(std::span<const cplx> g, const Dictionary& dict,
                      std::span<const Vector> prior_basis,
                      std::span<const std::size_t> prior_params, double rho) {
  validate_rho(rho);
  const ScanState st = prior_state(g, dict, prior_basis, prior_params);
  auto sel = st.select(rho, false);
  if (!sel) throw std::runtime_error("weak_select: dictionary exhausted");
  return *sel;
}

PoafdResult poafd_decompose(std::span<const cplx> f, const Dictionary& dict, std::size_t n_iter,
                            double rho, const PoafdOptions& opts) {
  const Vector v(f.begin(), f.end());
  const double w = 1.0;
  return spoafd_decompose(std::span(&v, 1), std::span(&w, 1), dict, n_iter, rho, opts);
}

PoafdResult spoafd_decompose(std::span<const Vector> realizations, std::span<const double> weights,
                             const Dictionary& dict, std::size_t n_iter, double rho,
                             const PoafdOptions& opts) {
  validate_rho(rho);
  if (n_iter < 1) throw std::invalid_argument("n_iter must be >= 1");
  if (realizations.empty()) throw std::invalid_argument("ensemble is empty");
  if (weights.size() != realizations.size()) {
    throw std::invalid_argument("weights and realizations differ in length");
  }
  for (const auto& f : realizations) {
    if (f.size() != dict.dimension()) {
      throw std::invalid_argument("realization dimension " + std::to_string(f.size()) +
                                  " does not match the dictionary dimension " +
                                  std::to_string(dict.dimension()));
    }
  }

  PoafdResult r;
  r.rho = rho;
  r.weights.assign(weights.begin(), weights.end());
  r.coeffs.assign(realizations.size(), {});
  double energy = 0.0;
  for (std::size_t w = 0; w < realizations.size(); ++w) {
    energy += weights[w] * dict.norm_sq(realizations[w]);
  }
  r.residual_energy.push_back(energy);

  ScanState st(dict, {realizations.begin(), realizations.end()}, r.weights, opts.eps_gs);
  const bool repeats = rho == 1.0;
  for (std::size_t step = 0; step < n_iter; ++step) {
    auto sel = st.select(rho, repeats);
    if (!sel) {
      r.exhausted = true;
      break;
    }
    const std::vector<cplx> c = st.add(sel->basis, sel->param, true);
    double extracted = 0.0;
    for (std::size_t w = 0; w < c.size(); ++w) {
      r.coeffs[w].push_back(c[w]);
      extracted += weights[w] * std::norm(c[w]);
    }
    r.params.push_back(sel->param);
    r.multiplicity.push_back(sel->order);
    r.basis.push_back(std::move(sel->basis));
    r.energy.push_back(sel->energy);
    r.residual_energy.push_back(r.residual_energy.back() - extracted);
    if (r.residual_energy.back() <= opts.stop_ratio * energy) break;
  }
  return r;
}

PoafdChecks check_poafd(const PoafdResult& r, std::span<const Vector> realizations,
                        const Dictionary& dict) {
  PoafdChecks out;
  for (std::size_t i = 0; i < r.basis.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const cplx g = dict.inner(r.basis[i], r.basis[j]);
      out.gram = std::max(out.gram, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  double direct = 0.0;
  for (std::size_t w = 0; w < realizations.size(); ++w) {
    Vector g = realizations[w];
    for (std::size_t k = 0; k < r.basis.size(); ++k) axpy(g, -r.coeffs[w][k], r.basis[k]);
    direct += r.weights[w] * dict.norm_sq(g);
  }
  out.bookkeeping = std::abs(direct - r.residual_energy.back());
  for (std::size_t k = 1; k < r.residual_energy.size(); ++k) {
    if (r.residual_energy[k] > r.residual_energy[k - 1] + 1e-12) out.monotone = false;
  }
  return out;
}

AppendixReport appendix_equivalence(std::span<const DiscPoint> params, std::size_t n,
                                    std::span<const DiscPoint> probes) {
  AppendixReport rep;
  std::vector<DiscPoint> probe_list(probes.begin(), probes.end());
  if (probe_list.empty()) probe_list.emplace_back(0.2, 0.1);
  double r_max = 0.0;
  for (const auto& a : params) r_max = std::max(r_max, a.modulus());
  for (const auto& a : probe_list) r_max = std::max(r_max, a.modulus());
  const std::size_t m = quadrature_size(n, r_max);
  rep.quadrature = m;
  rep.probes = probe_list;

  const TMSystem tm(params, m);
  std::vector<CircleSignal> gs;
  for (std::size_t k = 0; k < params.size(); ++k) {
    int order = 0;
    for (std::size_t l = 0; l <= k; ++l) order += params[l] == params[k] ? 1 : 0;
    CircleSignal v = multiple_kernel(params[k], order, m);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : gs) v.add_scaled(-inner_product(v, b), b);
    }
    v *= 1.0 / norm(v);
    rep.alignment.push_back(std::abs(inner_product(v, tm[k])));
    rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.alignment.back() - 1.0));
    gs.push_back(std::move(v));
  }

  const CircleSignal phi = blaschke_product(params, m);
  for (const auto& a : probe_list) {
    const CircleSignal ka = multiple_kernel(a, 1, m);
    CircleSignal lhs = ka;
    for (std::size_t l = 0; l < tm.size(); ++l) lhs.add_scaled(-inner_product(ka, tm[l]), tm[l]);
    const cplx phi_a = std::conj(blaschke_value(params, a.value()));
    double res = 0.0;
    for (std::size_t j = 0; j < m; ++j) res = std::max(res, std::abs(lhs[j] - phi_a * phi[j] * ka[j]));
    rep.identity_residual.push_back(res);
    rep.max_identity_residual = std::max(rep.max_identity_residual, res);
  }
  return rep;
}

}  // namespace stochafd
