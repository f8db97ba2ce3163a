#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "stochafd/afd.hpp"
#include "stochafd/io.hpp"
#include "stochafd/poafd.hpp"
#include "stochafd/stochastic.hpp"

namespace py = pybind11;
using namespace stochafd;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CircleSignal to_signal(const CArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array of samples");
  return CircleSignal(std::vector<cplx>(a.data(), a.data() + a.size()));
}

CArray to_array(std::span<const cplx> v) {
  CArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

CArray to_array(const CircleSignal& s) { return to_array(s.samples()); }

Ensemble to_ensemble(const CArray& rows, std::vector<double> weights) {
  if (rows.ndim() != 2) throw std::invalid_argument("expected a 2-D array, one realization per row");
  const auto w = static_cast<std::size_t>(rows.shape(0));
  const auto n = static_cast<std::size_t>(rows.shape(1));
  std::vector<CircleSignal> out;
  out.reserve(w);
  for (std::size_t r = 0; r < w; ++r) {
    out.emplace_back(std::vector<cplx>(rows.data() + r * n, rows.data() + (r + 1) * n));
  }
  return Ensemble(std::move(out), std::move(weights));
}

CArray to_array(const Ensemble& e) {
  CArray out({static_cast<py::ssize_t>(e.size()), static_cast<py::ssize_t>(e.signal_size())});
  cplx* p = out.mutable_data();
  for (const auto& r : e.realizations()) p = std::copy(r.samples().begin(), r.samples().end(), p);
  return out;
}

std::vector<cplx> values(std::span<const DiscPoint> ps) {
  std::vector<cplx> out;
  for (const auto& p : ps) out.push_back(p.value());
  return out;
}

py::dict afd(const CArray& f, std::size_t n_iter, std::size_t radial, std::size_t angular, double r_max) {
  const Decomposition d = afd_decompose(to_signal(f), n_iter, DiscGrid(radial, angular, r_max));
  const AfdChecks c = check_decomposition(d);
  py::dict out;
  out["params"] = values(d.params);
  out["grid_indices"] = d.grid_indices;
  out["coefficients"] = d.coeffs;
  out["residual_energy"] = d.residual_energy;
  out["energy_step"] = c.energy_step;
  out["consistency"] = c.consistency;
  out["gram"] = c.gram;
  return out;
}

py::dict poafd(const CArray& f, std::size_t n_iter, double rho, std::size_t radial, std::size_t angular,
               double r_max) {
  const CircleSignal s = to_signal(f);
  const SzegoDictionary dict(DiscGrid(radial, angular, r_max), s.size());
  const Vector v = dict.embed(s);
  const PoafdResult r = poafd_decompose(v, dict, n_iter, rho);
  const std::vector<Vector> fs = {v};
  const PoafdChecks c = check_poafd(r, fs, dict);
  std::vector<cplx> params;
  for (std::size_t q : r.params) params.push_back(dict.point(q).value());
  py::dict out;
  out["params"] = params;
  out["param_indices"] = r.params;
  out["multiplicity"] = r.multiplicity;
  out["coefficients"] = r.coefficients();
  out["residual_energy"] = r.residual_energy;
  out["gram"] = c.gram;
  return out;
}

py::dict safd1(const CArray& rows, std::vector<double> weights, std::size_t n_iter, std::size_t radial,
               std::size_t angular, double r_max) {
  const Safd1Result r =
      safd1_decompose(to_ensemble(rows, std::move(weights)), n_iter, DiscGrid(radial, angular, r_max));
  py::dict out;
  out["params"] = values(r.ensemble.params);
  out["coefficients"] = r.ensemble.coeffs;
  out["residual_energy"] = r.ensemble.residual_energy;
  out["mean_difference"] = r.mean_difference;
  out["pythagoras"] = r.pythagoras;
  out["difference_estimate"] = r.difference_estimate;
  out["difference_energy"] = r.difference_energy;
  return out;
}

py::dict safd2(const CArray& rows, std::vector<double> weights, std::size_t n_iter, std::size_t radial,
               std::size_t angular, double r_max) {
  const Safd2Result r =
      safd2_decompose(to_ensemble(rows, std::move(weights)), n_iter, DiscGrid(radial, angular, r_max));
  py::dict out;
  out["params"] = values(r.ensemble.params);
  out["coefficients"] = r.ensemble.coeffs;
  out["residual_energy"] = r.ensemble.residual_energy;
  out["consistency"] = r.consistency;
  out["monotone"] = r.monotone;
  return out;
}

py::dict appendix(const std::vector<cplx>& params, std::size_t n) {
  std::vector<DiscPoint> ps(params.begin(), params.end());
  const AppendixReport r = appendix_equivalence(ps, n);
  py::dict out;
  out["alignment"] = r.alignment;
  out["max_deviation"] = r.max_deviation;
  out["max_identity_residual"] = r.max_identity_residual;
  return out;
}

py::tuple run_json(const std::string& config) {
  const RunConfig c = from_json(nlohmann::json::parse(config));
  const RunOutcome o = run(c);
  return py::make_tuple(o.document.dump(), o.exit_code);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive Fourier decompositions of deterministic and random signals";

  m.def("hilbert_transform", [](const CArray& f) { return to_array(hilbert_transform(to_signal(f))); },
        py::arg("f"));
  m.def("analytic_projection", [](const CArray& f) { return to_array(analytic_projection(to_signal(f))); },
        py::arg("f"));
  m.def("spectrum", [](const CArray& f) { return to_array(to_spectrum(to_signal(f)).fft_order()); },
        py::arg("f"), "Fourier coefficients in FFT order");
  m.def("generate_noisy",
        [](const CArray& base, double sigma, std::size_t w, std::uint64_t seed) {
          return to_array(generate_noisy(to_signal(base), sigma, w, seed));
        },
        py::arg("base"), py::arg("sigma"), py::arg("W"), py::arg("seed"));
  m.def("ee_norm", [](const CArray& rows, std::vector<double> w) { return ee_norm(to_ensemble(rows, w)); },
        py::arg("rows"), py::arg("weights") = std::vector<double>{});

  m.def("afd", &afd, py::arg("f"), py::arg("n_iter") = 20, py::arg("R") = 64, py::arg("A") = 128,
        py::arg("r_max") = kDefaultRMax);
  m.def("poafd", &poafd, py::arg("f"), py::arg("n_iter") = 20, py::arg("rho") = 1.0, py::arg("R") = 64,
        py::arg("A") = 128, py::arg("r_max") = kDefaultRMax);
  m.def("safd1", &safd1, py::arg("rows"), py::arg("weights") = std::vector<double>{},
        py::arg("n_iter") = 20, py::arg("R") = 64, py::arg("A") = 128, py::arg("r_max") = kDefaultRMax);
  m.def("safd2", &safd2, py::arg("rows"), py::arg("weights") = std::vector<double>{},
        py::arg("n_iter") = 20, py::arg("R") = 64, py::arg("A") = 128, py::arg("r_max") = kDefaultRMax);
  m.def("appendix_equivalence", &appendix, py::arg("params"), py::arg("n") = 256);
  m.def("run_json", &run_json, py::arg("config"),
        "Runs a JSON RunConfig; returns (document JSON, exit code).");
}
