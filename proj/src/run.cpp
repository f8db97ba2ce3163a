#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "stochafd/io.hpp"

namespace stochafd {
namespace {

using nlohmann::json;

json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

json to_json(std::span<const cplx> v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

json to_json(std::span<const DiscPoint> v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_json(x.value()));
  return out;
}

double max_abs(const CircleSignal& f) {
  double m = 0.0;
  for (const auto& v : f.samples()) m = std::max(m, std::abs(v));
  return m;
}

class Verification {
 public:
  void check(const std::string& name, double value, double tolerance) {
    const bool ok = std::isfinite(value) && value <= tolerance;
    checks_.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"passed", ok}});
    passed_ = passed_ && ok;
  }
  void check_flag(const std::string& name, bool ok) { check(name, ok ? 0.0 : 1.0, 0.0); }
  bool passed() const { return passed_; }
  json to_json() const { return {{"checks", checks_}, {"passed", passed_}}; }

 private:
  json checks_ = json::array();
  bool passed_ = true;
};

struct Inputs {
  CsvTable table;
  std::vector<CircleSignal> original;  // as read (or generated)
  Ensemble analytic;                   // analytic realizations used by the engines
  bool projected = false;
  bool generated = false;
};

CsvTable load_table(const RunConfig& c, std::vector<std::string>& diagnostics) {
  if (c.input.empty()) throw std::invalid_argument("mode " + c.mode + " needs --input");
  CsvTable t = read_csv_file(c.input);
  for (const auto& w : t.warnings) diagnostics.push_back("warning: " + w);
  return t;
}

std::size_t check_size(const RunConfig& c, std::size_t n) {
  if (c.N && *c.N != n) {
    throw std::invalid_argument("input rows have " + std::to_string(n) + " samples but N = " +
                                std::to_string(*c.N));
  }
  return n;
}

Inputs load_signals(const RunConfig& c, bool ensemble, std::vector<std::string>& diagnostics) {
  CsvTable t = load_table(c, diagnostics);
  check_size(c, t.rows.front().size());
  if (!ensemble && t.rows.size() != 1) {
    throw std::invalid_argument(c.input + ": mode " + c.mode + " expects a single row, got " +
                                std::to_string(t.rows.size()));
  }
  std::vector<CircleSignal> original;
  std::vector<double> weights = t.weights;
  bool generated = false;
  if (ensemble && t.rows.size() == 1 && (c.W > 1 || c.sigma > 0.0)) {
    const Ensemble noisy = generate_noisy(CircleSignal(t.rows.front()), c.sigma, c.W, c.seed);
    original = noisy.realizations();
    weights.clear();
    generated = true;
  } else {
    for (const auto& r : t.rows) original.emplace_back(r);
  }
  const bool project = t.real || generated;
  std::vector<CircleSignal> analytic;
  for (const auto& f : original) analytic.push_back(project ? analytic_projection(f) : f);
  return {.table = std::move(t),
          .original = std::move(original),
          .analytic = Ensemble(std::move(analytic), std::move(weights)),
          .projected = project,
          .generated = generated};
}

// E_w ||f_w - (2 Re S_w - c_0(S_w))||^2 with S_w the n-term expansion on the
// input grid.
double real_error(const Inputs& in, const std::vector<CircleSignal>& partial) {
  double acc = 0.0;
  for (std::size_t w = 0; w < partial.size(); ++w) {
    const CircleSignal s = decimate(partial[w], in.original[w].size());
    acc += in.analytic.weight(w) * norm_sq(in.original[w] - real_from_analytic(s));
  }
  return std::sqrt(acc);
}

void input_block(json& result, const Inputs& in) {
  result["input"] = {{"rows", in.table.rows.size()},
                     {"W", in.analytic.size()},
                     {"N", in.analytic.signal_size()},
                     {"real", in.table.real},
                     {"generated", in.generated},
                     {"analytic_projection", in.projected}};
}

void add_curve(RunOutcome& out, std::span<const double> residual) {
  out.curve_header = {"step", "residual_energy"};
  for (std::size_t k = 0; k < residual.size(); ++k) {
    out.curve.push_back({static_cast<double>(k), residual[k]});
  }
}

DiscGrid make_grid(const RunConfig& c) { return DiscGrid(c.R, c.A, c.r_max); }

void run_afd(const RunConfig& c, RunOutcome& out, json& result, Verification& v) {
  const Inputs in = load_signals(c, false, out.diagnostics);
  const CircleSignal& f = in.analytic[0];
  const Decomposition d = afd_decompose(f, c.n_iter, make_grid(c));
  const AfdChecks chk = check_decomposition(d);
  input_block(result, in);
  result["params"] = to_json(std::span<const DiscPoint>(d.params));
  result["grid_indices"] = d.grid_indices;
  result["coefficients"] = to_json(std::span<const cplx>(d.coeffs));
  result["residual_energy"] = d.residual_energy;
  result["quadrature_size"] = d.tm.grid_size();
  if (in.projected) result["real_reconstruction_error"] = real_error(in, {reconstruct(d, d.steps())});
  const double scale = 1.0 + norm_sq(f);
  v.check("energy_step", chk.energy_step, 1e-10 * scale);
  v.check("consistency", chk.consistency, 1e-8);
  v.check("gram", chk.gram, 1e-8);
  v.check("reconstruction", chk.reconstruction, 1e-8 * scale);
  v.check_flag("monotone", chk.monotone);
  add_curve(out, d.residual_energy);
}

void poafd_common(const RunConfig& c, RunOutcome& out, json& result, Verification& v,
                  bool ensemble) {
  PoafdResult r;
  std::vector<Vector> vectors;
  std::unique_ptr<Dictionary> dict;
  const SzegoDictionary* szego = nullptr;
  std::optional<Inputs> in;
  if (!c.dictionary.empty()) {
    auto m = std::make_unique<MatrixDictionary>(load_matrix_dictionary(c.dictionary, c.weight));
    CsvTable t = load_table(c, out.diagnostics);
    if (!ensemble && t.rows.size() != 1) {
      throw std::invalid_argument(c.input + ": mode poafd expects a single row");
    }
    if (t.rows.front().size() != m->dimension()) {
      throw std::invalid_argument(c.input + ": vectors have dimension " +
                                  std::to_string(t.rows.front().size()) +
                                  " but the dictionary has dimension " +
                                  std::to_string(m->dimension()));
    }
    std::vector<double> w = t.weights;
    if (w.empty()) w.assign(t.rows.size(), 1.0 / static_cast<double>(t.rows.size()));
    vectors = t.rows;
    r = spoafd_decompose(vectors, w, *m, c.n_iter, c.rho);
    result["dictionary"] = {{"kind", "matrix"}, {"size", m->size()}, {"dimension", m->dimension()}};
    dict = std::move(m);
  } else {
    in = load_signals(c, ensemble, out.diagnostics);
    auto s = std::make_unique<SzegoDictionary>(make_grid(c), in->analytic.signal_size());
    vectors = embed(in->analytic, *s);
    r = spoafd_decompose(vectors, in->analytic.weights(), *s, c.n_iter, c.rho);
    result["dictionary"] = {{"kind", "szego"}, {"size", s->size()}, {"quadrature_size", s->dimension()}};
    input_block(result, *in);
    szego = s.get();
    dict = std::move(s);
  }
  result["param_indices"] = r.params;
  if (szego) {
    std::vector<DiscPoint> pts;
    for (auto q : r.params) pts.push_back(szego->point(q));
    result["params"] = to_json(std::span<const DiscPoint>(pts));
  }
  result["multiplicity"] = r.multiplicity;
  result["rho"] = r.rho;
  result["exhausted"] = r.exhausted;
  result["selection_energy"] = r.energy;
  result["residual_energy"] = r.residual_energy;
  if (ensemble) {
    json rows = json::array();
    for (const auto& row : r.coeffs) rows.push_back(to_json(std::span<const cplx>(row)));
    result["coefficients"] = rows;
    result["weights"] = r.weights;
  } else {
    result["coefficients"] = to_json(std::span<const cplx>(r.coefficients()));
  }
  if (szego && in->projected) {
    std::vector<CircleSignal> partial;
    for (std::size_t w = 0; w < r.coeffs.size(); ++w) {
      Vector s(szego->dimension(), cplx(0.0));
      for (std::size_t k = 0; k < r.basis.size(); ++k) {
        for (std::size_t j = 0; j < s.size(); ++j) s[j] += r.coeffs[w][k] * r.basis[k][j];
      }
      partial.push_back(szego->to_signal(s));
    }
    result["real_reconstruction_error"] = real_error(*in, partial);
  }
  const PoafdChecks chk = check_poafd(r, vectors, *dict);
  v.check("gram", chk.gram, 1e-8);
  v.check("bookkeeping", chk.bookkeeping, 1e-8 * (1.0 + r.residual_energy.front()));
  v.check_flag("monotone", chk.monotone);
  add_curve(out, r.residual_energy);
}

json ensemble_coeffs(const EnsembleDecomposition& d) {
  json rows = json::array();
  for (const auto& row : d.coeffs) rows.push_back(to_json(std::span<const cplx>(row)));
  return rows;
}

std::vector<CircleSignal> partial_sums(const EnsembleDecomposition& d) {
  std::vector<CircleSignal> out;
  for (const auto& row : d.coeffs) out.push_back(d.tm.partial_sum(row, d.steps()));
  return out;
}

void run_safd1(const RunConfig& c, RunOutcome& out, json& result, Verification& v) {
  const Inputs in = load_signals(c, true, out.diagnostics);
  const Safd1Result s = safd1_decompose(in.analytic, c.n_iter, make_grid(c));
  const EnsembleDecomposition& d = s.ensemble;
  input_block(result, in);
  result["params"] = to_json(std::span<const DiscPoint>(d.params));
  result["grid_indices"] = d.grid_indices;
  result["coefficients"] = ensemble_coeffs(d);
  result["weights"] = d.weights;
  result["residual_energy"] = d.residual_energy;
  result["difference_norms"] = d.difference_norms;
  result["difference_energy"] = s.difference_energy;
  result["truncation_error"] = s.truncation_error;
  result["expectation_truncation"] = s.expectation_truncation;
  result["expectation_residual_energy"] = s.expectation.residual_energy.back();
  if (in.projected) result["real_reconstruction_error"] = real_error(in, partial_sums(d));
  v.check("mean_difference", s.mean_difference, 1e-10);
  v.check("pythagoras", s.pythagoras, 1e-8);
  v.check("difference_estimate", s.difference_estimate, 1e-8);
  v.check("gram", d.tm.gram_deviation(), 1e-8);
  add_curve(out, d.residual_energy);
}

void run_safd2(const RunConfig& c, RunOutcome& out, json& result, Verification& v) {
  const Inputs in = load_signals(c, true, out.diagnostics);
  const Safd2Result s = safd2_decompose(in.analytic, c.n_iter, make_grid(c));
  const EnsembleDecomposition& d = s.ensemble;
  input_block(result, in);
  result["params"] = to_json(std::span<const DiscPoint>(d.params));
  result["grid_indices"] = d.grid_indices;
  result["coefficients"] = ensemble_coeffs(d);
  result["weights"] = d.weights;
  result["residual_energy"] = d.residual_energy;
  result["selection_objective"] = s.objective;
  if (in.projected) result["real_reconstruction_error"] = real_error(in, partial_sums(d));
  v.check("consistency", s.consistency, 1e-8);
  v.check("energy_step", s.energy_step, 1e-8);
  v.check("gram", d.tm.gram_deviation(), 1e-8);
  v.check_flag("monotone", s.monotone);
  add_curve(out, d.residual_energy);
}

void run_hilbert(const RunConfig& c, RunOutcome& out, json& result, Verification& v) {
  CsvTable t = load_table(c, out.diagnostics);
  check_size(c, t.rows.front().size());
  json rows = json::array();
  double inverse = 0.0;
  double imag = 0.0;
  for (const auto& r : t.rows) {
    const CircleSignal f(r);
    const CircleSignal h = hilbert_transform(f);
    rows.push_back(to_json(h.samples()));
    // H(H f) = -(f - c_0 - Nyquist part)
    CircleSignal expect = band_limit(f);
    expect -= CircleSignal::constant(f.size(), to_spectrum(f)[0]);
    const CircleSignal hh = hilbert_transform(h);
    const double scale = 1.0 + max_abs(f);
    for (std::size_t j = 0; j < f.size(); ++j) {
      inverse = std::max(inverse, std::abs(hh[j] + expect[j]) / scale);
      if (t.real) imag = std::max(imag, std::abs(h[j].imag()) / scale);
    }
  }
  result["output"] = rows;
  result["input"] = {{"rows", t.rows.size()}, {"N", t.rows.front().size()}, {"real", t.real}};
  v.check("involution", inverse, 1e-12);
  if (t.real) v.check("real_output", imag, 1e-12);
}

void run_appendix(const RunConfig& c, json& result, Verification& v) {
  if (c.params.empty()) throw std::invalid_argument("verify-appendix needs --params");
  std::vector<DiscPoint> params;
  for (const auto& p : c.params) params.emplace_back(p);
  const AppendixReport rep = appendix_equivalence(params, c.N.value_or(256));
  result["params"] = to_json(std::span<const DiscPoint>(params));
  result["quadrature_size"] = rep.quadrature;
  result["alignment"] = rep.alignment;
  result["max_deviation"] = rep.max_deviation;
  result["probes"] = to_json(std::span<const DiscPoint>(rep.probes));
  result["identity_residual"] = rep.identity_residual;
  v.check("alignment", rep.max_deviation, 1e-6);
  v.check("identity", rep.max_identity_residual, 1e-8);
}

void run_sbvc(const RunConfig& c, RunOutcome& out, json& result, Verification& v) {
  const Inputs in = load_signals(c, true, out.diagnostics);
  std::vector<double> radii = c.radii;
  if (radii.empty()) radii = {0.0, 0.5, 0.9, 0.99, c.r_max};
  const std::vector<SbvcRow> rows = sbvc_probe(in.analytic, radii, c.A);
  input_block(result, in);
  json table = json::array();
  double excess = -std::numeric_limits<double>::infinity();
  out.curve_header = {"radius", "measured", "bound"};
  for (const auto& r : rows) {
    table.push_back({{"radius", r.radius}, {"measured", r.measured}, {"bound", r.bound}});
    out.curve.push_back({r.radius, r.measured, r.bound});
    excess = std::max(excess, r.measured - r.bound);
  }
  result["table"] = table;
  v.check("sbvc_bound", excess, 1e-10);
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  validate(config);
  RunOutcome out;
  json result = json::object();
  Verification v;
  const std::string& mode = config.mode;
  if (mode == "afd") run_afd(config, out, result, v);
  else if (mode == "poafd") poafd_common(config, out, result, v, false);
  else if (mode == "spoafd") poafd_common(config, out, result, v, true);
  else if (mode == "safd1") run_safd1(config, out, result, v);
  else if (mode == "safd2") run_safd2(config, out, result, v);
  else if (mode == "hilbert") run_hilbert(config, out, result, v);
  else if (mode == "verify-appendix") run_appendix(config, result, v);
  else if (mode == "probe-sbvc") run_sbvc(config, out, result, v);

  RunConfig echo = config;
  if (result.contains("input") && result["input"].contains("N")) {
    echo.N = result["input"]["N"].get<std::size_t>();
  }
  out.document = {{"config", to_json(echo)},
                  {"mode", mode},
                  {"result", std::move(result)},
                  {"verification", v.to_json()}};
  out.exit_code = v.passed() ? 0 : 2;
  return out;
}

std::string curve_path(const std::string& output) {
  std::filesystem::path p(output);
  p.replace_extension();
  return p.string() + ".residual.csv";
}

void write_outputs(const RunConfig& config, const RunOutcome& outcome, std::ostream& fallback) {
  const std::string text = outcome.document.dump(2) + "\n";
  if (config.output.empty()) {
    fallback << text;
    return;
  }
  {
    std::ofstream f(config.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + config.output);
    f << text;
  }
  if (outcome.curve.empty()) return;
  std::ofstream f(curve_path(config.output), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + curve_path(config.output));
  for (std::size_t i = 0; i < outcome.curve_header.size(); ++i) {
    f << (i ? "," : "") << outcome.curve_header[i];
  }
  f << '\n';
  for (const auto& row : outcome.curve) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_double(row[i]);
    f << '\n';
  }
}

}  // namespace stochafd
