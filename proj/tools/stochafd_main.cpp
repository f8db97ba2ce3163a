// stochafd: command-line front end for the AFD / POAFD engines.
//
// Exit codes: 0 success, 1 input error, 2 verification failure.

#include <fstream>
#include <functional>
#include <memory>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochafd/io.hpp"

namespace {

using stochafd::RunConfig;

struct Flags {
  RunConfig value;
  std::size_t n = 0;
  std::vector<std::string> params;
  std::string config_path;
  // Copies each explicitly given flag onto a config.
  std::vector<std::function<void(RunConfig&)>> overrides;
};

template <typename T>
void add_bound(CLI::App* app, Flags& flags, const std::string& name, T& slot, const std::string& help,
          std::function<void(RunConfig&)> apply) {
  CLI::Option* opt = app->add_option(name, slot, help);
  flags.overrides.push_back([opt, apply](RunConfig& c) {
    if (opt->count() > 0) apply(c);
  });
}

void add_flags(CLI::App* app, Flags& f) {
  RunConfig& v = f.value;
  app->add_option("--config", f.config_path, "JSON RunConfig; explicit flags take precedence")
      ->check(CLI::ExistingFile);
  add_bound(app, f, "--N", f.n, "grid size (default: inferred from the input)",
       [&f](RunConfig& c) { c.N = f.n; });
  add_bound(app, f, "--R", v.R, "radial disc-grid count (default 64)", [&v](RunConfig& c) { c.R = v.R; });
  add_bound(app, f, "--A", v.A, "angular disc-grid count (default 128)", [&v](RunConfig& c) { c.A = v.A; });
  add_bound(app, f, "--r_max", v.r_max, "outermost grid radius (default 0.998)",
       [&v](RunConfig& c) { c.r_max = v.r_max; });
  add_bound(app, f, "--n_iter", v.n_iter, "number of steps (default 20)",
       [&v](RunConfig& c) { c.n_iter = v.n_iter; });
  add_bound(app, f, "--rho", v.rho, "weak-selection factor in (0, 1] (default 1)",
       [&v](RunConfig& c) { c.rho = v.rho; });
  add_bound(app, f, "--seed", v.seed, "seed for synthetic noise", [&v](RunConfig& c) { c.seed = v.seed; });
  add_bound(app, f, "--sigma", v.sigma, "noise standard deviation", [&v](RunConfig& c) { c.sigma = v.sigma; });
  add_bound(app, f, "--W", v.W, "realizations to generate from a single input row",
       [&v](RunConfig& c) { c.W = v.W; });
  add_bound(app, f, "--input", v.input, "input CSV", [&v](RunConfig& c) { c.input = v.input; });
  add_bound(app, f, "--output", v.output, "output JSON (stdout when omitted)",
       [&v](RunConfig& c) { c.output = v.output; });
  add_bound(app, f, "--params", f.params, "disc parameters, e.g. 0.5 0.3-0.4i",
       [&f](RunConfig& c) {
         c.params.clear();
         for (const auto& p : f.params) c.params.push_back(stochafd::parse_complex(p));
       });
  add_bound(app, f, "--radii", v.radii, "probe radii", [&v](RunConfig& c) { c.radii = v.radii; });
  add_bound(app, f, "--dictionary", v.dictionary, "MatrixDictionary CSV, one column per row",
       [&v](RunConfig& c) { c.dictionary = v.dictionary; });
  add_bound(app, f, "--weight", v.weight, "MatrixDictionary inner-product weight",
       [&v](RunConfig& c) { c.weight = v.weight; });
}

RunConfig resolve(const Flags& f, const std::string& mode) {
  RunConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(f.config_path + ": " + e.what());
    }
    c = stochafd::from_json(j, c);
  }
  for (const auto& o : f.overrides) o(c);
  c.mode = mode;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Fourier decompositions of deterministic and random signals"};
  app.require_subcommand(1);
  std::vector<std::pair<CLI::App*, std::unique_ptr<Flags>>> subs;
  const std::pair<const char*, const char*> modes[] = {
      {"afd", "core AFD of one signal"},
      {"poafd", "pre-orthogonal AFD (Szego or matrix dictionary)"},
      {"safd1", "stochastic AFD, expectation first"},
      {"safd2", "stochastic AFD, stochastic maximal selection"},
      {"spoafd", "stochastic pre-orthogonal AFD"},
      {"hilbert", "discrete Hilbert transform"},
      {"verify-appendix", "Gram-Schmidt of multiple kernels versus the TM system"},
      {"probe-sbvc", "boundary decay table"}};
  for (const auto& [name, help] : modes) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto flags = std::make_unique<Flags>();
    add_flags(sub, *flags);
    subs.emplace_back(sub, std::move(flags));
  }
  CLI11_PARSE(app, argc, argv);

  for (const auto& [sub, flags] : subs) {
    if (!sub->parsed()) continue;
    try {
      const RunConfig config = resolve(*flags, sub->get_name());
      const stochafd::RunOutcome out = stochafd::run(config);
      for (const auto& d : out.diagnostics) std::cerr << d << '\n';
      stochafd::write_outputs(config, out, std::cout);
      if (out.exit_code != 0) std::cerr << "verification failed\n";
      return out.exit_code;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
