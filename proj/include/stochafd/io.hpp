#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stochafd/circle.hpp"
#include "stochafd/poafd.hpp"
#include "stochafd/stochastic.hpp"

namespace stochafd {

/// Parses "x", "yi", "x+yi" or "x-yi". Throws std::invalid_argument.
cplx parse_complex(std::string_view cell);
/// %.17g, with "+yi"/"-yi" appended when the imaginary part is non-zero.
std::string format_complex(cplx v);
std::string format_double(double v);

/// Rows of a signal CSV. Every row may start with a "weight:<p>" cell.
struct CsvTable {
  std::vector<std::vector<cplx>> rows;
  std::vector<double> weights;  // empty when no row carries a weight
  bool real = true;             // no cell had an imaginary part
  std::vector<std::string> warnings;
};

/// '#' starts a comment line; blank lines are skipped. Errors name
/// source:row:column.
CsvTable read_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, std::span<const CircleSignal> rows,
               std::span<const double> weights = {});

/// Validated ensemble from a table (W = 1 rows give a one-member ensemble).
Ensemble to_ensemble(const CsvTable& table);
/// One column per CSV row.
MatrixDictionary load_matrix_dictionary(const std::string& path, double weight = 1.0);

/// base + eta_w with i.i.d. N(0, sigma^2) real samples. std::mt19937_64
/// seeded with `seed` feeds a Box-Muller transform; draws are taken
/// realization-major, sample-minor.
Ensemble generate_noisy(const CircleSignal& base, double sigma, std::size_t count,
                        std::uint64_t seed);

inline constexpr const char* kModes[] = {"afd",      "poafd",  "safd1",           "safd2",
                                        "spoafd",   "hilbert", "verify-appendix", "probe-sbvc"};

struct RunConfig {
  std::string mode = "afd";
  std::optional<std::size_t> N;  // inferred from the input when unset
  std::size_t R = 64;
  std::size_t A = 128;
  double r_max = kDefaultRMax;
  std::size_t n_iter = 20;
  double rho = 1.0;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::size_t W = 1;
  std::string input;
  std::string output;
  std::vector<cplx> params;    // verify-appendix
  std::vector<double> radii;   // probe-sbvc
  std::string dictionary;      // MatrixDictionary CSV for poafd/spoafd
  double weight = 1.0;         // MatrixDictionary inner-product weight
};

nlohmann::json to_json(const RunConfig& c);
/// Fields missing from j keep the values already in `base`.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});
/// Throws std::invalid_argument on a violated invariant.
void validate(const RunConfig& c);

struct RunOutcome {
  nlohmann::json document;
  int exit_code = 0;  // 0 ok, 2 verification failure
  std::vector<std::string> diagnostics;
  /// Companion CSV: header plus rows.
  std::vector<std::string> curve_header;
  std::vector<std::vector<double>> curve;
};

/// Executes one mode. Input errors throw (std::invalid_argument,
/// std::domain_error, std::runtime_error); nothing is written.
RunOutcome run(const RunConfig& config);

/// output path -> <stem>.residual.csv next to it.
std::string curve_path(const std::string& output);
/// Writes the JSON document (and the curve when non-empty) to config.output,
/// or the document to `fallback` when no output path is set.
void write_outputs(const RunConfig& config, const RunOutcome& outcome, std::ostream& fallback);

}  // namespace stochafd
