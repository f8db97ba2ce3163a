#include "stochafd/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stochafd {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_imag_unit(char c) { return c == 'i' || c == 'j'; }

double parse_real(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) throw std::invalid_argument("empty value");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw std::invalid_argument("'" + s + "' is not a finite real number");
  }
  return v;
}

std::string location(const std::string& source, std::size_t row, std::size_t col) {
  return source + ":" + std::to_string(row) + ":" + std::to_string(col) + ": ";
}

}  // namespace

cplx parse_complex(std::string_view cell) {
  const std::string s(trim(cell));
  if (s.empty()) throw std::invalid_argument("empty cell");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  const auto bad = [&] { return std::invalid_argument("'" + s + "' is not a number of the form x, yi or x+yi"); };
  if (end == begin) throw bad();
  cplx v;
  if (*end == '\0') {
    v = {x, 0.0};
  } else if (is_imag_unit(*end) && end[1] == '\0') {
    v = {0.0, x};
  } else if (*end == '+' || *end == '-') {
    const char* second = end;
    const double y = std::strtod(second, &end);
    if (end == second || !is_imag_unit(*end) || end[1] != '\0') throw bad();
    v = {x, y};
  } else {
    throw bad();
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw bad();
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(cplx v) {
  std::string out = format_double(v.real());
  if (v.imag() != 0.0) {
    out += v.imag() < 0.0 ? "-" : "+";
    out += format_double(std::abs(v.imag()));
    out += "i";
  }
  return out;
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  std::size_t weighted_rows = 0;
  std::size_t width = 0;
  std::size_t width_row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<cplx> row;
    std::optional<double> weight;
    std::size_t col = 0;
    std::size_t start = 0;
    while (start <= body.size()) {
      const std::size_t stop = std::min(body.find(',', start), body.size());
      const std::string_view cell = trim(body.substr(start, stop - start));
      ++col;
      try {
        if (col == 1 && cell.starts_with("weight:")) {
          weight = parse_real(cell.substr(7));
          if (*weight < 0.0) throw std::invalid_argument("negative weight");
        } else {
          const cplx v = parse_complex(cell);
          if (v.imag() != 0.0) t.real = false;
          row.push_back(v);
        }
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(location(source, lineno, col) + e.what());
      }
      start = stop + 1;
    }
    if (row.empty()) throw std::invalid_argument(location(source, lineno, 1) + "row has no values");
    if (t.rows.empty()) {
      width = row.size();
      width_row = lineno;
    } else if (row.size() != width) {
      throw std::invalid_argument(location(source, lineno, 1) + "row has " +
                                  std::to_string(row.size()) + " values, row " +
                                  std::to_string(width_row) + " has " + std::to_string(width));
    }
    if (weight) {
      ++weighted_rows;
      t.weights.push_back(*weight);
    }
    if (weighted_rows != 0 && weighted_rows != t.rows.size() + 1) {
      throw std::invalid_argument(location(source, lineno, 1) +
                                  "either every row or no row must carry a weight");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw std::invalid_argument(source + ": no data rows");
  if (!t.weights.empty()) {
    double total = 0.0;
    for (double w : t.weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument(source + ": weights sum to zero");
    if (std::abs(total - 1.0) > 1e-12) {
      for (double& w : t.weights) w /= total;
      t.warnings.push_back(source + ": weights summed to " + format_double(total) +
                           "; normalized to 1");
    }
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_csv(in, path);
}

void write_csv(std::ostream& out, std::span<const CircleSignal> rows, std::span<const double> weights) {
  for (std::size_t w = 0; w < rows.size(); ++w) {
    if (!weights.empty()) out << "weight:" << format_double(weights[w]) << ',';
    const auto s = rows[w].samples();
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j) out << ',';
      out << format_complex(s[j]);
    }
    out << '\n';
  }
}

Ensemble to_ensemble(const CsvTable& table) {
  std::vector<CircleSignal> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) rows.emplace_back(r);
  return Ensemble(std::move(rows), table.weights);
}

MatrixDictionary load_matrix_dictionary(const std::string& path, double weight) {
  CsvTable t = read_csv_file(path);
  if (!t.weights.empty()) throw std::invalid_argument(path + ": dictionary rows take no weights");
  return MatrixDictionary(std::move(t.rows), weight);
}

Ensemble generate_noisy(const CircleSignal& base, double sigma, std::size_t count,
                        std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be >= 0");
  if (count < 1) throw std::invalid_argument("W must be >= 1");
  std::mt19937_64 gen(seed);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  bool have_spare = false;
  double spare = 0.0;
  const auto normal = [&]() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u1 = static_cast<double>((gen() >> 11) + 1) * kScale;  // (0, 1]
    const double u2 = static_cast<double>(gen() >> 11) * kScale;        // [0, 1)
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare = rad * std::sin(ang);
    have_spare = true;
    return rad * std::cos(ang);
  };
  std::vector<CircleSignal> out;
  out.reserve(count);
  const std::size_t n = base.size();
  for (std::size_t w = 0; w < count; ++w) {
    std::vector<cplx> s(base.samples().begin(), base.samples().end());
    for (std::size_t j = 0; j < n; ++j) s[j] += sigma * normal();
    out.emplace_back(std::move(s));
  }
  return Ensemble(std::move(out), {}, "generate_noisy seed=" + std::to_string(seed));
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["mode"] = c.mode;
  j["N"] = c.N ? nlohmann::json(*c.N) : nlohmann::json(nullptr);
  j["R"] = c.R;
  j["A"] = c.A;
  j["r_max"] = c.r_max;
  j["n_iter"] = c.n_iter;
  j["rho"] = c.rho;
  j["seed"] = c.seed;
  j["sigma"] = c.sigma;
  j["W"] = c.W;
  j["input"] = c.input;
  j["output"] = c.output;
  j["params"] = nlohmann::json::array();
  for (const auto& p : c.params) j["params"].push_back({p.real(), p.imag()});
  j["radii"] = c.radii;
  j["dictionary"] = c.dictionary;
  j["weight"] = c.weight;
  return j;
}

RunConfig from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "mode") c.mode = v.get<std::string>();
    else if (key == "N") c.N = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
    else if (key == "R") c.R = v.get<std::size_t>();
    else if (key == "A") c.A = v.get<std::size_t>();
    else if (key == "r_max") c.r_max = v.get<double>();
    else if (key == "n_iter") c.n_iter = v.get<std::size_t>();
    else if (key == "rho") c.rho = v.get<double>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "sigma") c.sigma = v.get<double>();
    else if (key == "W") c.W = v.get<std::size_t>();
    else if (key == "input") c.input = v.get<std::string>();
    else if (key == "output") c.output = v.get<std::string>();
    else if (key == "dictionary") c.dictionary = v.get<std::string>();
    else if (key == "weight") c.weight = v.get<double>();
    else if (key == "radii") c.radii = v.get<std::vector<double>>();
    else if (key == "params") {
      c.params.clear();
      for (const auto& p : v) {
        if (p.is_string()) c.params.push_back(parse_complex(p.get<std::string>()));
        else if (p.is_array() && p.size() == 2) c.params.emplace_back(p[0].get<double>(), p[1].get<double>());
        else if (p.is_number()) c.params.emplace_back(p.get<double>(), 0.0);
        else throw std::invalid_argument("config params entries must be [re, im], numbers or strings");
      }
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return c;
}

void validate(const RunConfig& c) {
  bool known = false;
  for (const char* m : kModes) known = known || c.mode == m;
  if (!known) throw std::invalid_argument("unknown mode '" + c.mode + "'");
  if (c.N && (*c.N < 4 || *c.N % 2 != 0)) throw std::invalid_argument("N must be even and >= 4");
  if (c.R < 1 || c.A < 1) throw std::invalid_argument("R and A must be >= 1");
  if (!(c.r_max > 0.0 && c.r_max < 1.0)) throw std::invalid_argument("r_max must lie in (0, 1)");
  if (!(c.rho > 0.0 && c.rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
  if (c.n_iter < 1) throw std::invalid_argument("n_iter must be >= 1");
  if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw std::invalid_argument("sigma must be >= 0");
  if (c.W < 1) throw std::invalid_argument("W must be >= 1");
  if (!(c.weight > 0.0) || !std::isfinite(c.weight)) throw std::invalid_argument("weight must be > 0");
  for (const auto& p : c.params) {
    if (!(std::abs(p) < 1.0)) throw std::invalid_argument("params must lie in the unit disc");
  }
  for (double r : c.radii) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("radii must lie in [0, 1)");
  }
}

}  // namespace stochafd
