#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stochafd/io.hpp"

using namespace stochafd;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "stochafd_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string cos_row(std::size_t n) {
  std::string row;
  for (std::size_t j = 0; j < n; ++j) {
    if (j) row += ',';
    row += format_double(std::cos(2 * M_PI * static_cast<double>(j) / static_cast<double>(n)));
  }
  return row;
}

}  // namespace

TEST_CASE("complex cell parsing") {
  CHECK(parse_complex("1.5") == cplx(1.5, 0));
  CHECK(parse_complex(" -2i ") == cplx(0, -2));
  CHECK(parse_complex("1+2i") == cplx(1, 2));
  CHECK(parse_complex("1e-3-4.5j") == cplx(1e-3, -4.5));
  CHECK(parse_complex("-0.25-1e2i") == cplx(-0.25, -100));
  CHECK_THROWS(parse_complex(""));
  CHECK_THROWS(parse_complex("abc"));
  CHECK_THROWS(parse_complex("1+2"));
  CHECK_THROWS(parse_complex("nan"));
  CHECK_THROWS(parse_complex("1+2ix"));
}

TEST_CASE("17-digit round trip") {
  const cplx values[] = {cplx(0.1, -1.0 / 3.0), cplx(std::nextafter(1.0, 2.0), 0.0), cplx(-1e-300, 7e300),
                         cplx(M_PI, 0.0)};
  for (cplx v : values) CHECK(parse_complex(format_complex(v)) == v);
  const CircleSignal s(std::vector<cplx>(values, values + 4));
  std::stringstream buf;
  const CircleSignal rows[] = {s, s};
  const double w[] = {0.25, 0.75};
  write_csv(buf, rows, w);
  const CsvTable t = read_csv(buf);
  CHECK(t.weights == std::vector<double>{0.25, 0.75});
  for (std::size_t j = 0; j < 4; ++j) CHECK(t.rows[1][j] == values[j]);
  CHECK_FALSE(t.real);
}

TEST_CASE("CSV ingestion") {
  std::stringstream one("# header\n\n" + cos_row(64) + "\n");
  const CsvTable a = read_csv(one);
  CHECK(a.rows.size() == 1);
  CHECK(a.rows[0].size() == 64);
  CHECK(a.real);
  CHECK(to_ensemble(a).size() == 1);

  std::stringstream two("weight:0.5," + cos_row(8) + "\nweight:0.5," + cos_row(8) + "\n");
  const Ensemble e = to_ensemble(read_csv(two));
  CHECK(e.size() == 2);
  CHECK(std::abs(ee_norm(e) - std::sqrt(0.5)) < 1e-15);

  std::stringstream bad("1,2,3,4\n1,2,3\n");
  try {
    read_csv(bad, "sig.csv");
    FAIL("expected an error");
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("sig.csv:2:") == 0);
  }
  std::stringstream cell("1,2,x,4\n");
  try {
    read_csv(cell, "c.csv");
    FAIL("expected an error");
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("c.csv:1:3:") == 0);
  }
  std::stringstream mixed("weight:0.5,1,2,3,4\n1,2,3,4\n");
  CHECK_THROWS(read_csv(mixed));
  std::stringstream unnorm("weight:1,1,2,3,4\nweight:3,1,2,3,4\n");
  const CsvTable n = read_csv(unnorm);
  CHECK(n.weights == std::vector<double>{0.25, 0.75});
  CHECK(n.warnings.size() == 1);
  std::stringstream empty("# nothing\n");
  CHECK_THROWS(read_csv(empty));
}

TEST_CASE("generate_noisy") {
  const CircleSignal base = CircleSignal::constant(16, 1.0);
  const Ensemble zero = generate_noisy(base, 0.0, 3, 1);
  for (std::size_t w = 0; w < 3; ++w) CHECK(norm(zero[w] - base) == 0.0);
  const Ensemble a = generate_noisy(base, 0.2, 5, 42);
  const Ensemble b = generate_noisy(base, 0.2, 5, 42);
  const Ensemble c = generate_noisy(base, 0.2, 5, 43);
  bool same = true, differ = false;
  for (std::size_t w = 0; w < 5; ++w) {
    for (std::size_t j = 0; j < 16; ++j) {
      same = same && a[w][j] == b[w][j];
      differ = differ || a[w][j] != c[w][j];
      CHECK(a[w][j].imag() == 0.0);
    }
  }
  CHECK(same);
  CHECK(differ);

  // variance and mean concentration
  const double sigma = 0.1;
  const std::size_t w = 1000, n = 64;
  const Ensemble e = generate_noisy(CircleSignal::zeros(n), sigma, w, 2024);
  double mean = 0.0;
  for (std::size_t r = 0; r < w; ++r)
    for (std::size_t j = 0; j < n; ++j) mean += e[r][j].real();
  mean /= static_cast<double>(w * n);
  CHECK(std::abs(mean) <= 5 * sigma / std::sqrt(static_cast<double>(w * n)));
  for (std::size_t j = 0; j < n; ++j) {
    double v = 0.0;
    for (std::size_t r = 0; r < w; ++r) v += std::norm(e[r][j]);
    v /= static_cast<double>(w);
    CHECK(std::abs(v - sigma * sigma) <= 5 * sigma * sigma * std::sqrt(2.0 / static_cast<double>(w)));
  }
  CHECK_THROWS(generate_noisy(base, -1.0, 2, 0));
  CHECK_THROWS(generate_noisy(base, 0.1, 0, 0));
}

TEST_CASE("config JSON") {
  RunConfig c;
  c.mode = "safd1";
  c.N = 128;
  c.params = {cplx(0.5, -0.25)};
  c.radii = {0.1, 0.9};
  const RunConfig back = from_json(to_json(c));
  CHECK(back.mode == "safd1");
  CHECK(back.N == std::optional<std::size_t>(128));
  CHECK(back.params == c.params);
  CHECK(back.radii == c.radii);
  CHECK_THROWS(from_json(nlohmann::json{{"bogus", 1}}));
  CHECK_THROWS(from_json(nlohmann::json::array()));
  const RunConfig partial = from_json(nlohmann::json{{"R", 8}}, c);
  CHECK(partial.R == 8);
  CHECK(partial.mode == "safd1");

  RunConfig v;
  CHECK_NOTHROW(validate(v));
  v.rho = 0.0;
  CHECK_THROWS(validate(v));
  v = {};
  v.N = 7;
  CHECK_THROWS(validate(v));
  v = {};
  v.r_max = 1.0;
  CHECK_THROWS(validate(v));
  v = {};
  v.mode = "nope";
  CHECK_THROWS(validate(v));
  v = {};
  v.n_iter = 0;
  CHECK_THROWS(validate(v));
}

TEST_CASE("run: hilbert, verify-appendix and safd2") {
  const auto in = scratch("cos64.csv");
  write_text(in, cos_row(64) + "\n");
  RunConfig h;
  h.mode = "hilbert";
  h.input = in.string();
  const RunOutcome ho = run(h);
  CHECK(ho.exit_code == 0);
  const auto& out = ho.document["result"]["output"][0];
  REQUIRE(out.size() == 64);
  for (std::size_t j = 0; j < 64; ++j) {
    const double want = std::sin(2 * M_PI * static_cast<double>(j) / 64.0);
    CHECK(std::abs(out[j][0].get<double>() - want) < 1e-12);
  }

  RunConfig a;
  a.mode = "verify-appendix";
  a.params = {cplx(0.5), cplx(0.5)};
  const RunOutcome ao = run(a);
  CHECK(ao.exit_code == 0);
  CHECK(ao.document["verification"]["passed"].get<bool>());

  RunConfig s;
  s.mode = "safd2";
  s.input = in.string();
  s.W = 20;
  s.sigma = 0.1;
  s.seed = 5;
  s.n_iter = 6;
  s.R = 16;
  s.A = 32;
  const RunOutcome so = run(s);
  CHECK(so.exit_code == 0);
  REQUIRE(so.curve.size() >= 2);
  for (std::size_t k = 1; k < so.curve.size(); ++k) CHECK(so.curve[k][1] <= so.curve[k - 1][1] + 1e-12);

  RunConfig bad;
  bad.mode = "afd";
  bad.input = scratch("missing.csv").string();
  CHECK_THROWS(run(bad));
}

TEST_CASE("write_outputs places the curve next to the document") {
  CHECK(curve_path("/tmp/x/out.json") == "/tmp/x/out.residual.csv");
  const auto in = scratch("cos32.csv");
  write_text(in, cos_row(32) + "\n");
  RunConfig c;
  c.mode = "afd";
  c.input = in.string();
  c.output = scratch("afd.json").string();
  c.R = 8;
  c.A = 16;
  c.n_iter = 3;
  const RunOutcome o = run(c);
  std::stringstream unused;
  write_outputs(c, o, unused);
  CHECK(unused.str().empty());
  std::ifstream doc(c.output);
  const nlohmann::json j = nlohmann::json::parse(doc);
  CHECK(j["mode"] == "afd");
  std::ifstream curve(curve_path(c.output));
  std::string header;
  std::getline(curve, header);
  CHECK(header.find("step") == 0);
}
