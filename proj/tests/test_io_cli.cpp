#include "doctest.h"
#include "oracles.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scatter/acceptance.hpp"
#include "scatter/cli.hpp"
#include "scatter/factorization.hpp"
#include "scatter/io.hpp"

using namespace scatter;
using oracle::error_kind;

namespace {

const std::string kSpecs = SCATTER_SPEC_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "scatter");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/scatter_test_" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("spec JSON round trip") {
  const auto p = load_spec(kSpecs + "/double_delta_a100.json");
  CHECK(p.channels() == 2);
  CHECK(p.deltas().size() == 2);
  const auto again = parse_spec(spec_to_json(p));
  CHECK(again.deltas()[1].strength == p.deltas()[1].strength);
  CHECK(again.range() == p.range());
}

TEST_CASE("spec parse errors") {
  CHECK(error_kind([] { parse_spec("{not json"); }) == ErrorKind::InvalidSpec);
  CHECK(error_kind([] { parse_spec(R"({"range": 1})"); }) == ErrorKind::InvalidSpec);
  CHECK(error_kind([] { parse_spec(R"({"channels": 2, "range": 1, "deltas": [{"pos": 0, "matrix": [[1]]}]})"); }) ==
        ErrorKind::InvalidSpec);
  CHECK(error_kind([] {
          parse_spec(R"({"channels": 2, "range": 1, "deltas": [{"pos": 0, "matrix": [[0, 1], [2, 0]]}]})");
        }) == ErrorKind::NonSymmetricMatrix);
  CHECK(error_kind([] { load_spec("/nonexistent/spec.json"); }) == ErrorKind::IoError);
}

TEST_CASE("table emission") {
  std::ostringstream empty;
  write_table({{"k", "value"}, {}}, Format::csv, empty);
  CHECK(empty.str() == "k,value\n");

  std::ostringstream js;
  write_table({{"k", "value"}, {{0.1, 1.0 / 3.0}}}, Format::json, js);
  const auto parsed = nlohmann::json::parse(js.str());
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0]["value"].get<double>() == 1.0 / 3.0);

  std::ostringstream csv;
  write_table({{"x"}, {{0.1}, {1.0 / 3.0}}}, Format::csv, csv);
  CHECK(std::stod(lines(csv.str())[2]) == 1.0 / 3.0);

  std::ostringstream bad;
  CHECK(error_kind([&] { write_table({{"x"}, {{std::nan("")}}}, Format::csv, bad); }) == ErrorKind::NonFiniteOutput);
  CHECK(bad.str().empty());

  std::ostringstream sink;
  CHECK(error_kind([&] { emit({{"x"}, {{1.0}}}, Format::csv, "/nonexistent/dir/out.csv", sink); }) ==
        ErrorKind::IoError);
}

TEST_CASE("cli spiral starts at the threshold value") {
  const auto r = cli({"spiral", "--spec", kSpecs + "/double_delta_a100.json", "--kmax", "5", "--points", "50"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "k,re_rho11,im_rho11");
  REQUIRE(rows.size() == 52);
  double k, re, im;
  REQUIRE(std::sscanf(rows[1].c_str(), "%lf,%lf,%lf", &k, &re, &im) == 3);
  CHECK(k == 0.0);
  CHECK(re == doctest::Approx(0.777).epsilon(5e-3));
}

TEST_CASE("cli spectrum lists three bound states at a = 1.05") {
  const std::string det = "/tmp/scatter_test_det.csv";
  const auto r = cli({"spectrum", "--spec", kSpecs + "/double_delta_a105.json", "--out", det});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "alpha,energy,multiplicity");
  CHECK(std::stod(rows[1]) == doctest::Approx(0.0259).epsilon(0.04));
  CHECK(std::stod(rows[2]) == doctest::Approx(0.5164).epsilon(0.01));
  CHECK(std::stod(rows[3]) == doctest::Approx(3.3508).epsilon(1e-3));
  CHECK(rows[4].find("n_bound=3 n_half=0 channels=2") != std::string::npos);
  std::ifstream in(det);
  std::string header;
  std::getline(in, header);
  CHECK(header == "alpha,det,sigma_ratio");

  const auto j = cli({"spectrum", "--spec", kSpecs + "/double_delta_a100.json", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["n_half"] == 1);
  CHECK(parsed["bound_states"].size() == 2);
}

TEST_CASE("cli levinson on the free particle") {
  const auto r = cli({"levinson", "--spec", kSpecs + "/free_n2.json"});
  REQUIRE(r.code == 0);
  const auto eta = r.out.find("eta0=");
  REQUIRE(eta != std::string::npos);
  CHECK(std::abs(std::stod(r.out.substr(eta + 5))) < 1e-12);
  CHECK(r.out.find("predicted=0\n") != std::string::npos);
  CHECK(r.out.find("n_half=2") != std::string::npos);
}

TEST_CASE("cli phase and amplitudes tables") {
  const auto ph = cli({"phase", "--spec", kSpecs + "/single_delta_n1.json", "--points", "400"});
  REQUIRE(ph.code == 0);
  const auto rows = lines(ph.out);
  CHECK(rows[0] == "k,eta_over_pi");
  CHECK(rows.size() == 401);
  CHECK(std::stod(rows[1]) < std::stod(rows[2]));

  const auto amp = cli({"amplitudes", "--spec", kSpecs + "/barrier_coupled_n2.json", "--points", "5"});
  REQUIRE(amp.code == 0);
  const auto arows = lines(amp.out);
  CHECK(arows.size() == 6);
  CHECK(arows[0].rfind("k,re_rho_11,im_rho_11,", 0) == 0);
  CHECK(arows[0].find(",unitarity") != std::string::npos);
}

TEST_CASE("cli compose of two deltas equals the double delta spec") {
  const std::string left = temp_file("left.json", R"({"channels": 2, "range": 0.5,
    "deltas": [{"pos": 0, "matrix": [[-0.5, 0], [0, -1]]}]})");
  const std::string right = temp_file("right.json", R"({"channels": 2, "range": 0.5,
    "deltas": [{"pos": 0, "matrix": [[-6, -2], [-2, -1]]}]})");
  const auto composed = cli({"compose", "--spec", left, "--spec", right, "--spacing", "2", "--points", "4"});
  REQUIRE(composed.code == 0);
  const auto rows = lines(composed.out);
  // The composed pair sits at 0 and 2; shift the reference to the same frame.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double k, re, im;
    std::sscanf(rows[i].c_str(), "%lf,%lf,%lf", &k, &re, &im);
    const auto ref = translate_amplitudes(
        closed_form_double_delta(models::double_delta_left(), models::double_delta_right(), 1.0, k), 1.0);
    CHECK(std::abs(Complex(re, im) - ref.rho(0, 0)) < 1e-10);
  }

  const auto overlap = cli({"compose", "--spec", left, "--spec", right, "--spacing", "0.5"});
  CHECK(overlap.code == 2);
  CHECK(overlap.err.rfind("error kind=OverlappingCells", 0) == 0);
}

TEST_CASE("cli exit codes and error lines") {
  const auto missing = cli({"amplitudes", "--spec", "/nonexistent.json"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error kind=IoError message=", 0) == 0);

  const auto asym = cli({"amplitudes", "--spec", temp_file("asym.json", R"({"channels": 2, "range": 1,
    "deltas": [{"pos": 0, "matrix": [[0, 1], [2, 0]]}]})")});
  CHECK(asym.code == 1);
  CHECK(asym.err.rfind("error kind=NonSymmetricMatrix", 0) == 0);
  CHECK(lines(asym.err).size() == 1);

  const auto coarse = cli({"spectrum", "--spec", kSpecs + "/free_n2.json", "--tol", "grid=10"});
  CHECK(coarse.code == 2);
  CHECK(coarse.err.rfind("error kind=GridTooCoarse", 0) == 0);

  const auto anchor = cli({"levinson", "--spec", kSpecs + "/double_delta_a100.json", "--kmax", "2"});
  CHECK(anchor.code == 2);
  CHECK(anchor.err.rfind("error kind=AnchorNotConverged", 0) == 0);

  CHECK(cli({"amplitudes", "--spec", kSpecs + "/free_n2.json", "--tol", "bogus=1"}).code == 1);
  CHECK(cli({"amplitudes", "--spec", kSpecs + "/free_n2.json", "--format", "xml"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli output does not depend on the worker count") {
  setenv("SCATTER_THREADS", "1", 1);
  const auto one = cli({"amplitudes", "--spec", kSpecs + "/double_delta_a105.json", "--points", "64"});
  setenv("SCATTER_THREADS", "3", 1);
  const auto three = cli({"amplitudes", "--spec", kSpecs + "/double_delta_a105.json", "--points", "64"});
  unsetenv("SCATTER_THREADS");
  CHECK(one.out == three.out);
}
