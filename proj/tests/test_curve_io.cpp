#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "moduli/curve_io.hpp"
#include "moduli/norm_io.hpp"

using namespace moduli;

namespace {

ModulusCurve sample_curve() {
  ModulusOptions o;
  o.grid_n = 128;
  const std::vector<double> grid{0.1, 0.35, 1.0 / 3, 0.9};
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  return modulus_curve(Norm::regular_polygon(6), ModulusFamily::phi_plus, sorted, o);
}

}  // namespace

TEST_CASE("CSV layout") {
  const auto c = sample_curve();
  const std::string csv = curve_to_csv(c);
  CHECK(csv.starts_with("eps,value,grid_n,refine_tol\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK_FALSE(csv_has_hilbert(csv));
  const std::string with = curve_to_csv(c, true);
  CHECK(with.starts_with("eps,value,grid_n,refine_tol,hilbert\n"));
  CHECK(csv_has_hilbert(with));
}

TEST_CASE("CSV round trip is exact") {
  const auto c = sample_curve();
  const std::string csv = curve_to_csv(c);
  const auto back = curve_from_csv(csv, c.kind, c.norm);
  REQUIRE(back.samples.size() == c.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    CHECK(back.samples[i].eps == c.samples[i].eps);
    CHECK(back.samples[i].value == c.samples[i].value);
    CHECK(back.samples[i].refine_tol == c.samples[i].refine_tol);
    CHECK(back.samples[i].grid_n == c.samples[i].grid_n);
  }
  CHECK(curve_to_csv(back) == csv);
  CHECK(curve_to_csv(curve_from_csv(curve_to_csv(c, true), c.kind, c.norm)) == csv);
}

TEST_CASE("JSON round trip is exact") {
  const auto c = sample_curve();
  for (bool hilbert : {false, true}) {
    const auto j = curve_to_json(c, hilbert);
    const auto back = curve_from_json(j);
    CHECK(back.kind == c.kind);
    CHECK(curve_to_json(back, hilbert).dump() == j.dump());
    CHECK(curve_to_json(curve_from_json(nlohmann::json::parse(j.dump())), hilbert).dump() == j.dump());
  }
  const auto j = curve_to_json(c);
  CHECK(j["kind"] == "phi-plus");
  CHECK(j["samples"].size() == 4);
  CHECK(j["samples"][0].contains("witness"));
}

TEST_CASE("Hilbert column") {
  const std::vector<double> grid{0.5};
  const auto c = modulus_curve(Norm::euclidean(), ModulusFamily::phi_minus, grid);
  const auto j = curve_to_json(c, true);
  CHECK(j["samples"][0]["hilbert"].get<double>() == 0.125);
}

TEST_CASE("malformed input") {
  const Norm n = Norm::euclidean();
  CHECK_THROWS_AS(curve_from_csv("eps,value\n0.1,0.2\n", ModulusFamily::delta, n), InputError);
  CHECK_THROWS_AS(curve_from_csv("eps,value,grid_n,refine_tol\n0.1,abc,64,0\n", ModulusFamily::delta, n), InputError);
  CHECK_THROWS_AS(curve_from_json(nlohmann::json{{"kind", "delta"}}), InputError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/curve.csv"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/curve.csv", "x"), IoError);
}

TEST_CASE("file helpers") {
  const auto path = (std::filesystem::temp_directory_path() / "moduli_curve_io_test.csv").string();
  const std::string csv = curve_to_csv(sample_curve());
  write_text_file(path, csv);
  CHECK(read_text_file(path) == csv);
  std::remove(path.c_str());
}
