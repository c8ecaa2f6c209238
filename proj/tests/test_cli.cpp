#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "moduli/cli.hpp"
#include "moduli/curve_io.hpp"
#include "moduli/errors.hpp"

using namespace moduli;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "moduli");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("eps ranges") {
  CHECK(parse_eps_range("0.05:1:0.05").size() == 20);
  CHECK(parse_eps_range("0.05:1:0.05").back() == 1);
  CHECK(parse_eps_range("0.5:0.5:0.1") == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_eps_range("1:0:0.1"), InputError);
  CHECK_THROWS_AS(parse_eps_range("0:1"), InputError);
  CHECK_THROWS_AS(parse_eps_range("0:1:0"), InputError);
  CHECK_THROWS_AS(parse_eps_range("a:1:0.1"), InputError);
}

TEST_CASE("compute writes a 20-row CSV") {
  const std::string path = temp_path("moduli_cli_zeta.csv");
  const auto r = run({"compute", "--norm", "lp:3", "--modulus", "zeta-plus", "--eps", "0.05:1:0.05", "--grid-n",
                      "128", "--out", path});
  CHECK(r.code == 0);
  const auto rows = lines(read_text_file(path));
  CHECK(rows.size() == 21);
  CHECK(rows[0] == "eps,value,grid_n,refine_tol");
  std::remove(path.c_str());
}

TEST_CASE("compute single values") {
  const auto a = run({"compute", "--norm", "euclidean", "--modulus", "phi-minus", "--eps", "0.5:0.5:0.1"});
  CHECK(a.code == 0);
  auto rows = lines(a.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1].substr(rows[1].find(',') + 1)) == doctest::Approx(0.125).epsilon(1e-6));

  const auto b = run({"compute", "--norm", "lp:inf", "--modulus", "lambda-minus", "--eps", "0.5:0.5:0.1", "--format",
                      "json", "--with-hilbert"});
  CHECK(b.code == 0);
  const auto j = json::parse(b.out);
  CHECK(j["samples"][0]["value"] == 0.0);
  CHECK(j["samples"][0].contains("hilbert"));
}

TEST_CASE("compute errors") {
  const auto d = run({"compute", "--norm", "euclidean", "--modulus", "lambda-plus", "--eps", "0.5:1.5:0.5"});
  CHECK(d.code == 2);
  CHECK(d.err.find("[0, 1]") != std::string::npos);
  CHECK(run({"compute", "--norm", "bogus", "--modulus", "delta", "--eps", "0:1:0.5"}).code == 2);
  CHECK(run({"compute", "--norm", "euclidean", "--modulus", "bogus", "--eps", "0:1:0.5"}).code == 2);
  CHECK(run({"compute", "--norm", "euclidean", "--modulus", "delta", "--eps", "0:1:0.5", "--grid-n", "8"}).code == 2);
  CHECK(run({"compute", "--norm", "euclidean", "--modulus", "delta"}).code == 2);
  CHECK(run({"compute", "--norm", "polygon:/nonexistent/hex.json", "--modulus", "delta", "--eps", "0:1:0.5"}).code ==
        3);
  CHECK(run({"compute", "--norm", "euclidean", "--modulus", "delta", "--eps", "0.5:0.5:1", "--out",
             "/nonexistent/dir/x.csv"})
            .code == 3);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("verify") {
  const std::string hex = temp_path("moduli_cli_hex.json");
  {
    std::ofstream f(hex);
    f << R"({"kind":"polygon","vertices":[[1,0],[0.5,0.8660254037844386],[-0.5,0.8660254037844386],[-1,0],[-0.5,-0.8660254037844386],[0.5,-0.8660254037844386]]})";
  }
  const auto r = run({"verify", "--norm", "polygon:" + hex, "--checks", "eq4,eq5", "--grid-n", "128"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["checks"].size() == 2);
  std::remove(hex.c_str());

  const auto bogus = run({"verify", "--checks", "bogus"});
  CHECK(bogus.code == 2);
  CHECK(bogus.err.find("eq5-lambda-le-eps") != std::string::npos);
  CHECK(run({"verify", "--norm", "euclidean", "--slack", "-1", "--checks", "eq5"}).code == 2);
}

TEST_CASE("probe") {
  CHECK(run({"probe", "--count", "0"}).code == 2);
  CHECK(run({"probe", "--family", "bogus"}).code == 2);
  const auto a = run({"probe", "--family", "lp", "--count", "1", "--seed", "7", "--grid-n", "64"});
  const auto b = run({"probe", "--family", "lp", "--count", "1", "--seed", "7", "--grid-n", "64"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out)["checks"].size() == 3);
}

TEST_CASE("figure") {
  const auto e = run({"figure", "--norm", "euclidean", "--theta-x", "0", "--eps", "0.6", "--samples", "16"});
  CHECK(e.code == 0);
  const auto j = json::parse(e.out);
  CHECK(j["zy1"].get<double>() == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(j["sphere"].size() == 16);

  const auto box = run({"figure", "--norm", "lp:inf", "--theta-x", "0", "--eps", "0.5", "--samples", "8"});
  CHECK(box.code == 0);
  const auto f = json::parse(box.out)["figure"];
  CHECK(f["z"] == f["y1"]);

  CHECK(run({"figure", "--norm", "euclidean", "--eps", "1.5"}).code == 2);
}
