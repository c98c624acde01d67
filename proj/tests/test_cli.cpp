#include "catch_amalgamated.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// runs the CLI with stderr folded into the captured output
Run cli(const std::string& args) {
  const std::string cmd = std::string(CUSPSPEC_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string cfg(const std::string& name) { return std::string("--config ") + CUSPSPEC_CONFIGS + "/" + name; }

}  // namespace

TEST_CASE("criteria on the flux-threaded cusp") {
  const auto r = cli("criteria " + cfg("ab.cfg"));
  CHECK(r.status == 0);
  CHECK_THAT(r.out, StartsWith("PurePoint"));
  CHECK_THAT(r.out, ContainsSubstring("flux class not integral"));
}

TEST_CASE("essspec finds 1/4 on the hyperbolic cusp") {
  const auto r = cli("essspec " + cfg("cusp.cfg"));
  CHECK(r.status == 0);
  CHECK_THAT(r.out, ContainsSubstring("threshold estimate 0.2"));
  CHECK_THAT(r.out, ContainsSubstring("predicted 0.25"));
}

TEST_CASE("invalid input exits 1") {
  const auto bad = cli("spectrum " + cfg("bad.cfg"));
  CHECK(bad.status == 1);
  CHECK_THAT(bad.out, ContainsSubstring("magnetic data requires k=0"));

  const auto flag = cli("criteria " + cfg("ab.cfg") + " --no-such-flag");
  CHECK(flag.status == 1);
  CHECK_THAT(flag.out, ContainsSubstring("error[E_USAGE]"));

  CHECK(cli("").status == 1);
  CHECK(cli("criteria --config /nonexistent/x.cfg").status == 1);
  CHECK(cli("criteria " + cfg("ab.cfg") + " --format xml").status == 1);
}

TEST_CASE("reduce writes a CSV table") {
  const auto r = cli("reduce " + cfg("cusp.cfg") + " --format csv --lambda-max 5");
  CHECK(r.status == 0);
  CHECK_THAT(r.out, StartsWith("mode,nu,multiplicity,density_exp,stiffness_exp,potential_terms,threshold\n"));
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') >= 3);
}

TEST_CASE("JSON reports embed the prediction") {
  const auto r = cli("spectrum " + cfg("ab.cfg") + " --format json --lambda-max 10");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("prediction").at("classification") == "PurePoint");
  CHECK(j.at("lambda").size() == j.at("N_total").size());
}

TEST_CASE("output is identical for any number of workers") {
  const auto a = cli("spectrum " + cfg("ab.cfg") + " --format csv --lambda-max 20 --jobs 1");
  const auto b = cli("spectrum " + cfg("ab.cfg") + " --format csv --lambda-max 20 --jobs 4");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("--out writes the report to a file") {
  const auto path = std::filesystem::temp_directory_path() / "cuspspec_cli_out.json";
  std::filesystem::remove(path);
  const auto r = cli("criteria " + cfg("cusp.cfg") + " --format json --out " + path.string());
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(nlohmann::json::parse(ss.str()).at("classification") == "EssentialFrom");
  std::filesystem::remove(path);
}

TEST_CASE("zeta subcommand") {
  const auto r = cli("zeta " + cfg("cusp.cfg") + " --s 3 --format json");
  REQUIRE(r.status == 0);
  CHECK(std::abs(nlohmann::json::parse(r.out).at("value").get<double>() - 2.0346861) < 1e-6);
  CHECK(cli("zeta " + cfg("cusp.cfg")).status == 1);
}
