#include "catch_amalgamated.hpp"

#include <cmath>

#include "cuspspec/config.hpp"
#include "cuspspec/model.hpp"

using namespace cusp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const char* kAb = R"(
geometry.n = 2
geometry.p = 1
geometry.Y0 = 1
operator.k = 0
cross_section.kind = circle
cross_section.length = 6.283185307
magnetic.flux = 0.5
)";

// minimal valid header: n = 2, p = 1, circle of length 2 pi
std::string base(const std::string& extra, const std::string& n = "2", const std::string& p = "1",
                 const std::string& kind = "circle") {
  return "geometry.n = " + n + "\ngeometry.p = " + p + "\ncross_section.kind = " + kind + "\n" + extra;
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("flux-threaded circle end parses field by field") {
  const auto cfg = parse_config(kAb);
  CHECK(cfg.geometry.n == 2);
  CHECK(cfg.geometry.p == Rational(1));
  CHECK(cfg.geometry.y0 == 1.0);
  CHECK(cfg.k == 0);
  CHECK(cfg.cross_section.kind == CrossSectionKind::Circle);
  CHECK(cfg.cross_section.length == 6.283185307);
  REQUIRE(cfg.magnetic);
  REQUIRE(cfg.magnetic->flux.size() == 1);
  CHECK(cfg.magnetic->flux[0] == Rational(1, 2));
  CHECK_FALSE(cfg.magnetic->flux_integral());
  CHECK_FALSE(cfg.potential);
}

TEST_CASE("magnetic data on forms is rejected") {
  std::string text = kAb;
  text.replace(text.find("operator.k = 0"), 14, "operator.k = 1");
  CHECK_THROWS_WITH(parse_config(text), ContainsSubstring("magnetic data requires k=0"));
}

TEST_CASE("orientable 3-manifold with H1 = 0 cannot have a torus end") {
  const char* text = R"(
geometry.n = 3
geometry.p = 1
topology.orientable = true
topology.h1 = 0
cross_section.kind = square_torus
cross_section.dim = 2
)";
  CHECK_THROWS_WITH(parse_config(text), ContainsSubstring("cannot be simultaneously fulfilled"));
  // without the orientability data there is nothing to contradict
  CHECK_NOTHROW(parse_config(base("cross_section.dim = 2\ntopology.h1 = 0\n", "3", "1", "square_torus")));
}

TEST_CASE("builtin cross-sections") {
  SECTION("circle of length 2 pi") {
    const auto cs = builtin_cross_section("circle", CrossSectionParams{});
    CHECK(cs.betti == std::vector<int>{1, 1});
    CHECK_THAT(cs.volume, WithinAbs(2.0 * M_PI, 1e-15));
    CHECK_THAT(cs.dual[0][0], WithinAbs(1.0, 1e-15));  // eigenvalues m^2
  }
  SECTION("square torus side 2 pi, dim 2") {
    CrossSectionParams prm;
    prm.dim = 2;
    const auto cs = builtin_cross_section("square_torus", prm);
    CHECK(cs.betti == std::vector<int>{1, 2, 1});
    CHECK_THAT(cs.dual[0][0], WithinAbs(1.0, 1e-15));
    CHECK_THAT(cs.dual[1][1], WithinAbs(1.0, 1e-15));
    CHECK_THAT(cs.dual[0][1], WithinAbs(0.0, 1e-15));
    CHECK_THAT(cs.volume, WithinAbs(4.0 * M_PI * M_PI, 1e-12));
  }
  SECTION("skew lattice dual satisfies g_j . b_i = 2 pi delta_ij") {
    CrossSectionParams prm;
    prm.basis = {{1.0, 0.0}, {0.5, 2.0}};
    const auto cs = builtin_cross_section("lattice_torus", prm);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double dot = 0.0;
        for (int c = 0; c < 2; ++c) dot += cs.dual[c][j] * cs.periods[i][c];  // columns of G are dual vectors
        CHECK_THAT(dot, WithinAbs(i == j ? 2.0 * M_PI : 0.0, 1e-12));
      }
    CHECK_THAT(cs.volume, WithinAbs(2.0, 1e-15));
  }
  SECTION("degenerate lattice") {
    CrossSectionParams prm;
    prm.basis = {{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_WITH(builtin_cross_section("lattice_torus", prm), ContainsSubstring("degenerate lattice"));
  }
  SECTION("table betti numbers are the zero multiplicities") {
    CrossSectionParams prm;
    prm.table = {{{0.0, 1}, {3.0, 4}}, {{0.0, 0 + 1}, {2.0, 6}}, {{3.0, 1}}};
    prm.volume = 2.0;
    const auto cs = builtin_cross_section("table", prm);
    CHECK(cs.betti == std::vector<int>{1, 1, 0});
  }
  SECTION("unknown name") { CHECK_THROWS_AS(builtin_cross_section("klein", {}), Error); }
}

TEST_CASE("malformed documents name the problem") {
  CHECK(code_of(base("bogus.key = 1\n")) == ErrorCode::Validation);
  CHECK_THROWS_WITH(parse_config(base("geometry.n = 3\n")), ContainsSubstring("duplicate key"));
  CHECK_THROWS_WITH(parse_config(base("operator.k 0\n")), ContainsSubstring("expected 'key = value'"));
  CHECK_THROWS_WITH(parse_config("geometry.p = 1\ncross_section.kind = circle\n"), ContainsSubstring("geometry.n"));
  CHECK_THROWS_WITH(parse_config(base("", "2", "0")), ContainsSubstring("geometry.p"));
  CHECK_THROWS_WITH(parse_config(base("geometry.Y0 = 0.5\n")), ContainsSubstring("Y0"));
  CHECK_THROWS_WITH(parse_config(base("", "3")), ContainsSubstring("does not match"));
  CHECK_THROWS_WITH(parse_config(base("numerics.grid = 2000\n")), ContainsSubstring("two grids"));
  // V must be O(y^{2p})
  CHECK_THROWS_WITH(parse_config(base("potential.poly = (1,3)\n")), ContainsSubstring("exceeds 2p"));
  // flux needs b1(M) components
  CHECK_THROWS_WITH(parse_config(base("magnetic.flux = 0.5,0.5\n")), ContainsSubstring("b1(M)"));
}

TEST_CASE("exact rationals") {
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("2/8") == Rational(1, 4));
  CHECK(Rational::parse("-1.5") == Rational(-3, 2));
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(6, 3).is_integer());
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(1, 2) * Rational(2) == Rational(1));
  CHECK_THROWS_AS(Rational::parse("1/0"), Error);
}

TEST_CASE("render and parse round-trip") {
  const std::vector<std::string> docs = {
      kAb,
      base("operator.k = 1\ncross_section.dim = 2\ncross_section.side = 3.5\n", "3", "1/2", "square_torus"),
      base("cross_section.basis = 1,0;0.5,2\nmagnetic.flux = 1/3,-2\nmagnetic.phi0 = 3.7\n", "3", "1", "lattice_torus"),
      base("potential.poly = (1,1/2);(-0.2,0)\npotential.bump = 1.5,0.4,5\nnumerics.window = 0,4\n"
           "numerics.lambda = 2,60,12\n",
           "2", "1/4"),
      base("cross_section.eigen.0 = 0:1,1:2,4:2\ncross_section.eigen.1 = 0:1,1:2\ncross_section.volume = 6.28\n", "2", "1",
           "table"),
  };
  for (const auto& d : docs) {
    const auto cfg = parse_config(d);
    const auto again = parse_config(render_config(cfg));
    CHECK(again == cfg);
    CHECK(render_config(again) == render_config(cfg));
  }
}

TEST_CASE("reals are read without the locale") {
  const auto cfg = parse_config(base("geometry.Y0 = 1.5e0\nnumerics.tol = 1e-12\n"));
  CHECK(cfg.geometry.y0 == 1.5);
  CHECK(cfg.numerics.tol == 1e-12);
  CHECK_THROWS_AS(parse_config(base("geometry.Y0 = 1,5\n")), Error);
}
