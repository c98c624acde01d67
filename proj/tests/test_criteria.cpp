#include "catch_amalgamated.hpp"

#include <cmath>

#include "cuspspec/config.hpp"
#include "cuspspec/criteria.hpp"

using namespace cusp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ProblemConfig circle_end(const std::string& p, const std::string& extra = "", double L = 2.0 * M_PI) {
  return parse_config("geometry.n = 2\ngeometry.p = " + p + "\ncross_section.kind = circle\ncross_section.length = " +
                      detail::fmt(L) + "\n" + extra);
}

ProblemConfig torus_end(int k, const std::string& p = "1") {
  return parse_config("geometry.n = 3\ngeometry.p = " + p + "\noperator.k = " + std::to_string(k) +
                      "\ncross_section.kind = square_torus\ncross_section.dim = 2\n");
}

}  // namespace

TEST_CASE("full ellipticity of the form Laplacian needs h^k = h^{k-1} = 0") {
  CHECK(full_ellipticity_forms(4, 2, {1, 0, 0, 1}));   // S^3 cross-section, middle degree
  CHECK_FALSE(full_ellipticity_forms(4, 1, {1, 0, 0, 1}));
  CHECK_FALSE(full_ellipticity_forms(2, 0, {1, 1}));   // functions always see h^0
  CHECK_FALSE(full_ellipticity_forms(3, 1, {1, 2, 1}));
  CHECK_THROWS_AS(full_ellipticity_forms(3, 4, {1, 2, 1}), Error);
}

TEST_CASE("Hodge star maps degree-k candidates to degree n-k") {
  // h^j(M) = h^{n-1-j}(M), so the pair (h^k, h^{k-1}) of degree k is the pair
  // (h^{n-k-1}, h^{n-k}) of degree n-k
  const std::vector<std::vector<int>> bettis = {{1, 0, 0, 1}, {1, 3, 3, 1}, {1, 0, 2, 0, 1}, {1, 1}};
  for (const auto& b : bettis) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k <= n; ++k) CHECK(full_ellipticity_forms(n, k, b) == full_ellipticity_forms(n, n - k, b));
  }
}

TEST_CASE("threshold sets") {
  SECTION("1-forms on a 3-dimensional torus cusp") {
    const auto pr = thresholds_forms(3, 1, Rational(1), {1, 2, 1});
    CHECK(pr.thresholds == std::vector<double>{0.0, 1.0});
    CHECK(pr.classification == Classification::EssentialFrom);
    CHECK(pr.threshold == 0.0);
  }
  SECTION("functions on the hyperbolic cusp") {
    const auto pr = predict(circle_end("1"));
    CHECK(pr.classification == Classification::EssentialFrom);
    CHECK_THAT(pr.threshold, WithinAbs(0.25, 1e-15));
  }
  SECTION("incomplete end p = 2 is discrete") { CHECK(predict(circle_end("2")).pure_point()); }
  SECTION("p < 1 gives [0, inf) whenever some harmonic sector exists") {
    CHECK(thresholds_forms(3, 1, Rational(1, 2), {1, 2, 1}).thresholds == std::vector<double>{0.0});
    CHECK(thresholds_forms(4, 2, Rational(1, 2), {1, 0, 0, 1}).pure_point());
  }
  SECTION("the p = 1 thresholds are the squares c_i^2") {
    for (int n = 2; n <= 5; ++n)
      for (int k = 0; k <= n; ++k) {
        const auto [c0, c1] = harmonic_constants(n, k, 1.0);
        CHECK_THAT(c0, WithinAbs((n - 2.0 * k - 1.0) / -2.0, 1e-15));
        CHECK_THAT(c1, WithinAbs((n - 2.0 * k + 1.0) / -2.0, 1e-15));
      }
  }
}

TEST_CASE("magnetic criterion") {
  SECTION("half-integral flux on the circle is pure point") {
    const auto pr = predict(circle_end("1", "magnetic.flux = 0.5\n"));
    CHECK(pr.pure_point());
    CHECK_THAT(pr.notes.front(), ContainsSubstring("flux class not integral"));
  }
  SECTION("integral flux is gauge-trivial") {
    const auto pr = predict(circle_end("1", "magnetic.flux = 3\n"));
    CHECK(pr.essential());
    CHECK_THAT(pr.threshold, WithinAbs(0.25, 1e-15));
  }
  SECTION("p = 1/2 with zero flux") {
    const auto pr = predict(circle_end("1/2", "magnetic.flux = 0\n"));
    CHECK(pr.essential());
    CHECK(pr.threshold == 0.0);
  }
  SECTION("non-constant phi0 or non-closed theta0 is fully elliptic") {
    CHECK(predict(circle_end("1", "magnetic.flux = 0\nmagnetic.phi0_constant = false\n")).pure_point());
    CHECK(predict(circle_end("1", "magnetic.flux = 0\nmagnetic.theta0_closed = false\n")).pure_point());
  }
}

TEST_CASE("Schroedinger criterion on V0") {
  CHECK(schrodinger_pure_point({{1.0, true}}));
  CHECK_FALSE(schrodinger_pure_point({{0.0, false}}));
  CHECK_FALSE(schrodinger_pure_point({{-0.1, true}}));
  CHECK_FALSE(schrodinger_pure_point({{1.0, true}, {0.0, false}}));

  CHECK(predict(circle_end("1", "potential.poly = (1,2)\n")).pure_point());
  // bounded potentials shift the threshold by their constant part
  const auto shifted = predict(circle_end("1", "potential.poly = (0.5,0);(2,-1)\n"));
  CHECK_THAT(shifted.threshold, WithinAbs(0.75, 1e-15));
  // a negative V0 leaves nothing decidable
  CHECK(predict(circle_end("1", "potential.poly = (-1,2)\n")).classification == Classification::Undetermined);
}

TEST_CASE("magnetic Schroedinger bound is the flux-shifted bottom of the cross spectrum") {
  const auto cs = builtin_cross_section("circle", {});
  // oracle: min over m in Z of (m + mu)^2 by direct enumeration
  for (const auto& mu : {Rational(1, 2), Rational(1, 4), Rational(-2, 3), Rational(7, 5)}) {
    double best = 1e300;
    for (int m = -10; m <= 10; ++m) best = std::min(best, std::pow(m + mu.value(), 2));
    CHECK_THAT(magnetic_schrodinger_bound(cs, {mu}), WithinAbs(best, 1e-14));
  }
  CHECK_THAT(magnetic_schrodinger_bound(cs, {Rational(1, 2)}), WithinAbs(0.25, 1e-15));
  CHECK_THAT(magnetic_schrodinger_bound(cs, {Rational(1, 4)}), WithinAbs(0.0625, 1e-15));
  CHECK_THROWS_AS(magnetic_schrodinger_bound(cs, {Rational(1)}), Error);

  CHECK(predict(circle_end("1", "magnetic.flux = 1/2\npotential.poly = (-0.1,2)\n")).pure_point());
  CHECK_FALSE(predict(circle_end("1", "magnetic.flux = 1/2\npotential.poly = (-0.3,2)\n")).pure_point());
}

TEST_CASE("Weyl regimes and constants") {
  CHECK(weyl_regime(2, Rational(1)) == WeylRegime::PowerN2);
  CHECK(weyl_regime(2, Rational(1, 2)) == WeylRegime::LogLaw);
  CHECK(weyl_regime(2, Rational(1, 4)) == WeylRegime::PowerHalfP);
  CHECK(weyl_regime(3, Rational(1, 3)) == WeylRegime::LogLaw);

  for (double L : {2.0 * M_PI, 3.0, 10.0}) {
    CHECK_THAT(*predict(circle_end("1", "magnetic.flux = 1/2\n", L)).constants.c1, WithinRel(L / (4.0 * M_PI), 1e-14));
    CHECK_THAT(*predict(circle_end("1/2", "magnetic.flux = 1/2\n", L)).constants.c2, WithinRel(L / (4.0 * M_PI), 1e-14));
  }
  // C1 scales with the volume of the end, Y0^{1-np}/(np-1) Vol(M)
  const auto far = circle_end("1", "geometry.Y0 = 2\nmagnetic.flux = 1/2\n");
  CHECK_THAT(*predict(far).constants.c1, WithinRel(1.0 / 4.0, 1e-14));
  // forms pick up binom(n, k): 3 * (4 pi^2 / 2) * 4 pi / (3 (2 pi)^3) = 1
  CHECK_THAT(*predict(torus_end(1)).constants.c1, WithinRel(1.0, 1e-14));
}

TEST_CASE("C3 for p = 1/4, V0 = 1 on the circle") {
  const auto pr = predict(circle_end("1/4", "potential.poly = (1,1/2)\n"));
  REQUIRE(pr.constants.c3);
  CHECK(pr.weyl_exponent == 2.0);
  // Gamma(3/2) / (2 sqrt(pi) Gamma(2)) = 1/4, zeta taken at (1-p)/(2p) = 3/2:
  // direct sum of (m^2+1)^{-3/2} with the integral tail beyond |m| = M
  const int M = 200000;
  double z = 1.0;
  for (int m = 1; m <= M; ++m) z += 2.0 * std::pow(m * double(m) + 1.0, -1.5);
  z += 2.0 * (1.0 - (M + 0.5) / std::sqrt((M + 0.5) * (M + 0.5) + 1.0));  // int_{M+1/2}^inf (t^2+1)^{-3/2} dt
  CHECK_THAT(*pr.constants.c3, WithinRel(0.25 * z, 1e-9));
  CHECK(pr.constants.c3_derived);

  CHECK(predict(circle_end("1/4", "magnetic.flux = 1/2\n")).constants.c3_fit_only);
  CHECK(predict(circle_end("1/4", "potential.poly = (-1,1/2)\n")).constants.c3_fit_only);
}
