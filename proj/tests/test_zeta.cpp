#include "catch_amalgamated.hpp"

#include <cmath>
#include <map>

#include "cuspspec/model.hpp"
#include "cuspspec/zeta.hpp"

using namespace cusp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// plain long-double partial sum over |m| <= M plus the integral of the rest
double direct_circle(double s, double shift, int M) {
  long double acc = shift > 0.0 ? std::pow(static_cast<long double>(shift), -s) : 0.0L;
  for (int m = M; m >= 1; --m) acc += 2.0L * std::pow(static_cast<long double>(m) * m + shift, static_cast<long double>(-s));
  // int_{M+1/2}^inf t^{-2s} dt, good enough once shift << M^2
  acc += 2.0L * std::pow(M + 0.5L, 1.0L - 2.0L * s) / (2.0L * s - 1.0L);
  return static_cast<double>(acc);
}

}  // namespace

TEST_CASE("circle of length 2 pi at s = 3 is 2 zeta(6)") {
  const auto z = circle_zeta(2.0 * M_PI, 3.0, 0.0);
  const double exact = 2.0 * std::pow(M_PI, 6) / 945.0;
  CHECK_THAT(z.value, WithinRel(exact, 1e-14));
  CHECK(z.tail_bound < 1e-12);
  CHECK_THAT(z.value, WithinAbs(2.034686, 1e-6));
}

TEST_CASE("shifted circle zeta against direct summation") {
  const auto z = circle_zeta(2.0 * M_PI, 3.0, 1.0);
  CHECK_THAT(z.value, WithinAbs(direct_circle(3.0, 1.0, 20000), 1e-13));
  // sum (m^2+1)^{-3}: 1 + 2/8 + 2/125 + ... = 1.26859...
  CHECK_THAT(z.value, WithinAbs(1.2686, 1e-4));
  CHECK(z.tail_bound < 1e-12);
  for (double s : {0.75, 1.0, 1.5, 2.5})
    CHECK_THAT(circle_zeta(2.0 * M_PI, s, 0.3).value, WithinRel(direct_circle(s, 0.3, 400000), s < 1.0 ? 1e-6 : 1e-10));
}

TEST_CASE("divergent arguments are rejected") {
  CHECK_THROWS_WITH(circle_zeta(2.0 * M_PI, 0.4, 0.0), ContainsSubstring("diverges"));
  CHECK_THROWS_AS(lattice_zeta({{1.0, 0.0}, {0.0, 1.0}}, 1.0, 0.0), Error);
  CHECK_THROWS_AS(circle_zeta(2.0 * M_PI, 2.0, -1.0), Error);
}

TEST_CASE("empty positive spectrum is an error") {
  CHECK_THROWS_WITH(table_zeta({{0.0, 3}}, 2.0, 0.0), ContainsSubstring("empty positive spectrum"));
  CHECK_THROWS_AS(table_zeta({}, 2.0, 0.0), Error);
}

TEST_CASE("square torus: lattice sum agrees with a table of the first eigenvalues") {
  // table oracle: all |m|^2 <= R^2 by enumeration, roughly 10^4 points
  const int R = 56;
  std::map<int, int> mult;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b)
      if (a * a + b * b <= R * R) ++mult[a * a + b * b];
  std::vector<TableEntry> table;
  int points = 0;
  for (auto [ev, m] : mult) {
    table.push_back({static_cast<double>(ev), m});
    points += m;
  }
  CHECK(points > 9000);
  const double s = 3.0;
  const auto partial = table_zeta(table, s, 0.0);
  const auto full = lattice_zeta({{1.0, 0.0}, {0.0, 1.0}}, s, 0.0);
  // points outside the disc contribute at most 2 pi int_{R-1}^inf r^{1-2s} dr
  const double tail = 2.0 * M_PI * std::pow(R - 1.0, 2.0 - 2.0 * s) / (2.0 * s - 2.0);
  CHECK(full.value >= partial.value);
  CHECK(full.value - partial.value <= tail + full.tail_bound);
  // known value 4 zeta(3) beta(3) = 4 * 1.2020569 * 0.9689461
  CHECK_THAT(full.value, WithinRel(4.0 * 1.2020569031595943 * 0.9689461462593694, 1e-10));
}

TEST_CASE("large s is dominated by the smallest eigenvalue") {
  const double s = 50.0;
  // circle of length 2 pi: smallest positive eigenvalue 1 with multiplicity 2
  CHECK_THAT(circle_zeta(2.0 * M_PI, s, 0.0).value, WithinRel(2.0, 1e-10));
  // circle of length 2: smallest eigenvalue pi^2, twice
  CHECK_THAT(circle_zeta(2.0, s, 0.0).value, WithinRel(2.0 * std::pow(M_PI * M_PI, -s), 1e-10));
  // skew torus: four shortest dual vectors
  const auto cs = [] {
    CrossSectionParams prm;
    prm.basis = {{1.0, 0.0}, {0.3, 1.7}};
    return builtin_cross_section("lattice_torus", prm);
  }();
  double lo = 1e300;
  int count = 0;
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b) {
      if (a == 0 && b == 0) continue;
      const double x = cs.dual[0][0] * a + cs.dual[0][1] * b, y = cs.dual[1][0] * a + cs.dual[1][1] * b;
      const double ev = x * x + y * y;
      if (ev < lo * (1 - 1e-12)) {
        lo = ev;
        count = 1;
      } else if (std::abs(ev - lo) <= 1e-12 * lo) {
        ++count;
      }
    }
  CHECK_THAT(lattice_zeta(cs.dual, s, 0.0).value, WithinRel(count * std::pow(lo, -s), 1e-10));
  CHECK_THAT(table_zeta({{0.0, 1}, {2.0, 3}, {5.0, 1}}, s, 0.0).value, WithinRel(3.0 * std::pow(2.0, -s), 1e-10));
}

TEST_CASE("zeta decreases in s and in the shift") {
  double prev = 1e300;
  for (double s = 1.25; s <= 6.0; s += 0.25) {
    const double v = lattice_zeta({{1.0, 0.0}, {0.0, 1.0}}, s, 1.0).value;
    CHECK(v < prev);
    prev = v;
  }
  prev = 1e300;
  // positive shifts only: at shift 0 the zero mode is excluded
  for (double sh = 0.25; sh <= 5.0; sh += 0.5) {
    const double v = circle_zeta(2.0 * M_PI, 2.0, sh).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("the circle is the one-dimensional lattice") {
  for (double L : {1.0, 2.0 * M_PI, 7.5})
    for (double s : {0.8, 1.5, 3.0})
      for (double sh : {0.0, 0.5}) {
        const auto a = circle_zeta(L, s, sh);
        const auto b = lattice_zeta({{2.0 * M_PI / L}}, s, sh);
        CHECK_THAT(a.value, WithinRel(b.value, 1e-10));
      }
}

TEST_CASE("form zeta on tori counts binom(d, j) copies") {
  CrossSectionParams prm;
  prm.dim = 2;
  const auto cs = builtin_cross_section("square_torus", prm);
  const double f = form_zeta(cs, 0, 2.0, 1.0).value;
  CHECK_THAT(form_zeta(cs, 1, 2.0, 1.0).value, WithinRel(2.0 * f, 1e-15));
  CHECK_THAT(form_zeta(cs, 2, 2.0, 1.0).value, WithinRel(f, 1e-15));
  CHECK(form_zeta(cs, -1, 2.0, 1.0).value == 0.0);
  CHECK(form_zeta(cs, 3, 2.0, 1.0).value == 0.0);
}
