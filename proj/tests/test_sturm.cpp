#include "catch_amalgamated.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "cuspspec/config.hpp"
#include "cuspspec/reduce.hpp"
#include "cuspspec/sturm.hpp"

using namespace cusp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::VectorXd dense_eigenvalues(const TridiagonalPencil& P) {
  const int n = P.N;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = P.diag[i];
    B(i, i) = P.mass[i];
    if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = P.offdiag[i];
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

TridiagonalPencil random_pencil(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(3, 200);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 2.0);
  TridiagonalPencil P;
  P.N = size(rng);
  for (int i = 0; i < P.N; ++i) {
    P.diag.push_back(4.0 * u(rng));
    P.mass.push_back(pos(rng));
    if (i + 1 < P.N) P.offdiag.push_back(u(rng));
  }
  return P;
}

RadialOperator hyperbolic_mode(double nu) {
  const auto cfg = parse_config("geometry.n = 2\ngeometry.p = 1\ncross_section.kind = circle\n");
  return mode_operator(cfg, {"m", {0}, nu, 1, Sector::Function});
}

}  // namespace

TEST_CASE("assembly of -u'' is the (2,-1) stiffness over h with mass h") {
  const auto P = discretize_laplacian(1.0, 999);
  const double h = 1.0 / 1000.0;
  CHECK(P.N == 999);
  CHECK_THAT(P.h, WithinRel(h, 1e-15));
  for (int i = 0; i < P.N; ++i) {
    CHECK_THAT(P.diag[i], WithinRel(2.0 / h, 1e-12));
    CHECK_THAT(P.mass[i], WithinRel(h, 1e-12));
  }
  for (double o : P.offdiag) CHECK_THAT(o, WithinRel(-1.0 / h, 1e-12));
  CHECK_THROWS_WITH(discretize_laplacian(1.0, 2), ContainsSubstring("N >= 3"));
}

TEST_CASE("inertia counts of -u''") {
  const auto P = discretize_laplacian(1.0, 999);
  CHECK(count_below(P, 50.0) == 2);
  CHECK(count_below(P, 9.0) == 0);
  CHECK(count_below(P, 100.0) == 3);
  CHECK(count_below(P, gershgorin_lower(P)) == 0);
  CHECK(gershgorin_lower(P) <= 0.0 + 1e-9);
  int prev = 0;
  for (double l = 0.0; l <= 2000.0; l += 7.5) {
    const int c = count_below(P, l);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("pivot breakdown shifts lambda and still counts correctly") {
  // 1x... pencil with an eigenvalue exactly at the probe: diag 2, off -1, mass 1, N = 3
  TridiagonalPencil P;
  P.N = 3;
  P.diag = {2.0, 2.0, 2.0};
  P.offdiag = {-1.0, -1.0};
  P.mass = {1.0, 1.0, 1.0};
  // eigenvalues 2 - sqrt 2, 2, 2 + sqrt 2; at lambda = 2 the first pivot is zero
  const auto r = count_below_detailed(P, 2.0);
  CHECK(r.shifts >= 1);
  CHECK((r.count == 1 || r.count == 2));
  CHECK(count_below(P, 2.0 - 1e-9) == 1);
  CHECK(count_below(P, 2.0 + 1e-9) == 2);
}

TEST_CASE("counts and values agree with a dense generalized eigensolver") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto P = random_pencil(rng);
    const Eigen::VectorXd ev = dense_eigenvalues(P);
    const double lo = ev(0) - 1.0, hi = ev(P.N - 1) + 1.0;
    for (int k = 0; k < 8; ++k) {
      const double l = lo + (hi - lo) * (k + 0.5) / 8.0;
      int expect = 0;
      for (int i = 0; i < P.N; ++i) expect += ev(i) < l;
      CHECK(count_below(P, l) == expect);
    }
    const double l = ev(P.N / 2) + 1e-7;
    const auto vals = eigenvalues_below(P, l, 1e-12);
    REQUIRE(static_cast<int>(vals.size()) == P.N / 2 + 1);
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK_THAT(vals[i], WithinAbs(ev(static_cast<int>(i)), 1e-9));
  }
}

TEST_CASE("eigenvalue search") {
  SECTION("empty window") { CHECK(eigenvalues_below(discretize_laplacian(1.0, 100), 5.0, 1e-10).empty()); }
  SECTION("repeated and clustered eigenvalues keep their multiplicity") {
    TridiagonalPencil P;
    P.N = 5;
    P.diag = {1.0, 1.0, 1.0 + 1e-7, 5.0, 6.0};
    P.offdiag = {0.0, 0.0, 0.0, 0.0};
    P.mass = {1.0, 1.0, 1.0, 1.0, 1.0};
    const auto v = eigenvalues_below(P, 2.0, 1e-12);
    REQUIRE(v.size() == 3);
    CHECK_THAT(v[0], WithinAbs(1.0, 1e-11));
    CHECK_THAT(v[1], WithinAbs(1.0, 1e-11));
    CHECK_THAT(v[2], WithinAbs(1.0 + 1e-7, 1e-11));
    const Eigen::VectorXd ev = dense_eigenvalues(P);
    for (int i = 0; i < 3; ++i) CHECK_THAT(v[i], WithinAbs(ev(i), 1e-11));
  }
  SECTION("first eigenvalues of -u'' after Richardson") {
    DomainRun run;
    for (int N : {500, 1000, 2000}) {
      const auto P = discretize_laplacian(1.0, N);
      run.grids.push_back({N, P.h, 0, eigenvalues_below(P, 50.0, 1e-10)});
    }
    extrapolate(run);
    REQUIRE(run.extrapolated.size() == 2);
    CHECK_THAT(run.extrapolated[0], WithinAbs(M_PI * M_PI, 1e-5));
    CHECK_THAT(run.extrapolated[1], WithinAbs(4.0 * M_PI * M_PI, 1e-5));
    CHECK_THAT(run.observed_order[0], WithinAbs(2.0, 0.05));
    // the lumped mass approximates from below
    CHECK(run.grids[0].eigenvalues[0] < M_PI * M_PI);
  }
}

TEST_CASE("convergence driver") {
  SECTION("a single grid or domain is rejected") {
    CHECK_THROWS_WITH(converge(hyperbolic_mode(0.0), 1.0, {1000}, {4.0, 8.0}, 1e-10), ContainsSubstring("two grids"));
    CHECK_THROWS_WITH(converge(hyperbolic_mode(0.0), 1.0, {1000, 2000}, {4.0}, 1e-10), ContainsSubstring("two domains"));
  }
  SECTION("hyperbolic zero mode is -d^2/dt^2 + 1/4 on (0, T)") {
    const auto rep = converge(hyperbolic_mode(0.0), 2.0, {1000, 2000}, {4.0, 8.0}, 1e-11);
    for (const auto& d : rep.domains) {
      REQUIRE(!d.extrapolated.empty());
      for (std::size_t m = 0; m < d.extrapolated.size(); ++m) {
        const double k = (m + 1.0) * M_PI / d.T;
        CHECK_THAT(d.extrapolated[m], WithinAbs(0.25 + k * k, 1e-6));
      }
    }
    CHECK_FALSE(rep.stable);  // the count keeps growing with T
  }
  SECTION("counts grow like T sqrt(lambda - 1/4) / pi for the zero mode") {
    for (double T : {16.0, 32.0, 64.0}) {
      const auto P = discretize(hyperbolic_mode(0.0), T, 8000);
      const double expect = T * std::sqrt(1.0 - 0.25) / M_PI;
      CHECK(std::abs(count_below(P, 1.0) - expect) <= 1.0);
    }
  }
  SECTION("a mode with nu > 0 is confined: counts stop changing") {
    const auto rep = converge(hyperbolic_mode(0.25), 10.0, {2000, 4000}, {4.0, 8.0, 16.0}, 1e-10);
    CHECK(rep.stable);
    CHECK(rep.domains[1].count == rep.domains[2].count);
    CHECK(rep.domains[2].count >= 1);
  }
}

TEST_CASE("overflowing coefficients name the term") {
  // z-length 800 on the hyperbolic cusp: y = e^800 is not representable
  const auto op = hyperbolic_mode(1.0);
  CHECK_THROWS_WITH(discretize(op, 800.0, 100), ContainsSubstring("potential term 1*y^2"));
  CHECK_NOTHROW(discretize(op, 20.0, 100));
}
