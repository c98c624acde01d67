#pragma once

// 1-D engine: P1 assembly of a radial quadratic form into a symmetric
// tridiagonal pencil (A, B) with lumped (diagonal) B, Sylvester inertia of
// A - lambda B by LDL^T, and eigenvalues by bisection on that count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cuspspec/config.hpp"
#include "cuspspec/error.hpp"
#include "cuspspec/reduce.hpp"

namespace cusp {

struct TridiagonalPencil {
  std::vector<double> diag;     // A_ii
  std::vector<double> offdiag;  // A_{i,i+1}, size N-1
  std::vector<double> mass;     // B_ii > 0
  int N = 0;
  double h = 0.0;               // uniform step in the mesh variable
  double length = 0.0;
};

namespace detail {

/// Assembles  int a(s) v'^2 ds + int c(s) v^2 ds  against  int b(s) v^2 ds  on
/// (0, L) with Dirichlet ends: stiffness with a at element midpoints, mass and
/// potential lumped to the nodes.
template <class A, class B, class C>
TridiagonalPencil assemble_pencil(double L, int N, A&& a, B&& b, C&& c) {
  if (N < 3) fail(ErrorCode::Validation, "discretize needs N >= 3 interior points (got " + std::to_string(N) + ")");
  require(L > 0.0 && std::isfinite(L), "discretize needs a finite positive domain");
  TridiagonalPencil P;
  P.N = N;
  P.length = L;
  P.h = L / (N + 1);
  const double h = P.h;
  const auto n = static_cast<std::size_t>(N);
  P.diag.assign(n, 0.0);
  P.offdiag.assign(n - 1, 0.0);
  P.mass.assign(n, 0.0);
  double a_prev = a(0.5 * h);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = h * static_cast<double>(i + 1);
    const double a_next = a(s + 0.5 * h);
    P.diag[i] = (a_prev + a_next) / h + c(s) * h;
    if (i + 1 < n) P.offdiag[i] = -a_next / h;
    P.mass[i] = b(s) * h;
    a_prev = a_next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(P.diag[i]) || (i + 1 < n && !std::isfinite(P.offdiag[i])) || !std::isfinite(P.mass[i]))
      fail(ErrorCode::Numerical, "non-finite matrix entry at node " + std::to_string(i));
    if (!(P.mass[i] > 0.0)) fail(ErrorCode::Numerical, "density weight underflows to zero at node " + std::to_string(i));
  }
  return P;
}

inline void check_finite(double v, const std::string& term, double y) {
  if (!std::isfinite(v))
    fail(ErrorCode::Numerical, "overflow evaluating " + term + " at y = " + fmt(y));
}

}  // namespace detail

/// Pencil of a radial operator on [Y0, Ymax] where T is the domain parameter
/// (see mesh_length).  In s: a = w1 y^{-p}, b = w0 y^p, c = q w0 y^p.
inline TridiagonalPencil discretize(const RadialOperator& op, double T, int N) {
  const double L = mesh_length(op.p, op.y0, T);
  auto y = [&](double s) { return detail::y_of_s(s, op.p, op.y0); };
  auto a = [&](double s) {
    const double yy = y(s);
    const double v = std::pow(yy, op.stiffness_exponent - op.p);
    detail::check_finite(v, "stiffness weight y^" + detail::fmt(op.stiffness_exponent), yy);
    return v;
  };
  auto b = [&](double s) {
    const double yy = y(s);
    const double v = std::pow(yy, op.density_exponent + op.p);
    detail::check_finite(v, "density weight y^" + detail::fmt(op.density_exponent), yy);
    return v;
  };
  auto c = [&](double s) {
    const double yy = y(s);
    const double w = std::pow(yy, op.density_exponent + op.p);
    double v = 0.0;
    for (const auto& t : op.potential) {
      const double term = t.coef * std::pow(yy, t.exponent) * w;
      detail::check_finite(term, "potential term " + detail::fmt(t.coef) + "*y^" + detail::fmt(t.exponent), yy);
      v += term;
    }
    if (op.bump) v += (*op.bump)(yy) * w;
    return v;
  };
  return detail::assemble_pencil(L, N, a, b, c);
}

/// Pencil of -v'' + W(z) on (z0, z0 + T).
inline TridiagonalPencil discretize(const CanonicalOperator& op, double T, int N) {
  auto one = [](double) { return 1.0; };
  auto c = [&](double s) {
    const double v = op.W(op.z0 + s);
    detail::check_finite(v, "Liouville potential W", op.y_of_z(op.z0 + s));
    return v;
  };
  return detail::assemble_pencil(T, N, one, one, c);
}

/// Plain -u'' on (0, L), used for sanity checks.
inline TridiagonalPencil discretize_laplacian(double L, int N) {
  auto one = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  return detail::assemble_pencil(L, N, one, one, zero);
}

// ---------------------------------------------------------------------------

struct CountResult {
  int count = 0;
  double lambda_used = 0.0;  // differs from the request after a pivot breakdown
  int shifts = 0;
};

/// Number of generalized eigenvalues < lambda (negative pivots of the LDL^T
/// factorization of A - lambda B).  An exactly zero pivot shifts lambda by
/// 1e-14 * scale and restarts.
inline CountResult count_below_detailed(const TridiagonalPencil& P, double lambda) {
  const auto n = P.diag.size();
  double scale = std::abs(lambda);
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(P.diag[i] / P.mass[i]));
  if (scale == 0.0) scale = 1.0;
  CountResult r;
  r.lambda_used = lambda;
  while (true) {
    int neg = 0;
    double d = 1.0;
    bool breakdown = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = i > 0 ? P.offdiag[i - 1] : 0.0;
      d = (P.diag[i] - r.lambda_used * P.mass[i]) - (i > 0 ? e * e / d : 0.0);
      if (d == 0.0) {
        breakdown = true;
        break;
      }
      if (d < 0.0) ++neg;
    }
    if (!breakdown) {
      r.count = neg;
      return r;
    }
    r.lambda_used += 1e-14 * scale;
    ++r.shifts;
    if (r.shifts > 64) fail(ErrorCode::Numerical, "LDL^T breakdown persists after 64 shifts");
  }
}

inline int count_below(const TridiagonalPencil& P, double lambda) { return count_below_detailed(P, lambda).count; }

/// Gershgorin lower bound of B^{-1/2} A B^{-1/2}.
inline double gershgorin_lower(const TridiagonalPencil& P) {
  const auto n = P.diag.size();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(P.offdiag[i - 1]) / std::sqrt(P.mass[i - 1] * P.mass[i]);
    if (i + 1 < n) r += std::abs(P.offdiag[i]) / std::sqrt(P.mass[i] * P.mass[i + 1]);
    lo = std::min(lo, P.diag[i] / P.mass[i] - r);
  }
  return lo;
}

/// All eigenvalues < lambda, each within +-tol, repeated by multiplicity.
/// Bisection is depth-first from the lowest subinterval, so results do not
/// depend on scheduling.
inline std::vector<double> eigenvalues_below(const TridiagonalPencil& P, double lambda, double tol) {
  require(tol > 0.0, "eigenvalues_below needs tol > 0");
  std::vector<double> out;
  const int total = count_below(P, lambda);
  if (total == 0) return out;
  double lo = gershgorin_lower(P);
  lo -= 1e-12 * std::max(1.0, std::abs(lo));
  int clo = count_below(P, lo);
  if (clo != 0) fail(ErrorCode::Internal, "eigenvalue below the Gershgorin bound");
  out.reserve(static_cast<std::size_t>(total));

  struct Frame {
    double lo, hi;
    int clo, chi, depth;
  };
  std::vector<Frame> stack{{lo, lambda, clo, total, 0}};
  constexpr int kMaxDepth = 2000;
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.chi == f.clo) continue;
    const double width = f.hi - f.lo;
    const double mid = f.lo + 0.5 * width;
    if (width <= 2.0 * tol || mid <= f.lo || mid >= f.hi) {
      for (int j = f.clo; j < f.chi; ++j) out.push_back(mid);
      continue;
    }
    if (f.depth > kMaxDepth)
      fail(ErrorCode::Numerical, "bisection iteration cap exceeded on [" + detail::fmt(f.lo) + ", " + detail::fmt(f.hi) +
                                     "] holding " + std::to_string(f.chi - f.clo) + " eigenvalues");
    const int cm = count_below(P, mid);
    // upper half first on the stack so the lower half is processed first
    stack.push_back({mid, f.hi, cm, f.chi, f.depth + 1});
    stack.push_back({f.lo, mid, f.clo, cm, f.depth + 1});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct GridRun {
  int N = 0;
  double h = 0.0;
  int count = 0;
  std::vector<double> eigenvalues;
};

struct DomainRun {
  double T = 0.0;
  std::vector<GridRun> grids;          // in the order of the grid list
  std::vector<double> extrapolated;    // Richardson values, one per common index
  std::vector<double> observed_order;  // per eigenvalue, NaN when not measurable
  int count = 0;                       // extrapolated eigenvalues < lambda
};

struct ConvergenceReport {
  double lambda = 0.0;
  std::vector<DomainRun> domains;  // sorted by T
  bool stable = false;             // equal counts on the two largest domains
  std::string note;
};

namespace detail {

/// Order q with (e1 - e2)/(e2 - e3) = (h1^q - h2^q)/(h2^q - h3^q); NaN if the
/// differences are below rounding or the ratio has the wrong sign.
inline double observed_order(double e1, double e2, double e3, double h1, double h2, double h3) {
  const double d12 = e1 - e2, d23 = e2 - e3;
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(e1), std::abs(e2), std::abs(e3), 1.0});
  if (std::abs(d23) <= noise || std::abs(d12) <= noise) return std::nan("");
  const double ratio = d12 / d23;
  if (!(ratio > 0.0)) return std::nan("");
  auto g = [&](double q) { return (std::pow(h1, q) - std::pow(h2, q)) / (std::pow(h2, q) - std::pow(h3, q)) - ratio; };
  double lo = 0.05, hi = 12.0;
  if (g(lo) * g(hi) > 0.0) return std::nan("");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double richardson(double coarse, double fine, double h_coarse, double h_fine, double order) {
  const double r = std::pow(h_coarse / h_fine, order);
  return fine + (fine - coarse) / (r - 1.0);
}

}  // namespace detail

/// Extrapolates per-index eigenvalues over a sequence of grids on one domain.
/// Three or more grids give an observed order (used when it lies in [1, 4]);
/// otherwise order 2 is assumed.
inline void extrapolate(DomainRun& run) {
  const auto& g = run.grids;
  std::size_t common = std::numeric_limits<std::size_t>::max();
  for (const auto& gr : g) common = std::min(common, gr.eigenvalues.size());
  run.extrapolated.assign(common, 0.0);
  run.observed_order.assign(common, std::nan(""));
  const std::size_t m = g.size();
  for (std::size_t i = 0; i < common; ++i) {
    const double ef = g[m - 1].eigenvalues[i], ec = g[m - 2].eigenvalues[i];
    double order = 2.0;
    if (m >= 3) {
      const double q = detail::observed_order(g[m - 3].eigenvalues[i], ec, ef, g[m - 3].h, g[m - 2].h, g[m - 1].h);
      run.observed_order[i] = q;
      if (std::isfinite(q) && q >= 1.0 && q <= 4.0) order = q;
    }
    run.extrapolated[i] = detail::richardson(ec, ef, g[m - 2].h, g[m - 1].h, order);
  }
}

/// Eigenvalues below lambda on every (domain, grid) pair, extrapolated in h,
/// with a domain-stability flag.  Dirichlet monotonicity in the domain is
/// asserted on the extrapolated eigenvalues.
template <class Op>
ConvergenceReport converge(const Op& op, double lambda, std::vector<int> grids, std::vector<double> domains, double tol) {
  if (grids.size() < 2) fail(ErrorCode::Validation, "converge needs at least two grids");
  if (domains.size() < 2) fail(ErrorCode::Validation, "converge needs at least two domains");
  std::sort(grids.begin(), grids.end());
  std::sort(domains.begin(), domains.end());
  ConvergenceReport rep;
  rep.lambda = lambda;
  for (double T : domains) {
    DomainRun run;
    run.T = T;
    for (int N : grids) {
      const TridiagonalPencil P = discretize(op, T, N);
      GridRun gr;
      gr.N = N;
      gr.h = P.h;
      gr.eigenvalues = eigenvalues_below(P, lambda, tol);
      gr.count = static_cast<int>(gr.eigenvalues.size());
      run.grids.push_back(std::move(gr));
    }
    extrapolate(run);
    run.count = static_cast<int>(std::count_if(run.extrapolated.begin(), run.extrapolated.end(),
                                               [&](double e) { return e < lambda; }));
    rep.domains.push_back(std::move(run));
  }
  // Enlarging a Dirichlet domain can only lower each eigenvalue.  The slack
  // covers the remaining discretization error of the extrapolated values.
  for (std::size_t j = 1; j < rep.domains.size(); ++j) {
    const auto& a = rep.domains[j - 1];
    const auto& b = rep.domains[j];
    const std::size_t common = std::min(a.extrapolated.size(), b.extrapolated.size());
    for (std::size_t i = 0; i < common; ++i) {
      const double err_a = std::abs(a.extrapolated[i] - a.grids.back().eigenvalues[i]);
      const double err_b = std::abs(b.extrapolated[i] - b.grids.back().eigenvalues[i]);
      const double slack = 1e-9 * std::max(1.0, std::abs(a.extrapolated[i])) + 10.0 * (err_a + err_b) + 4.0 * tol;
      if (b.extrapolated[i] > a.extrapolated[i] + slack)
        fail(ErrorCode::Internal, "eigenvalue " + std::to_string(i) + " increased from " + detail::fmt(a.extrapolated[i]) +
                                      " to " + detail::fmt(b.extrapolated[i]) + " when the domain grew from T = " +
                                      detail::fmt(a.T) + " to " + detail::fmt(b.T));
    }
  }
  const auto& last = rep.domains[rep.domains.size() - 1];
  const auto& prev = rep.domains[rep.domains.size() - 2];
  rep.stable = last.count == prev.count;
  return rep;
}

}  // namespace cusp
