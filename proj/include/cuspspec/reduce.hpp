#pragma once

// Separation of variables on the end [Y0, inf) x M.  Every cross-section mode
// gives a weighted Sturm-Liouville operator in y,
//
//   Q(f) = int y^{e1} |f'|^2 dy + int q(y) |f|^2 y^{e0} dy,
//
// with density weight y^{e0}.  All coefficients are power laws, so the
// operators are described by exponents and a term list, never symbolically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cuspspec/config.hpp"
#include "cuspspec/criteria.hpp"
#include "cuspspec/error.hpp"
#include "cuspspec/model.hpp"
#include "cuspspec/rational.hpp"

namespace cusp {

enum class Sector { Function, FormHarmonic0, FormHarmonic1 };

inline const char* to_string(Sector s) {
  switch (s) {
    case Sector::Function: return "function";
    case Sector::FormHarmonic0: return "form_harmonic_0";
    case Sector::FormHarmonic1: return "form_harmonic_1";
  }
  return "?";
}

struct ModeSpec {
  std::string label;                 // "m=(-1,2)", "table#3", "sector0"
  std::vector<std::int64_t> lattice; // lattice vector m (circle/torus)
  double nu = 0.0;                   // cross eigenvalue
  int multiplicity = 1;
  Sector sector = Sector::Function;
};

/// q(y) term  coef * y^exponent.
struct RadialTerm {
  double coef = 0.0;
  double exponent = 0.0;
  std::string label;
};

struct RadialOperator {
  double density_exponent = 0.0;    // w0 = y^{e0}
  double stiffness_exponent = 0.0;  // w1 = y^{e1}
  std::vector<RadialTerm> potential;
  std::optional<Bump> bump;
  double p = 1.0;   // conformal exponent; the mesh variable is s = int y^{-p} dy
  double y0 = 1.0;
  std::optional<double> ymax;  // nullopt: the end extends to infinity

  double q(double y) const {
    double v = 0.0;
    for (const auto& t : potential) v += t.coef * std::pow(y, t.exponent);
    if (bump) v += (*bump)(y);
    return v;
  }
  std::string potential_string() const {
    std::string out;
    for (const auto& t : potential) {
      if (!out.empty()) out += " + ";
      out += detail::fmt(t.coef) + "*y^" + detail::fmt(t.exponent);
    }
    if (bump) out += (out.empty() ? "" : " + ") + std::string("bump");
    return out.empty() ? "0" : out;
  }
};

/// -v'' + W(z) v on (z0, z0 + length) with flat measure.
struct CanonicalOperator {
  double z0 = 0.0;
  double p = 1.0;
  double y0 = 1.0;
  std::function<double(double)> W;
  std::function<double(double)> y_of_z;
};

// ---------------------------------------------------------------------------
// mesh variable s = int_{Y0}^{y} t^{-p} dt, dy/ds = y^p

namespace detail {

inline double y_of_s(double s, double p, double y0) {
  if (p == 1.0) return y0 * std::exp(s);
  return std::pow(std::pow(y0, 1.0 - p) + (1.0 - p) * s, 1.0 / (1.0 - p));
}

inline double s_of_y(double y, double p, double y0) {
  if (p == 1.0) return std::log(y / y0);
  return (std::pow(y, 1.0 - p) - std::pow(y0, 1.0 - p)) / (1.0 - p);
}

}  // namespace detail

/// Length of the mesh interval for a domain parameter T.  For p <= 1, T is
/// the z-length (z = ln y or y^{1-p}/(1-p)); for p > 1 the end has finite
/// length and T is read as ln(Ymax/Y0).
inline double mesh_length(double p, double y0, double T) {
  if (p <= 1.0) return T;
  return detail::s_of_y(y0 * std::exp(T), p, y0);
}

// ---------------------------------------------------------------------------

/// Flux-shifted cross eigenvalue |G (m + mu)|^2.
inline double cross_eigenvalue(const CrossSection& cs, const std::vector<std::int64_t>& m,
                               const std::vector<double>& flux) {
  if (!cs.is_lattice()) {
    if (!flux.empty()) fail(ErrorCode::Unsupported, "flux on a table cross-section is unsupported");
    fail(ErrorCode::Unsupported, "cross_eigenvalue needs a circle or torus cross-section");
  }
  const std::size_t d = cs.dual.size();
  require(m.size() == d, "lattice vector has the wrong dimension");
  require(flux.empty() || flux.size() == d, "flux has the wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double k = 0.0;
    for (std::size_t j = 0; j < d; ++j) k += cs.dual[i][j] * (static_cast<double>(m[j]) + (flux.empty() ? 0.0 : flux[j]));
    s += k * k;
  }
  return s;
}

/// Removes a constant phi0 by the gauge u -> e^{i phi0 y} u.
inline std::pair<MagneticData, std::string> gauge_reduce(const MagneticData& mag) {
  if (!mag.phi0_constant)
    fail(ErrorCode::Unsupported, "outside implemented class; phi0 not constant, the magnetic Laplacian is predicted pure point");
  MagneticData out = mag;
  std::string note;
  if (mag.phi0 != 0.0) note = "constant phi0 = " + detail::fmt(mag.phi0) + " removed by the gauge u -> e^{i phi0 y} u";
  out.phi0 = 0.0;
  return {out, note};
}

/// Lower bound for inf_{y >= Y0} (nu y^{2p} + V(y)): every Rayleigh quotient of
/// the mode operator lies above it.  Negative terms of intermediate growth are
/// absorbed into half of the leading term by Young's inequality.
inline double mode_lower_bound(double nu, const Rational& p, double y0, const std::optional<RadialPotential>& pot) {
  const double two_p = 2.0 * p.value();
  double lead = nu;
  std::vector<std::pair<double, double>> rest;  // (coef, exponent) below 2p
  if (pot) {
    for (const auto& t : pot->poly) {
      if (t.exponent == Rational(2) * p) lead += t.coef;
      else rest.emplace_back(t.coef, t.exponent.value());
    }
  }
  const double Y = std::pow(y0, two_p);
  double bound = 0.0;
  std::vector<std::pair<double, double>> young;  // negative terms with 0 < b < 2p
  for (const auto& [a, b] : rest) {
    if (a >= 0.0) bound += b >= 0.0 ? a * std::pow(y0, b) : 0.0;
    else if (b <= 0.0) bound += a * std::pow(y0, b);
    else young.emplace_back(a, b);
  }
  if (pot && pot->bump) bound += std::min(0.0, pot->bump->height);
  if (young.empty()) {
    if (lead < 0.0) return -std::numeric_limits<double>::infinity();
    return bound + lead * Y;
  }
  if (lead <= 0.0) return -std::numeric_limits<double>::infinity();
  // |a| t^r <= eps t + eps t*(1-r)/r with t* = (r|a|/eps)^{1/(1-r)}, t = y^{2p}
  const double eps = 0.5 * lead / static_cast<double>(young.size());
  for (const auto& [a, b] : young) {
    const double r = b / two_p;
    const double tstar = std::pow(r * std::abs(a) / eps, 1.0 / (1.0 - r));
    bound -= eps * tstar * (1.0 - r) / r;
  }
  return bound + 0.5 * lead * Y;
}

/// Cross-section modes whose radial operator can have spectrum <= lambda_max.
/// For forms (k >= 1) only the two harmonic sectors are built; the coexact
/// high-energy part has compact resolvent and is accounted for analytically.
inline std::vector<ModeSpec> enumerate_modes(const ProblemConfig& cfg, double lambda_max) {
  require(lambda_max >= 0.0 && std::isfinite(lambda_max), "lambda_max must be >= 0");
  const auto& cs = cfg.cross_section;
  const Rational& p = cfg.geometry.p;
  const double y0 = cfg.geometry.y0;
  std::vector<ModeSpec> modes;

  if (cfg.k >= 1) {
    const int h0 = cs.betti_at(cfg.k), h1 = cs.betti_at(cfg.k - 1);
    if (h0 > 0) modes.push_back({"sector0", {}, 0.0, h0, Sector::FormHarmonic0});
    if (h1 > 0) modes.push_back({"sector1", {}, 0.0, h1, Sector::FormHarmonic1});
    return modes;
  }

  auto keep = [&](double nu) { return mode_lower_bound(nu, p, y0, cfg.potential) <= lambda_max; };

  if (!cs.is_lattice()) {
    if (cfg.magnetic && !cfg.magnetic->flux.empty()) fail(ErrorCode::Unsupported, "flux on a table cross-section is unsupported");
    require(!cs.table.empty(), "table cross-section has no degree-0 spectrum");
    int idx = 0;
    for (const auto& e : cs.table[0]) {
      if (keep(e.eigenvalue)) modes.push_back({"table#" + std::to_string(idx), {}, e.eigenvalue, e.multiplicity, Sector::Function});
      ++idx;
      if (static_cast<int>(modes.size()) > cfg.numerics.mode_cap)
        fail(ErrorCode::Numerical, "mode count exceeds mode_cap = " + std::to_string(cfg.numerics.mode_cap) + "; lower lambda_max");
    }
    return modes;
  }

  const std::size_t d = cs.dual.size();
  std::vector<double> flux(d, 0.0);
  if (cfg.magnetic) flux = cfg.magnetic->flux_values();

  // the bound is increasing in nu: bisect for the largest admissible nu
  double nu_hi = 1.0;
  while (keep(nu_hi)) {
    nu_hi *= 2.0;
    if (nu_hi > 1e300) fail(ErrorCode::Numerical, "mode cutoff does not terminate");
  }
  double nu_lo = 0.0;
  if (!keep(0.0)) nu_lo = -1.0;
  for (int it = 0; it < 200 && nu_lo >= 0.0; ++it) {
    const double mid = 0.5 * (nu_lo + nu_hi);
    (keep(mid) ? nu_lo : nu_hi) = mid;
  }
  const double nu_max = nu_hi;

  const Matrix inv = detail::inverse(cs.dual);
  const double radius = std::sqrt(nu_max);
  std::vector<std::int64_t> lo(d), hi(d), m(d);
  for (std::size_t i = 0; i < d; ++i) {
    double rn = 0.0;
    for (std::size_t j = 0; j < d; ++j) rn += inv[i][j] * inv[i][j];
    const double reach = radius * std::sqrt(rn);
    lo[i] = static_cast<std::int64_t>(std::floor(-flux[i] - reach)) - 1;
    hi[i] = static_cast<std::int64_t>(std::ceil(-flux[i] + reach)) + 1;
  }
  m = lo;
  while (true) {
    const double nu = cross_eigenvalue(cs, m, flux);
    if (keep(nu)) {
      std::string label = "m=(";
      for (std::size_t i = 0; i < d; ++i) label += (i ? "," : "") + std::to_string(m[i]);
      modes.push_back({label + ")", m, nu, 1, Sector::Function});
      if (static_cast<int>(modes.size()) > cfg.numerics.mode_cap)
        fail(ErrorCode::Numerical, "mode count exceeds mode_cap = " + std::to_string(cfg.numerics.mode_cap) +
                                       "; lower lambda_max");
    }
    std::size_t i = 0;
    while (i < d && ++m[i] > hi[i]) {
      m[i] = lo[i];
      ++i;
    }
    if (i == d) break;
  }
  std::stable_sort(modes.begin(), modes.end(), [](const ModeSpec& a, const ModeSpec& b) { return a.nu < b.nu; });
  return modes;
}

/// Scalar (possibly magnetic) mode operator: w0 = y^{-np}, w1 = y^{(2-n)p},
/// q = nu y^{2p} + V(y).
inline RadialOperator scalar_radial_operator(const ModeSpec& mode, const EndGeometry& g, int k,
                                             const std::optional<RadialPotential>& pot) {
  if (k != 0) fail(ErrorCode::Validation, "scalar_radial_operator requires k = 0");
  const double p = g.p_value();
  RadialOperator op;
  op.density_exponent = -g.n * p;
  op.stiffness_exponent = (2.0 - g.n) * p;
  op.p = p;
  op.y0 = g.y0;
  if (mode.nu != 0.0) op.potential.push_back({mode.nu, 2.0 * p, "nu*y^{2p}"});
  if (pot) {
    for (const auto& t : pot->poly) op.potential.push_back({t.coef, t.exponent.value(), "V"});
    op.bump = pot->bump;
  }
  return op;
}

/// Harmonic-sector operator of the k-form Laplacian: measure y^{(2k-n)p},
///   Q(f) = int |y^p f' + c0 y^{p-1} f|^2 w0 + c_i^2 int y^{2p-2} |f|^2 w0,
/// expanded by parts into stiffness y^{(2k+2-n)p} and potential K y^{2p-2},
/// K = c0^2 - c0 (2p - 1 + (2k-n)p) + c_i^2.
inline RadialOperator harmonic_form_radial_operator(int n, int k, const Rational& p_exact, int sector, double y0 = 1.0) {
  require(k >= 0 && k <= n, "harmonic_form_radial_operator needs 0 <= k <= n");
  require(sector == 0 || sector == 1, "sector must be 0 or 1");
  const double p = p_exact.value();
  const auto [c0, c1] = harmonic_constants(n, k, p);
  const double ci = sector == 0 ? c0 : c1;
  const double e0 = (2.0 * k - n) * p;
  RadialOperator op;
  op.density_exponent = e0;
  op.stiffness_exponent = (2.0 * k + 2.0 - n) * p;
  op.p = p;
  op.y0 = y0;
  const double K = c0 * c0 - c0 * (2.0 * p - 1.0 + e0) + ci * ci;
  if (K != 0.0) op.potential.push_back({K, 2.0 * p - 2.0, "c-term"});
  return op;
}

/// Radial operator for one enumerated mode of a configuration.
inline RadialOperator mode_operator(const ProblemConfig& cfg, const ModeSpec& mode) {
  if (mode.sector == Sector::Function) {
    if (cfg.k != 0) fail(ErrorCode::Internal, "function mode for k > 0");
    RadialOperator op = scalar_radial_operator(mode, cfg.geometry, 0, cfg.potential);
    return op;
  }
  RadialOperator op = harmonic_form_radial_operator(cfg.geometry.n, cfg.k, cfg.geometry.p,
                                                    mode.sector == Sector::FormHarmonic0 ? 0 : 1, cfg.geometry.y0);
  if (cfg.potential) {
    for (const auto& t : cfg.potential->poly) op.potential.push_back({t.coef, t.exponent.value(), "V"});
    op.bump = cfg.potential->bump;
  }
  return op;
}

/// Threshold that the analytic theory attaches to one mode (the limit of its
/// Liouville potential), if it has essential spectrum at all.
inline std::optional<double> mode_threshold(const ProblemConfig& cfg, const ModeSpec& mode) {
  const Rational& p = cfg.geometry.p;
  if (p > Rational(1)) return std::nullopt;
  double shift = 0.0;
  if (cfg.potential) {
    for (const auto& t : cfg.potential->poly) {
      if (t.exponent > Rational(0)) return std::nullopt;  // grows (or V0 != 0): no uniform limit
      if (t.exponent == Rational(0)) shift += t.coef;
    }
  }
  if (mode.sector == Sector::Function) {
    if (mode.nu != 0.0) return std::nullopt;
    if (p < Rational(1)) return shift;
    const double c = 0.5 * (cfg.geometry.n - 1);
    return c * c + shift;
  }
  if (p < Rational(1)) return shift;
  const auto [c0, c1] = harmonic_constants(cfg.geometry.n, cfg.k, 1.0);
  const double c = mode.sector == Sector::FormHarmonic0 ? c0 : c1;
  return c * c + shift;
}

/// Liouville normal form: with ds = y^{-p} dy and sigma = (w0 w1)^{1/4},
/// f = v / sigma turns the operator into -v'' + (q + sigma''/sigma) v.  For
/// power weights sigma = y^g, g = (e0 + e1)/4, and sigma''/sigma = g (g + p - 1) y^{2p-2}.
inline CanonicalOperator liouville_transform(const RadialOperator& op) {
  const double p = op.p;
  if (p > 1.0) fail(ErrorCode::Unsupported, "Liouville transform is implemented for p <= 1 only");
  if (std::abs(op.density_exponent - op.stiffness_exponent + 2.0 * p) > 1e-12)
    fail(ErrorCode::Unsupported, "Liouville transform needs w0/w1 = y^{-2p}");
  const double g = 0.25 * (op.density_exponent + op.stiffness_exponent);
  const double corr = g * (g + p - 1.0);
  CanonicalOperator c;
  c.p = p;
  c.y0 = op.y0;
  auto y_of_z = [p](double z) { return p == 1.0 ? std::exp(z) : std::pow((1.0 - p) * z, 1.0 / (1.0 - p)); };
  c.z0 = p == 1.0 ? std::log(op.y0) : std::pow(op.y0, 1.0 - p) / (1.0 - p);
  c.y_of_z = y_of_z;
  c.W = [op, corr, p, y_of_z](double z) {
    const double y = y_of_z(z);
    return op.q(y) + corr * std::pow(y, 2.0 * p - 2.0);
  };
  return c;
}

}  // namespace cusp
