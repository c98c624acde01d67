#pragma once

// Analytic layer: pure-point criteria, essential-spectrum thresholds and Weyl
// constants evaluated directly from a ProblemConfig, without discretization.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cuspspec/config.hpp"
#include "cuspspec/error.hpp"
#include "cuspspec/model.hpp"
#include "cuspspec/rational.hpp"
#include "cuspspec/zeta.hpp"

namespace cusp {

enum class Classification { PurePoint, EssentialFrom, Undetermined };
enum class WeylRegime { PowerN2, LogLaw, PowerHalfP };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::PurePoint: return "PurePoint";
    case Classification::EssentialFrom: return "EssentialFrom";
    case Classification::Undetermined: return "Undetermined";
  }
  return "?";
}

inline const char* to_string(WeylRegime r) {
  switch (r) {
    case WeylRegime::PowerN2: return "PowerN2";
    case WeylRegime::LogLaw: return "LogLaw";
    case WeylRegime::PowerHalfP: return "PowerHalfP";
  }
  return "?";
}

struct WeylConstants {
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> c3;
  double c3_tail_bound = 0.0;
  bool c3_fit_only = false;
  bool c3_derived = false;  // Schroedinger C3 via zeta(Delta^M + V0)
};

struct Prediction {
  Classification classification = Classification::Undetermined;
  double threshold = 0.0;          // inf of `thresholds` when EssentialFrom
  std::vector<double> thresholds;  // sorted, distinct
  WeylRegime regime = WeylRegime::PowerN2;
  double weyl_exponent = 1.0;      // n/2 or 1/(2p)
  WeylConstants constants;
  std::vector<std::string> notes;

  bool pure_point() const { return classification == Classification::PurePoint; }
  bool essential() const { return classification == Classification::EssentialFrom; }
};

// ---------------------------------------------------------------------------
// Predicates

/// The de Rham-type criterion for pure point spectrum of the k-form
/// Laplacian: h^k(M) = h^{k-1}(M) = 0.  `betti` is h^0..h^{n-1} of M.
inline bool full_ellipticity_forms(int n, int k, const std::vector<int>& betti) {
  require(k >= 0 && k <= n, "full_ellipticity_forms needs 0 <= k <= n");
  auto h = [&](int j) { return (j < 0 || j >= static_cast<int>(betti.size())) ? 0 : betti[static_cast<std::size_t>(j)]; };
  return h(k) == 0 && h(k - 1) == 0;
}

/// c0, c1 of the two harmonic sectors (degree-k and degree-(k-1) cohomology).
inline std::pair<double, double> harmonic_constants(int n, int k, double p) {
  const double c0 = ((2.0 * k + 2.0 - n) * p - 1.0) / 2.0;
  const double c1 = ((2.0 * k - 2.0 - n) * p + 1.0) / 2.0;
  return {c0, c1};
}

inline WeylRegime weyl_regime(int n, const Rational& p) {
  const Rational np = Rational(n) * p;
  if (np > Rational(1)) return WeylRegime::PowerN2;
  if (np == Rational(1)) return WeylRegime::LogLaw;
  return WeylRegime::PowerHalfP;
}

namespace detail {

inline void finish_thresholds(Prediction& pr) {
  std::sort(pr.thresholds.begin(), pr.thresholds.end());
  pr.thresholds.erase(std::unique(pr.thresholds.begin(), pr.thresholds.end()), pr.thresholds.end());
  if (pr.thresholds.empty()) {
    pr.classification = Classification::PurePoint;
    pr.threshold = 0.0;
  } else {
    pr.classification = Classification::EssentialFrom;
    pr.threshold = pr.thresholds.front();
  }
}

}  // namespace detail

/// Threshold set of the k-form Laplacian on the toy end:
///   p < 1: {} if h^k = h^{k-1} = 0, else {0};
///   p = 1: {c_i^2 : h^{k-i}(M) != 0};
///   p > 1: {}.
inline Prediction thresholds_forms(int n, int k, const Rational& p, const std::vector<int>& betti) {
  require(p > Rational(0), "thresholds_forms needs p > 0");
  require(k >= 0 && k <= n, "thresholds_forms needs 0 <= k <= n");
  auto h = [&](int j) { return (j < 0 || j >= static_cast<int>(betti.size())) ? 0 : betti[static_cast<std::size_t>(j)]; };
  Prediction pr;
  pr.regime = weyl_regime(n, p);
  if (p < Rational(1)) {
    if (h(k) != 0 || h(k - 1) != 0) pr.thresholds.push_back(0.0);
    pr.notes.emplace_back("p < 1: essential spectrum [0, inf) unless h^k = h^{k-1} = 0");
  } else if (p == Rational(1)) {
    const auto [c0, c1] = harmonic_constants(n, k, 1.0);
    if (h(k) != 0) pr.thresholds.push_back(c0 * c0);
    if (h(k - 1) != 0) pr.thresholds.push_back(c1 * c1);
    pr.notes.emplace_back("p = 1: thresholds c_i^2 of the harmonic sectors with nonzero cohomology");
  } else {
    pr.notes.emplace_back("p > 1 (toy metric): empty threshold set, every self-adjoint extension is discrete");
  }
  detail::finish_thresholds(pr);
  return pr;
}

/// Pure point criterion for the magnetic Laplacian on functions.  Essential
/// spectrum survives only when phi0 is constant, theta0 is closed and the
/// flux class is integral; then it is [0,inf), [((n-1)/2)^2, inf) or empty for
/// p < 1, p = 1, p > 1.
inline Prediction magnetic_pure_point(int n, const Rational& p, const MagneticData& mag) {
  Prediction pr;
  pr.regime = weyl_regime(n, p);
  const bool trivializable = mag.phi0_constant && mag.theta0_closed && mag.flux_integral();
  if (!trivializable) {
    if (!mag.phi0_constant) pr.notes.emplace_back("phi0 not constant: magnetic Laplacian is fully elliptic");
    else if (!mag.theta0_closed) pr.notes.emplace_back("theta0 not closed: magnetic Laplacian is fully elliptic");
    else pr.notes.emplace_back("flux class not integral (Aharonov-Bohm): magnetic Laplacian is fully elliptic");
  } else if (p < Rational(1)) {
    pr.thresholds.push_back(0.0);
    pr.notes.emplace_back("integral flux, p < 1: essential spectrum [0, inf)");
  } else if (p == Rational(1)) {
    const double c = 0.5 * (n - 1);
    pr.thresholds.push_back(c * c);
    pr.notes.emplace_back("integral flux, p = 1: essential spectrum [((n-1)/2)^2, inf)");
  } else {
    pr.notes.emplace_back("integral flux, p > 1: essential spectrum empty");
  }
  detail::finish_thresholds(pr);
  return pr;
}

/// Boundary data of V0 on one connected component of M.
struct V0Component {
  double min = 0.0;
  bool positive_somewhere = false;
};

/// V0 >= 0 on every component and positive somewhere on each.
inline bool schrodinger_pure_point(const std::vector<V0Component>& components) {
  if (components.empty()) return false;
  return std::all_of(components.begin(), components.end(),
                     [](const V0Component& c) { return c.min >= 0.0 && c.positive_somewhere; });
}

/// Lowest flux-shifted cross eigenvalue min_m |G (m + mu)|^2, the constant c
/// such that |V0| < c keeps a non-integral magnetic problem discrete.
inline double magnetic_schrodinger_bound(const CrossSection& cs, const std::vector<Rational>& flux) {
  if (!cs.is_lattice()) fail(ErrorCode::Unsupported, "magnetic bound needs a circle or torus cross-section");
  const std::size_t d = cs.dual.size();
  require(flux.size() == d, "flux must have b1(M) components");
  bool integral = true;
  for (const auto& f : flux) integral = integral && f.is_integer();
  if (integral) fail(ErrorCode::Validation, "integral flux: bound is zero; criterion vacuous");

  // shift mu into the unit cell around the origin, then search a box whose
  // radius is the length of that representative
  std::vector<double> mu(d);
  for (std::size_t i = 0; i < d; ++i) {
    const Rational f = flux[i];
    const double v = f.value();
    mu[i] = v - std::round(v);
  }
  auto norm2 = [&](const std::vector<double>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double k = 0.0;
      for (std::size_t j = 0; j < d; ++j) k += cs.dual[i][j] * (m[j] + mu[j]);
      s += k * k;
    }
    return s;
  };
  const std::vector<double> zero(d, 0.0);
  const double r = std::sqrt(norm2(zero));
  const Matrix inv = detail::inverse(cs.dual);
  std::vector<std::int64_t> lo(d), hi(d), m(d);
  for (std::size_t i = 0; i < d; ++i) {
    double rn = 0.0;
    for (std::size_t j = 0; j < d; ++j) rn += inv[i][j] * inv[i][j];
    const double reach = r * std::sqrt(rn);
    lo[i] = static_cast<std::int64_t>(std::floor(-mu[i] - reach));
    hi[i] = static_cast<std::int64_t>(std::ceil(-mu[i] + reach));
  }
  m = lo;
  double best = r * r;
  while (true) {
    std::vector<double> md(m.begin(), m.end());
    best = std::min(best, norm2(md));
    std::size_t i = 0;
    while (i < d && ++m[i] > hi[i]) {
      m[i] = lo[i];
      ++i;
    }
    if (i == d) break;
  }
  return best;
}

/// Weyl constants of the counting function of the end.
///   C1 = binom(n,k) Vol(end) |S^{n-1}| / (n (2pi)^n),           p > 1/n
///   C2 = binom(n,k) Vol(M) |S^{n-1}| / (2 (2pi)^n),             p = 1/n
///   C3 = Gamma((1-p)/2p) (zeta_k + zeta_{k-1}) / (2 sqrt(pi) Gamma(1/2p)),  p < 1/n
/// with zeta_j = sum' nu^{-(1-p)/(2p)} over the j-form spectrum of M shifted by V0.
inline WeylConstants weyl_constants(const ProblemConfig& cfg) {
  const int n = cfg.geometry.n;
  const int k = cfg.k;
  const Rational& p = cfg.geometry.p;
  const double pv = p.value();
  const auto& cs = cfg.cross_section;
  const double binom = static_cast<double>(detail::binomial(n, k));
  const double sphere = detail::unit_sphere_area(n);
  const double two_pi_n = std::pow(2.0 * M_PI, n);
  WeylConstants wc;
  switch (weyl_regime(n, p)) {
    case WeylRegime::PowerN2: {
      const double np = n * pv;
      const double vol_end = cs.volume * std::pow(cfg.geometry.y0, 1.0 - np) / (np - 1.0);
      wc.c1 = binom * vol_end * sphere / (n * two_pi_n);
      break;
    }
    case WeylRegime::LogLaw:
      wc.c2 = binom * cs.volume * sphere / (2.0 * two_pi_n);
      break;
    case WeylRegime::PowerHalfP: {
      if (cfg.magnetic) {
        wc.c3_fit_only = true;
        break;
      }
      const double s = (1.0 - pv) / (2.0 * pv);
      if (!(s > 0.5 * (n - 1)))
        fail(ErrorCode::Internal, "zeta argument (1-p)/(2p) must exceed (n-1)/2 for p < 1/n");
      const double shift = cfg.potential ? cfg.potential->v0(p) : 0.0;
      if (shift < 0.0) {
        wc.c3_fit_only = true;
        break;
      }
      const ZetaValue zk = form_zeta(cs, k, s, shift);
      const ZetaValue zk1 = form_zeta(cs, k - 1, s, shift);
      const double pref = std::tgamma((1.0 - pv) / (2.0 * pv)) / (2.0 * std::sqrt(M_PI) * std::tgamma(1.0 / (2.0 * pv)));
      wc.c3 = pref * (zk.value + zk1.value);
      wc.c3_tail_bound = pref * (zk.tail_bound + zk1.tail_bound);
      wc.c3_derived = shift != 0.0;
      break;
    }
  }
  return wc;
}

/// Full analytic prediction for a validated configuration.
inline Prediction predict(const ProblemConfig& cfg) {
  const int n = cfg.geometry.n;
  const Rational& p = cfg.geometry.p;
  const auto& cs = cfg.cross_section;

  Prediction pr;
  if (cfg.k == 0 && cfg.magnetic) {
    pr = magnetic_pure_point(n, p, *cfg.magnetic);
    if (cfg.magnetic->phi0_constant && cfg.magnetic->phi0 != 0.0)
      pr.notes.emplace_back("constant phi0 = " + detail::fmt(cfg.magnetic->phi0) + " removed by the gauge u -> e^{i phi0 y} u");
  } else {
    pr = thresholds_forms(n, cfg.k, p, cs.betti);
    if (full_ellipticity_forms(n, cfg.k, cs.betti))
      pr.notes.emplace_back("h^k(M) = h^{k-1}(M) = 0: fully elliptic, pure point spectrum");
  }

  if (cfg.potential) {
    const auto& pot = *cfg.potential;
    const double v0 = pot.v0(p);
    bool bounded = true;  // every power term has exponent <= 0
    double constant_shift = 0.0;
    for (const auto& t : pot.poly) {
      if (t.exponent > Rational(0)) bounded = false;
      if (t.exponent == Rational(0)) constant_shift += t.coef;
    }
    // the potential decides the classification, so its reason comes first
    auto lead = [&](std::string note) { pr.notes.insert(pr.notes.begin(), std::move(note)); };
    std::optional<double> mag_bound;
    if (cfg.magnetic && cfg.magnetic->phi0_constant && cfg.magnetic->theta0_closed && !cfg.magnetic->flux_integral() &&
        cs.is_lattice())
      mag_bound = magnetic_schrodinger_bound(cs, cfg.magnetic->flux);

    if (schrodinger_pure_point({V0Component{v0, v0 > 0.0}})) {
      pr.thresholds.clear();
      detail::finish_thresholds(pr);
      lead("V0 = " + detail::fmt(v0) + " >= 0 and positive on M: Schroedinger operator is fully elliptic");
    } else if (pr.pure_point() && cfg.magnetic && mag_bound && std::abs(v0) < *mag_bound) {
      lead("|V0| = " + detail::fmt(std::abs(v0)) + " < c = " + detail::fmt(*mag_bound) +
                            ": magnetic Schroedinger operator stays discrete");
    } else if (pr.pure_point() && cfg.magnetic && v0 == 0.0) {
      lead("V0 = 0 with a fully elliptic magnetic Laplacian: discreteness preserved");
    } else if (bounded) {
      for (auto& t : pr.thresholds) t += constant_shift;
      detail::finish_thresholds(pr);
      lead("bounded potential: thresholds shifted by its constant part " + detail::fmt(constant_shift));
    } else {
      pr.classification = Classification::Undetermined;
      pr.thresholds.clear();
      lead("potential is neither bounded nor covered by a pure point criterion (V0 = " + detail::fmt(v0) + ")");
    }
    if (pot.bump) pr.notes.emplace_back("compactly supported bump does not change the essential spectrum");
  }

  pr.regime = weyl_regime(n, p);
  pr.weyl_exponent = pr.regime == WeylRegime::PowerHalfP ? 1.0 / (2.0 * p.value()) : 0.5 * n;
  pr.constants = weyl_constants(cfg);
  if (pr.constants.c3_fit_only) pr.notes.emplace_back("C3 reported as fit-only for this problem class");
  if (pr.constants.c3_derived)
    pr.notes.emplace_back("C3 uses zeta(Delta^M + V0) (derived interpretation for the Schroedinger operator)");
  return pr;
}

}  // namespace cusp
