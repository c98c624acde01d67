#pragma once

// Mode-level spectra aggregated into global counting functions, detection of
// the essential-spectrum threshold from domain growth, Weyl fits, and the
// cut / perturbation invariance checks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cuspspec/config.hpp"
#include "cuspspec/criteria.hpp"
#include "cuspspec/error.hpp"
#include "cuspspec/model.hpp"
#include "cuspspec/parallel.hpp"
#include "cuspspec/reduce.hpp"
#include "cuspspec/sturm.hpp"

namespace cusp {

/// Modes with the same cross eigenvalue have identical radial operators and
/// are solved once.
struct ModeGroup {
  std::string label;
  std::vector<std::string> members;
  double nu = 0.0;
  int multiplicity = 0;
  Sector sector = Sector::Function;
  ModeSpec representative;
};

inline std::vector<ModeGroup> group_modes(const std::vector<ModeSpec>& modes) {
  std::vector<ModeGroup> groups;
  for (const auto& m : modes) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const ModeGroup& g) {
      return g.sector == m.sector && std::abs(g.nu - m.nu) <= 1e-12 * std::max(1.0, std::abs(m.nu));
    });
    if (it == groups.end()) {
      groups.push_back({std::to_string(groups.size()), {m.label}, m.nu, m.multiplicity, m.sector, m});
    } else {
      it->members.push_back(m.label);
      it->multiplicity += m.multiplicity;
    }
  }
  std::stable_sort(groups.begin(), groups.end(), [](const ModeGroup& a, const ModeGroup& b) {
    if (a.sector != b.sector) return a.sector < b.sector;
    return a.nu < b.nu;
  });
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i].label = std::to_string(i);
  return groups;
}

// ---------------------------------------------------------------------------
// global counting

struct ModeSpectrum {
  ModeGroup group;
  std::vector<double> eigenvalues;  // extrapolated, ascending
  std::vector<int> counts;          // on the lambda grid, eigenvalues <= lambda
  double domain = 0.0;              // domain parameter T used
  int N = 0;                        // coarsest interior point count
  bool confined = true;             // potential exceeded the cutoff inside the domain
  bool stable = true;               // counts agree with the 1.25x domain
};

struct ThresholdEstimate;

struct SpectrumReport {
  Prediction prediction;
  std::vector<double> lambda_grid;
  std::vector<ModeSpectrum> modes;
  std::vector<long long> N_total;
  bool truncation_dependent = false;
  bool stable = true;
  double discrete_below = 0.0;  // largest grid lambda for which every count is domain-stable
  std::vector<std::string> notes;
};

namespace detail {

/// Smallest domain parameter T at which q(y) >= level, or nullopt if not
/// reached before T_cap.
inline std::optional<double> confinement_domain(const RadialOperator& op, double level, double T_cap) {
  auto q_at = [&](double T) {
    const double y = op.p <= 1.0 ? y_of_s(T, op.p, op.y0) : op.y0 * std::exp(T);
    return op.q(y);
  };
  double T = 0.25;
  while (T <= T_cap) {
    if (q_at(T) >= level) {
      double lo = T / 2.0, hi = T;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (q_at(mid) >= level ? hi : lo) = mid;
      }
      return hi;
    }
    T *= 1.25;
  }
  return std::nullopt;
}

inline int count_le(const std::vector<double>& sorted, double lambda) {
  return static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(), lambda) - sorted.begin());
}

}  // namespace detail

/// N(lambda) = sum over modes of multiplicity * count, on the given grid.
/// Each mode is solved on a domain reaching q >= 2 lambda_max, with a mesh of
/// `ppw` points per local wavelength at lambda_max, one refinement and
/// Richardson extrapolation; domain stability is checked against a domain
/// 1.25 times longer.
inline SpectrumReport global_counting(const ProblemConfig& cfg, std::vector<double> lambda_grid, int jobs = 1) {
  require(!lambda_grid.empty(), "lambda grid is empty");
  std::sort(lambda_grid.begin(), lambda_grid.end());
  SpectrumReport rep;
  rep.prediction = predict(cfg);
  rep.lambda_grid = lambda_grid;
  rep.truncation_dependent = !rep.prediction.pure_point();
  if (rep.truncation_dependent)
    rep.notes.emplace_back("truncation-dependent: essential spectrum predicted, counts grow with the domain");

  const double lmax = lambda_grid.back();
  const double lsolve = lmax * 1.02 + 0.1;
  const auto groups = group_modes(enumerate_modes(cfg, lsolve));
  const double T_open = *std::max_element(cfg.numerics.domains.begin(), cfg.numerics.domains.end());
  const double ppw = cfg.numerics.ppw;

  rep.modes = parallel_map(groups.size(), jobs, [&](std::size_t gi) {
    ModeSpectrum ms;
    ms.group = groups[gi];
    const RadialOperator op = mode_operator(cfg, groups[gi].representative);
    // modes that never reach the level (harmonic modes below an essential
    // threshold) are cut at the largest configured domain
    const auto Tc = detail::confinement_domain(op, 2.0 * lsolve + 1.0, 1e5);
    ms.confined = Tc.has_value();
    ms.domain = Tc ? std::max(*Tc, 1.0) : T_open;
    const double L = mesh_length(op.p, op.y0, ms.domain);
    const double h = 2.0 * M_PI / (std::sqrt(lsolve) * ppw);
    ms.N = std::max(16, static_cast<int>(std::ceil(L / h)));
    DomainRun run;
    run.T = ms.domain;
    for (int N : {ms.N, 2 * ms.N + 1}) {
      const TridiagonalPencil P = discretize(op, ms.domain, N);
      run.grids.push_back({N, P.h, 0, eigenvalues_below(P, lsolve, cfg.numerics.tol)});
    }
    extrapolate(run);
    ms.eigenvalues = run.extrapolated;
    // domain stability: the fine-mesh counts on a 1.25x longer domain, at the
    // same step, must match
    const double T_long = 1.25 * ms.domain;
    const double h_fine = run.grids.back().h;
    const int N_long = static_cast<int>(std::ceil(mesh_length(op.p, op.y0, T_long) / h_fine)) - 1;
    const TridiagonalPencil P_short = discretize(op, ms.domain, 2 * ms.N + 1);
    const TridiagonalPencil P_long = discretize(op, T_long, std::max(N_long, 3));
    ms.counts.reserve(lambda_grid.size());
    for (double l : lambda_grid) {
      ms.counts.push_back(detail::count_le(ms.eigenvalues, l));
      if (count_below(P_short, l) != count_below(P_long, l)) ms.stable = false;
    }
    return ms;
  });

  rep.N_total.assign(lambda_grid.size(), 0);
  rep.discrete_below = lmax;
  for (const auto& ms : rep.modes) {
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) rep.N_total[i] += static_cast<long long>(ms.group.multiplicity) * ms.counts[i];
    if (!ms.stable) {
      rep.stable = false;
      for (double l : lambda_grid)
        if (!ms.eigenvalues.empty() && l >= ms.eigenvalues.front()) {
          rep.discrete_below = std::min(rep.discrete_below, l);
          break;
        }
    }
    if (!ms.confined && !rep.truncation_dependent)
      rep.notes.emplace_back("mode " + ms.group.label + " not confined within the largest domain");
  }
  if (!rep.stable && rep.prediction.pure_point())
    rep.notes.emplace_back("discrepancy: counts change with the domain although pure point spectrum is predicted");
  return rep;
}

/// Default log-spaced grid from the numerics block.
inline std::vector<double> lambda_grid(const Numerics& num, std::optional<double> lambda_max = std::nullopt) {
  const double lo = num.lambda_min;
  const double hi = lambda_max.value_or(num.lambda_max);
  require(hi > lo, "lambda_max must exceed lambda_min");
  std::vector<double> g(static_cast<std::size_t>(num.lambda_count));
  for (int i = 0; i < num.lambda_count; ++i)
    g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (num.lambda_count - 1));
  g.back() = hi;
  return g;
}

// ---------------------------------------------------------------------------
// threshold probe

struct ModeProbe {
  std::string label;
  double nu = 0.0;
  int multiplicity = 0;
  Sector sector = Sector::Function;
  std::optional<double> predicted;
  bool growing = false;
  bool stable = false;
  double estimate = 0.0;
  double error = 0.0;
  std::vector<double> lambdas;
  std::vector<double> rates;     // d n_T / dT
  std::vector<double> c_values;  // lambda - (pi rate)^2
  std::vector<int> counts;       // counts below the window top per domain
};

struct ThresholdEstimate {
  bool found = false;
  bool inconclusive = false;
  bool discrete_in_window = false;
  double value = 0.0;
  double error = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::optional<double> predicted;
  std::vector<ModeProbe> modes;
  std::string note;
};

namespace detail {

/// Continuous count n(lambda): equals j at the j-th eigenvalue and is linear
/// in sqrt(lambda - c) in between, which is exact for -d^2 + c.
inline double smooth_count(const std::vector<double>& E, double lambda, double c) {
  const auto j = static_cast<std::size_t>(std::upper_bound(E.begin(), E.end(), lambda) - E.begin());  // E[j-1] <= lambda < E[j]
  if (j == 0 || j >= E.size()) return std::nan("");
  const double a = E[j - 1], b = E[j];
  double t;
  if (a > c) t = (std::sqrt(lambda - c) - std::sqrt(a - c)) / (std::sqrt(b - c) - std::sqrt(a - c));
  else t = (lambda - a) / (b - a);
  return static_cast<double>(j) + t;
}

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

/// Runs the domain-growth probe on one radial operator.  `c_ref` is the
/// threshold the decision line rho_min = 0.5 sqrt(lambda - c_ref)/pi refers to.
inline ModeProbe probe_operator(const RadialOperator& op, std::pair<double, double> window, std::optional<double> c_ref,
                                const Numerics& num) {
  require(num.domains.size() >= 3, "threshold probe needs at least three domain lengths");
  require(window.second > window.first, "threshold window needs lo < hi");
  ModeProbe mp;
  mp.predicted = c_ref;
  const double top = window.second + std::max(1.0, window.second - window.first);
  const ConvergenceReport cr = converge(op, top, num.grids, num.domains, num.tol);

  std::vector<double> Ts;
  std::vector<std::vector<double>> E;
  for (const auto& d : cr.domains) {
    Ts.push_back(d.T);
    std::vector<double> e;
    for (double v : d.extrapolated)
      if (v < top) e.push_back(v);
    E.push_back(std::move(e));
    mp.counts.push_back(detail::count_le(E.back(), window.second));
  }
  mp.stable = mp.counts[mp.counts.size() - 1] == mp.counts[mp.counts.size() - 2];

  // sample lambda between the second eigenvalue of the shortest domain and
  // the last eigenvalue every domain resolves
  if (E.front().size() < 2) return mp;
  double a = std::max(window.first, E.front()[1]);
  double b = window.second;
  for (const auto& e : E) b = std::min(b, e.back());
  if (!(b > a)) return mp;
  const int samples = 41;
  const double dl = (b - a) / (samples - 1);
  const double line_c = c_ref.value_or(window.first);
  double lowest = E.back().front();
  double c_guess = std::min(c_ref.value_or(window.first), lowest - 1e-9);

  for (int iter = 0; iter < 4; ++iter) {
    mp.lambdas.clear();
    mp.rates.clear();
    mp.c_values.clear();
    for (int i = 0; i < samples; ++i) {
      const double l = a + dl * i;
      std::vector<double> n;
      for (const auto& e : E) n.push_back(detail::smooth_count(e, l, c_guess));
      if (std::any_of(n.begin(), n.end(), [](double v) { return !std::isfinite(v); })) continue;
      const double rho = detail::ls_slope(Ts, n);
      mp.lambdas.push_back(l);
      mp.rates.push_back(rho);
      mp.c_values.push_back(l - M_PI * M_PI * rho * rho);
    }
    std::vector<double> grow_c;
    for (std::size_t i = 0; i < mp.lambdas.size(); ++i) {
      const double l = mp.lambdas[i];
      if (l <= line_c) continue;
      const double rho_min = 0.5 * std::sqrt(l - line_c) / M_PI;
      if (mp.rates[i] >= rho_min) grow_c.push_back(mp.c_values[i]);
    }
    mp.growing = !mp.lambdas.empty() && 2 * grow_c.size() >= mp.lambdas.size();
    if (!mp.growing) break;
    const double mean = std::accumulate(grow_c.begin(), grow_c.end(), 0.0) / static_cast<double>(grow_c.size());
    double var = 0.0;
    for (double c : grow_c) var += (c - mean) * (c - mean);
    const double sd = grow_c.size() > 1 ? std::sqrt(var / static_cast<double>(grow_c.size() - 1)) : 0.0;
    mp.estimate = mean;
    mp.error = std::max(sd, 0.5 * dl);
    c_guess = std::min(mean, lowest - 1e-9);
  }
  return mp;
}

/// Estimate of inf sigma_ess from linear-in-length growth of the counts of
/// every mode that can reach the window.
inline ThresholdEstimate threshold_probe(const ProblemConfig& cfg, std::optional<std::pair<double, double>> window = std::nullopt,
                                         int jobs = 1) {
  ThresholdEstimate te;
  const Prediction pred = predict(cfg);
  if (pred.essential()) te.predicted = pred.threshold;
  if (window) te.window = *window;
  else if (cfg.numerics.window) te.window = *cfg.numerics.window;
  else te.window = {0.0, std::max(2.0, 2.0 * pred.threshold + 1.0)};
  require(cfg.numerics.domains.size() >= 3, "threshold probe needs at least three domain lengths");

  const auto groups = group_modes(enumerate_modes(cfg, te.window.second));
  te.modes = parallel_map(groups.size(), jobs, [&](std::size_t gi) {
    const auto& g = groups[gi];
    const RadialOperator op = mode_operator(cfg, g.representative);
    ModeProbe mp = probe_operator(op, te.window, mode_threshold(cfg, g.representative), cfg.numerics);
    mp.label = g.label;
    mp.nu = g.nu;
    mp.multiplicity = g.multiplicity;
    mp.sector = g.sector;
    return mp;
  });

  bool all_stable = true;
  for (const auto& mp : te.modes) {
    if (mp.growing && (!te.found || mp.estimate < te.value)) {
      te.found = true;
      te.value = mp.estimate;
      te.error = mp.error;
    }
    all_stable = all_stable && mp.stable;
  }
  if (!te.found) {
    if (all_stable) {
      te.discrete_in_window = true;
      te.note = "no growth: counts stable across domains, discrete below " + detail::fmt(te.window.second);
    } else {
      te.inconclusive = true;
      te.note = "inconclusive: counts neither grow with the domain nor stay stable";
    }
  }
  return te;
}

// ---------------------------------------------------------------------------
// Weyl fits

struct WeylFit {
  WeylRegime regime = WeylRegime::PowerN2;
  double exponent = 0.0;           // free log-log slope
  double theory_exponent = 0.0;
  double constant = 0.0;           // C1 / C3 with the exponent fixed, or C2
  double intercept = 0.0;          // log law: D in N/lambda^{n/2} = C2 log lambda + D; power law: next-order coefficient
  double residual = 0.0;           // rms of the log-log fit
  double raw_exponent = 0.0;       // same fits without the boundary term
  double raw_constant = 0.0;
  double boundary_coef = 0.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  long long n_lo = 0, n_hi = 0;
  std::size_t points = 0;
};

/// Second Weyl term of the Dirichlet cut at Y0: the truncated end has a
/// boundary that the closed manifold does not, and it removes
/// (1/4) |B^{n-1}| Vol(boundary) lambda^{(n-1)/2} / (2 pi)^{n-1} eigenvalues.
struct BoundaryTerm {
  double coef = 0.0;
  double exponent = 0.5;
};

inline BoundaryTerm dirichlet_boundary_term(const ProblemConfig& cfg) {
  const int d = cfg.geometry.n - 1;
  const double ball = std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  const double area = cfg.cross_section.volume * std::pow(cfg.geometry.y0, -d * cfg.geometry.p_value());
  return {0.25 * ball * area / std::pow(2.0 * M_PI, d), 0.5 * d};
}

namespace detail {

struct FitCore {
  double exponent = 0.0, constant = 0.0, intercept = 0.0, residual = 0.0;
};

/// Relative least squares N ~ C lambda^a + D lambda^b; returns (C, D, rss).
inline std::tuple<double, double, double> two_term_fit(const std::vector<double>& lam, const std::vector<double>& N, double a,
                                                       double b) {
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double u = std::pow(lam[i], a) / N[i], v = std::pow(lam[i], b) / N[i];
    s11 += u * u;
    s12 += u * v;
    s22 += v * v;
    r1 += u;
    r2 += v;
  }
  const double det = s11 * s22 - s12 * s12;
  const double C = (r1 * s22 - r2 * s12) / det;
  const double D = (s11 * r2 - s12 * r1) / det;
  double rss = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double r = (C * std::pow(lam[i], a) + D * std::pow(lam[i], b)) / N[i] - 1.0;
    rss += r * r;
  }
  return {C, D, rss};
}

/// `sub` is the exponent of the next-order term fitted alongside the leading
/// one (nullopt: single-term model).
inline FitCore weyl_fit_core(const std::vector<double>& lam, const std::vector<double>& N, WeylRegime regime, double a,
                             std::optional<double> sub) {
  FitCore f;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    x.push_back(std::log(lam[i]));
    y.push_back(std::log(N[i]));
  }
  f.exponent = ls_slope(x, y);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + f.exponent * (x[i] - mx));
    rss += r * r;
  }
  f.residual = std::sqrt(rss / static_cast<double>(x.size()));
  if (regime == WeylRegime::LogLaw) {
    std::vector<double> v;  // N / lambda^{n/2} against log lambda
    for (std::size_t i = 0; i < lam.size(); ++i) v.push_back(N[i] / std::pow(lam[i], a));
    f.constant = ls_slope(x, v);
    const double mv = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    f.intercept = mv - f.constant * mx;
  } else if (sub) {
    const auto fit = two_term_fit(lam, N, a, *sub);
    f.constant = std::get<0>(fit);
    f.intercept = std::get<1>(fit);
    // free leading exponent with the same next-order term: golden section
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::max(*sub + 0.05, 0.5 * a), hi = 2.0 * a;
    auto cost = [&](double e) { return std::get<2>(two_term_fit(lam, N, e, *sub)); };
    double c1 = hi - g * (hi - lo), c2 = lo + g * (hi - lo);
    double f1 = cost(c1), f2 = cost(c2);
    for (int it = 0; it < 100; ++it) {
      if (f1 < f2) {
        hi = c2;
        c2 = c1;
        f2 = f1;
        c1 = hi - g * (hi - lo);
        f1 = cost(c1);
      } else {
        lo = c1;
        c1 = c2;
        f1 = f2;
        c2 = lo + g * (hi - lo);
        f2 = cost(c2);
      }
    }
    f.exponent = 0.5 * (lo + hi);
    f.residual = std::sqrt(cost(f.exponent) / static_cast<double>(lam.size()));
  } else {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      const double t = std::pow(lam[i], a);
      num += N[i] * t;
      den += t * t;
    }
    f.constant = num / den;
  }
  return f;
}

}  // namespace detail

/// Least-squares Weyl fit on the upper 80% (in log lambda) of the grid.  The
/// free exponent comes from log N against log lambda; the constant from the
/// model with the exponent fixed at its theoretical value (for the log law,
/// N / lambda^{n/2} = C2 log lambda + D).  A boundary term, if given, is added
/// back to N before fitting.
inline WeylFit weyl_fit(const std::vector<double>& lambdas, const std::vector<long long>& counts, WeylRegime regime,
                        double theory_exponent, BoundaryTerm boundary = {}, std::optional<double> next_order = std::nullopt) {
  require(lambdas.size() == counts.size(), "weyl_fit: size mismatch");
  if (!counts.empty() && std::all_of(counts.begin(), counts.end(), [&](long long c) { return c == counts.front(); }))
    fail(ErrorCode::Numerical, "no growth: N(lambda) is constant (" + std::to_string(counts.front()) + ")");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] > 0.0 && counts[i] > 0) pts.emplace_back(lambdas[i], static_cast<double>(counts[i]));
  if (pts.size() < 3) fail(ErrorCode::Numerical, "insufficient data: fewer than three points with N > 0");
  const double l0 = pts.front().first, l1 = pts.back().first;
  const long long n_top = static_cast<long long>(pts.back().second);
  if (l1 / l0 < 10.0 || n_top < 30)
    fail(ErrorCode::Numerical, "insufficient data: lambda in [" + detail::fmt(l0) + ", " + detail::fmt(l1) + "], N in [" +
                                   std::to_string(static_cast<long long>(pts.front().second)) + ", " + std::to_string(n_top) +
                                   "]; need one decade and N >= 30 at the top");
  const double cut = std::exp(std::log(l0) + 0.2 * (std::log(l1) - std::log(l0)));
  std::vector<double> lam, N, Nc;
  for (const auto& [l, n] : pts)
    if (l >= cut) {
      lam.push_back(l);
      N.push_back(n);
      Nc.push_back(n + boundary.coef * std::pow(l, boundary.exponent));
    }
  if (lam.size() < 3) fail(ErrorCode::Numerical, "insufficient data after dropping the lowest 20% of the range");

  WeylFit f;
  f.regime = regime;
  f.theory_exponent = theory_exponent;
  f.boundary_coef = boundary.coef;
  f.points = lam.size();
  f.lambda_lo = lam.front();
  f.lambda_hi = lam.back();
  f.n_lo = static_cast<long long>(N.front());
  f.n_hi = static_cast<long long>(N.back());
  const auto raw = detail::weyl_fit_core(lam, N, regime, theory_exponent, next_order);
  const auto cor = detail::weyl_fit_core(lam, Nc, regime, theory_exponent, next_order);
  f.raw_exponent = raw.exponent;
  f.raw_constant = raw.constant;
  f.exponent = cor.exponent;
  f.constant = cor.constant;
  f.intercept = cor.intercept;
  f.residual = cor.residual;
  return f;
}

/// Fit of a counting report, corrected for the Dirichlet cut (functions only).
/// Below the log law the compact region y < Y0 of phase space contributes a
/// lambda^{n/2} term of its own, which is fitted alongside C3 lambda^{1/2p}.
inline WeylFit weyl_fit(const SpectrumReport& rep, const ProblemConfig& cfg) {
  const BoundaryTerm b = cfg.k == 0 ? dirichlet_boundary_term(cfg) : BoundaryTerm{};
  std::optional<double> next;
  if (rep.prediction.regime == WeylRegime::PowerHalfP) next = 0.5 * cfg.geometry.n;
  return weyl_fit(rep.lambda_grid, rep.N_total, rep.prediction.regime, rep.prediction.weyl_exponent, b, next);
}

// ---------------------------------------------------------------------------
// invariance checks

struct InvarianceReport {
  std::vector<std::string> labels;
  std::vector<ThresholdEstimate> probes;
  bool pass = false;
  std::string note;
};

namespace detail {

inline void compare_probes(InvarianceReport& r) {
  const auto& base = r.probes.front();
  r.pass = true;
  for (std::size_t i = 1; i < r.probes.size(); ++i) {
    const auto& p = r.probes[i];
    if (base.found != p.found) {
      r.pass = false;
    } else if (base.found) {
      if (std::abs(base.value - p.value) > base.error + p.error) r.pass = false;
    } else if (!(base.discrete_in_window && p.discrete_in_window)) {
      r.pass = false;
    }
  }
  if (r.pass && !base.found) r.note = "pure point in the window for every variant; eigenvalues may differ, counts stable";
  else if (r.pass) r.note = "thresholds agree within the combined error bars";
  else r.note = "thresholds disagree";
}

}  // namespace detail

/// The essential spectrum must not depend on where the end is cut.
inline InvarianceReport cut_invariance_check(const ProblemConfig& cfg, const std::vector<double>& y0_list,
                                             std::optional<std::pair<double, double>> window = std::nullopt, int jobs = 1) {
  if (y0_list.size() < 2) fail(ErrorCode::Validation, "cut_invariance_check needs at least two values of Y0");
  InvarianceReport r;
  for (double y0 : y0_list) {
    ProblemConfig c = cfg;
    c.geometry.y0 = y0;
    validate(c);
    r.labels.push_back("Y0=" + detail::fmt(y0));
    r.probes.push_back(threshold_probe(c, window, jobs));
  }
  detail::compare_probes(r);
  return r;
}

/// A compactly supported bump must not move the essential spectrum.
inline InvarianceReport perturbation_stability_check(const ProblemConfig& cfg, const Bump& bump,
                                                     std::optional<std::pair<double, double>> window = std::nullopt,
                                                     int jobs = 1) {
  require(bump.width > 0.0, "bump needs a positive width");
  ProblemConfig with = cfg;
  if (!with.potential) with.potential = RadialPotential{};
  with.potential->bump = bump;
  validate(with);
  InvarianceReport r;
  r.labels = {"unperturbed", "bump(" + detail::fmt(bump.center) + "," + detail::fmt(bump.width) + "," + detail::fmt(bump.height) + ")"};
  r.probes.push_back(threshold_probe(cfg, window, jobs));
  r.probes.push_back(threshold_probe(with, window, jobs));
  detail::compare_probes(r);
  return r;
}

}  // namespace cusp
