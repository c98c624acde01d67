#pragma once

// Domain types describing one spectral problem on a conformally cusp end
//   g_p = y^{-2p} (dy^2 + h),   y in [Y0, inf),
// together with the spectral data of the cross-section (M, h) and the
// magnetic / electric data attached to the end.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cuspspec/error.hpp"
#include "cuspspec/rational.hpp"

namespace cusp {

using Matrix = std::vector<std::vector<double>>;

struct EndGeometry {
  int n = 2;                 // dim X
  Rational p{1};             // conformal exponent
  double y0 = 1.0;           // inner cut radius

  double p_value() const { return p.value(); }
  bool complete() const { return p <= Rational(1); }
  friend bool operator==(const EndGeometry&, const EndGeometry&) = default;
};

enum class CrossSectionKind { Circle, Torus, Table };

inline const char* to_string(CrossSectionKind k) {
  switch (k) {
    case CrossSectionKind::Circle: return "circle";
    case CrossSectionKind::Torus: return "torus";
    case CrossSectionKind::Table: return "table";
  }
  return "?";
}

/// One line of an eigenvalue table: eigenvalue and its multiplicity.
struct TableEntry {
  double eigenvalue = 0.0;
  int multiplicity = 1;
  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

/// Spectral model of the closed manifold M.
///
/// For the circle and for tori the function Laplacian has eigenvalues
/// |G m|^2, m in Z^d, where G is the dual basis with the 2 pi absorbed
/// (G = 2 pi B^{-T} for a period matrix B whose columns are the periods).
struct CrossSection {
  CrossSectionKind kind = CrossSectionKind::Circle;
  std::string name;          // builtin name it was created from
  double length = 0.0;       // circle only
  Matrix periods;            // torus: rows are period vectors
  Matrix dual;               // circle/torus: G, eigenvalues |G m|^2
  std::vector<std::vector<TableEntry>> table;  // table: per form degree
  std::vector<int> betti;    // h^0 .. h^{dim M}
  double volume = 0.0;

  int dim() const { return static_cast<int>(betti.size()) - 1; }
  /// betti[j] with the convention h^j = 0 outside 0..dim M.
  int betti_at(int j) const {
    if (j < 0 || j >= static_cast<int>(betti.size())) return 0;
    return betti[static_cast<std::size_t>(j)];
  }
  bool is_lattice() const { return kind != CrossSectionKind::Table; }
  friend bool operator==(const CrossSection&, const CrossSection&) = default;
};

/// Parameters for builtin_cross_section; only the fields relevant to the
/// requested kind are read.
struct CrossSectionParams {
  double length = 2.0 * M_PI;  // circle
  double side = 2.0 * M_PI;    // square_torus
  int dim = 1;                 // square_torus
  Matrix basis;                // lattice_torus, rows = periods
  std::vector<std::vector<TableEntry>> table;  // table, per degree
  double volume = 0.0;         // table
};

struct MagneticData {
  std::vector<Rational> flux;  // class [theta0]/2pi, integral classes are Z^{b1}
  double phi0 = 0.0;
  bool phi0_constant = true;
  bool theta0_closed = true;

  bool flux_integral() const {
    for (const auto& f : flux)
      if (!f.is_integer()) return false;
    return true;
  }
  std::vector<double> flux_values() const {
    std::vector<double> v;
    v.reserve(flux.size());
    for (const auto& f : flux) v.push_back(f.value());
    return v;
  }
  friend bool operator==(const MagneticData&, const MagneticData&) = default;
};

struct PowerTerm {
  double coef = 0.0;
  Rational exponent{0};
  friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};

/// Smooth bump supported in |y - center| < width, peak value height.
struct Bump {
  double center = 0.0;
  double width = 1.0;
  double height = 0.0;

  double operator()(double y) const {
    const double r = (y - center) / width;
    if (std::abs(r) >= 1.0) return 0.0;
    return height * std::exp(1.0 - 1.0 / (1.0 - r * r));
  }
  friend bool operator==(const Bump&, const Bump&) = default;
};

/// V(y) = sum_j a_j y^{b_j} + bump(y).
struct RadialPotential {
  std::vector<PowerTerm> poly;
  std::optional<Bump> bump;

  double operator()(double y) const {
    double v = 0.0;
    for (const auto& t : poly) v += t.coef * std::pow(y, t.exponent.value());
    if (bump) v += (*bump)(y);
    return v;
  }
  /// Coefficient of y^{2p}: the boundary value V0 = (x^{2p} V)|_M.
  double v0(const Rational& p) const {
    const Rational two_p = Rational(2) * p;
    double s = 0.0;
    for (const auto& t : poly)
      if (t.exponent == two_p) s += t.coef;
    return s;
  }
  friend bool operator==(const RadialPotential&, const RadialPotential&) = default;
};

struct Topology {
  std::optional<bool> orientable;
  std::optional<int> h1;  // first Betti number of X
  friend bool operator==(const Topology&, const Topology&) = default;
};

struct Numerics {
  std::vector<int> grids{2000, 4000, 8000};
  std::vector<double> domains{8.0, 16.0, 32.0};
  double tol = 1e-10;
  double lambda_min = 1.0;
  double lambda_max = 50.0;
  int lambda_count = 40;
  std::optional<std::pair<double, double>> window;
  int mode_cap = 20000;
  double ppw = 40.0;  // mesh points per local wavelength at lambda_max
  friend bool operator==(const Numerics&, const Numerics&) = default;
};

struct ProblemConfig {
  EndGeometry geometry;
  CrossSection cross_section;
  int k = 0;
  Topology topology;
  std::optional<MagneticData> magnetic;
  std::optional<RadialPotential> potential;
  Numerics numerics;
  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

// ---------------------------------------------------------------------------

namespace detail {

inline double det(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix m = a;
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return d;
}

inline Matrix inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix m = a;
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) fail(ErrorCode::Validation, "degenerate lattice");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    const double s = m[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      m[c][j] /= s;
      inv[c][j] /= s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Builds the spectral model of a standard cross-section.
/// Names: circle, square_torus, lattice_torus, table.
inline CrossSection builtin_cross_section(const std::string& name, const CrossSectionParams& params) {
  CrossSection cs;
  cs.name = name;
  if (name == "circle") {
    require(params.length > 0.0 && std::isfinite(params.length), "circle length must be positive");
    cs.kind = CrossSectionKind::Circle;
    cs.length = params.length;
    cs.periods = {{params.length}};
    cs.dual = {{2.0 * M_PI / params.length}};
    cs.betti = {1, 1};
    cs.volume = params.length;
    return cs;
  }
  if (name == "square_torus" || name == "lattice_torus") {
    Matrix basis = params.basis;
    if (name == "square_torus") {
      require(params.dim >= 1, "square_torus dimension must be >= 1");
      require(params.side > 0.0, "square_torus side must be positive");
      basis.assign(static_cast<std::size_t>(params.dim), std::vector<double>(static_cast<std::size_t>(params.dim), 0.0));
      for (int i = 0; i < params.dim; ++i) basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = params.side;
    }
    const std::size_t d = basis.size();
    require(d >= 1, "lattice basis is empty");
    for (const auto& row : basis) require(row.size() == d, "lattice basis must be square");
    const double vol = std::abs(detail::det(basis));
    if (!(vol > 1e-300)) fail(ErrorCode::Validation, "degenerate lattice (determinant 0)");
    // rows of `basis` are periods b_i; dual vectors g_j satisfy g_j . b_i = 2 pi delta_ij.
    // With B having the periods as columns, G = 2 pi B^{-T}; B^T is `basis` itself.
    const Matrix inv = detail::inverse(basis);  // (B^T)^{-1} = B^{-T}
    cs.kind = CrossSectionKind::Torus;
    cs.periods = basis;
    cs.dual.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cs.dual[i][j] = 2.0 * M_PI * inv[i][j];
    cs.betti.resize(d + 1);
    for (std::size_t j = 0; j <= d; ++j) cs.betti[j] = static_cast<int>(detail::binomial(static_cast<int>(d), static_cast<int>(j)));
    cs.volume = vol;
    if (d == 1) {
      cs.kind = CrossSectionKind::Circle;
      cs.length = vol;
    }
    return cs;
  }
  if (name == "table") {
    require(!params.table.empty(), "table cross-section needs at least the degree-0 spectrum");
    require(params.volume > 0.0, "table cross-section needs a positive volume");
    cs.kind = CrossSectionKind::Table;
    cs.table = params.table;
    cs.volume = params.volume;
    cs.betti.clear();
    for (std::size_t deg = 0; deg < cs.table.size(); ++deg) {
      auto& entries = cs.table[deg];
      int zero_mult = 0;
      double prev = -1.0;
      for (const auto& e : entries) {
        require(e.eigenvalue >= 0.0 && std::isfinite(e.eigenvalue), "table eigenvalues must be non-negative");
        require(e.multiplicity >= 1, "table multiplicities must be positive");
        require(e.eigenvalue > prev, "table eigenvalues must be sorted and distinct");
        prev = e.eigenvalue;
        if (e.eigenvalue == 0.0) zero_mult += e.multiplicity;
      }
      cs.betti.push_back(zero_mult);
    }
    return cs;
  }
  fail(ErrorCode::Validation, "unknown cross-section '" + name + "'");
}

/// Checks every invariant of a ProblemConfig; throws Error(Validation) naming
/// the violated one.
inline void validate(const ProblemConfig& cfg) {
  const auto& g = cfg.geometry;
  require(g.n >= 2, "geometry.n must be >= 2");
  require(g.p > Rational(0), "geometry.p must be > 0");
  require(g.y0 >= 1.0 && std::isfinite(g.y0), "geometry.Y0 must be >= 1");
  require(cfg.k >= 0 && cfg.k <= g.n, "operator.k must satisfy 0 <= k <= n");

  const auto& cs = cfg.cross_section;
  require(cs.dim() == g.n - 1,
          "cross-section dimension " + std::to_string(cs.dim()) + " does not match n-1 = " + std::to_string(g.n - 1));
  require(cs.volume > 0.0, "cross-section volume must be positive");
  if (cs.kind == CrossSectionKind::Table)
    require(cs.table.size() == cs.betti.size(), "table betti data inconsistent with table degrees");

  if (cfg.magnetic) {
    require(cfg.k == 0, "magnetic data requires k=0");
    const auto& m = *cfg.magnetic;
    if (cs.kind == CrossSectionKind::Table && !m.flux.empty())
      fail(ErrorCode::Unsupported, "flux on a table cross-section is unsupported");
    require(static_cast<int>(m.flux.size()) == cs.betti_at(1),
            "magnetic.flux must have b1(M) = " + std::to_string(cs.betti_at(1)) + " components");
    require(std::isfinite(m.phi0), "magnetic.phi0 must be finite");
  }

  if (cfg.potential) {
    const Rational two_p = Rational(2) * g.p;
    for (const auto& t : cfg.potential->poly) {
      require(std::isfinite(t.coef), "potential coefficient must be finite");
      require(t.exponent <= two_p, "potential exponent " + t.exponent.str() + " exceeds 2p = " + two_p.str() +
                                       " (V must lie in y^{2p} times bounded functions)");
    }
    if (cfg.potential->bump) {
      const auto& b = *cfg.potential->bump;
      require(b.width > 0.0 && std::isfinite(b.center) && std::isfinite(b.height), "potential.bump needs width > 0");
    }
  }

  // An orientable 3-manifold with H^1(X) = 0 has H^2(X, M) = 0 by duality, so
  // the restriction H^1(X) -> H^1(M) -> H^2(X, M) forces h^1(M) = 0.
  const auto& t = cfg.topology;
  if (g.n == 3 && t.orientable.value_or(false) && t.h1 && *t.h1 == 0 && cs.betti_at(1) != 0)
    fail(ErrorCode::Validation,
         "inconsistent topology: dim X = 3, X orientable and H^1(X) = 0 force h^1(M) = 0, but h^1(M) = " +
             std::to_string(cs.betti_at(1)) + " (cannot be simultaneously fulfilled)");
  if (t.h1) require(*t.h1 >= 0, "topology.h1 must be >= 0");

  const auto& num = cfg.numerics;
  require(num.grids.size() >= 2, "numerics.grid needs at least two grids");
  for (int N : num.grids) require(N >= 3, "numerics.grid entries must be >= 3");
  require(num.domains.size() >= 2, "numerics.domain_z needs at least two domains");
  for (double T : num.domains) require(T > 0.0 && std::isfinite(T), "numerics.domain_z entries must be positive");
  require(num.tol > 0.0, "numerics.tol must be > 0");
  require(num.lambda_min > 0.0 && num.lambda_max > num.lambda_min, "numerics.lambda needs 0 < min < max");
  require(num.lambda_count >= 2, "numerics.lambda count must be >= 2");
  if (num.window) require(num.window->second > num.window->first, "numerics.window needs lo < hi");
  require(num.mode_cap >= 1, "numerics.mode_cap must be >= 1");
  require(num.ppw >= 4.0, "numerics.ppw must be >= 4");
}

}  // namespace cusp
