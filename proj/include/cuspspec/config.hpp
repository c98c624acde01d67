#pragma once

// Line-oriented `key = value` configuration documents.
//
//   # comment
//   geometry.n = 2
//   geometry.p = 1            # exact decimal or fraction (1/2)
//   geometry.Y0 = 1
//   operator.k = 0
//   topology.orientable = true
//   topology.h1 = 0
//   cross_section.kind = circle | square_torus | lattice_torus | table
//   cross_section.length = 6.283185307179586      # circle
//   cross_section.side = 6.283185307179586        # square_torus
//   cross_section.dim = 2                         # square_torus
//   cross_section.basis = 1,0;0,1                 # lattice_torus, rows are periods
//   cross_section.eigen.0 = 0:1,1:2,4:2           # table, eigenvalue:multiplicity
//   cross_section.volume = 6.28                   # table
//   magnetic.flux = 0.5,0.0
//   magnetic.phi0 = 0
//   magnetic.phi0_constant = true
//   magnetic.theta0_closed = true
//   potential.poly = (1.0,0.5);(-0.2,0)           # (coefficient, exponent)
//   potential.bump = 1.5,0.4,5                    # center,width,height
//   numerics.grid = 2000,4000,8000
//   numerics.domain_z = 8,16,32
//   numerics.tol = 1e-10
//   numerics.lambda = 1,50,40                     # min,max,count (log spaced)
//   numerics.window = 0,4
//   numerics.mode_cap = 20000
//   numerics.ppw = 40
//
// Unknown keys are errors.  Reals are parsed with std::from_chars, so the
// process locale never matters.

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cuspspec/error.hpp"
#include "cuspspec/model.hpp"
#include "cuspspec/rational.hpp"

namespace cusp {

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(std::string_view raw, std::string_view key) {
  const std::string norm = normalize_minus(trim(raw));
  std::string_view s = norm;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty() || !std::isfinite(v))
    fail(ErrorCode::Validation, "cannot parse real '" + norm + "' for " + std::string(key));
  return v;
}

inline int parse_int(std::string_view raw, std::string_view key) {
  const std::int64_t v = parse_int64(trim(raw), key);
  if (v < INT32_MIN || v > INT32_MAX) fail(ErrorCode::Validation, "integer out of range for " + std::string(key));
  return static_cast<int>(v);
}

inline bool parse_bool(std::string_view raw, std::string_view key) {
  const auto s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(ErrorCode::Validation, "cannot parse boolean '" + std::string(s) + "' for " + std::string(key));
}

inline Rational parse_rational(std::string_view raw, std::string_view key) {
  try {
    return Rational::parse(raw);
  } catch (const Error& e) {
    fail(ErrorCode::Validation, std::string(e.what()) + " (key " + std::string(key) + ")");
  }
}

inline std::vector<double> parse_real_list(std::string_view raw, std::string_view key) {
  std::vector<double> v;
  for (const auto& item : split(raw, ',')) v.push_back(parse_real(item, key));
  return v;
}

/// Shortest decimal that round-trips to the same double.
inline std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& v, const char* sep, F&& f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += f(v[i]);
  }
  return s;
}

}  // namespace detail

/// Parses a configuration document into a validated ProblemConfig.
/// Syntax errors carry the 1-based line number.
inline ProblemConfig parse_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> kv;
  {
    int lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto nl = text.find('\n', start);
      std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (!line.empty()) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
          fail(ErrorCode::Validation, "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) fail(ErrorCode::Validation, "line " + std::to_string(lineno) + ": empty key");
        if (value.empty()) fail(ErrorCode::Validation, "line " + std::to_string(lineno) + ": empty value for " + key);
        if (kv.count(key)) fail(ErrorCode::Validation, "line " + std::to_string(lineno) + ": duplicate key " + key);
        kv[key] = {value, lineno};
      }
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }

  std::map<std::string, bool> used;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    used[key] = true;
    return &it->second.first;
  };
  auto at_line = [&](const std::string& key, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(kv.at(key).second) + ": " + e.what());
    }
  };

  ProblemConfig cfg;

  if (auto v = get("geometry.n")) cfg.geometry.n = at_line("geometry.n", [&] { return detail::parse_int(*v, "geometry.n"); });
  else fail(ErrorCode::Validation, "missing required key geometry.n");
  if (auto v = get("geometry.p")) cfg.geometry.p = at_line("geometry.p", [&] { return detail::parse_rational(*v, "geometry.p"); });
  else fail(ErrorCode::Validation, "missing required key geometry.p");
  if (auto v = get("geometry.Y0")) cfg.geometry.y0 = at_line("geometry.Y0", [&] { return detail::parse_real(*v, "geometry.Y0"); });
  if (auto v = get("operator.k")) cfg.k = at_line("operator.k", [&] { return detail::parse_int(*v, "operator.k"); });
  if (auto v = get("topology.orientable"))
    cfg.topology.orientable = at_line("topology.orientable", [&] { return detail::parse_bool(*v, "topology.orientable"); });
  if (auto v = get("topology.h1")) cfg.topology.h1 = at_line("topology.h1", [&] { return detail::parse_int(*v, "topology.h1"); });

  // cross-section
  {
    const std::string* kind = get("cross_section.kind");
    if (!kind) fail(ErrorCode::Validation, "missing required key cross_section.kind");
    CrossSectionParams params;
    if (auto v = get("cross_section.length"))
      params.length = at_line("cross_section.length", [&] { return detail::parse_real(*v, "cross_section.length"); });
    if (auto v = get("cross_section.side"))
      params.side = at_line("cross_section.side", [&] { return detail::parse_real(*v, "cross_section.side"); });
    if (auto v = get("cross_section.dim"))
      params.dim = at_line("cross_section.dim", [&] { return detail::parse_int(*v, "cross_section.dim"); });
    else
      params.dim = cfg.geometry.n - 1;
    if (auto v = get("cross_section.basis")) {
      params.basis = at_line("cross_section.basis", [&] {
        Matrix m;
        for (const auto& row : detail::split(*v, ';')) m.push_back(detail::parse_real_list(row, "cross_section.basis"));
        return m;
      });
    }
    if (auto v = get("cross_section.volume"))
      params.volume = at_line("cross_section.volume", [&] { return detail::parse_real(*v, "cross_section.volume"); });
    for (int deg = 0;; ++deg) {
      const std::string key = "cross_section.eigen." + std::to_string(deg);
      auto v = get(key);
      if (!v) break;
      params.table.push_back(at_line(key, [&] {
        std::vector<TableEntry> entries;
        for (const auto& item : detail::split(*v, ',')) {
          const auto colon = item.find(':');
          TableEntry e;
          if (colon == std::string::npos) {
            e.eigenvalue = detail::parse_real(item, key);
          } else {
            e.eigenvalue = detail::parse_real(std::string_view(item).substr(0, colon), key);
            e.multiplicity = detail::parse_int(std::string_view(item).substr(colon + 1), key);
          }
          entries.push_back(e);
        }
        return entries;
      }));
    }
    cfg.cross_section = at_line("cross_section.kind", [&] { return builtin_cross_section(*kind, params); });
  }

  // magnetic
  {
    const bool any = kv.count("magnetic.flux") || kv.count("magnetic.phi0") || kv.count("magnetic.phi0_constant") ||
                     kv.count("magnetic.theta0_closed");
    if (any) {
      MagneticData m;
      if (auto v = get("magnetic.flux"))
        m.flux = at_line("magnetic.flux", [&] {
          std::vector<Rational> f;
          for (const auto& item : detail::split(*v, ',')) f.push_back(detail::parse_rational(item, "magnetic.flux"));
          return f;
        });
      if (auto v = get("magnetic.phi0")) m.phi0 = at_line("magnetic.phi0", [&] { return detail::parse_real(*v, "magnetic.phi0"); });
      if (auto v = get("magnetic.phi0_constant"))
        m.phi0_constant = at_line("magnetic.phi0_constant", [&] { return detail::parse_bool(*v, "magnetic.phi0_constant"); });
      if (auto v = get("magnetic.theta0_closed"))
        m.theta0_closed = at_line("magnetic.theta0_closed", [&] { return detail::parse_bool(*v, "magnetic.theta0_closed"); });
      cfg.magnetic = m;
    }
  }

  // potential
  if (kv.count("potential.poly") || kv.count("potential.bump")) {
    RadialPotential pot;
    if (auto v = get("potential.poly")) {
      pot.poly = at_line("potential.poly", [&] {
        std::vector<PowerTerm> terms;
        for (auto item : detail::split(*v, ';')) {
          std::string_view s = item;
          if (s.size() < 2 || s.front() != '(' || s.back() != ')')
            fail(ErrorCode::Validation, "potential.poly terms must look like (coef,exponent)");
          const auto parts = detail::split(s.substr(1, s.size() - 2), ',');
          if (parts.size() != 2) fail(ErrorCode::Validation, "potential.poly terms must look like (coef,exponent)");
          terms.push_back({detail::parse_real(parts[0], "potential.poly"), detail::parse_rational(parts[1], "potential.poly")});
        }
        return terms;
      });
    }
    if (auto v = get("potential.bump")) {
      pot.bump = at_line("potential.bump", [&] {
        const auto b = detail::parse_real_list(*v, "potential.bump");
        if (b.size() != 3) fail(ErrorCode::Validation, "potential.bump needs center,width,height");
        return Bump{b[0], b[1], b[2]};
      });
    }
    cfg.potential = pot;
  }

  // numerics
  auto& num = cfg.numerics;
  if (auto v = get("numerics.grid"))
    num.grids = at_line("numerics.grid", [&] {
      std::vector<int> g;
      for (const auto& item : detail::split(*v, ',')) g.push_back(detail::parse_int(item, "numerics.grid"));
      return g;
    });
  if (auto v = get("numerics.domain_z")) num.domains = at_line("numerics.domain_z", [&] { return detail::parse_real_list(*v, "numerics.domain_z"); });
  if (auto v = get("numerics.tol")) num.tol = at_line("numerics.tol", [&] { return detail::parse_real(*v, "numerics.tol"); });
  if (auto v = get("numerics.lambda")) {
    at_line("numerics.lambda", [&] {
      const auto parts = detail::split(*v, ',');
      if (parts.size() != 3) fail(ErrorCode::Validation, "numerics.lambda needs min,max,count");
      num.lambda_min = detail::parse_real(parts[0], "numerics.lambda");
      num.lambda_max = detail::parse_real(parts[1], "numerics.lambda");
      num.lambda_count = detail::parse_int(parts[2], "numerics.lambda");
      return 0;
    });
  }
  if (auto v = get("numerics.window"))
    num.window = at_line("numerics.window", [&] {
      const auto w = detail::parse_real_list(*v, "numerics.window");
      if (w.size() != 2) fail(ErrorCode::Validation, "numerics.window needs lo,hi");
      return std::pair<double, double>{w[0], w[1]};
    });
  if (auto v = get("numerics.mode_cap")) num.mode_cap = at_line("numerics.mode_cap", [&] { return detail::parse_int(*v, "numerics.mode_cap"); });
  if (auto v = get("numerics.ppw")) num.ppw = at_line("numerics.ppw", [&] { return detail::parse_real(*v, "numerics.ppw"); });

  for (const auto& [key, value] : kv)
    if (!used.count(key)) fail(ErrorCode::Validation, "line " + std::to_string(value.second) + ": unknown key " + key);

  validate(cfg);
  return cfg;
}

/// Canonical text form; parse_config(render_config(c)) == c.
inline std::string render_config(const ProblemConfig& cfg) {
  using detail::fmt;
  std::ostringstream out;
  out << "geometry.n = " << cfg.geometry.n << "\n";
  out << "geometry.p = " << cfg.geometry.p.str() << "\n";
  out << "geometry.Y0 = " << fmt(cfg.geometry.y0) << "\n";
  out << "operator.k = " << cfg.k << "\n";
  if (cfg.topology.orientable) out << "topology.orientable = " << (*cfg.topology.orientable ? "true" : "false") << "\n";
  if (cfg.topology.h1) out << "topology.h1 = " << *cfg.topology.h1 << "\n";

  const auto& cs = cfg.cross_section;
  out << "cross_section.kind = " << cs.name << "\n";
  if (cs.name == "circle") {
    out << "cross_section.length = " << fmt(cs.length) << "\n";
  } else if (cs.name == "square_torus") {
    out << "cross_section.side = " << fmt(cs.periods[0][0]) << "\n";
    out << "cross_section.dim = " << cs.periods.size() << "\n";
  } else if (cs.name == "lattice_torus") {
    out << "cross_section.basis = "
        << detail::join(cs.periods, ";", [](const std::vector<double>& row) { return detail::join(row, ",", fmt); }) << "\n";
  } else if (cs.name == "table") {
    for (std::size_t deg = 0; deg < cs.table.size(); ++deg)
      out << "cross_section.eigen." << deg << " = "
          << detail::join(cs.table[deg], ",",
                          [](const TableEntry& e) { return fmt(e.eigenvalue) + ":" + std::to_string(e.multiplicity); })
          << "\n";
    out << "cross_section.volume = " << fmt(cs.volume) << "\n";
  }

  if (cfg.magnetic) {
    const auto& m = *cfg.magnetic;
    if (!m.flux.empty()) out << "magnetic.flux = " << detail::join(m.flux, ",", [](const Rational& r) { return r.str(); }) << "\n";
    out << "magnetic.phi0 = " << fmt(m.phi0) << "\n";
    out << "magnetic.phi0_constant = " << (m.phi0_constant ? "true" : "false") << "\n";
    out << "magnetic.theta0_closed = " << (m.theta0_closed ? "true" : "false") << "\n";
  }
  if (cfg.potential) {
    const auto& pot = *cfg.potential;
    if (!pot.poly.empty())
      out << "potential.poly = "
          << detail::join(pot.poly, ";", [](const PowerTerm& t) { return "(" + fmt(t.coef) + "," + t.exponent.str() + ")"; })
          << "\n";
    if (pot.bump)
      out << "potential.bump = " << fmt(pot.bump->center) << "," << fmt(pot.bump->width) << "," << fmt(pot.bump->height) << "\n";
  }
  const auto& num = cfg.numerics;
  out << "numerics.grid = " << detail::join(num.grids, ",", [](int g) { return std::to_string(g); }) << "\n";
  out << "numerics.domain_z = " << detail::join(num.domains, ",", fmt) << "\n";
  out << "numerics.tol = " << fmt(num.tol) << "\n";
  out << "numerics.lambda = " << fmt(num.lambda_min) << "," << fmt(num.lambda_max) << "," << num.lambda_count << "\n";
  if (num.window) out << "numerics.window = " << fmt(num.window->first) << "," << fmt(num.window->second) << "\n";
  out << "numerics.mode_cap = " << num.mode_cap << "\n";
  out << "numerics.ppw = " << fmt(num.ppw) << "\n";
  return out.str();
}

}  // namespace cusp
