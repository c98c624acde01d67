#pragma once

// Text / CSV / JSON renderings of the analytic and numerical reports.  JSON
// keys keep insertion order and doubles use the shortest round-trip form, so
// output is byte-stable for a fixed input.

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "cuspspec/assemble.hpp"
#include "cuspspec/config.hpp"
#include "cuspspec/criteria.hpp"
#include "cuspspec/reduce.hpp"
#include "cuspspec/zeta.hpp"

namespace cusp {

using Json = nlohmann::ordered_json;

enum class Format { Text, Csv, Json };

namespace detail {

inline std::string fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// --- prediction -------------------------------------------------------------

inline Json to_json(const Prediction& p) {
  Json j;
  j["classification"] = to_string(p.classification);
  if (p.essential()) j["threshold"] = p.threshold;
  j["thresholds"] = p.thresholds;
  j["weyl_regime"] = to_string(p.regime);
  j["weyl_exponent"] = p.weyl_exponent;
  Json c;
  c["C1"] = detail::optional_number(p.constants.c1);
  c["C2"] = detail::optional_number(p.constants.c2);
  c["C3"] = detail::optional_number(p.constants.c3);
  if (p.constants.c3) c["C3_tail_bound"] = p.constants.c3_tail_bound;
  if (p.constants.c3_fit_only) c["C3"] = "fit-only";
  j["constants"] = c;
  j["notes"] = p.notes;
  return j;
}

inline std::string classification_line(const Prediction& p) {
  switch (p.classification) {
    case Classification::PurePoint: return "PurePoint";
    case Classification::EssentialFrom: return "EssentialFrom(" + detail::fmt(p.threshold) + ")";
    case Classification::Undetermined: return "Undetermined";
  }
  return "?";
}

inline std::string to_text(const Prediction& p) {
  std::ostringstream o;
  std::string reason = p.notes.empty() ? "" : " (" + p.notes.front() + ")";
  o << classification_line(p) << reason << "\n";
  o << "thresholds: {" << detail::join(p.thresholds, ", ", detail::fmt) << "}\n";
  o << "weyl regime: " << to_string(p.regime) << ", N(lambda) ~ ";
  switch (p.regime) {
    case WeylRegime::PowerN2: o << "C1 lambda^" << detail::fmt(p.weyl_exponent); break;
    case WeylRegime::LogLaw: o << "C2 lambda^" << detail::fmt(p.weyl_exponent) << " log lambda"; break;
    case WeylRegime::PowerHalfP: o << "C3 lambda^" << detail::fmt(p.weyl_exponent); break;
  }
  o << "\n";
  if (p.constants.c1) o << "C1 = " << detail::fmt(*p.constants.c1) << "\n";
  if (p.constants.c2) o << "C2 = " << detail::fmt(*p.constants.c2) << "\n";
  if (p.constants.c3) o << "C3 = " << detail::fmt(*p.constants.c3) << " (tail bound " << detail::fmt(p.constants.c3_tail_bound) << ")\n";
  if (p.constants.c3_fit_only) o << "C3 = fit-only\n";
  for (std::size_t i = 1; i < p.notes.size(); ++i) o << "note: " << p.notes[i] << "\n";
  return o.str();
}

// --- reduce -------------------------------------------------------------------

struct ReducedMode {
  ModeSpec mode;
  RadialOperator op;
  std::optional<double> threshold;
};

inline std::vector<ReducedMode> reduce_config(const ProblemConfig& cfg, double lambda_max) {
  std::vector<ReducedMode> out;
  for (const auto& m : enumerate_modes(cfg, lambda_max)) out.push_back({m, mode_operator(cfg, m), mode_threshold(cfg, m)});
  return out;
}

inline std::string reduce_csv(const std::vector<ReducedMode>& modes) {
  std::ostringstream o;
  o << "mode,nu,multiplicity,density_exp,stiffness_exp,potential_terms,threshold\n";
  for (const auto& r : modes)
    o << detail::csv_field(r.mode.label) << "," << detail::fmt(r.mode.nu) << "," << r.mode.multiplicity << ","
      << detail::fmt(r.op.density_exponent) << "," << detail::fmt(r.op.stiffness_exponent) << ","
      << detail::csv_field(r.op.potential_string()) << "," << (r.threshold ? detail::fmt(*r.threshold) : std::string("none"))
      << "\n";
  return o.str();
}

inline Json reduce_json(const ProblemConfig& cfg, const std::vector<ReducedMode>& modes) {
  Json j;
  if (cfg.k >= 1) {
    const auto [c0, c1] = harmonic_constants(cfg.geometry.n, cfg.k, cfg.geometry.p_value());
    j["c0"] = c0;
    j["c1"] = c1;
  }
  Json arr = Json::array();
  for (const auto& r : modes) {
    Json m;
    m["mode"] = r.mode.label;
    m["sector"] = to_string(r.mode.sector);
    m["nu"] = r.mode.nu;
    m["multiplicity"] = r.mode.multiplicity;
    m["density_exp"] = r.op.density_exponent;
    m["stiffness_exp"] = r.op.stiffness_exponent;
    m["potential_terms"] = r.op.potential_string();
    m["threshold"] = detail::optional_number(r.threshold);
    arr.push_back(m);
  }
  j["modes"] = arr;
  return j;
}

inline std::string reduce_text(const ProblemConfig& cfg, const std::vector<ReducedMode>& modes) {
  std::ostringstream o;
  if (cfg.k >= 1) {
    const auto [c0, c1] = harmonic_constants(cfg.geometry.n, cfg.k, cfg.geometry.p_value());
    o << "c0 = " << detail::fmt(c0) << ", c1 = " << detail::fmt(c1) << "\n";
    o << "high-energy coexact modes have compact resolvent and are not built\n";
  }
  o << modes.size() << " mode(s)\n";
  for (const auto& r : modes)
    o << "  " << r.mode.label << " [" << to_string(r.mode.sector) << "] nu=" << detail::fmt(r.mode.nu) << " x"
      << r.mode.multiplicity << "  w0=y^" << detail::fmt(r.op.density_exponent) << " w1=y^"
      << detail::fmt(r.op.stiffness_exponent) << " q=" << r.op.potential_string()
      << "  threshold=" << (r.threshold ? detail::fmt(*r.threshold) : std::string("none")) << "\n";
  return o.str();
}

// --- spectrum -------------------------------------------------------------------

inline std::string counting_csv(const SpectrumReport& rep) {
  std::ostringstream o;
  o << "lambda,N_total";
  for (const auto& m : rep.modes) o << ",N_mode_" << m.group.label;
  o << "\n";
  for (std::size_t i = 0; i < rep.lambda_grid.size(); ++i) {
    o << detail::fmt(rep.lambda_grid[i]) << "," << rep.N_total[i];
    for (const auto& m : rep.modes) o << "," << m.counts[i];
    o << "\n";
  }
  return o.str();
}

inline Json to_json(const SpectrumReport& rep, bool with_eigenvalues = true) {
  Json j;
  j["prediction"] = to_json(rep.prediction);
  j["label"] = rep.truncation_dependent ? "truncation-dependent" : "pure-point";
  j["stable"] = rep.stable;
  j["discrete_below"] = rep.discrete_below;
  j["lambda"] = rep.lambda_grid;
  j["N_total"] = rep.N_total;
  Json modes = Json::array();
  for (const auto& m : rep.modes) {
    Json e;
    e["label"] = m.group.label;
    e["members"] = m.group.members;
    e["sector"] = to_string(m.group.sector);
    e["nu"] = m.group.nu;
    e["multiplicity"] = m.group.multiplicity;
    e["domain"] = m.domain;
    e["N"] = m.N;
    e["confined"] = m.confined;
    e["stable"] = m.stable;
    if (with_eigenvalues) e["eigenvalues"] = m.eigenvalues;
    e["counts"] = m.counts;
    modes.push_back(e);
  }
  j["modes"] = modes;
  j["notes"] = rep.notes;
  return j;
}

inline std::string to_text(const SpectrumReport& rep) {
  std::ostringstream o;
  o << "prediction: " << classification_line(rep.prediction) << "\n";
  o << "report: " << (rep.truncation_dependent ? "truncation-dependent" : "pure-point") << ", "
    << (rep.stable ? "domain-stable" : "NOT domain-stable") << "\n";
  o << rep.modes.size() << " mode group(s)\n";
  for (const auto& m : rep.modes) {
    o << "  mode " << m.group.label << " nu=" << detail::fmt(m.group.nu) << " x" << m.group.multiplicity << ":";
    const std::size_t show = std::min<std::size_t>(m.eigenvalues.size(), 8);
    for (std::size_t i = 0; i < show; ++i) o << " " << detail::fixed(m.eigenvalues[i], 6);
    if (m.eigenvalues.size() > show) o << " ... (" << m.eigenvalues.size() << ")";
    o << "\n";
  }
  o << "lambda        N(lambda)\n";
  for (std::size_t i = 0; i < rep.lambda_grid.size(); ++i)
    o << detail::fixed(rep.lambda_grid[i], 6) << "  " << rep.N_total[i] << "\n";
  for (const auto& n : rep.notes) o << "note: " << n << "\n";
  return o.str();
}

// --- threshold -------------------------------------------------------------------

inline Json to_json(const ThresholdEstimate& t) {
  Json j;
  j["window"] = {t.window.first, t.window.second};
  j["found"] = t.found;
  if (t.found) {
    j["estimate"] = t.value;
    j["error"] = t.error;
  }
  j["predicted"] = detail::optional_number(t.predicted);
  j["discrete_in_window"] = t.discrete_in_window;
  j["inconclusive"] = t.inconclusive;
  Json modes = Json::array();
  for (const auto& m : t.modes) {
    Json e;
    e["label"] = m.label;
    e["sector"] = to_string(m.sector);
    e["nu"] = m.nu;
    e["multiplicity"] = m.multiplicity;
    e["predicted"] = detail::optional_number(m.predicted);
    e["growing"] = m.growing;
    e["stable"] = m.stable;
    if (m.growing) {
      e["estimate"] = m.estimate;
      e["error"] = m.error;
    }
    e["counts_per_domain"] = m.counts;
    e["lambda"] = m.lambdas;
    e["rate"] = m.rates;
    modes.push_back(e);
  }
  j["modes"] = modes;
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

inline std::string to_text(const ThresholdEstimate& t) {
  std::ostringstream o;
  if (t.found)
    o << "threshold estimate " << detail::fixed(t.value, 4) << " ± " << detail::fixed(t.error, 4);
  else
    o << "no threshold detected in [" << detail::fmt(t.window.first) << ", " << detail::fmt(t.window.second) << "]";
  o << "; predicted " << (t.predicted ? detail::fmt(*t.predicted) : std::string("none (pure point)")) << "\n";
  for (const auto& m : t.modes) {
    o << "  mode " << m.label << " nu=" << detail::fmt(m.nu) << ": " << (m.growing ? "grows" : "no growth") << ", counts";
    for (int c : m.counts) o << " " << c;
    if (m.growing) o << ", c = " << detail::fixed(m.estimate, 4) << " ± " << detail::fixed(m.error, 4);
    o << "\n";
  }
  if (!t.note.empty()) o << "note: " << t.note << "\n";
  return o.str();
}

inline std::string threshold_csv(const ThresholdEstimate& t) {
  std::ostringstream o;
  o << "mode,nu,growing,stable,estimate,error\n";
  for (const auto& m : t.modes)
    o << m.label << "," << detail::fmt(m.nu) << "," << (m.growing ? 1 : 0) << "," << (m.stable ? 1 : 0) << ","
      << (m.growing ? detail::fmt(m.estimate) : "") << "," << (m.growing ? detail::fmt(m.error) : "") << "\n";
  return o.str();
}

// --- weyl / zeta / invariance -------------------------------------------------------

inline Json to_json(const WeylFit& f) {
  Json j;
  j["regime"] = to_string(f.regime);
  j["exponent"] = f.exponent;
  j["theory_exponent"] = f.theory_exponent;
  j["constant"] = f.constant;
  j["intercept"] = f.intercept;
  j["residual"] = f.residual;
  j["raw_exponent"] = f.raw_exponent;
  j["raw_constant"] = f.raw_constant;
  j["boundary_coef"] = f.boundary_coef;
  j["lambda_range"] = {f.lambda_lo, f.lambda_hi};
  j["N_range"] = {f.n_lo, f.n_hi};
  j["points"] = f.points;
  return j;
}

inline std::string to_text(const WeylFit& f, const Prediction& p) {
  std::ostringstream o;
  o << "regime " << to_string(f.regime) << ": exponent " << detail::fixed(f.exponent, 4) << " (theory "
    << detail::fmt(f.theory_exponent) << "), constant " << detail::fixed(f.constant, 4);
  std::optional<double> c = p.constants.c1 ? p.constants.c1 : p.constants.c2 ? p.constants.c2 : p.constants.c3;
  if (c) o << " (theory " << detail::fixed(*c, 4) << ")";
  o << "\n";
  o << "uncorrected: exponent " << detail::fixed(f.raw_exponent, 4) << ", constant " << detail::fixed(f.raw_constant, 4)
    << "; boundary term " << detail::fmt(f.boundary_coef) << "\n";
  o << "fit range lambda in [" << detail::fmt(f.lambda_lo) << ", " << detail::fmt(f.lambda_hi) << "], N in [" << f.n_lo << ", "
    << f.n_hi << "], rms residual " << detail::fmt(f.residual) << "\n";
  return o.str();
}

inline Json to_json(const ZetaValue& z) {
  Json j;
  j["value"] = z.value;
  j["tail_bound"] = z.tail_bound;
  j["terms"] = z.terms;
  j["note"] = z.note;
  return j;
}

inline Json to_json(const InvarianceReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["note"] = r.note;
  Json v = Json::array();
  for (std::size_t i = 0; i < r.probes.size(); ++i) {
    Json e = to_json(r.probes[i]);
    e["variant"] = r.labels[i];
    v.push_back(e);
  }
  j["variants"] = v;
  return j;
}

inline std::string to_text(const InvarianceReport& r) {
  std::ostringstream o;
  for (std::size_t i = 0; i < r.probes.size(); ++i) o << "[" << r.labels[i] << "] " << to_text(r.probes[i]);
  o << (r.pass ? "PASS: " : "FAIL: ") << r.note << "\n";
  return o.str();
}

}  // namespace cusp
