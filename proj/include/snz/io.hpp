#pragma once

// JSON and CSV emitters for reports. Angles are written in degrees,
// times in ns; all doubles use round-trip precision.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "snz/calibrate.hpp"
#include "snz/chevron.hpp"
#include "snz/gate_extract.hpp"
#include "snz/gates.hpp"
#include "snz/landscape.hpp"
#include "snz/noise.hpp"
#include "snz/rb.hpp"

namespace snz {

using nlohmann::json;

inline double to_deg(double rad) { return rad * 180.0 / kPi; }

inline json to_json(const CPGateParams& p) {
  return {{"phi01_deg", to_deg(p.phi01)}, {"phi10_deg", to_deg(p.phi10)}, {"phi11_deg", to_deg(p.phi11)},
          {"phi2q_deg", to_deg(p.phi2q)}, {"phi02_deg", to_deg(p.phi02)}, {"phi_offdiag_deg", to_deg(p.phi_offdiag)},
          {"leak_l1", p.leak_l1}};
}

inline json to_json(const ConditionReport& r) {
  return {{"pc_residual", r.pc_residual}, {"pc_phase_residual_rad", r.pc_phase_residual},
          {"lc1_residual", r.lc1_residual}, {"lc2_residual", r.lc2_residual},
          {"lc3_residual", r.lc3_residual}, {"satisfied", r.satisfied}};
}

inline json to_json(const ChevronFit& f) {
  json cols = json::array();
  for (const auto& c : f.columns)
    cols.push_back({{"amplitude", c.amplitude}, {"omega_mhz", units::to_mhz(c.omega)}, {"visibility", c.visibility},
                    {"offset", c.offset}, {"rms_residual", c.rms_residual}});
  return {{"a_res", f.a_res}, {"t_lim_fit_ns", units::to_ns(f.t_lim_fit)}, {"omega_min_mhz", units::to_mhz(f.omega_min)},
          {"goodness", f.goodness}, {"columns", cols}};
}

inline json to_json(const ContourSample& s) {
  return {{"x", s.x}, {"y", s.y}, {"phi2q_deg", to_deg(s.phi2q)}, {"leak_l1", s.leak}};
}

inline json to_json(const CalibrationReport& r) {
  json minima = json::array();
  for (const auto& m : r.minima) minima.push_back(to_json(m));
  json out = {{"a_star", r.a_star},
              {"b_star", r.b_star},
              {"phi2q_deg", to_deg(r.phi2q)},
              {"pc_residual_deg", to_deg(r.pc_residual)},
              {"leak_l1", r.leak},
              {"speed_limit_violation", r.speed_limit_violation},
              {"evaluations", r.evaluations},
              {"contour_polylines", r.contour.polylines.size()},
              {"minima", minima}};
  out["reference_leak"] = r.reference_leak ? json(*r.reference_leak) : json(nullptr);
  return out;
}

inline json to_json(const CalibratedGate& g) {
  return {{"scheme", g.scheme},
          {"a", g.a},
          {"b", g.b},
          {"weak_c", g.nulling.c_star},
          {"weak_d", g.nulling.d_star},
          {"strong_samples", g.strong.size()},
          {"slot_samples", g.schedule.fluxed.size()},
          {"params", to_json(g.params)}};
}

inline json to_json(const ErrorBudget& b) {
  json levels = json::array();
  for (const auto& e : b.entries)
    levels.push_back({{"level", std::string(1, to_char(e.level))},
                      {"infidelity", e.infidelity},
                      {"leakage", e.leakage},
                      {"d_infidelity", e.d_infidelity},
                      {"d_leakage", e.d_leakage}});
  return {{"scheme", b.scheme}, {"levels", levels}};
}

inline json to_json(const RBFit& f) {
  return {{"p", f.p}, {"p_err", f.p_err}, {"lambda1", f.lambda1}, {"lambda1_err", f.lambda1_err},
          {"a0", f.a0}, {"b0", f.b0}, {"c0", f.c0}, {"a1", f.a1}, {"b1", f.b1},
          {"p_at_boundary", f.p_at_boundary}, {"lambda1_at_boundary", f.lambda1_at_boundary},
          {"chi2_m0", f.chi2_m0}, {"chi2_chi1", f.chi2_chi1}};
}

inline json to_json(const IRBResult& r) {
  return {{"fidelity", {{"value", r.fidelity}, {"stderr", r.fidelity_err}}},
          {"leakage", {{"value", r.leakage}, {"stderr", r.leakage_err}}},
          {"p_gate", {{"value", r.p_gate}, {"stderr", r.p_gate_err}}},
          {"lambda_gate", r.lambda_gate},
          {"invalid_ratio", r.invalid_ratio}};
}

// --------------------------------------------------------------------------
// Files

inline std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw Error(Errc::InvalidConfig, "cannot write " + p.string());
  f.precision(17);
  return f;
}

inline void write_json(const std::filesystem::path& p, const json& j) { open_out(p) << j.dump(2) << '\n'; }

inline void write_samples_csv(const std::filesystem::path& p, const LandscapeSamples& s, const std::string& xname,
                              const std::string& yname, const std::string& vname) {
  std::ofstream f = open_out(p);
  f << xname << ',' << yname << ',' << vname << '\n';
  for (const auto& q : s.points) f << q.x << ',' << q.y << ',' << q.value << '\n';
}

inline void write_trace_csv(const std::filesystem::path& p, const CalibrationReport& r) {
  std::ofstream f = open_out(p);
  f << "polyline,index,x,y,phi2q_deg,leak_l1\n";
  for (std::size_t l = 0; l < r.trace.size(); ++l)
    for (std::size_t i = 0; i < r.trace[l].size(); ++i) {
      const auto& s = r.trace[l][i];
      f << l << ',' << i << ',' << s.x << ',' << s.y << ',' << to_deg(s.phi2q) << ',' << s.leak << '\n';
    }
}

inline void write_budget_csv(const std::filesystem::path& p, const std::vector<ErrorBudget>& budgets) {
  std::ofstream f = open_out(p);
  f << "level,scheme,infidelity,leakage\n";
  for (const auto& b : budgets)
    for (const auto& e : b.entries) f << to_char(e.level) << ',' << b.scheme << ',' << e.infidelity << ',' << e.leakage << '\n';
}

}  // namespace snz
