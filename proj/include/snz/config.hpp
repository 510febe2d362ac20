#pragma once

// Device description loaded from JSON: transmons, pairs, noise inputs and
// RB synthesis settings. Units in the file are GHz, MHz, ns and us.

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "snz/error.hpp"
#include "snz/linalg.hpp"
#include "snz/noise.hpp"
#include "snz/pulse.hpp"
#include "snz/qutrit_model.hpp"
#include "snz/rb.hpp"

namespace snz {

struct TransmonConfig {
  TransmonSpec spec;
  TransmonNoise noise;
};

struct PairConfig {
  std::string name;
  std::string fluxed;
  std::string partner;
  PairSpec spec;  // j2 may be zero here; physics entry points validate
  double t_mid = 0.0;
  double t1q = 0.0;
  double slot = 0.0;
  std::optional<double> nz_tp;
};

struct RBConfig {
  double f_gate = 0.9993;
  double l1_gate = 0.0010;
  double f_ref_clifford = 0.985;
  double l1_ref_clifford = 0.0015;
  double seepage_ratio = 0.0;
  int shots = 2000;
  std::vector<int> n_cliffords{0, 1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 25, 30, 40, 50, 60};
};

struct DeviceConfig {
  double ts = kDefaultSamplePeriod;
  std::map<std::string, TransmonConfig> transmons;
  std::map<std::string, PairConfig> pairs;
  std::optional<double> flux_noise_sigma;
  DistortionModel distortion;
  int n_quasistatic = 101;
  RBConfig rb;

  const PairConfig& pair(const std::string& name) const {
    const auto it = pairs.find(name);
    if (it == pairs.end()) throw Error(Errc::InvalidConfig, "unknown pair '" + name + "'");
    return it->second;
  }

  NoiseConfig noise_for(const PairConfig& p, std::uint64_t seed) const {
    NoiseConfig n;
    n.fluxed = transmons.at(p.fluxed).noise;
    n.partner = transmons.at(p.partner).noise;
    n.flux_noise_sigma = flux_noise_sigma;
    n.distortion = distortion;
    n.n_quasistatic = n_quasistatic;
    n.seed = seed;
    n.validate();
    return n;
  }
};

using json = nlohmann::json;

namespace detail {

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(Errc::InvalidConfig, where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, where + ": bad '" + key + "': " + e.what());
  }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return require<T>(j, key, where);
}

inline CoherenceTable parse_table(const json& j, const char* key, const std::string& where) {
  CoherenceTable t;
  if (!j.contains(key)) return t;
  const json& a = j.at(key);
  if (a.is_number()) {
    const double v = a.get<double>();
    t.nodes.push_back({0.0, units::us(v)});
  } else {
    if (!a.is_array()) throw Error(Errc::InvalidConfig, where + ": '" + key + "' must be a number or [[GHz, us], ...]");
    for (const json& row : a) {
      if (!row.is_array() || row.size() != 2) throw Error(Errc::InvalidConfig, where + ": table rows are [GHz, us]");
      t.nodes.push_back({units::ghz(row[0].get<double>()), units::us(row[1].get<double>())});
    }
  }
  t.validate((where + "." + key).c_str());
  return t;
}

inline Interaction parse_interaction(const std::string& s, const std::string& where) {
  if (s == "11-02") return Interaction::Avoided11_02;
  if (s == "11-20") return Interaction::Avoided11_20;
  throw Error(Errc::InvalidConfig, where + ": interaction must be \"11-02\" or \"11-20\"");
}

}  // namespace detail

/// Bare detuning E_target - E_11 at the bias point.
inline double bare_delta_bias(const TransmonSpec& fluxed, const TransmonSpec& partner, Interaction i) {
  return i == Interaction::Avoided11_02 ? fluxed.omega_sweet + fluxed.anharm - partner.omega_sweet
                                        : partner.omega_sweet + partner.anharm - fluxed.omega_sweet;
}

inline DeviceConfig parse_device(const nlohmann::json& j) {
  using detail::optional_field;
  using detail::require;
  DeviceConfig d;
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "device: top level must be an object");
  if (const auto ts = optional_field<double>(j, "sample_period_ns", "device")) d.ts = units::ns(*ts);
  if (!(d.ts > 0.0)) throw Error(Errc::InvalidConfig, "device: sample_period_ns must be positive");

  if (!j.contains("transmons") || !j["transmons"].is_object()) throw Error(Errc::InvalidConfig, "device: missing transmons");
  for (const auto& [name, t] : j["transmons"].items()) {
    const std::string where = "transmons." + name;
    TransmonConfig c;
    c.spec.omega_sweet = units::ghz(require<double>(t, "omega_sweet_GHz", where));
    c.spec.anharm = units::mhz(require<double>(t, "anharm_MHz", where));
    c.spec.validate();
    if (const auto t1 = optional_field<double>(t, "t1_us", where)) {
      if (!(*t1 > 0.0)) throw Error(Errc::InvalidConfig, where + ": t1_us must be positive");
      c.noise.t1 = units::us(*t1);
    }
    c.noise.t2_echo = detail::parse_table(t, "t2_echo_us", where);
    c.noise.t2_star = detail::parse_table(t, "t2_star_us", where);
    d.transmons.emplace(name, std::move(c));
  }

  if (!j.contains("pairs") || !j["pairs"].is_object()) throw Error(Errc::InvalidConfig, "device: missing pairs");
  for (const auto& [name, p] : j["pairs"].items()) {
    const std::string where = "pairs." + name;
    PairConfig c;
    c.name = name;
    c.fluxed = require<std::string>(p, "fluxed", where);
    c.partner = require<std::string>(p, "partner", where);
    for (const auto* t : {&c.fluxed, &c.partner})
      if (!d.transmons.count(*t)) throw Error(Errc::InvalidConfig, where + ": unknown transmon '" + *t + "'");
    c.spec.name = name;
    c.spec.fluxed = d.transmons.at(c.fluxed).spec;
    c.spec.static_partner = d.transmons.at(c.partner).spec;
    c.spec.interaction = detail::parse_interaction(p.value("interaction", std::string("11-02")), where);
    const auto tlim = optional_field<double>(p, "tlim_ns", where);
    const auto j2 = optional_field<double>(p, "j2_MHz", where);
    if (tlim.has_value() == j2.has_value()) throw Error(Errc::InvalidConfig, where + ": give exactly one of tlim_ns, j2_MHz");
    if (tlim) {
      if (!(*tlim > 0.0)) throw Error(Errc::InvalidConfig, where + ": tlim_ns must be positive");
      c.spec.j2 = kPi / units::ns(*tlim);
    } else {
      if (!(*j2 >= 0.0)) throw Error(Errc::InvalidConfig, where + ": j2_MHz must be >= 0");
      c.spec.j2 = units::mhz(*j2);
    }
    const auto db = optional_field<double>(p, "delta_bias_GHz", where);
    c.spec.delta_bias = db ? units::ghz(*db) : bare_delta_bias(c.spec.fluxed, c.spec.static_partner, c.spec.interaction);
    c.t_mid = units::ns(p.value("t_mid_ns", 0.0));
    c.t1q = units::ns(p.value("t1q_ns", 10.0));
    c.slot = units::ns(p.value("slot_ns", 60.0));
    if (const auto nz = optional_field<double>(p, "nz_tp_ns", where)) c.nz_tp = units::ns(*nz);
    grid_samples(c.t_mid, d.ts);
    grid_samples(c.t1q, d.ts);
    grid_samples(c.slot, d.ts);
    d.pairs.emplace(name, std::move(c));
  }

  if (j.contains("noise")) {
    const json& n = j["noise"];
    d.flux_noise_sigma = optional_field<double>(n, "flux_noise_sigma_phi0", "noise");
    d.n_quasistatic = n.value("n_quasistatic", 101);
    if (n.contains("distortion"))
      for (const json& t : n["distortion"])
        d.distortion.terms.push_back({require<double>(t, "amplitude", "noise.distortion"),
                                      units::ns(require<double>(t, "tau_ns", "noise.distortion"))});
  }
  if (j.contains("rb")) {
    const json& r = j["rb"];
    d.rb.f_gate = r.value("f_gate", d.rb.f_gate);
    d.rb.l1_gate = r.value("l1_gate", d.rb.l1_gate);
    d.rb.f_ref_clifford = r.value("f_ref_clifford", d.rb.f_ref_clifford);
    d.rb.l1_ref_clifford = r.value("l1_ref_clifford", d.rb.l1_ref_clifford);
    d.rb.seepage_ratio = r.value("seepage_ratio", d.rb.seepage_ratio);
    d.rb.shots = r.value("shots", d.rb.shots);
    if (r.contains("n_cliffords")) d.rb.n_cliffords = r["n_cliffords"].get<std::vector<int>>();
  }
  return d;
}

inline DeviceConfig load_device(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::InvalidConfig, "cannot open device file " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, path + ": " + e.what());
  }
  return parse_device(j);
}

}  // namespace snz
