#pragma once

// Open-system simulation of flux-pulsed gates under stacked error models:
//   A unitary, B + relaxation, C + Markovian dephasing,
//   D + quasistatic flux noise, E + flux-pulse distortion.
// Each AWG sample is one Trotter step: unitary, then a per-transmon
// dissipative map exp(L dt) of a three-level Lindbladian.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "snz/calibrate.hpp"
#include "snz/error.hpp"
#include "snz/gate_extract.hpp"
#include "snz/linalg.hpp"
#include "snz/pulse.hpp"
#include "snz/qutrit_model.hpp"

namespace snz {

/// Coherence time as a function of transition frequency; linear between
/// nodes and constant beyond the end nodes.
struct CoherenceTable {
  std::vector<std::pair<double, double>> nodes;  // (omega rad/s, time s), strictly increasing omega

  bool empty() const { return nodes.empty(); }

  double at(double omega) const {
    if (nodes.empty()) return std::numeric_limits<double>::infinity();
    if (omega <= nodes.front().first) return nodes.front().second;
    if (omega >= nodes.back().first) return nodes.back().second;
    const auto hi = std::lower_bound(nodes.begin(), nodes.end(), omega,
                                     [](const auto& n, double w) { return n.first < w; });
    const auto lo = hi - 1;
    const double u = (omega - lo->first) / (hi->first - lo->first);
    return lo->second + u * (hi->second - lo->second);
  }

  void validate(const char* what) const {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (!(nodes[k].second > 0.0)) throw Error(Errc::InvalidConfig, std::string(what) + ": times must be positive");
      if (k > 0 && !(nodes[k].first > nodes[k - 1].first))
        throw Error(Errc::InvalidConfig, std::string(what) + ": frequencies must be strictly increasing");
    }
  }
};

struct TransmonNoise {
  double t1 = std::numeric_limits<double>::infinity();  // s
  CoherenceTable t2_echo;
  CoherenceTable t2_star;

  /// Pure-dephasing rate 1/T2echo(f) - 1/(2 T1), floored at zero.
  double dephasing_rate(double omega) const {
    if (t2_echo.empty()) return 0.0;
    return std::max(0.0, 1.0 / t2_echo.at(omega) - 0.5 / t1);
  }
};

struct NoiseConfig {
  TransmonNoise fluxed;
  TransmonNoise partner;
  std::optional<double> flux_noise_sigma;  // flux quanta
  DistortionModel distortion;
  int n_quasistatic = 101;
  std::uint64_t seed = 0;
  int trotter_substeps = 1;

  void validate() const {
    for (const auto* t : {&fluxed, &partner}) {
      if (!(t->t1 > 0.0)) throw Error(Errc::InvalidConfig, "t1 must be positive");
      t->t2_echo.validate("t2_echo");
      t->t2_star.validate("t2_star");
    }
    if (n_quasistatic < 1) throw Error(Errc::InvalidConfig, "n_quasistatic must be >= 1");
    if (trotter_substeps < 1) throw Error(Errc::InvalidConfig, "trotter_substeps must be >= 1");
    if (flux_noise_sigma && !(*flux_noise_sigma >= 0.0)) throw Error(Errc::InvalidConfig, "flux_noise_sigma < 0");
  }
};

enum class NoiseLevel { A, B, C, D, E };

inline constexpr std::array<NoiseLevel, 5> kAllLevels{NoiseLevel::A, NoiseLevel::B, NoiseLevel::C, NoiseLevel::D,
                                                      NoiseLevel::E};

inline char to_char(NoiseLevel l) { return static_cast<char>('A' + static_cast<int>(l)); }

// --------------------------------------------------------------------------
// Quasistatic averaging

/// Mean of f over n Gaussian offsets with standard deviation sigma. Draws come
/// in antithetic pairs +-z; an odd n also includes the zero offset. The sum is
/// accumulated in draw order.
template <class F>
auto quasistatic_average(F&& f, double sigma, int n, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::OutOfRange, "n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> offsets;
  if (n % 2 == 1) offsets.push_back(0.0);
  while (static_cast<int>(offsets.size()) < n) {
    const double z = sigma * normal(rng);
    offsets.push_back(z);
    offsets.push_back(-z);
  }
  using R = std::decay_t<decltype(f(0.0))>;
  R acc = f(offsets[0]);
  for (std::size_t k = 1; k < offsets.size(); ++k) acc = acc + f(offsets[k]);
  R mean = acc * (1.0 / static_cast<double>(n));
  return mean;
}

/// Quasistatic flux sigma from the Ramsey and echo tables of the fluxed
/// transmon: the quasistatic rate 1/T2* - 1/T2echo at each Ramsey node away
/// from the sweetspot gives a frequency spread sqrt(2) Gamma_qs, converted to
/// flux by the arc slope there. Returns the median over usable nodes.
inline double flux_sigma_from_tables(const TransmonSpec& spec, const TransmonNoise& noise) {
  if (noise.t2_star.empty() || noise.t2_echo.empty())
    throw Error(Errc::MissingNoiseField, "level D needs flux_noise_sigma or both T2* and T2echo tables");
  std::vector<double> sig;
  for (const auto& [omega, t2s] : noise.t2_star.nodes) {
    if (spec.omega_sweet - omega < units::mhz(1.0)) continue;
    const double rate = 1.0 / t2s - 1.0 / noise.t2_echo.at(omega);
    if (!(rate > 0.0)) continue;
    // Invert the arc for the flux at this frequency, then the local slope.
    const double a = std::abs(spec.anharm);
    const double r = (omega + a) / (spec.omega_sweet + a);
    const double phi = std::acos(r * r) / kPi;
    const double h = 1e-7;
    const double slope = std::abs(spec.frequency(phi + h) - spec.frequency(phi - h)) / (2 * h);
    sig.push_back(std::sqrt(2.0) * rate / slope);
  }
  if (sig.empty()) throw Error(Errc::MissingNoiseField, "no Ramsey node below the sweetspot with T2* < T2echo");
  std::sort(sig.begin(), sig.end());
  return sig[sig.size() / 2];
}

// --------------------------------------------------------------------------
// Channel simulation

namespace detail {

/// exp(L dt) for a single transmon, column-stacked on 3x3 density matrices.
inline Eigen::Matrix<cplx, 9, 9> transmon_dissipator(double t1, double gamma_phi, double dt) {
  using M9 = Eigen::Matrix<cplx, 9, 9>;
  Mat3 a = Mat3::Zero(), n = Mat3::Zero();
  for (int k = 1; k < 3; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  for (int k = 0; k < 3; ++k) n(k, k) = static_cast<double>(k);
  std::vector<Mat3> ops;
  if (std::isfinite(t1)) ops.push_back(a / std::sqrt(t1));
  if (gamma_phi > 0.0) ops.push_back(std::sqrt(2.0 * gamma_phi) * n);
  if (ops.empty()) return M9::Identity();
  const Mat3 id = Mat3::Identity();
  auto kron = [](const Mat3& x, const Mat3& y) {
    M9 k;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k.block<3, 3>(3 * i, 3 * j) = x(i, j) * y;
    return k;
  };
  M9 l = M9::Zero();
  for (const auto& op : ops) {
    const Mat3 ldl = op.adjoint() * op;
    l += kron(op.conjugate(), op) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
  }
  const M9 ldt = l * dt;
  return ldt.exp();
}

// Applies a single-transmon map to the fluxed (f) or partner (p) factor of rho.
inline void apply_local(Mat9& rho, const Eigen::Matrix<cplx, 9, 9>& d, bool fluxed) {
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v) {
      Eigen::Matrix<cplx, 9, 1> b;
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          b(i + 3 * j) = fluxed ? rho(pair_index(u, i), pair_index(v, j)) : rho(pair_index(i, u), pair_index(j, v));
      const Eigen::Matrix<cplx, 9, 1> o = d * b;
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          (fluxed ? rho(pair_index(u, i), pair_index(v, j)) : rho(pair_index(i, u), pair_index(j, v))) = o(i + 3 * j);
    }
}

struct SegmentOps {
  Mat9 u;
  Eigen::Matrix<cplx, 9, 9> d_fluxed, d_partner;
};

}  // namespace detail

/// Options for one channel evaluation at a fixed quasistatic offset.
struct ChannelSpec {
  bool relaxation = false;
  bool dephasing = false;
  double flux_offset = 0.0;  // normalized amplitude units added to every fluxed sample
  int substeps = 1;
};

/// Superoperator in the dressed rotating frame for explicit fluxed / partner
/// waveforms (same ts, shorter one zero-padded).
inline Superop propagate_channel(const PairModel& model, const Waveform& fluxed, const Waveform& partner,
                                 const TransmonNoise& nf, const TransmonNoise& np, const ChannelSpec& spec) {
  const std::size_t n = std::max(fluxed.size(), partner.size());
  if (n == 0) throw Error(Errc::EmptyPulse, "empty waveform");
  const double ts = fluxed.empty() ? partner.ts : fluxed.ts;
  const double dt = ts / spec.substeps;
  const bool open = spec.relaxation || spec.dephasing;
  const Mat9& v = model.dressed_basis();

  std::map<std::pair<double, double>, detail::SegmentOps> cache;
  auto ops_for = [&](double af, double ap) -> const detail::SegmentOps& {
    const auto key = std::make_pair(std::abs(af), std::abs(ap));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    detail::SegmentOps o;
    o.u = model.segment_unitary(af, dt, ap);
    if (open) {
      const double wf = model.fluxed_frequency(af);
      const double wp = model.partner_frequency(ap);
      o.d_fluxed = detail::transmon_dissipator(spec.relaxation ? nf.t1 : std::numeric_limits<double>::infinity(),
                                               spec.dephasing ? nf.dephasing_rate(wf) : 0.0, dt);
      o.d_partner = detail::transmon_dissipator(spec.relaxation ? np.t1 : std::numeric_limits<double>::infinity(),
                                                spec.dephasing ? np.dephasing_rate(wp) : 0.0, dt);
    }
    return cache.emplace(key, std::move(o)).first->second;
  };

  // Images of the dressed matrix units |i><j| (bare basis).
  std::vector<Mat9> x(81);
  for (int j = 0; j < 9; ++j)
    for (int i = 0; i < 9; ++i) x[i + 9 * j] = v.col(i) * v.col(j).adjoint();

  for (std::size_t k = 0; k < n; ++k) {
    const double af = (k < fluxed.size() ? fluxed.samples[k] : 0.0) + spec.flux_offset;
    const double ap = k < partner.size() ? partner.samples[k] : 0.0;
    const detail::SegmentOps& o = ops_for(af, ap);
    const Mat9 udag = o.u.adjoint();
    for (int s = 0; s < spec.substeps; ++s)
      for (auto& rho : x) {
        rho = (o.u * rho * udag).eval();
        if (open) {
          detail::apply_local(rho, o.d_fluxed, true);
          detail::apply_local(rho, o.d_partner, false);
        }
      }
  }

  const Vec9 r = model.frame_phases(static_cast<double>(n) * ts);
  const Mat9 w = r.asDiagonal() * v.adjoint();
  const Mat9 wdag = w.adjoint();
  Superop out(81, 81);
  for (int c = 0; c < 81; ++c) {
    const Mat9 y = w * x[c] * wdag;
    out.col(c) = Eigen::Map<const Eigen::Matrix<cplx, 81, 1>>(y.data());
  }
  return out;
}

inline double resolve_flux_sigma(const PairModel& model, const NoiseConfig& noise) {
  return noise.flux_noise_sigma ? *noise.flux_noise_sigma : flux_sigma_from_tables(model.pair().fluxed, noise.fluxed);
}

/// Channel of a gate schedule at the given cumulative error level.
inline Superop simulate_channel(const PairModel& model, const GateSchedule& gate, const NoiseConfig& noise,
                                NoiseLevel level) {
  noise.validate();
  ChannelSpec spec;
  spec.substeps = noise.trotter_substeps;
  spec.relaxation = level >= NoiseLevel::B;
  spec.dephasing = level >= NoiseLevel::C;
  Waveform fluxed = gate.fluxed;
  if (level >= NoiseLevel::E) {
    fluxed = apply_distortion(gate.fluxed, noise.distortion);
    fluxed.samples.resize(gate.fluxed.size());
  }
  if (level < NoiseLevel::D)
    return propagate_channel(model, fluxed, gate.partner, noise.fluxed, noise.partner, spec);

  const double sigma = resolve_flux_sigma(model, noise) / model.phi_res();
  return quasistatic_average(
      [&](double delta) {
        ChannelSpec s = spec;
        s.flux_offset = delta;
        return propagate_channel(model, fluxed, gate.partner, noise.fluxed, noise.partner, s);
      },
      sigma, noise.n_quasistatic, noise.seed);
}

inline Superop simulate_channel(const PairModel& model, const Waveform& fluxed, const NoiseConfig& noise,
                                NoiseLevel level) {
  return simulate_channel(model, GateSchedule{fluxed, Waveform{{}, fluxed.ts}}, noise, level);
}

// --------------------------------------------------------------------------
// Error budget

struct BudgetEntry {
  NoiseLevel level = NoiseLevel::A;
  double infidelity = 0.0;
  double leakage = 0.0;
  double d_infidelity = 0.0;  // increment over the previous level
  double d_leakage = 0.0;
};

struct ErrorBudget {
  std::string scheme;
  std::vector<BudgetEntry> entries;

  const BudgetEntry& at(NoiseLevel l) const { return entries.at(static_cast<std::size_t>(l)); }
};

/// Cumulative infidelity against CZ and leakage for levels A..E.
inline ErrorBudget error_budget(const PairModel& model, const GateSchedule& gate, const NoiseConfig& noise,
                                const std::string& scheme) {
  const PairUnitary u = model.propagate(gate.fluxed.view(), gate.fluxed.ts, gate.partner.view());
  const CPGateParams p = extract_cp_params(u, model.pair().interaction);
  if (phase_distance(p.phi2q, kPi) > kPi / 180.0)
    throw Error(Errc::InvalidConfig, scheme + " gate is not calibrated: conditional phase off by more than 1 degree");
  ErrorBudget b;
  b.scheme = scheme;
  for (NoiseLevel l : kAllLevels) {
    const Superop s = simulate_channel(model, gate, noise, l);
    BudgetEntry e;
    e.level = l;
    e.infidelity = 1.0 - avg_gate_fidelity(s);
    e.leakage = channel_leakage(s);
    if (!b.entries.empty()) {
      e.d_infidelity = e.infidelity - b.entries.back().infidelity;
      e.d_leakage = e.leakage - b.entries.back().leakage;
    } else {
      e.d_infidelity = e.infidelity;
      e.d_leakage = e.leakage;
    }
    b.entries.push_back(e);
  }
  return b;
}

inline std::pair<ErrorBudget, ErrorBudget> error_budget(const PairModel& model, const GateSchedule& snz_gate,
                                                        const GateSchedule& nz_gate, const NoiseConfig& noise) {
  return {error_budget(model, snz_gate, noise, "SNZ"), error_budget(model, nz_gate, noise, "NZ")};
}

}  // namespace snz
