#pragma once

// End-to-end construction of calibrated CZ schedules on the full two-qutrit
// model: strong-pulse calibration on the conditional-phase contour, then
// weak-pulse single-qubit phase nulling inside the allocated slot.

#include <functional>
#include <string>

#include "snz/calibrate.hpp"
#include "snz/gate_extract.hpp"
#include "snz/pulse.hpp"
#include "snz/qutrit_model.hpp"

namespace snz {

struct CalibratedGate {
  std::string scheme;
  Waveform strong;
  GateSchedule schedule;
  double a = 0.0;
  double b = 0.0;  // SNZ fine amplitude, or NZ a_curve
  CalibrationReport calibration;
  PhaseNulling nulling;
  CPGateParams params;  // full schedule, noiseless
};

using StrongBuilder = std::function<Waveform(double, double)>;

/// Alternates contour calibration of the strong pulse (evaluated inside the
/// full slot, weak pulses at their current values) with phase nulling, until
/// the nulled schedule's conditional phase is within tol of the level.
inline CalibratedGate calibrate_gate(const PairModel& model, std::string scheme, const StrongBuilder& strong,
                                     const Bounds& bounds, double t1q, double slot, const CalibrationOptions& opt = {},
                                     const NullingOptions& nopt = {}, int max_rounds = 4, double tol = 1e-3) {
  CalibratedGate g;
  g.scheme = std::move(scheme);
  const Interaction interaction = model.pair().interaction;
  double c = 0.0, d = 0.0;
  for (int round = 0; round < max_rounds; ++round) {
    const Evaluator f = [&](double x, double y) {
      const GateSchedule s = compose_schedule(strong(x, y), c, d, t1q, slot);
      return evaluate_unitary(model.propagate(s.fluxed.view(), s.fluxed.ts, s.partner.view()), interaction);
    };
    g.calibration = calibrate_on_contour(f, bounds, opt);
    g.a = g.calibration.a_star;
    g.b = g.calibration.b_star;
    g.strong = strong(g.a, g.b);
    g.nulling = null_single_qubit_phases(make_weak_pulse_probe(model, g.strong, t1q, slot), nopt);
    c = g.nulling.c_star;
    d = g.nulling.d_star;
    g.schedule = compose_schedule(g.strong, c, d, t1q, slot);
    g.params = extract_cp_params(model.propagate(g.schedule.fluxed.view(), g.schedule.fluxed.ts, g.schedule.partner.view()),
                                 interaction);
    if (phase_distance(g.params.phi2q, opt.level) < tol) break;
  }
  return g;
}

/// SNZ with tp from the speed limit, calibrated over (A, B) on the full model.
inline CalibratedGate calibrate_snz_gate(const PairSpec& pair, double t_mid, double t1q, double slot,
                                         const CalibrationOptions& opt = {}, double ts = kDefaultSamplePeriod,
                                         const NullingOptions& nopt = {}) {
  const PairModel model(pair);
  const double tp = choose_tp(pair.t_lim(), ts);
  grid_samples(t_mid, ts);
  const StrongBuilder strong = [=](double a, double b) { return make_snz({a, std::min(b, a), tp, t_mid, 1}, ts); };
  return calibrate_gate(model, "SNZ", strong, default_snz_bounds(), t1q, slot, opt, nopt);
}

inline Bounds default_nz_bounds() { return {1.0, 1.5, 0.0, 1.0}; }

/// Conventional NZ of fixed duration tp, calibrated over (A, a_curve).
inline CalibratedGate calibrate_nz_gate(const PairSpec& pair, double tp, double t1q, double slot,
                                        const CalibrationOptions& opt = {}, double ts = kDefaultSamplePeriod,
                                        const Bounds& bounds = default_nz_bounds(), const NullingOptions& nopt = {}) {
  const PairModel model(pair);
  grid_samples(tp, ts);
  const StrongBuilder strong = [=](double a, double c) { return make_nz({a, c, tp}, ts); };
  return calibrate_gate(model, "NZ", strong, bounds, t1q, slot, opt, nopt);
}

}  // namespace snz
