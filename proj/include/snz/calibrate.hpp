#pragma once

// SNZ gate evaluators and calibration: conditional-phase / leakage landscapes
// over (A, B), the 180-degree contour, leakage minima along it, and nulling of
// single-qubit phases with weak bipolar pulses.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "snz/error.hpp"
#include "snz/gate_extract.hpp"
#include "snz/landscape.hpp"
#include "snz/pulse.hpp"
#include "snz/qutrit_model.hpp"

namespace snz {

struct GateEval {
  double phi2q = 0.0;
  double leak = 0.0;
};

inline GateEval evaluate_unitary(const PairUnitary& u, Interaction interaction = Interaction::Avoided11_02) {
  const CPGateParams p = extract_cp_params(u, interaction);
  return {p.phi2q, p.leak_l1};
}

inline GateEval evaluate_unitary(const ReducedUnitary& u) {
  const CPGateParams p = extract_cp_params(u);
  return {p.phi2q, p.leak_l1};
}

using Evaluator = std::function<GateEval(double, double)>;

/// SNZ pulses in the reduced model with the flux-arc detuning map.
class ReducedSnz {
 public:
  ReducedSnz(const PairSpec& pair, double ts = kDefaultSamplePeriod, int n_fine = 1)
      : dmap_(pair), j2_(pair.j2), ts_(ts), n_fine_(n_fine) {}

  /// Idealized pulse: two square halves around the idle diag(1, e^{-i Delta t_mid}).
  ReducedUnitary ideal(double a, double tp, double t_mid) const {
    const ReducedUnitary ua = reduced_propagate(dmap_(a), tp / 2, j2_);
    return ua * idle_unitary(dmap_.pair().delta_bias, t_mid) * ua;
  }

  /// Sampled pulse: square halves of tp / 2, n_fine samples at +-b bounding
  /// the idle, coupling on throughout. t_mid >= 2 n_fine ts unless it is 0.
  ReducedUnitary pulse(double a, double b, double tp, double t_mid) const {
    std::vector<double> d, t;
    d.push_back(dmap_(a));
    t.push_back(tp / 2);
    if (t_mid > 0.0) {
      const double fine = n_fine_ * ts_;
      if (t_mid < 2.0 * fine - 1e-15) throw Error(Errc::GridViolation, "t_mid shorter than the fine samples");
      d.insert(d.end(), {dmap_(b), dmap_(0.0), dmap_(b)});
      t.insert(t.end(), {fine, std::max(0.0, t_mid - 2.0 * fine), fine});
    }
    d.push_back(dmap_(a));
    t.push_back(tp / 2);
    return reduced_propagate(d, t, j2_);
  }

  /// Arbitrary waveform sampled at ts.
  ReducedUnitary waveform(const Waveform& w) const {
    std::vector<double> d(w.size()), t(w.size(), w.ts);
    for (std::size_t k = 0; k < w.size(); ++k) d[k] = dmap_(w.samples[k]);
    return reduced_propagate(d, t, j2_);
  }

  const DetuningMap& detuning() const { return dmap_; }
  double ts() const { return ts_; }

 private:
  DetuningMap dmap_;
  double j2_;
  double ts_;
  int n_fine_;
};

// --------------------------------------------------------------------------
// Calibration along the conditional-phase contour

struct CalibrationOptions {
  std::size_t budget = 600;
  double level = kPi;
  double speed_limit_factor = 10.0;
  double leakage_floor = 1e-6;        // resolution below which leakage counts as zero
  std::optional<double> reference_leak;
  int max_refined_minima = 8;
  int snap_iterations = 8;
};

struct ContourSample {
  double x = 0.0, y = 0.0, phi2q = 0.0, leak = 0.0;
};

struct CalibrationReport {
  LandscapeSamples phase;
  LandscapeSamples leakage;
  Contour contour;
  std::vector<std::vector<ContourSample>> trace;  // leakage along each polyline
  std::vector<ContourSample> minima;              // local leakage minima, best first
  double a_star = 0.0, b_star = 0.0;
  double phi2q = 0.0;
  double pc_residual = 0.0;  // |phi2q - level| on the circle (rad)
  double leak = 0.0;
  std::optional<double> reference_leak;
  bool speed_limit_violation = false;
  std::size_t evaluations = 0;
};

namespace detail {

class ContourWalker {
 public:
  ContourWalker(const Evaluator& f, const Bounds& b, double level, int iterations)
      : f_(f), b_(b), level_(level), iterations_(iterations) {}

  GateEval eval(double x, double y) {
    ++count_;
    return f_(x, y);
  }

  /// Newton projection onto the level set along the local phase gradient.
  ContourSample snap(double x, double y) {
    GateEval e = eval(x, y);
    double g = wrap_phase(e.phi2q - level_);
    const double hx = 1e-7 * b_.width(), hy = 1e-7 * b_.height();
    for (int it = 0; it < iterations_ && std::abs(g) > 1e-11; ++it) {
      // One-sided differences stepping inward at the upper bounds.
      const double dx = x + hx > b_.x_max ? -hx : hx, dy = y + hy > b_.y_max ? -hy : hy;
      const double gx = wrap_phase(eval(x + dx, y).phi2q - e.phi2q) / dx;
      const double gy = wrap_phase(eval(x, y + dy).phi2q - e.phi2q) / dy;
      // Gradient in bounds-normalized coordinates.
      const double ux = gx * b_.width(), uy = gy * b_.height();
      const double n2 = ux * ux + uy * uy;
      if (!(n2 > 0.0)) break;
      double step = 1.0;
      bool moved = false;
      for (int half = 0; half < 6; ++half, step *= 0.5) {
        const double nx = std::clamp(x - step * g * ux / n2 * b_.width(), b_.x_min, b_.x_max);
        const double ny = std::clamp(y - step * g * uy / n2 * b_.height(), b_.y_min, b_.y_max);
        const GateEval en = eval(nx, ny);
        const double gn = wrap_phase(en.phi2q - level_);
        if (std::abs(gn) < std::abs(g)) {
          x = nx; y = ny; e = en; g = gn;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return {x, y, e.phi2q, e.leak};
  }

  std::size_t count() const { return count_; }

 private:
  const Evaluator& f_;
  Bounds b_;
  double level_;
  int iterations_;
  std::size_t count_ = 0;
};

inline Point2 along(const std::vector<ContourSample>& line, double s) {
  const double smax = static_cast<double>(line.size() - 1);
  s = std::clamp(s, 0.0, smax);
  const auto k = std::min(static_cast<std::size_t>(s), line.size() - 2);
  const double u = s - static_cast<double>(k);
  return {line[k].x + u * (line[k + 1].x - line[k].x), line[k].y + u * (line[k + 1].y - line[k].y)};
}

}  // namespace detail

/// Samples phi2q and L1 over `bounds`, extracts the phi2q = level contour,
/// snaps its vertices onto the exact level set and returns the contour point
/// with the least leakage (after a golden-section refinement around each
/// local minimum of the leakage trace).
inline CalibrationReport calibrate_on_contour(const Evaluator& f, const Bounds& bounds,
                                              const CalibrationOptions& opt = {}) {
  CalibrationReport rep;
  std::vector<double> leaks;
  auto phase_fn = [&](double x, double y) {
    const GateEval e = f(x, y);
    leaks.push_back(e.leak);
    return e.phi2q;
  };
  SamplerOptions so;
  so.kind = FieldKind::Phase;
  rep.phase = adaptive_sample(phase_fn, bounds, opt.budget, so);
  rep.leakage = rep.phase;
  for (std::size_t k = 0; k < leaks.size(); ++k) rep.leakage.points[k].value = leaks[k];
  rep.contour = extract_contour(rep.phase, opt.level, FieldKind::Phase);

  detail::ContourWalker walker(f, bounds, opt.level, opt.snap_iterations);
  for (const auto& line : rep.contour.polylines) {
    std::vector<ContourSample> tr;
    for (const auto& p : line) tr.push_back(walker.snap(p.x, p.y));
    rep.trace.push_back(std::move(tr));
  }
  // The reported contour carries the snapped vertices.
  for (std::size_t l = 0; l < rep.trace.size(); ++l)
    for (std::size_t i = 0; i < rep.trace[l].size(); ++i)
      rep.contour.polylines[l][i] = {rep.trace[l][i].x, rep.trace[l][i].y};

  // Local minima of the trace (plateaus count once).
  struct Candidate {
    std::size_t line, index;
    double leak;
  };
  std::vector<Candidate> cand;
  for (std::size_t l = 0; l < rep.trace.size(); ++l) {
    const auto& tr = rep.trace[l];
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const bool left = i == 0 || tr[i].leak < tr[i - 1].leak;
      const bool right = i + 1 == tr.size() || tr[i].leak <= tr[i + 1].leak;
      if (left && right) cand.push_back({l, i, tr[i].leak});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.leak < b.leak; });
  if (cand.size() > static_cast<std::size_t>(opt.max_refined_minima)) cand.resize(opt.max_refined_minima);

  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (const auto& c : cand) {
    const auto& tr = rep.trace[c.line];
    ContourSample best = tr[c.index];
    if (tr.size() >= 2) {
      double a = std::max(0.0, static_cast<double>(c.index) - 1.0);
      double b = std::min(static_cast<double>(tr.size() - 1), static_cast<double>(c.index) + 1.0);
      auto at = [&](double s) {
        const Point2 p = detail::along(tr, s);
        return walker.snap(p.x, p.y);
      };
      double s1 = b - g * (b - a), s2 = a + g * (b - a);
      ContourSample p1 = at(s1), p2 = at(s2);
      for (int it = 0; it < 40 && b - a > 1e-6; ++it) {
        if (p1.leak < p2.leak) {
          b = s2; s2 = s1; p2 = p1; s1 = b - g * (b - a); p1 = at(s1);
        } else {
          a = s1; s1 = s2; p1 = p2; s2 = a + g * (b - a); p2 = at(s2);
        }
      }
      for (const auto& p : {p1, p2})
        if (p.leak < best.leak && phase_distance(p.phi2q, opt.level) <= phase_distance(best.phi2q, opt.level) + 1e-6)
          best = p;
    }
    const bool duplicate = std::any_of(rep.minima.begin(), rep.minima.end(), [&](const ContourSample& m) {
      return std::hypot((m.x - best.x) / bounds.width(), (m.y - best.y) / bounds.height()) < 1e-3;
    });
    if (!duplicate) rep.minima.push_back(best);
  }
  std::sort(rep.minima.begin(), rep.minima.end(), [](const auto& a, const auto& b) { return a.leak < b.leak; });

  const ContourSample& best = rep.minima.front();
  rep.a_star = best.x;
  rep.b_star = best.y;
  rep.phi2q = best.phi2q;
  rep.leak = best.leak;
  rep.pc_residual = phase_distance(best.phi2q, opt.level);
  rep.reference_leak = opt.reference_leak;
  if (opt.reference_leak)
    rep.speed_limit_violation = rep.leak > opt.speed_limit_factor * std::max(*opt.reference_leak, opt.leakage_floor);
  rep.evaluations = leaks.size() + walker.count();
  return rep;
}

/// Number of distinct contour minima with leakage within `factor` of `reference`
/// (reference floored at the leakage resolution).
inline std::size_t count_minima_within(const CalibrationReport& rep, double reference, double factor,
                                       double floor = 1e-6) {
  const double cut = factor * std::max(reference, floor);
  return static_cast<std::size_t>(
      std::count_if(rep.minima.begin(), rep.minima.end(), [&](const ContourSample& m) { return m.leak <= cut; }));
}

enum class SnzModelKind { Reduced, Full };

/// A-window [0.9, 1.1], B-window [0, 1].
inline Bounds default_snz_bounds() { return {0.9, 1.1, 0.0, 1.0}; }

/// Calibrates an SNZ pulse of duration tp + t_mid over (A, B). When no
/// reference leakage is supplied and tp differs from choose_tp(t_lim), the
/// tp-matched pulse is calibrated too and serves as the speed-limit reference.
inline CalibrationReport calibrate_snz(const PairSpec& pair, double tp, double t_mid, CalibrationOptions opt = {},
                                       SnzModelKind kind = SnzModelKind::Reduced, double ts = kDefaultSamplePeriod,
                                       const Bounds& bounds = default_snz_bounds()) {
  Evaluator f;
  if (kind == SnzModelKind::Reduced) {
    const ReducedSnz model(pair, ts);
    f = [model, tp, t_mid](double a, double b) { return evaluate_unitary(model.pulse(a, b, tp, t_mid)); };
  } else {
    const PairModel model(pair);
    grid_samples(tp, ts);
    grid_samples(t_mid, ts);
    f = [model, tp, t_mid, ts, interaction = pair.interaction](double a, double b) {
      const Waveform w = make_snz({a, std::min(b, a), tp, t_mid, 1}, ts);
      return evaluate_unitary(model.propagate(w.view(), ts), interaction);
    };
  }
  const double matched = choose_tp(pair.t_lim(), ts);
  if (!opt.reference_leak && std::abs(tp - matched) >= 0.5 * ts) {
    CalibrationOptions ref = opt;
    ref.reference_leak = std::nullopt;
    opt.reference_leak = calibrate_snz(pair, matched, t_mid, ref, kind, ts, bounds).leak;
  }
  return calibrate_on_contour(f, bounds, opt);
}

// --------------------------------------------------------------------------
// Single-qubit phase nulling

/// (phi01, phi10) for weak-pulse amplitudes (c on the fluxed transmon, d on the partner).
using PhaseProbe = std::function<std::pair<double, double>(double, double)>;

struct PhaseNulling {
  double c_star = 0.0;
  double d_star = 0.0;
  double phi01 = 0.0;
  double phi10 = 0.0;
};

struct NullingOptions {
  double amplitude_max = 1.0;
  int scan_points = 200;
  double tol = 1e-4;
  int max_sweeps = 8;
};

namespace detail {

// Smallest |x| root of h on [0, xmax] found by scanning for a sign change
// that is not a 2 pi wrap, then bisection.
template <class H>
double phase_root(H&& h, const NullingOptions& opt) {
  double x0 = 0.0, h0 = h(0.0);
  if (std::abs(h0) < 0.1 * opt.tol) return 0.0;
  for (int k = 1; k <= opt.scan_points; ++k) {
    const double x1 = opt.amplitude_max * k / opt.scan_points;
    const double h1 = h(x1);
    if ((h0 < 0.0) != (h1 < 0.0) && std::abs(h0) < kPi / 2 && std::abs(h1) < kPi / 2) {
      double lo = x0, hi = x1, hlo = h0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if (std::abs(hm) < 0.01 * opt.tol || hi - lo < 1e-15) return mid;
        if ((hm < 0.0) == (hlo < 0.0)) lo = mid, hlo = hm;
        else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    x0 = x1;
    h0 = h1;
  }
  throw Error(Errc::RootNotBracketed, "no sign change of the single-qubit phase within the amplitude window");
}

}  // namespace detail

/// Alternating 1-D root finds: c nulls phi01, d nulls phi10.
inline PhaseNulling null_single_qubit_phases(const PhaseProbe& probe, const NullingOptions& opt = {}) {
  PhaseNulling r;
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    r.c_star = detail::phase_root([&](double c) { return wrap_phase(probe(c, r.d_star).first); }, opt);
    r.d_star = detail::phase_root([&](double d) { return wrap_phase(probe(r.c_star, d).second); }, opt);
    std::tie(r.phi01, r.phi10) = probe(r.c_star, r.d_star);
    r.phi01 = wrap_phase(r.phi01);
    r.phi10 = wrap_phase(r.phi10);
    if (std::abs(r.phi01) < opt.tol && std::abs(r.phi10) < opt.tol) return r;
  }
  throw Error(Errc::RootNotBracketed, "single-qubit phase nulling did not converge");
}

/// Gate schedule occupying one slot: strong pulse, weak correction, padding.
struct GateSchedule {
  Waveform fluxed;
  Waveform partner;
};

inline GateSchedule compose_schedule(const Waveform& strong, double c, double d, double t1q, double slot,
                                     const Waveform& partner_strong = {}) {
  const double ts = strong.ts;
  const Waveform weak_f = make_weak_correction(c, t1q, ts);
  const Waveform weak_p = make_weak_correction(d, t1q, ts);
  GateSchedule g;
  g.fluxed = pad_to(concat(strong, weak_f), slot);
  Waveform lead = partner_strong;
  lead.ts = ts;
  lead.samples.resize(strong.size(), 0.0);
  g.partner = pad_to(concat(lead, weak_p), slot);
  return g;
}

/// Probe built on the two-qutrit model for a fixed strong pulse.
inline PhaseProbe make_weak_pulse_probe(const PairModel& model, const Waveform& strong, double t1q, double slot,
                                        const Waveform& partner_strong = {}) {
  return [model, strong, t1q, slot, partner_strong](double c, double d) {
    const GateSchedule g = compose_schedule(strong, c, d, t1q, slot, partner_strong);
    const CPGateParams p =
        extract_cp_params(model.propagate(g.fluxed.view(), g.fluxed.ts, g.partner.view()), model.pair().interaction);
    return std::make_pair(p.phi01, p.phi10);
  };
}

}  // namespace snz
