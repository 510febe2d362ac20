// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "snz/calibrate.hpp"
#include "snz/config.hpp"
#include "snz/gates.hpp"
#include "snz/landscape.hpp"
#include "snz/noise.hpp"
#include "snz/rb.hpp"

using namespace snz;
using namespace snz::units;

namespace {

const DeviceConfig& device() {
  static const DeviceConfig d = load_device(SNZ_SOURCE_DIR "/config/device.json");
  return d;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, double max_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (dt > max_seconds) {
    o.pass = false;
    o.detail += " (runtime over " + std::to_string(max_seconds) + " s)";
  }
  failures += !o.pass;
  std::printf("%s  %-22s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", name, dt, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// |<02|U|11>|^2 for a constant 2x2 Hamiltonian with detuning d and coupling j.
double rabi_oracle(double d, double j, double t) {
  const double w = std::sqrt(d * d + 4 * j * j);
  const double s = std::sin(w * t / 2);
  return 4 * j * j / (w * w) * s * s;
}

Outcome ideal_point() {
  const PairSpec& pair = device().pair("QL-QM2").spec;
  const GateEval e = evaluate_unitary(ReducedSnz(pair, device().ts).ideal(1.0, pair.t_lim(), 0.0));
  const double err = phase_distance(e.phi2q, kPi) * 180.0 / kPi;
  return {err <= 0.01 && e.leak < 1e-8, fmt("|phi2q - 180| = %.2e deg, L1 = %.2e", err, e.leak)};
}

Outcome landscape_structure() {
  const PairSpec& pair = device().pair("QL-QM2").spec;
  const ReducedSnz model(pair, device().ts);
  const double period = kTwoPi / pair.delta_bias;
  const Bounds b{0.9, 1.1, 0.0, ns(3.2)};
  auto eval = [&](double a, double t) { return evaluate_unitary(model.ideal(a, pair.t_lim(), t)); };
  SamplerOptions so;
  so.kind = FieldKind::Phase;
  const std::size_t budget = 2000;
  const LandscapeSamples s = adaptive_sample([&](double a, double t) { return eval(a, t).phi2q; }, b, budget, so);

  double worst_valley = 0.0, worst_period = 0.0;
  for (const auto& p : s.points) {
    worst_valley = std::max(worst_valley, eval(1.0, p.y).leak);
    if (p.y + period <= b.y_max) {
      const GateEval q = eval(p.x, p.y + period), r = eval(p.x, p.y);
      worst_period = std::max({worst_period, phase_distance(q.phi2q, r.phi2q), std::abs(q.leak - r.leak)});
    }
  }
  // Contour passes (1, k period) within the normalized sampling pitch.
  const Contour c = extract_contour(s, kPi, FieldKind::Phase);
  const double tol = 2.0 / std::sqrt(static_cast<double>(budget));
  double worst_hit = 0.0;
  for (int k = 1; k <= 3; ++k) {
    double best = 1e9;
    for (const auto& line : c.polylines)
      for (const auto& v : line)
        best = std::min(best, std::hypot((v.x - 1.0) / b.width(), (v.y - k * period) / b.height()));
    worst_hit = std::max(worst_hit, best);
  }
  const bool ok = worst_valley < 1e-8 && worst_period < 1e-6 && worst_hit <= tol && s.points.size() <= budget;
  return {ok, fmt("valley L1 max %.1e, period defect %.1e, contour miss %.4f (tol %.4f)", worst_valley, worst_period,
                  worst_hit, tol)};
}

Outcome grid_rule() {
  const std::vector<std::pair<std::string, std::size_t>> rows{
      {"QM1-QH", 78}, {"QM2-QH", 70}, {"QL-QM1", 98}, {"QL-QM2", 86}};
  std::string d;
  bool ok = true;
  for (const auto& [name, n] : rows) {
    const std::size_t got = grid_samples(choose_tp(device().pair(name).spec.t_lim(), device().ts), device().ts);
    ok = ok && got == n;
    d += name + "=" + std::to_string(got) + " ";
  }
  return {ok, d};
}

Outcome speed_limit() {
  const PairSpec& pair = device().pair("QL-QM2").spec;
  const double ts = device().ts, tp = choose_tp(pair.t_lim(), ts), t_mid = 3 * ts;
  CalibrationOptions opt;
  opt.budget = 800;
  opt.reference_leak = 0.0;
  const CalibrationReport matched = calibrate_snz(pair, tp, t_mid, opt, SnzModelKind::Reduced, ts);
  opt.reference_leak = matched.leak;
  const CalibrationReport shorter = calibrate_snz(pair, tp - 6 * ts, t_mid, opt, SnzModelKind::Reduced, ts);
  const CalibrationReport longer = calibrate_snz(pair, tp + 6 * ts, t_mid, opt, SnzModelKind::Reduced, ts);
  const double ref = std::max(matched.leak, opt.leakage_floor);
  const std::size_t n_long = count_minima_within(longer, matched.leak, 2.0, opt.leakage_floor);
  const bool ok = shorter.leak >= 10 * ref && n_long >= 2;
  return {ok, fmt("matched %.1e (floor %.0e), -6ts min %.2e, +6ts minima within 2x: %.0f", matched.leak,
                  opt.leakage_floor, shorter.leak, static_cast<double>(n_long))};
}

Outcome oracle_equivalence() {
  const PairSpec& pair = device().pair("QL-QM2").spec;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(-ghz(1.5), ghz(1.5)), ut(0.0, ns(60));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double d = ud(rng), t = ut(rng);
    worst = std::max(worst, std::abs(std::norm(reduced_propagate(d, t, pair.j2)(1, 0)) - rabi_oracle(d, pair.j2, t)));
  }
  const PairModel m(pair);
  const double half = pair.t_lim() / 2;
  const double transfer = std::norm(m.to_frame(m.segment_unitary(1.0, half), half)(pair_index(0, 2), pair_index(1, 1)));
  return {worst < 1e-10 && transfer >= 0.99, fmt("Rabi max error %.1e, full-model transfer %.5f (>= 0.99)", worst, transfer)};
}

Outcome echo() {
  const PairConfig& pc = device().pair("QM2-QH");
  const double ts = device().ts;
  const PairModel model(pc.spec);
  const CalibratedGate g = calibrate_snz_gate(pc.spec, pc.t_mid, pc.t1q, pc.slot, {}, ts);
  const Waveform uni = make_square(g.a, static_cast<double>(g.strong.size()) * ts, ts);
  auto slope = [&](const Waveform& w) {
    auto phase = [&](double delta) {
      Waveform s = w;
      for (double& x : s.samples) x += delta;
      return extract_cp_params(model.propagate(s.view(), ts), pc.spec.interaction).phi2q;
    };
    const double h = 1e-4, p0 = phase(0.0);
    Eigen::MatrixXd a(9, 4);
    Eigen::VectorXd y(9);
    for (int k = 0; k < 9; ++k) {
      const double d = (k - 4) * h / 4;
      y(k) = wrap_phase(phase(d) - p0);
      for (int p = 0; p < 4; ++p) a(k, p) = std::pow(d / h, p);
    }
    return std::abs(a.colPivHouseholderQr().solve(y)(1)) / h;
  };
  const double s_bi = slope(g.strong), s_uni = slope(uni);
  return {s_bi < 1e-3 * s_uni, fmt("|dphi/dflux| SNZ %.3e, unipolar %.3e rad per unit amplitude, ratio %.1e", s_bi, s_uni,
                                   s_bi / s_uni)};
}

Outcome rb_round_trip() {
  const RBConfig& r = device().rb;
  const double f = 0.9993, l1 = 0.0010;
  int ok = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto [ref, inter] = synth_decays(f, l1, r.f_ref_clifford, r.l1_ref_clifford, r.n_cliffords, 2000, 5000 + t);
    const IRBResult x = interleaved_extract(fit_decay(ref), fit_decay(inter));
    ok += std::abs(x.fidelity - f) <= 0.0024 && std::abs(x.leakage - l1) <= 0.0005;
  }
  return {ok >= 0.95 * trials, fmt("%.0f / %.0f trials within (0.24%%, 0.05%%), N max %.0f", ok, trials,
                                   r.n_cliffords.back())};
}

Outcome error_budget_bracket() {
  const PairConfig& pc = device().pair("QM2-QH");
  const PairModel model(pc.spec);
  const CalibratedGate g = calibrate_snz_gate(pc.spec, pc.t_mid, pc.t1q, pc.slot, {}, device().ts);
  const ErrorBudget b = error_budget(model, g.schedule, device().noise_for(pc, 1), "SNZ");
  const BudgetEntry& e = b.at(NoiseLevel::E);
  const double ia = b.at(NoiseLevel::A).infidelity, ib = b.at(NoiseLevel::B).infidelity,
               ic = b.at(NoiseLevel::C).infidelity;
  const bool ok = e.infidelity >= 2e-4 && e.infidelity <= 5e-3 && e.leakage >= 1e-4 && e.leakage <= 5e-3 && ia <= ib &&
                  ib <= ic;
  return {ok, fmt("E: 1-F %.3f%%, L1 %.3f%%; A/B/C 1-F %.2e", 100 * e.infidelity, 100 * e.leakage, ia) +
                  fmt(" / %.2e / %.2e", ib, ic)};
}

Outcome channel_validity() {
  const PairConfig& pc = device().pair("QM2-QH");
  const double ts = device().ts;
  const PairModel model(pc.spec);
  const CalibratedGate g = calibrate_snz_gate(pc.spec, pc.t_mid, pc.t1q, pc.slot, {}, ts);

  // Device noise plus an exaggerated configuration with strong distortion.
  NoiseConfig heavy = device().noise_for(pc, 2);
  heavy.fluxed.t1 = us(3);
  heavy.partner.t1 = us(4);
  heavy.fluxed.t2_echo = CoherenceTable{{{ghz(4), us(1)}, {ghz(7), us(2)}}};
  heavy.partner.t2_echo = CoherenceTable{{{ghz(4), us(2)}, {ghz(7), us(3)}}};
  heavy.flux_noise_sigma = 2e-4;
  heavy.n_quasistatic = 7;
  heavy.distortion.terms = {{0.05, ns(5)}, {-0.02, ns(40)}};
  NoiseConfig dev = device().noise_for(pc, 3);
  dev.n_quasistatic = 21;

  const std::vector<GateSchedule> gates{g.schedule,
                                        {make_square(1.0, choose_tp(pc.spec.t_lim(), ts), ts), Waveform{{}, ts}}};
  double worst_tp = 0.0, worst_choi = 0.0;
  int n = 0;
  for (const auto& gate : gates)
    for (const NoiseConfig* nc : {&dev, &heavy})
      for (NoiseLevel l : kAllLevels) {
        const Superop s = simulate_channel(model, gate, *nc, l);
        worst_tp = std::max(worst_tp, trace_preservation_defect(s));
        worst_choi = std::min(worst_choi, min_choi_eigenvalue(s));
        ++n;
      }
  return {worst_tp <= 1e-9 && worst_choi >= -1e-9,
          fmt("%.0f channels, TP defect max %.1e, min Choi eigenvalue %.1e", n, worst_tp, worst_choi)};
}

}  // namespace

int main() {
  run("ideal-point", 1, ideal_point);
  run("landscape-structure", 60, landscape_structure);
  run("grid-rule", 1, grid_rule);
  run("speed-limit", 300, speed_limit);
  run("oracle-equivalence", 30, oracle_equivalence);
  run("echo", 60, echo);
  run("rb-round-trip", 120, rb_round_trip);
  run("error-budget", 600, error_budget_bracket);
  run("channel-validity", 600, channel_validity);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
