// snzcal: chevron, landscape, calibration, error-budget and RB workflows.
// Exit codes: 0 success, 1 usage or configuration error, 2 computational failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "snz/calibrate.hpp"
#include "snz/chevron.hpp"
#include "snz/config.hpp"
#include "snz/gates.hpp"
#include "snz/io.hpp"
#include "snz/landscape.hpp"
#include "snz/noise.hpp"
#include "snz/rb.hpp"

namespace fs = std::filesystem;
using namespace snz;

namespace {

struct Common {
  std::string device;
  std::string pair;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::size_t budget = 0;  // 0: command default
  std::string model = "reduced";
};

struct Grid {
  int nx = 0, ny = 0;
};

Grid parse_grid(const std::string& s) {
  Grid g;
  if (s.empty()) return g;
  const auto x = s.find('x');
  if (x == std::string::npos) throw Error(Errc::InvalidConfig, "--grid expects NxM");
  g.nx = std::stoi(s.substr(0, x));
  g.ny = std::stoi(s.substr(x + 1));
  if (g.nx < 2 || g.ny < 2) throw Error(Errc::InvalidConfig, "--grid needs at least 2x2");
  return g;
}

SnzModelKind parse_model(const std::string& m) {
  if (m == "reduced") return SnzModelKind::Reduced;
  if (m == "full") return SnzModelKind::Full;
  throw Error(Errc::InvalidConfig, "--model must be reduced or full");
}

LandscapeSamples sample(const std::function<double(double, double)>& f, const Bounds& b, const Grid& g,
                        std::size_t budget, FieldKind kind) {
  if (g.nx > 0) return grid_sample(f, b, g.nx, g.ny);
  SamplerOptions o;
  o.kind = kind;
  return adaptive_sample(f, b, budget, o);
}

void write_contour_csv(const fs::path& p, const Contour& c) {
  std::ofstream f = open_out(p);
  f << "polyline,index,x,y\n";
  for (std::size_t l = 0; l < c.polylines.size(); ++l)
    for (std::size_t i = 0; i < c.polylines[l].size(); ++i)
      f << l << ',' << i << ',' << c.polylines[l][i].x << ',' << c.polylines[l][i].y << '\n';
}

// --------------------------------------------------------------------------

int cmd_chevron(const Common& c, const std::string& grid, double a_lo, double a_hi, double t_max_ns) {
  const DeviceConfig dev = load_device(c.device);
  const PairConfig& pc = dev.pair(c.pair);
  const PairSpec& pair = pc.spec;
  const double t_max = t_max_ns > 0 ? units::ns(t_max_ns) : 2.25 * kPi / std::max(pair.j2, units::mhz(1.0));
  const Bounds b{a_lo, a_hi, 0.0, t_max};
  std::function<double(double, double)> f;
  std::optional<PairModel> full;
  const DetuningMap dmap(pair);
  if (parse_model(c.model) == SnzModelKind::Reduced) {
    f = [&](double a, double t) { return std::norm(reduced_propagate(dmap(a), t, pair.j2)(1, 0)); };
  } else {
    full.emplace(pair);
    const int target = target_index(pair.interaction);
    f = [&](double a, double t) {
      const auto n = static_cast<std::size_t>(std::llround(t / dev.ts));
      const Waveform w{std::vector<double>(n, a), dev.ts};
      const PairUnitary u = full->propagate(w.view(), dev.ts);
      return std::norm(u(target, pair_index(1, 1)));
    };
  }
  const LandscapeSamples s = sample(f, b, parse_grid(grid), c.budget ? c.budget : 1024, FieldKind::Scalar);
  const fs::path out(c.out);
  write_samples_csv(out / "chevron_map.csv", s, "amplitude", "t_s", "p_target");
  const ChevronFit fit = chevron_fit(s);
  json j = to_json(fit);
  j["pair"] = c.pair;
  j["model"] = c.model;
  write_json(out / "chevron_fit.json", j);
  std::printf("t_lim_fit = %.4f ns, a_res = %.5f\n", units::to_ns(fit.t_lim_fit), fit.a_res);
  return 0;
}

struct LandscapeArgs {
  int tp_offset = 0;
  std::string grid;
  std::string axes = "ab";
  double t_mid_max_ns = 3.2;
};

int cmd_landscape(const Common& c, const LandscapeArgs& a, bool calibrate) {
  const DeviceConfig dev = load_device(c.device);
  const PairConfig& pc = dev.pair(c.pair);
  const PairSpec& pair = pc.spec;
  pair.validate();
  const fs::path out(c.out);
  CalibrationOptions opt;
  if (c.budget) opt.budget = c.budget;
  const double tp = choose_tp(pair.t_lim(), dev.ts) + a.tp_offset * dev.ts;

  if (a.axes == "tmid") {
    // Idealized (continuous-time) pulse over amplitude and intermediate idle.
    const ReducedSnz model(pair, dev.ts);
    const Bounds b{0.9, 1.1, 0.0, units::ns(a.t_mid_max_ns)};
    const Grid g = parse_grid(a.grid);
    const LandscapeSamples ph = sample(
        [&](double x, double y) { return evaluate_unitary(model.ideal(x, pair.t_lim(), y)).phi2q; }, b, g,
        opt.budget, FieldKind::Phase);
    LandscapeSamples lk = ph;
    for (auto& p : lk.points) p.value = evaluate_unitary(model.ideal(p.x, pair.t_lim(), p.y)).leak;
    write_samples_csv(out / "phase.csv", ph, "amplitude", "t_mid_s", "phi2q_rad");
    write_samples_csv(out / "leakage.csv", lk, "amplitude", "t_mid_s", "leak_l1");
    write_contour_csv(out / "contour.csv", extract_contour(ph, kPi, FieldKind::Phase));
    return 0;
  }
  if (a.axes != "ab") throw Error(Errc::InvalidConfig, "--axes must be ab or tmid");

  const CalibrationReport r = calibrate_snz(pair, tp, pc.t_mid, opt, parse_model(c.model), dev.ts);
  write_samples_csv(out / "phase.csv", r.phase, "a", "b", "phi2q_rad");
  write_samples_csv(out / "leakage.csv", r.leakage, "a", "b", "leak_l1");
  write_contour_csv(out / "contour.csv", r.contour);
  if (calibrate) {
    write_trace_csv(out / "trace.csv", r);
    json j = to_json(r);
    j["pair"] = c.pair;
    j["model"] = c.model;
    j["tp_samples"] = grid_samples(tp, dev.ts);
    j["t_mid_samples"] = grid_samples(pc.t_mid, dev.ts);
    write_json(out / "calibration.json", j);
    std::printf("a* = %.6f  b* = %.6f  L1 = %.3e  minima = %zu%s\n", r.a_star, r.b_star, r.leak, r.minima.size(),
                r.speed_limit_violation ? "  SpeedLimitViolation" : "");
  }
  return 0;
}

int cmd_budget(const Common& c) {
  const DeviceConfig dev = load_device(c.device);
  const PairConfig& pc = dev.pair(c.pair);
  pc.spec.validate();
  const NoiseConfig noise = dev.noise_for(pc, c.seed);
  const PairModel model(pc.spec);
  CalibrationOptions opt;
  if (c.budget) opt.budget = c.budget;

  std::vector<CalibratedGate> gates;
  gates.push_back(calibrate_snz_gate(pc.spec, pc.t_mid, pc.t1q, pc.slot, opt, dev.ts));
  // Conventional NZ has no idle and fills the rest of the slot with the weak pulses.
  if (pc.nz_tp) gates.push_back(calibrate_nz_gate(pc.spec, *pc.nz_tp, pc.slot - *pc.nz_tp, pc.slot, opt, dev.ts));

  std::vector<ErrorBudget> budgets;
  json jb = json::array(), jg = json::array();
  bool monotone = true;
  for (const auto& g : gates) {
    budgets.push_back(error_budget(model, g.schedule, noise, g.scheme));
    const ErrorBudget& b = budgets.back();
    monotone = monotone && b.at(NoiseLevel::A).infidelity <= b.at(NoiseLevel::B).infidelity + 1e-12 &&
               b.at(NoiseLevel::B).infidelity <= b.at(NoiseLevel::C).infidelity + 1e-12;
    jb.push_back(to_json(b));
    jg.push_back(to_json(g));
  }
  const fs::path out(c.out);
  write_budget_csv(out / "budget.csv", budgets);
  write_json(out / "budget.json", {{"pair", c.pair}, {"seed", c.seed}, {"monotone_abc", monotone}, {"budgets", jb}});
  write_json(out / "gates.json", jg);
  for (const auto& b : budgets)
    std::printf("%-3s  1-F(E) = %.4f%%  L1(E) = %.4f%%\n", b.scheme.c_str(), 100 * b.at(NoiseLevel::E).infidelity,
                100 * b.at(NoiseLevel::E).leakage);
  if (!monotone) {
    std::fprintf(stderr, "budget violates A <= B <= C\n");
    return 2;
  }
  return 0;
}

int cmd_rbfit(const Common& c, bool synth, const std::string& ref_csv, const std::string& inter_csv) {
  const fs::path out(c.out);
  DecayCurve ref, inter;
  if (synth) {
    const DeviceConfig dev = load_device(c.device);
    const RBConfig& r = dev.rb;
    RBSynthOptions o;
    o.seepage_ratio = r.seepage_ratio;
    std::tie(ref, inter) =
        synth_decays(r.f_gate, r.l1_gate, r.f_ref_clifford, r.l1_ref_clifford, r.n_cliffords, r.shots, c.seed, o);
    fs::create_directories(out);
    write_decay_csv((out / "reference.csv").string(), ref);
    write_decay_csv((out / "interleaved.csv").string(), inter);
  } else {
    if (ref_csv.empty() || inter_csv.empty()) throw Error(Errc::InvalidConfig, "give --synth or both --ref and --inter");
    ref = read_decay_csv(ref_csv);
    inter = read_decay_csv(inter_csv);
  }
  const RBFit fr = fit_decay(ref);
  const RBFit fi = fit_decay(inter);
  const IRBResult x = interleaved_extract(fr, fi);
  write_json(out / "rb_fit.json", {{"reference", to_json(fr)}, {"interleaved", to_json(fi)}, {"gate", to_json(x)}});
  std::printf("F = %.3f +- %.3f %%  L1 = %.3f +- %.3f %%%s\n", 100 * x.fidelity, 100 * x.fidelity_err,
              100 * x.leakage, 100 * x.leakage_err, x.invalid_ratio ? "  InvalidRatio" : "");
  return 0;
}

int exit_code(Errc e) {
  switch (e) {
    case Errc::InvalidConfig:
    case Errc::GridViolation:
    case Errc::OutOfRange:
    case Errc::MissingNoiseField:
    case Errc::EmptyPulse:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SNZ CZ-gate simulation and calibration"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* s, bool needs_pair) {
    s->add_option("--device", c.device, "device JSON")->required()->check(CLI::ExistingFile);
    auto* p = s->add_option("--pair", c.pair, "pair name from the device file");
    if (needs_pair) p->required();
    s->add_option("--out", c.out, "output directory")->capture_default_str();
    s->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    s->add_option("--budget", c.budget, "function-evaluation budget for adaptive sampling");
  };

  auto* chev = app.add_subcommand("chevron", "square-pulse chevron and fit of t_lim and resonance amplitude");
  common(chev, true);
  std::string grid;
  double a_lo = 0.96, a_hi = 1.04, t_max = 0.0;
  chev->add_option("--grid", grid, "uniform NxM grid instead of adaptive sampling");
  chev->add_option("--model", c.model, "reduced or full")->capture_default_str();
  chev->add_option("--a-min", a_lo)->capture_default_str();
  chev->add_option("--a-max", a_hi)->capture_default_str();
  chev->add_option("--t-max-ns", t_max, "duration range (default 2.25 t_lim)");

  LandscapeArgs la;
  auto* land = app.add_subcommand("landscape", "conditional-phase and leakage landscapes with the 180 deg contour");
  auto* cal = app.add_subcommand("calibrate", "landscape plus leakage trace along the contour and (A*, B*)");
  for (auto* s : {land, cal}) {
    common(s, true);
    s->add_option("--tp-offset", la.tp_offset, "offset of tp from the matched value, in samples")->capture_default_str();
    s->add_option("--model", c.model, "reduced or full")->capture_default_str();
  }
  land->add_option("--axes", la.axes, "ab: (A, B) at the pair's t_mid; tmid: idealized (A, t_mid)")->capture_default_str();
  land->add_option("--grid", la.grid, "uniform NxM grid (axes tmid only)");
  land->add_option("--t-mid-max-ns", la.t_mid_max_ns)->capture_default_str();

  auto* bud = app.add_subcommand("budget", "error budget A-E for SNZ and, if configured, NZ");
  common(bud, true);

  auto* rb = app.add_subcommand("rbfit", "fit leakage-modified interleaved RB decays");
  common(rb, false);
  bool synth = false;
  std::string ref_csv, inter_csv;
  rb->add_flag("--synth", synth, "synthesize curves from the device rb section");
  rb->add_option("--ref", ref_csv, "reference decay CSV");
  rb->add_option("--inter", inter_csv, "interleaved decay CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (*chev) return cmd_chevron(c, grid, a_lo, a_hi, t_max);
    if (*land) return cmd_landscape(c, la, false);
    if (*cal) return cmd_landscape(c, la, true);
    if (*bud) return cmd_budget(c);
    if (*rb) return cmd_rbfit(c, synth, ref_csv, inter_csv);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
