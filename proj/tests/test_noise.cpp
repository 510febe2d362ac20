#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "snz/gates.hpp"
#include "snz/noise.hpp"
#include "test_support.hpp"

using namespace snz;
using namespace snz::units;

namespace {

constexpr double ts = kDefaultSamplePeriod;

const CalibratedGate& snz_gate() {
  static const CalibratedGate g = calibrate_snz_gate(test::qm2_qh(), 9 * ts, 24 * ts, 144 * ts);
  return g;
}

NoiseConfig noiseless() {
  NoiseConfig n;
  n.flux_noise_sigma = 0.0;
  n.n_quasistatic = 3;
  return n;
}

CoherenceTable flat(double omega_lo, double omega_hi, double t) { return CoherenceTable{{{omega_lo, t}, {omega_hi, t}}}; }

// Analytic arc slope |d omega / d flux| at the flux where omega(flux) = omega.
double arc_slope(const TransmonSpec& t, double omega) {
  const double a = std::abs(t.anharm), w0 = t.omega_sweet + a;
  const double r = (omega + a) / w0;
  const double c = r * r;
  return w0 * kPi * std::sqrt(1.0 - c * c) / (2.0 * std::sqrt(c));
}

}  // namespace

TEST(CoherenceTable, LinearInterpolationAndClamping) {
  const CoherenceTable t{{{1.0, 10.0}, {3.0, 30.0}}};
  EXPECT_DOUBLE_EQ(t.at(2.0), 20.0);
  EXPECT_DOUBLE_EQ(t.at(0.0), 10.0);
  EXPECT_DOUBLE_EQ(t.at(5.0), 30.0);
  EXPECT_THROW((CoherenceTable{{{3.0, 1.0}, {1.0, 1.0}}}.validate("t")), Error);

  TransmonNoise n;
  n.t1 = us(40);
  n.t2_echo = flat(ghz(5), ghz(7), us(50));
  EXPECT_NEAR(n.dephasing_rate(ghz(6)), 1.0 / us(50) - 1.0 / (2 * us(40)), 1e-9);
}

TEST(Dissipator, RatesMatchClosedForm) {
  const double t1 = us(20), gphi = 1.0 / us(15), dt = us(3);
  const auto d = detail::transmon_dissipator(t1, gphi, dt);
  auto apply = [&](const Mat3& rho) {
    Eigen::Matrix<cplx, 9, 1> v = Eigen::Map<const Eigen::Matrix<cplx, 9, 1>>(rho.data());
    Eigen::Matrix<cplx, 9, 1> o = d * v;
    return Mat3(Eigen::Map<const Mat3>(o.data()));
  };
  Mat3 one = Mat3::Zero();
  one(1, 1) = 1.0;
  EXPECT_NEAR(apply(one)(1, 1).real(), std::exp(-dt / t1), 1e-12);
  Mat3 two = Mat3::Zero();
  two(2, 2) = 1.0;
  EXPECT_NEAR(apply(two)(2, 2).real(), std::exp(-2 * dt / t1), 1e-12);
  EXPECT_NEAR(apply(two).trace().real(), 1.0, 1e-12);
  Mat3 coh = Mat3::Zero();
  coh(0, 1) = 1.0;
  EXPECT_NEAR(std::abs(apply(coh)(0, 1)), std::exp(-dt * (gphi + 0.5 / t1)), 1e-12);
  Mat3 coh2 = Mat3::Zero();
  coh2(0, 2) = 1.0;
  EXPECT_NEAR(std::abs(apply(coh2)(0, 2)), std::exp(-dt * (4 * gphi + 1.0 / t1)), 1e-12);
}

TEST(QuasistaticAverage, TrivialAndLinear) {
  EXPECT_EQ(quasistatic_average([](double x) { return 3.0 + x; }, 0.0, 1, 7), 3.0);
  for (int n : {1, 2, 11, 101}) {
    const double sigma = 0.2;
    const double m = quasistatic_average([](double x) { return 1.5 + 4.0 * x; }, sigma, n, 3);
    EXPECT_LE(std::abs(m - 1.5), 3 * 4.0 * sigma / std::sqrt(n));
  }
  const double q = quasistatic_average([](double x) { return x * x; }, 0.1, 20001, 5);
  EXPECT_NEAR(q, 0.01, 5e-4);
  EXPECT_THROW(quasistatic_average([](double x) { return x; }, 1.0, 0, 1), Error);
}

TEST(QuasistaticAverage, DeterministicGivenSeed) {
  auto f = [](double x) { return std::cos(x); };
  EXPECT_EQ(quasistatic_average(f, 1.0, 8, 42), quasistatic_average(f, 1.0, 8, 42));
  EXPECT_NE(quasistatic_average(f, 1.0, 8, 42), quasistatic_average(f, 1.0, 8, 43));
}

TEST(FluxSigma, RecoveredFromSyntheticTables) {
  const TransmonSpec t = test::qm2_qh().fluxed;
  const double sigma = 3e-5;
  TransmonNoise n;
  n.t1 = us(40);
  for (double det : {0.8, 0.5, 0.3, 0.1, 0.0}) {
    const double w = t.omega_sweet - ghz(det);
    const double t2e = us(50) / (1.0 + 20 * det);
    n.t2_echo.nodes.push_back({w, t2e});
    const double extra = det > 0 ? sigma * arc_slope(t, w) / std::sqrt(2.0) : 1.0 / us(100);
    n.t2_star.nodes.push_back({w, 1.0 / (1.0 / t2e + extra)});
  }
  EXPECT_NEAR(flux_sigma_from_tables(t, n), sigma, 1e-3 * sigma);
  EXPECT_THROW(flux_sigma_from_tables(t, TransmonNoise{}), Error);
}

TEST(SimulateChannel, LevelAIsTheUnitaryChannel) {
  const PairModel model(test::qm2_qh());
  const GateSchedule& g = snz_gate().schedule;
  const Superop s = simulate_channel(model, g, noiseless(), NoiseLevel::A);
  const PairUnitary u = model.propagate(g.fluxed.view(), ts, g.partner.view());
  EXPECT_LT(max_abs(s - unitary_superop(u)), 1e-12);
  EXPECT_NEAR(avg_gate_fidelity(s), avg_gate_fidelity(u), 1e-10);
  EXPECT_NEAR(channel_leakage(s), channel_leakage(u), 1e-10);
}

TEST(SimulateChannel, CalibratedStrongPulseIsNearlyIdeal) {
  const PairSpec pair = test::qm2_qh();
  const PairModel model(pair);
  const double tp = choose_tp(pair.t_lim(), ts);
  const CalibrationReport r = calibrate_snz(pair, tp, 9 * ts, {}, SnzModelKind::Full);
  const Waveform w = make_snz({r.a_star, r.b_star, tp, 9 * ts, 1}, ts);
  const PairUnitary u = null_phases_virtually(model.propagate(w.view(), ts));
  const Superop s = simulate_channel(model, w, noiseless(), NoiseLevel::A);
  EXPECT_LT(max_abs(s - unitary_superop(model.propagate(w.view(), ts))), 1e-12);
  // The residual is the off-resonant |01>-|10> exchange of the sudden
  // pulse; compare with the fidelity of that exchange alone.
  const double c = std::sqrt(1.0 - std::norm(u(pair_index(0, 1), pair_index(1, 0))));
  const double f_exchange = (std::pow(2.0 + 2.0 * c, 2) + 4.0) / 20.0;
  const double infid = 1.0 - avg_gate_fidelity(unitary_superop(u));
  EXPECT_LT(infid, 1e-3);
  EXPECT_NEAR(infid, 1.0 - f_exchange, 0.1 * (1.0 - f_exchange));

  // Without the spectator transition the ideal point is exact.
  const ReducedSnz reduced(pair, ts);
  const PairUnitary ideal = null_phases_virtually(embed_reduced(reduced.ideal(1.0, pair.t_lim(), 0.0)));
  EXPECT_LT(1.0 - avg_gate_fidelity(unitary_superop(ideal)), 1e-6);
}

TEST(SimulateChannel, InfiniteT1MatchesLevelA) {
  const PairModel model(test::qm2_qh());
  const GateSchedule& g = snz_gate().schedule;
  const Superop a = simulate_channel(model, g, noiseless(), NoiseLevel::A);
  const Superop b = simulate_channel(model, g, noiseless(), NoiseLevel::B);
  EXPECT_LT(max_abs(a - b), 1e-12);
}

TEST(SimulateChannel, EmittedChannelsAreCPTP) {
  const PairSpec pair = test::qm2_qh();
  const PairModel model(pair);
  NoiseConfig nc;
  nc.fluxed.t1 = us(5);
  nc.partner.t1 = us(8);
  nc.fluxed.t2_echo = flat(ghz(5), ghz(7), us(4));
  nc.partner.t2_echo = flat(ghz(5), ghz(7), us(6));
  nc.flux_noise_sigma = 1e-4;
  nc.n_quasistatic = 5;
  nc.distortion.terms = {{0.01, ns(20)}};
  const Waveform w = make_snz({1.0, 0.3, 70 * ts, 9 * ts, 1}, ts);
  for (NoiseLevel l : kAllLevels) {
    const Superop s = simulate_channel(model, w, nc, l);
    EXPECT_LT(trace_preservation_defect(s), 1e-9) << to_char(l);
    EXPECT_GE(min_choi_eigenvalue(s), -1e-9) << to_char(l);
  }
}

TEST(SimulateChannel, FluxNoiseAddsLeakageToSquarePulse) {
  const PairSpec pair = test::qm2_qh();
  const PairModel model(pair);
  const Waveform sq = make_square(1.0, choose_tp(pair.t_lim(), ts), ts);
  // Flux spread giving a detuning spread of about J2 / 10 at the resonance.
  const double h = 1e-6;
  const double slope =
std::abs(flux_arc_detuning(pair, 1.0 + h) - flux_arc_detuning(pair, 1.0 - h)) / (2 * h);
  NoiseConfig nc;
  nc.fluxed.t1 = us(40);
  nc.partner.t1 = us(40);
  nc.flux_noise_sigma = pair.j2 / 10 / slope * model.phi_res();
  nc.n_quasistatic = 11;
  nc.seed = 9;
  const double lc = channel_leakage(simulate_channel(model, sq, nc, NoiseLevel::C));
  const double ld = channel_leakage(simulate_channel(model, sq, nc, NoiseLevel::D));
  EXPECT_GT(ld, lc);
}

TEST(SimulateChannel, MissingNoiseFields) {
  const PairModel model(test::qm2_qh());
  const Waveform sq = make_square(1.0, 20 * ts, ts);
  // No flux-noise sigma and no T2 tables to infer it from.
  NoiseConfig bare;
  bare.n_quasistatic = 3;
  try {
    simulate_channel(model, sq, bare, NoiseLevel::D);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingNoiseField);
  }
  NoiseConfig bad;
  bad.fluxed.t1 = -1.0;
  EXPECT_THROW(simulate_channel(model, sq, bad, NoiseLevel::B), Error);
}

TEST(SimulateChannel, HalvedTrotterStepAgrees) {
  const PairModel model(test::qm2_qh());
  NoiseConfig nc;
  nc.fluxed.t1 = us(37);
  nc.partner.t1 = us(47);
  nc.fluxed.t2_echo = CoherenceTable{{{ghz(5.4), us(5)}, {ghz(6.4329), us(54)}}};
  nc.partner.t2_echo = flat(ghz(5), ghz(7), us(77));
  const GateSchedule& g = snz_gate().schedule;
  const double f1 = avg_gate_fidelity(simulate_channel(model, g, nc, NoiseLevel::C));
  nc.trotter_substeps = 2;
  const double f2 = avg_gate_fidelity(simulate_channel(model, g, nc, NoiseLevel::C));
  EXPECT_LT(std::abs(f1 - f2), 1e-5);
}

TEST(Echo, BipolarPhaseIsFirstOrderInsensitive) {
  const PairSpec pair = test::qm2_qh();
  const PairModel model(pair);
  const CalibratedGate& g = snz_gate();
  const Waveform uni = make_square(g.a, static_cast<double>(g.strong.size()) * ts, ts);
  auto phase = [&](const Waveform& w, double delta) {
    Waveform s = w;
    for (double& x : s.samples) x += delta;
    return extract_cp_params(model.propagate(s.view(), ts), pair.interaction).phi2q;
  };
  auto slope = [&](const Waveform& w) {
    const double h = 1e-4;
    const double p0 = phase(w, 0.0);
    Eigen::MatrixXd a(9, 4);
    Eigen::VectorXd y(9);
    for (int k = 0; k < 9; ++k) {
      const double d = (k - 4) * h / 4;
      y(k) = wrap_phase(phase(w, d) - p0);
      for (int p = 0; p < 4; ++p) a(k, p) = std::pow(d / h, p);
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    return std::abs(c(1)) / h;
  };
  const double s_bi = slope(g.strong);
  const double s_uni = slope(uni);
  EXPECT_GT(s_uni, 1.0);
  EXPECT_LT(s_bi, 1e-3 * s_uni);
}

TEST(ErrorBudget, NoiselessLevelsAllEqual) {
  const PairModel model(test::qm2_qh());
  const ErrorBudget b = error_budget(model, snz_gate().schedule, noiseless(), "SNZ");
  ASSERT_EQ(b.entries.size(), 5u);
  const PairUnitary u = model.propagate(snz_gate().schedule.fluxed.view(), ts, snz_gate().schedule.partner.view());
  EXPECT_NEAR(b.at(NoiseLevel::A).infidelity, 1.0 - avg_gate_fidelity(u), 1e-10);
  EXPECT_NEAR(b.at(NoiseLevel::A).leakage, channel_leakage(u), 1e-10);
  for (const auto& e : b.entries) {
    EXPECT_NEAR(e.infidelity, b.entries[0].infidelity, 1e-12);
    EXPECT_NEAR(e.leakage, b.entries[0].leakage, 1e-12);
    EXPECT_GE(e.infidelity, -1e-9);
  }
}

TEST(ErrorBudget, RejectsUncalibratedGate) {
  const PairModel model(test::qm2_qh());
  const GateSchedule g = compose_schedule(make_snz({0.9, 0.0, 70 * ts, 9 * ts, 1}, ts), 0, 0, 24 * ts, 144 * ts);
  EXPECT_THROW(error_budget(model, g, noiseless(), "SNZ"), Error);
}

TEST(ErrorBudget, MonotoneThroughDephasingOverRandomConfigs) {
  const PairSpec pair = test::qm2_qh();
  const PairModel model(pair);
  const GateSchedule& g = snz_gate().schedule;
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    NoiseConfig nc;
    nc.fluxed.t1 = us(test::uniform(rng, 5, 100));
    nc.partner.t1 = us(test::uniform(rng, 5, 100));
    for (auto* t : {&nc.fluxed, &nc.partner}) {
      const double lo = us(test::uniform(rng, 2, 30)), hi = us(test::uniform(rng, 30, 120));
      t->t2_echo = CoherenceTable{{{ghz(4.0), lo}, {ghz(6.5), hi}}};
    }
    double prev = -1.0;
    for (NoiseLevel l : {NoiseLevel::A, NoiseLevel::B, NoiseLevel::C}) {
      const double inf = 1.0 - avg_gate_fidelity(simulate_channel(model, g, nc, l));
      EXPECT_GE(inf, prev - 1e-12) << "trial " << trial << " level " << to_char(l);
      prev = inf;
    }
  }
}

TEST(ErrorBudget, FixedSeedIsBitIdentical) {
  const PairModel model(test::qm2_qh());
  NoiseConfig nc;
  nc.fluxed.t1 = us(37);
  nc.flux_noise_sigma = 2e-5;
  nc.n_quasistatic = 4;
  nc.seed = 11;
  const ErrorBudget a = error_budget(model, snz_gate().schedule, nc, "SNZ");
  const ErrorBudget b = error_budget(model, snz_gate().schedule, nc, "SNZ");
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    EXPECT_EQ(a.entries[k].infidelity, b.entries[k].infidelity);
    EXPECT_EQ(a.entries[k].leakage, b.entries[k].leakage);
  }
}
