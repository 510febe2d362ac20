#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "snz/pulse.hpp"
#include "snz/qutrit_model.hpp"
#include "test_support.hpp"

using namespace snz;
using namespace snz::units;
using snz::test::uniform;

namespace {

// |<t|U|11>|^2 for a constant detuning, from the two-level Rabi formula.
double rabi_transfer(double d, double j, double t) {
  const double w = std::sqrt(d * d + 4 * j * j);
  const double s = std::sin(w * t / 2);
  return 4 * j * j / (w * w) * s * s;
}

}  // namespace

TEST(ReducedHamiltonian, ResonanceHasZeroDiagonal) {
  const Mat2 h = reduced_hamiltonian(0.0, 3.0);
  EXPECT_EQ(h(0, 0), cplx(0.0));
  EXPECT_EQ(h(1, 1), cplx(0.0));
  EXPECT_EQ(h(0, 1), cplx(3.0));
  EXPECT_EQ(h(1, 0), cplx(3.0));
}

TEST(ReducedHamiltonian, DetuningSitsOnTargetState) {
  const double j = kPi / ns(35.40);
  EXPECT_NEAR(to_mhz(j), 14.124, 1e-3);
  const Mat2 h = reduced_hamiltonian(ghz(1.063), j);
  EXPECT_DOUBLE_EQ(h(1, 1).real(), ghz(1.063));
}

TEST(ReducedHamiltonian, SplittingMatchesClosedForm) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const double d = uniform(rng, -5, 5), j = uniform(rng, 0.1, 2);
    Eigen::SelfAdjointEigenSolver<Mat2> es(reduced_hamiltonian(-d, j));
    EXPECT_NEAR(es.eigenvalues()(1) - es.eigenvalues()(0), std::sqrt(d * d + 4 * j * j), 1e-12);
  }
}

TEST(ReducedPropagate, EmptyPulseThrows) {
  std::vector<double> none;
  try {
    reduced_propagate(none, none, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyPulse);
  }
}

TEST(ReducedPropagate, ZeroDurationIsIdentity) {
  EXPECT_LT(max_abs(reduced_propagate(0.0, 0.0, 1.0) - Mat2::Identity()), 1e-15);
}

TEST(ReducedPropagate, FullTransferOnResonance) {
  const double j = kPi / ns(35.40);
  const Mat2 u = reduced_propagate(0.0, ns(35.40) / 2, j);
  EXPECT_NEAR(std::abs(u(1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::arg(u(1, 0)), -kPi / 2, 1e-10);
  EXPECT_NEAR(std::arg(u(0, 1)), -kPi / 2, 1e-10);
}

TEST(ReducedPropagate, MatchesRabiFormula) {
  std::mt19937_64 rng(2);
  const double j = kPi / ns(35.40);
  for (int i = 0; i < 1000; ++i) {
    const double d = uniform(rng, -ghz(1.5), ghz(1.5));
    const double t = uniform(rng, 0.0, ns(60));
    const Mat2 u = reduced_propagate(d, t, j);
    ASSERT_NEAR(std::norm(u(1, 0)), rabi_transfer(d, j, t), 1e-10);
    ASSERT_LT(unitarity_defect(u), 1e-10);
    ASSERT_NEAR(std::abs(u.determinant()), 1.0, 1e-10);
  }
}

TEST(ReducedPropagate, Composition) {
  std::mt19937_64 rng(3);
  const double j = kPi / ns(35.40);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> d(7), t(7);
    for (auto& x : d) x = uniform(rng, -ghz(1), ghz(1));
    for (auto& x : t) x = uniform(rng, 0, ns(3));
    const Mat2 whole = reduced_propagate(d, t, j);
    const Mat2 first = reduced_propagate(std::span(d).first(3), std::span(t).first(3), j);
    const Mat2 second = reduced_propagate(std::span(d).subspan(3), std::span(t).subspan(3), j);
    ASSERT_LT(max_abs(whole - second * first), 1e-9);
  }
}

TEST(ReducedPropagate, HalfPulseStructure) {
  // alpha^2 + beta^2 = 1 and phi_a + phi_d = phi_b + phi_c + pi for symmetric half pulses.
  std::mt19937_64 rng(4);
  const double j = kPi / ns(35.40);
  for (int i = 0; i < 1000; ++i) {
    const double d = uniform(rng, -ghz(1), ghz(1)), t = uniform(rng, ns(1), ns(30));
    const Mat2 u = reduced_propagate(d, t, j);
    const double a = std::abs(u(0, 0)), b = std::abs(u(1, 0));
    ASSERT_NEAR(a * a + b * b, 1.0, 1e-10);
    if (a > 1e-6 && b > 1e-6) {
      const double lhs = std::arg(u(0, 0)) + std::arg(u(1, 1));
      const double rhs = std::arg(u(0, 1)) + std::arg(u(1, 0)) + kPi;
      ASSERT_LT(phase_distance(lhs, rhs), 1e-8);
    }
  }
}

TEST(IdleUnitary, ZeroTimeAndFullPeriods) {
  EXPECT_LT(max_abs(idle_unitary(ghz(1.063), 0.0) - Mat2::Identity()), 1e-15);
  for (int k = 1; k <= 3; ++k) {
    const Mat2 u = idle_unitary(ghz(1.063), k / 1.063e9);
    EXPECT_LT(phase_distance(std::arg(u(1, 1)), 0.0), 1e-9);
  }
}

TEST(IdleUnitary, OneSampleStep) {
  const Mat2 u = idle_unitary(ghz(1.063), kDefaultSamplePeriod);
  const double step = std::fmod(1.063 / 2.4 * 360.0, 360.0);
  EXPECT_NEAR(step, 159.45, 0.01);
  EXPECT_NEAR(std::arg(u(1, 1)) * 180 / kPi, -step, 1e-9);
}

TEST(FluxArc, EndpointsAndMonotone) {
  const PairSpec p = test::ql_qm2();
  EXPECT_DOUBLE_EQ(flux_arc_detuning(p, 0.0), p.delta_bias);
  EXPECT_NEAR(flux_arc_detuning(p, 1.0), 0.0, 1e-6 * p.delta_bias);
  double prev = flux_arc_detuning(p, 0.0);
  for (int i = 1; i <= 120; ++i) {
    const double d = flux_arc_detuning(p, i * 0.01);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(FluxArc, HalfAmplitudeAgreesWithIndependentRootFind) {
  const PairSpec p = test::ql_qm2();
  const double d = flux_arc_detuning(p, 0.5);
  // Oracle: closed-form arc inversion. shift(phi) = delta_bias - d at phi = 0.5 phi_res,
  // and shift(phi_res) = delta_bias; solve cos(pi phi) = ((w_s - shift + |a|)/(w_s + |a|))^2.
  const double a = std::abs(p.fluxed.anharm), ws = p.fluxed.omega_sweet;
  auto phi_of_shift = [&](double s) {
    const double r = (ws - s + a) / (ws + a);
    return std::acos(r * r) / kPi;
  };
  const double phi_res = phi_of_shift(p.delta_bias);
  EXPECT_NEAR(phi_res, resonance_flux(p), 1e-12);
  EXPECT_NEAR(phi_of_shift(p.delta_bias - d), 0.5 * phi_res, 1e-9);
}

TEST(FluxArc, OutOfRange) {
  const PairSpec p = test::ql_qm2();
  EXPECT_THROW(flux_arc_detuning(p, -0.1), Error);
  EXPECT_THROW(flux_arc_detuning(p, 1.6), Error);
  const DetuningMap m(p);
  EXPECT_EQ(m(-0.7), m(0.7));
}

TEST(PairModel, GapCalibratedToTwiceJ) {
  for (const PairSpec& p : {test::ql_qm2(), test::qm2_qh()}) {
    const PairModel m(p);
    EXPECT_NEAR(m.min_gap(m.coupling_g()), 2 * p.j2, 1e-6 * p.j2);
    // g sits near J2 / sqrt(2): the |11>-|02> matrix element is sqrt(2) g.
    EXPECT_NEAR(m.coupling_g() * std::sqrt(2.0) / p.j2, 1.0, 0.05);
  }
}

TEST(PairModel, IdlePreservesComputationalPopulations) {
  const PairModel m(test::ql_qm2());
  std::vector<double> zeros(37, 0.0);
  const PairUnitary u = m.propagate(zeros, kDefaultSamplePeriod);
  EXPECT_LT(unitarity_defect(u), 1e-9);
  for (int i : {0, 1, 3, 4}) EXPECT_NEAR(std::norm(u(i, i)), 1.0, 1e-9);
}

TEST(PairModel, SquarePulseTransfersLikeReducedModel) {
  const PairSpec p = test::ql_qm2();
  const PairModel m(p);
  // Continuous-time square pulse of length t_lim / 2 at the resonance amplitude.
  const Mat9 ub = m.segment_unitary(1.0, p.t_lim() / 2);
  const PairUnitary u = m.to_frame(ub, p.t_lim() / 2);
  EXPECT_GE(std::norm(u(pair_index(0, 2), pair_index(1, 1))), 0.99);
}

TEST(PairModel, UnitarityAndCompositionOnRandomWaveforms) {
  const PairModel m(test::qm2_qh());
  std::mt19937_64 rng(5);
  const double ts = kDefaultSamplePeriod;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> w(1 + rng() % 8);
    for (auto& x : w) x = std::nearbyint(uniform(rng, -1.2, 1.2) * 8) / 8;  // shares cache keys
    const PairUnitary u = m.propagate(w, ts);
    ASSERT_LT(unitarity_defect(u), 1e-9);
  }
  for (int i = 0; i < 50; ++i) {
    std::vector<double> w1(5), w2(4);
    for (auto& x : w1) x = uniform(rng, -1.2, 1.2);
    for (auto& x : w2) x = uniform(rng, -1.2, 1.2);
    std::vector<double> both = w1;
    both.insert(both.end(), w2.begin(), w2.end());
    // Compare in the bare lab frame where composition is a plain product.
    Mat9 u1 = Mat9::Identity(), u2 = Mat9::Identity(), u12 = Mat9::Identity();
    for (double a : w1) u1 = m.segment_unitary(a, ts) * u1;
    for (double a : w2) u2 = m.segment_unitary(a, ts) * u2;
    for (double a : both) u12 = m.segment_unitary(a, ts) * u12;
    ASSERT_LT(max_abs(u12 - u2 * u1), 1e-9);
    ASSERT_LT(max_abs(m.propagate(both, ts) - m.to_frame(u2 * u1, both.size() * ts)), 1e-9);
  }
}

TEST(PairModel, FluxSignSymmetry) {
  const PairModel m(test::ql_qm2());
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const double a = uniform(rng, 0, 1.4);
    ASSERT_LT(max_abs(m.segment_unitary(a, kDefaultSamplePeriod) - m.segment_unitary(-a, kDefaultSamplePeriod)), 1e-9);
  }
}

TEST(PairModel, ElevenTwentyInteraction) {
  // QL-QM1: fluxed QM1 above QL, so E20 - E11 < 0 at bias.
  PairSpec p;
  p.fluxed = {ghz(5.7707), mhz(-290.0)};
  p.static_partner = {ghz(4.5338), mhz(-320.0)};
  p.j2 = kPi / ns(40.60);
  p.interaction = Interaction::Avoided11_20;
  p.delta_bias = ghz(4.5338 - 0.320 - 5.7707);
  const PairModel m(p);
  EXPECT_NEAR(m.min_gap(m.coupling_g()), 2 * p.j2, 1e-6 * p.j2);
  const PairUnitary u = m.to_frame(m.segment_unitary(1.0, p.t_lim() / 2), p.t_lim() / 2);
  EXPECT_GE(std::norm(u(pair_index(2, 0), pair_index(1, 1))), 0.98);
}
