#pragma once

// Shared fixtures: pair parameters from the device table and small helpers.

#include <cstdint>
#include <random>

#include "snz/linalg.hpp"
#include "snz/qutrit_model.hpp"

namespace snz::test {

using namespace snz::units;

// QL-QM2: fluxed QM2, t_lim 35.40 ns, Delta02/2pi 1.063 GHz at bias.
inline PairSpec ql_qm2() {
  PairSpec p;
  p.name = "QL-QM2";
  p.fluxed = {ghz(5.8864), mhz(-285.0)};
  p.static_partner = {ghz(4.5338), mhz(-320.0)};
  p.j2 = kPi / ns(35.40);
  p.interaction = Interaction::Avoided11_02;
  p.delta_bias = ghz(1.063);
  return p;
}

// QM2-QH: fluxed QH (6.4329 GHz).
inline PairSpec qm2_qh() {
  PairSpec p;
  p.name = "QM2-QH";
  p.fluxed = {ghz(6.4329), mhz(-280.0)};
  p.static_partner = {ghz(5.8864), mhz(-285.0)};
  p.j2 = kPi / ns(29.00);
  p.interaction = Interaction::Avoided11_02;
  p.delta_bias = ghz(6.4329 - 0.280 - 5.8864);
  return p;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace snz::test
