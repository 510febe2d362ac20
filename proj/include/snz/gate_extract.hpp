#pragma once

// Conditional-phase gate quantities, the PC / LC1-LC3 conditions, and
// fidelity / leakage of 9-level unitaries and superoperators.
//
// Superoperators act on column-stacked density matrices:
//   vec(rho)[i + 9 j] = rho(i, j),  vec(U rho U^dag) = (conj(U) kron U) vec(rho).

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "snz/error.hpp"
#include "snz/linalg.hpp"
#include "snz/qutrit_model.hpp"

namespace snz {

/// Two-qutrit indices of |00>, |01>, |10>, |11>.
inline constexpr std::array<int, 4> kComputational{pair_index(0, 0), pair_index(0, 1), pair_index(1, 0),
                                                   pair_index(1, 1)};

struct CPGateParams {
  double phi01 = 0.0;
  double phi10 = 0.0;
  double phi11 = 0.0;
  double phi2q = 0.0;
  double leak_l1 = 0.0;
  double phi02 = 0.0;
  double phi_offdiag = 0.0;  // arg <target|U|11> relative to <00|U|00>
};

struct ConditionReport {
  double pc_residual = 0.0;        // |alpha^2 e^{2i phi_a} + beta^2 e^{i(phi_b + phi_c + phi)} + 1|
  double pc_phase_residual = 0.0;  // distance of the resulting conditional phase from pi (rad)
  double lc1_residual = 0.0;       // beta
  double lc2_residual = 0.0;       // |phi_a - phi_d - phi - pi| on the circle
  double lc3_residual = 0.0;       // alpha
  std::vector<std::string> satisfied;
};

inline void require_unitary(const Eigen::Ref<const Eigen::MatrixXcd>& u, double tol) {
  if (!(unitarity_defect(u) <= tol)) throw Error(Errc::NonUnitary, "matrix is not unitary within tolerance");
}

/// Embeds a (|11>, |target>) unitary into the two-qutrit identity.
inline PairUnitary embed_reduced(const ReducedUnitary& u, Interaction interaction = Interaction::Avoided11_02) {
  PairUnitary e = PairUnitary::Identity();
  const int a = pair_index(1, 1), t = target_index(interaction);
  e(a, a) = u(0, 0);
  e(a, t) = u(0, 1);
  e(t, a) = u(1, 0);
  e(t, t) = u(1, 1);
  return e;
}

inline CPGateParams extract_cp_params(const PairUnitary& u, Interaction interaction = Interaction::Avoided11_02) {
  require_unitary(u, 1e-7);
  const int t = target_index(interaction), eleven = pair_index(1, 1);
  const double ref = std::arg(u(0, 0));
  CPGateParams p;
  p.phi01 = wrap_phase(std::arg(u(pair_index(0, 1), pair_index(0, 1))) - ref);
  p.phi10 = wrap_phase(std::arg(u(pair_index(1, 0), pair_index(1, 0))) - ref);
  p.phi11 = wrap_phase(std::arg(u(eleven, eleven)) - ref);
  p.phi2q = wrap_phase(p.phi11 - p.phi01 - p.phi10);
  p.phi02 = wrap_phase(std::arg(u(t, t)) - ref);
  p.phi_offdiag = wrap_phase(std::arg(u(t, eleven)) - ref);
  p.leak_l1 = std::min(0.25, std::norm(u(t, eleven)) / 4.0);
  return p;
}

inline CPGateParams extract_cp_params(const ReducedUnitary& u) {
  require_unitary(u, 1e-9);
  return extract_cp_params(embed_reduced(u));
}

inline ConditionReport check_conditions(const ReducedUnitary& u_half, double phi, double tol = 1e-6) {
  require_unitary(u_half, 1e-9);
  const double alpha = std::abs(u_half(0, 0)), beta = std::abs(u_half(1, 0));
  const double pa = std::arg(u_half(0, 0)), pb = std::arg(u_half(0, 1));
  const double pc = std::arg(u_half(1, 0)), pd = std::arg(u_half(1, 1));
  const cplx z = alpha * alpha * std::exp(kI * (2.0 * pa)) + beta * beta * std::exp(kI * (pb + pc + phi));
  ConditionReport r;
  r.pc_residual = std::abs(z + 1.0);
  r.pc_phase_residual = std::abs(z) > 0.0 ? phase_distance(std::arg(z), kPi) : kPi;
  r.lc1_residual = beta;
  r.lc2_residual = phase_distance(pa - pd - phi, kPi);
  r.lc3_residual = alpha;
  if (r.pc_residual <= tol) r.satisfied.emplace_back("PC");
  if (r.lc1_residual <= tol) r.satisfied.emplace_back("LC1");
  if (r.lc2_residual <= tol) r.satisfied.emplace_back("LC2");
  if (r.lc3_residual <= tol) r.satisfied.emplace_back("LC3");
  return r;
}

// --------------------------------------------------------------------------
// Channels

inline Mat4 ideal_cz() {
  Mat4 m = Mat4::Identity();
  m(3, 3) = -1.0;
  return m;
}

inline Superop unitary_superop(const PairUnitary& u) {
  Superop s(81, 81);
  const Mat9 uc = u.conjugate();
  for (int j = 0; j < 9; ++j)
    for (int l = 0; l < 9; ++l) s.block(9 * j, 9 * l, 9, 9) = uc(j, l) * u;
  return s;
}

/// E(X) for a 9x9 operator X.
inline Mat9 apply_superop(const Superop& s, const Mat9& x) {
  const Eigen::Map<const Eigen::Matrix<cplx, 81, 1>> v(x.data());
  const Eigen::Matrix<cplx, 81, 1> out = s * v;
  return Eigen::Map<const Mat9>(out.data());
}

/// E(|i><j|) for two-qutrit basis indices.
inline Mat9 superop_column(const Superop& s, int i, int j) {
  return Eigen::Map<const Mat9>(s.col(i + 9 * j).data());
}

namespace detail {
inline void require_superop_shape(const Superop& s) {
  if (s.rows() != 81 || s.cols() != 81) throw Error(Errc::InvalidChannel, "superoperator must be 81 x 81");
  if (!s.allFinite()) throw Error(Errc::InvalidChannel, "superoperator has non-finite entries");
}
}  // namespace detail

/// max over computational-basis inputs of |Tr E(|i><j|) - delta_ij|.
inline double trace_preservation_defect(const Superop& s) {
  double worst = 0.0;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      cplx tr = 0.0;
      for (int k = 0; k < 9; ++k) tr += s(k + 9 * k, i + 9 * j);
      worst = std::max(worst, std::abs(tr - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

/// Smallest eigenvalue of the Choi matrix sum_ij |i><j| (x) E(|i><j|).
inline double min_choi_eigenvalue(const Superop& s) {
  Eigen::MatrixXcd choi(81, 81);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) choi.block(9 * i, 9 * j, 9, 9) = superop_column(s, i, j);
  const Eigen::MatrixXcd h = 0.5 * (choi + choi.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Average gate fidelity on the computational subspace against `target`.
/// Leaked population counts as error.
inline double avg_gate_fidelity(const Superop& s, const Mat4& target = ideal_cz()) {
  detail::require_superop_shape(s);
  constexpr int d = 4;
  const Mat4 tdag = target.adjoint();
  double diag_sum = 0.0;
  cplx coherent = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int l = 0; l < d; ++l) {
      const Mat9 y = superop_column(s, kComputational[i], kComputational[l]);
      Mat4 yc;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) yc(r, c) = y(kComputational[r], kComputational[c]);
      const Mat4 e = tdag * yc * target;
      if (i == l) {
        const double tr = e.trace().real();
        if (!(tr >= -1e-9 && tr <= 1.0 + 1e-9)) throw Error(Errc::InvalidChannel, "output trace outside [0, 1]");
        diag_sum += tr;
      }
      coherent += e(i, l);
    }
  }
  const double f = (diag_sum + coherent.real()) / (d * (d + 1));
  if (!(f >= -1e-9 && f <= 1.0 + 1e-9)) throw Error(Errc::InvalidChannel, "fidelity outside [0, 1]");
  return std::clamp(f, 0.0, 1.0);
}

inline double avg_gate_fidelity(const PairUnitary& u, const Mat4& target = ideal_cz()) {
  require_unitary(u, 1e-7);
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = u(kComputational[r], kComputational[c]);
  const Mat4 a = target.adjoint() * m;
  const double f = (std::norm(a.trace()) + (m.adjoint() * m).trace().real()) / 20.0;
  return std::clamp(f, 0.0, 1.0);
}

/// Average population leaving the computational subspace over its basis states.
inline double channel_leakage(const Superop& s) {
  detail::require_superop_shape(s);
  double total = 0.0;
  for (int i : kComputational) {
    const Mat9 y = superop_column(s, i, i);
    double kept = 0.0;
    for (int k : kComputational) kept += y(k, k).real();
    const double tr = y.trace().real();
    if (!(tr >= -1e-9 && tr <= 1.0 + 1e-9)) throw Error(Errc::InvalidChannel, "output trace outside [0, 1]");
    total += tr - kept;
  }
  return total / 4.0;
}

inline double channel_leakage(const PairUnitary& u) {
  require_unitary(u, 1e-7);
  double total = 0.0;
  for (int i : kComputational) {
    double kept = 0.0;
    for (int k : kComputational) kept += std::norm(u(k, i));
    total += 1.0 - kept;
  }
  return total / 4.0;
}

/// Applies single-qubit Z rotations that zero phi01 and phi10 (virtual-Z gauge).
inline PairUnitary null_phases_virtually(const PairUnitary& u) {
  const CPGateParams p = extract_cp_params(u);
  Vec9 z;
  for (int q = 0; q < 3; ++q)
    for (int f = 0; f < 3; ++f) z(pair_index(q, f)) = std::exp(-kI * (f * p.phi01 + q * p.phi10));
  return z.asDiagonal() * u;
}

}  // namespace snz
