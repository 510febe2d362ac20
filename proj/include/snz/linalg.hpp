#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace snz {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat3 = Eigen::Matrix<cplx, 3, 3>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat9 = Eigen::Matrix<cplx, 9, 9>;
using Superop = Eigen::MatrixXcd;  // 81 x 81, column-stacking vec convention
using Vec9 = Eigen::Matrix<cplx, 9, 1>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

namespace units {
/// Angular frequency (rad/s) from a frequency in GHz.
constexpr double ghz(double f) { return kTwoPi * f * 1e9; }
constexpr double mhz(double f) { return kTwoPi * f * 1e6; }
constexpr double ns(double t) { return t * 1e-9; }
constexpr double us(double t) { return t * 1e-6; }
constexpr double to_ghz(double omega) { return omega / (kTwoPi * 1e9); }
constexpr double to_mhz(double omega) { return omega / (kTwoPi * 1e6); }
constexpr double to_ns(double t) { return t * 1e9; }
}  // namespace units

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

/// Unsigned distance between two angles on the circle, in [0, pi].
inline double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

/// max |U^dagger U - I|.
template <class Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using M = typename Derived::PlainObject;
  const M prod = u.adjoint() * u;
  return max_abs(prod - M::Identity(u.rows(), u.cols()));
}

/// exp(-i H t) for Hermitian H via eigendecomposition; exact for a constant H.
template <int N>
Eigen::Matrix<cplx, N, N> expm_hermitian(const Eigen::Matrix<cplx, N, N>& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, N, N>> es(h);
  const auto& v = es.eigenvectors();
  Eigen::Matrix<cplx, N, 1> phases;
  for (int k = 0; k < h.rows(); ++k) phases(k) = std::exp(-kI * (es.eigenvalues()(k) * t));
  return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace snz
