#pragma once

// Device parameters, the reduced {|11>,|target>} model and the two-qutrit
// (9-level) model of a flux-pulsed transmon pair.
//
// Two-qutrit basis order is |p f> with p the static partner and f the fluxed
// transmon (rightmost index = fluxed transmon), index = 3 p + f:
//   |00>,|01>,|02>,|10>,|11>,|12>,|20>,|21>,|22>.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "snz/error.hpp"
#include "snz/linalg.hpp"

namespace snz {

/// Unitary on the (|11>, |target>) subspace.
using ReducedUnitary = Mat2;
/// Unitary on the two-qutrit space, basis order documented above.
using PairUnitary = Mat9;

/// Fixed-frequency-at-sweetspot transmon with a symmetric cosine flux arc:
///   omega(phi) = (omega_sweet + |anharm|) sqrt|cos(pi phi)| - |anharm|,
/// with phi in flux quanta.
struct TransmonSpec {
  double omega_sweet = 0.0;  // rad/s
  double anharm = 0.0;       // rad/s, negative

  double frequency(double flux) const {
    const double a = std::abs(anharm);
    return (omega_sweet + a) * std::sqrt(std::abs(std::cos(kPi * flux))) - a;
  }

  /// Downshift omega_sweet - omega(flux), >= 0.
  double shift(double flux) const { return omega_sweet - frequency(flux); }

  void validate() const {
    if (!(omega_sweet > 0.0)) throw Error(Errc::InvalidConfig, "omega_sweet must be positive");
    if (!(anharm < 0.0)) throw Error(Errc::InvalidConfig, "anharmonicity must be negative");
  }
};

enum class Interaction { Avoided11_02, Avoided11_20 };

struct PairSpec {
  std::string name;
  TransmonSpec fluxed;
  TransmonSpec static_partner;
  double j2 = 0.0;          // rad/s, |11>-|target> transverse coupling
  Interaction interaction = Interaction::Avoided11_02;
  double delta_bias = 0.0;  // rad/s, E_target - E_11 at the bias point

  double t_lim() const { return kPi / j2; }

  void validate() const {
    fluxed.validate();
    static_partner.validate();
    if (!(j2 > 0.0)) throw Error(Errc::InvalidConfig, "j2 must be positive");
    if (!std::isfinite(delta_bias) || delta_bias == 0.0)
      throw Error(Errc::InvalidConfig, "delta_bias must be finite and nonzero");
  }
};

/// Index of |p f> in the two-qutrit basis.
constexpr int pair_index(int partner, int fluxed) { return 3 * partner + fluxed; }

/// Basis index of the non-computational state coupled to |11>.
constexpr int target_index(Interaction interaction) {
  return interaction == Interaction::Avoided11_02 ? pair_index(0, 2) : pair_index(2, 0);
}

// --------------------------------------------------------------------------
// Reduced model

/// Delta |t><t| + J (|t><11| + |11><t|) in the (|11>, |t>) basis.
inline Mat2 reduced_hamiltonian(double delta, double j2) {
  Mat2 h;
  h << 0.0, j2, j2, delta;
  return h;
}

/// Time-ordered product of exp(-i H_k tau_k) over piecewise-constant detunings.
inline ReducedUnitary reduced_propagate(std::span<const double> delta,
                                        std::span<const double> durations, double j2) {
  if (delta.empty()) throw Error(Errc::EmptyPulse, "reduced_propagate needs at least one segment");
  if (durations.size() != delta.size())
    throw Error(Errc::OutOfRange, "detuning and duration sequences differ in length");
  ReducedUnitary u = ReducedUnitary::Identity();
  for (std::size_t k = 0; k < delta.size(); ++k) {
    if (!(durations[k] >= 0.0)) throw Error(Errc::OutOfRange, "negative segment duration");
    u = expm_hermitian<2>(reduced_hamiltonian(delta[k], j2), durations[k]) * u;
  }
  return u;
}

/// Single-segment convenience overload.
inline ReducedUnitary reduced_propagate(double delta, double duration, double j2) {
  return reduced_propagate(std::span<const double>(&delta, 1), std::span<const double>(&duration, 1), j2);
}

/// Idealized idle diag(1, e^{i phi}), phi = -delta_bias t_mid.
inline ReducedUnitary idle_unitary(double delta_bias, double t_mid) {
  if (t_mid < 0.0) throw Error(Errc::OutOfRange, "t_mid must be non-negative");
  ReducedUnitary u = ReducedUnitary::Identity();
  u(1, 1) = std::exp(kI * (-delta_bias * t_mid));
  return u;
}

// --------------------------------------------------------------------------
// Flux arc

inline constexpr double kMaxAmplitude = 1.5;

/// Flux (in flux quanta) placing |11> and the target state on resonance.
inline double resonance_flux(const PairSpec& pair) {
  const double need = std::abs(pair.delta_bias);
  const TransmonSpec& t = pair.fluxed;
  // shift() is strictly increasing on [0, 1/2).
  double lo = 0.0, hi = 0.5;
  if (t.shift(hi - 1e-12) <= need)
    throw Error(Errc::InvalidConfig, "delta_bias is not reachable on the flux arc");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (t.shift(mid) < need ? lo : hi) = mid;
  }
  const double phi_res = 0.5 * (lo + hi);
  if (kMaxAmplitude * phi_res >= 0.5)
    throw Error(Errc::InvalidConfig, "amplitude domain [0, 1.5] exceeds the flux arc period");
  return phi_res;
}

namespace detail {
inline double arc_detuning(const PairSpec& pair, double phi_res, double amplitude) {
  const double s = pair.fluxed.shift(amplitude * phi_res);
  return pair.delta_bias - std::copysign(s, pair.delta_bias);
}
}  // namespace detail

/// Detuning E_target - E_11 at normalized amplitude A (A = flux / resonance flux).
inline double flux_arc_detuning(const PairSpec& pair, double amplitude) {
  if (!(amplitude >= 0.0 && amplitude <= kMaxAmplitude))
    throw Error(Errc::OutOfRange, "amplitude outside [0, 1.5]");
  return detail::arc_detuning(pair, resonance_flux(pair), amplitude);
}

/// Reusable arc evaluator (caches the resonance flux). Uses |A|: the arc is even in flux.
class DetuningMap {
 public:
  explicit DetuningMap(const PairSpec& pair) : pair_(pair), phi_res_(resonance_flux(pair)) {}

  double operator()(double amplitude) const {
    const double a = std::abs(amplitude);
    if (!(a <= kMaxAmplitude)) throw Error(Errc::OutOfRange, "amplitude outside [-1.5, 1.5]");
    return detail::arc_detuning(pair_, phi_res_, a);
  }

  double phi_res() const { return phi_res_; }
  const PairSpec& pair() const { return pair_; }

 private:
  PairSpec pair_;
  double phi_res_;
};

// --------------------------------------------------------------------------
// Two-qutrit model

/// 9-level model of a transmon pair in the product basis.
///
/// The partner's bare frequency is placed so that the bare |11>-target
/// detuning at bias equals pair.delta_bias; the exchange coupling g is tuned
/// numerically until the minimum avoided-crossing gap equals 2 J2. Results are
/// reported in the dressed basis at bias (dressed states labelled by their
/// dominant bare state), in the frame rotating at both bare sweetspot
/// frequencies.
class PairModel {
 public:
  explicit PairModel(const PairSpec& pair) : PairModel(pair, -1.0) {}

  /// Uses the given exchange coupling g (rad/s) instead of gap matching; a
  /// negative value selects gap matching.
  PairModel(const PairSpec& pair, double coupling_g) : pair_(pair) {
    pair_.validate();
    phi_res_ = resonance_flux(pair_);
    const double wf = pair_.fluxed.omega_sweet;
    if (pair_.interaction == Interaction::Avoided11_02) {
      omega_partner_ = wf + pair_.fluxed.anharm - pair_.delta_bias;
    } else {
      omega_partner_ = pair_.delta_bias + wf - pair_.static_partner.anharm;
    }
    if (!(omega_partner_ > 0.0)) throw Error(Errc::InvalidConfig, "derived partner frequency is not positive");
    g_ = coupling_g >= 0.0 ? coupling_g : calibrate_coupling();
    build_dressed_basis();
  }

  const PairSpec& pair() const { return pair_; }
  double phi_res() const { return phi_res_; }
  double coupling_g() const { return g_; }
  double omega_partner() const { return omega_partner_; }

  /// Hamiltonian in the bare basis for fluxed / partner amplitudes, with
  /// omega_sweet(fluxed) * (n_p + n_f) removed (it commutes with everything).
  Mat9 hamiltonian(double fluxed_amplitude, double partner_amplitude = 0.0) const {
    return hamiltonian_with(g_, fluxed_amplitude, partner_amplitude);
  }

  /// Dressed eigen-energies at bias in the same shifted convention as hamiltonian().
  const Eigen::Matrix<double, 9, 1>& dressed_energies() const { return dressed_energies_; }
  /// Columns are dressed eigenvectors (bare basis) ordered like the bare basis.
  const Mat9& dressed_basis() const { return dressed_basis_; }

  /// Minimum |11>-target gap over amplitude for coupling g.
  double min_gap(double g) const;

  /// exp(-i H dt) in the bare basis.
  Mat9 segment_unitary(double fluxed_amplitude, double dt, double partner_amplitude = 0.0) const {
    return expm_hermitian<9>(hamiltonian(fluxed_amplitude, partner_amplitude), dt);
  }

  /// Maps a bare-basis evolution of total duration T into the dressed rotating frame.
  PairUnitary to_frame(const Mat9& u_bare, double total_time) const {
    return frame_phases(total_time).asDiagonal() * (dressed_basis_.adjoint() * u_bare * dressed_basis_);
  }

  /// Diagonal of the frame rotation exp(+i H_frame T) in the shifted convention.
  Vec9 frame_phases(double total_time) const {
    Vec9 r;
    const double dw = omega_partner_ - pair_.fluxed.omega_sweet;
    for (int p = 0; p < 3; ++p)
      for (int f = 0; f < 3; ++f) r(pair_index(p, f)) = std::exp(kI * (dw * p * total_time));
    return r;
  }

  /// Propagates fluxed (and optional partner) amplitude sequences sampled at ts.
  /// The shorter sequence is zero-padded.
  PairUnitary propagate(std::span<const double> fluxed, double ts,
                        std::span<const double> partner = {}) const {
    const std::size_t n = std::max(fluxed.size(), partner.size());
    if (n == 0) throw Error(Errc::EmptyPulse, "empty waveform");
    std::map<std::pair<double, double>, Mat9> cache;
    Mat9 u = Mat9::Identity();
    for (std::size_t k = 0; k < n; ++k) {
      const double af = k < fluxed.size() ? fluxed[k] : 0.0;
      const double ap = k < partner.size() ? partner[k] : 0.0;
      const auto key = std::make_pair(std::abs(af), std::abs(ap));
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, segment_unitary(af, ts, ap)).first;
      u = it->second * u;
    }
    return to_frame(u, static_cast<double>(n) * ts);
  }

  /// Residual ZZ E11 - E10 - E01 + E00 of the dressed levels at bias (rad/s).
  double residual_zz() const {
    const auto& e = dressed_energies_;
    return e(pair_index(1, 1)) - e(pair_index(1, 0)) - e(pair_index(0, 1)) + e(pair_index(0, 0));
  }

  double fluxed_frequency(double amplitude) const {
    const double a = std::abs(amplitude);
    if (!(a <= kMaxAmplitude)) throw Error(Errc::OutOfRange, "amplitude outside [-1.5, 1.5]");
    return pair_.fluxed.frequency(a * phi_res_);
  }

  double partner_frequency(double amplitude) const {
    const double a = std::abs(amplitude);
    if (!(a <= kMaxAmplitude)) throw Error(Errc::OutOfRange, "partner amplitude outside [-1.5, 1.5]");
    // The partner shares the fluxed transmon's amplitude normalization.
    return omega_partner_ - pair_.static_partner.shift(a * phi_res_);
  }

 private:
  Mat9 hamiltonian_with(double g, double af, double ap) const {
    const double ref = pair_.fluxed.omega_sweet;
    const double wp = partner_frequency(ap) - ref;
    const double wf = fluxed_frequency(af) - ref;
    const double alp = pair_.static_partner.anharm;
    const double alf = pair_.fluxed.anharm;
    Mat9 h = Mat9::Zero();
    for (int p = 0; p < 3; ++p) {
      for (int f = 0; f < 3; ++f) {
        const int i = pair_index(p, f);
        h(i, i) = p * wp + 0.5 * alp * p * (p - 1) + f * wf + 0.5 * alf * f * (f - 1);
        // g a_p^dag a_f |p f> = g sqrt(p+1) sqrt(f) |p+1, f-1>
        if (p < 2 && f > 0) {
          const int j = pair_index(p + 1, f - 1);
          const double el = g * std::sqrt(double(p + 1)) * std::sqrt(double(f));
          h(j, i) = el;
          h(i, j) = el;
        }
      }
    }
    return h;
  }

  double gap_at(double g, double amplitude) const;
  double calibrate_coupling() const;
  void build_dressed_basis();

  PairSpec pair_;
  double phi_res_ = 0.0;
  double omega_partner_ = 0.0;
  double g_ = 0.0;
  Mat9 dressed_basis_ = Mat9::Identity();
  Eigen::Matrix<double, 9, 1> dressed_energies_ = Eigen::Matrix<double, 9, 1>::Zero();
};

inline double PairModel::gap_at(double g, double amplitude) const {
  const Mat9 h = hamiltonian_with(g, amplitude, 0.0);
  const std::array<int, 3> idx{pair_index(0, 2), pair_index(1, 1), pair_index(2, 0)};
  Mat3 block;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) block(r, c) = h(idx[r], idx[c]);
  Eigen::SelfAdjointEigenSolver<Mat3> es(block);
  const int t = pair_.interaction == Interaction::Avoided11_02 ? 0 : 2;
  // The two eigenvectors with the largest weight on span{|11>, target}.
  std::array<std::pair<double, int>, 3> w;
  for (int k = 0; k < 3; ++k)
    w[k] = {std::norm(es.eigenvectors()(1, k)) + std::norm(es.eigenvectors()(t, k)), k};
  std::sort(w.begin(), w.end(), [](auto a, auto b) { return a.first > b.first; });
  return std::abs(es.eigenvalues()(w[0].second) - es.eigenvalues()(w[1].second));
}

inline double PairModel::min_gap(double g) const {
  // Golden-section search over amplitude; the gap is unimodal near resonance.
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.85, b = 1.15;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = gap_at(g, c), fd = gap_at(g, d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - r * (b - a); fc = gap_at(g, c);
    } else {
      a = c; c = d; fc = fd; d = a + r * (b - a); fd = gap_at(g, d);
    }
  }
  return std::min(fc, fd);
}

inline double PairModel::calibrate_coupling() const {
  const double target = 2.0 * pair_.j2;
  // Secant iterations on min_gap(g) - 2 J2 from the bare-matrix-element guess.
  double g0 = pair_.j2 / std::sqrt(2.0);
  double g1 = 1.02 * g0;
  double f0 = min_gap(g0) - target, f1 = min_gap(g1) - target;
  for (int it = 0; it < 50 && std::abs(f1) > 1e-12 * target; ++it) {
    const double g2 = g1 - f1 * (g1 - g0) / (f1 - f0);
    g0 = g1; f0 = f1;
    g1 = g2; f1 = min_gap(g1) - target;
  }
  if (!(std::abs(f1) <= 1e-8 * target)) throw Error(Errc::InvalidConfig, "coupling calibration did not converge");
  return g1;
}

inline void PairModel::build_dressed_basis() {
  Eigen::SelfAdjointEigenSolver<Mat9> es(hamiltonian(0.0));
  const Mat9& v = es.eigenvectors();
  std::array<bool, 9> used{};
  for (int bare = 0; bare < 9; ++bare) {
    int best = -1;
    double best_ov = -1.0;
    for (int k = 0; k < 9; ++k) {
      if (used[k]) continue;
      const double ov = std::norm(v(bare, k));
      if (ov > best_ov) { best_ov = ov; best = k; }
    }
    if (best_ov < 0.5) throw Error(Errc::DegenerateLevels, "dressed state assignment is ambiguous");
    used[best] = true;
    const cplx ph = v(bare, best) / std::abs(v(bare, best));
    dressed_basis_.col(bare) = v.col(best) / ph;
    dressed_energies_(bare) = es.eigenvalues()(best);
  }
}

/// Full-model propagation of a fluxed-transmon amplitude sequence sampled at ts.
inline PairUnitary full_propagate(const PairSpec& pair, std::span<const double> amplitudes, double ts) {
  return PairModel(pair).propagate(amplitudes, ts);
}

/// Residual ZZ of a pair at its bias point (rad/s).
inline double residual_zz(const PairSpec& pair) { return PairModel(pair).residual_zz(); }

}  // namespace snz
