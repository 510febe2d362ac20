#pragma once

// Flux waveforms on the AWG sample grid and linear-dynamical distortion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "snz/error.hpp"
#include "snz/linalg.hpp"
#include "snz/qutrit_model.hpp"

namespace snz {

/// HDAWG-8 sample period, 1/2.4 ns.
inline constexpr double kDefaultSamplePeriod = 1e-9 / 2.4;

/// Normalized flux amplitudes on a uniform grid of period ts.
struct Waveform {
  std::vector<double> samples;
  double ts = kDefaultSamplePeriod;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const { return static_cast<double>(samples.size()) * ts; }
  std::span<const double> view() const { return samples; }
};

struct SNZParams {
  double a = 1.0;       // strong amplitude
  double b = 0.0;       // fine amplitude of the first/last idle samples
  double tp = 0.0;      // total strong-pulse duration (s)
  double t_mid = 0.0;   // intermediate idle duration (s); includes the B samples
  int n_fine = 1;       // B samples at each end of the idle
};

struct NZParams {
  double a = 1.0;
  double a_curve = 0.0;  // 0 = square, 1 = half-sine flanks
  double tp = 0.0;
};

/// Step response s(t) = 1 + sum_i a_i exp(-t / tau_i).
struct DistortionModel {
  struct Term {
    double amplitude = 0.0;
    double tau = 0.0;  // s
  };
  std::vector<Term> terms;

  double step_response(double t) const {
    double s = 1.0;
    for (const auto& term : terms) s += term.amplitude * std::exp(-t / term.tau);
    return s;
  }

  double max_tau() const {
    double m = 0.0;
    for (const auto& term : terms) m = std::max(m, term.tau);
    return m;
  }
};

// Amplitudes are rounded to a 2^-32 grid so that sums of bipolar waveforms
// are exactly zero in floating point regardless of summation order.
inline constexpr double kAmplitudeQuantum = 1.0 / 4294967296.0;

inline double quantize_amplitude(double a) { return std::nearbyint(a / kAmplitudeQuantum) * kAmplitudeQuantum; }

/// Number of samples in `duration`; throws GridViolation if off-grid.
inline std::size_t grid_samples(double duration, double ts) {
  if (!(ts > 0.0)) throw Error(Errc::GridViolation, "sample period must be positive");
  const double k = duration / ts;
  const double r = std::nearbyint(k);
  if (r < 0.0 || std::abs(k - r) > 1e-6) throw Error(Errc::GridViolation, "duration is not a multiple of ts");
  return static_cast<std::size_t>(r);
}

/// Smallest 2 n ts >= t_lim.
inline double choose_tp(double t_lim, double ts) {
  if (!(t_lim > 0.0 && ts > 0.0)) throw Error(Errc::OutOfRange, "t_lim and ts must be positive");
  const double x = t_lim / (2.0 * ts);
  double n = std::ceil(x);
  if (n - x > 1.0 - 1e-9) n -= 1.0;  // x already an integer up to rounding
  n = std::max(n, 1.0);
  return 2.0 * n * ts;
}

inline Waveform make_snz(const SNZParams& p, double ts) {
  const std::size_t two_n = grid_samples(p.tp, ts);
  const std::size_t m = grid_samples(p.t_mid, ts);
  if (two_n == 0 || two_n % 2 != 0) throw Error(Errc::GridViolation, "tp must equal 2 n ts with n >= 1");
  if (p.n_fine < 0 || (m > 0 && 2 * static_cast<std::size_t>(p.n_fine) > m))
    throw Error(Errc::GridViolation, "t_mid too short for the fine-amplitude samples");
  if (!(p.b >= 0.0 && p.b <= p.a)) throw Error(Errc::OutOfRange, "require 0 <= b <= a");
  const std::size_t n = two_n / 2;
  const std::size_t nf = m > 0 ? static_cast<std::size_t>(p.n_fine) : 0;
  const double a = quantize_amplitude(p.a);
  const double b = quantize_amplitude(p.b);
  Waveform w{{}, ts};
  w.samples.reserve(two_n + m);
  w.samples.insert(w.samples.end(), n, a);
  w.samples.insert(w.samples.end(), nf, b);
  w.samples.insert(w.samples.end(), m - 2 * nf, 0.0);
  w.samples.insert(w.samples.end(), nf, -b);
  w.samples.insert(w.samples.end(), n, -a);
  return w;
}

/// Bipolar pulse whose half pulses blend a square (a_curve = 0) with a
/// half-sine lobe (a_curve = 1); peak sample equals a.
inline Waveform make_nz(const NZParams& p, double ts) {
  const std::size_t two_n = grid_samples(p.tp, ts);
  if (two_n == 0 || two_n % 2 != 0) throw Error(Errc::GridViolation, "tp must equal 2 n ts with n >= 1");
  if (!(p.a_curve >= 0.0 && p.a_curve <= 1.0)) throw Error(Errc::OutOfRange, "a_curve must lie in [0, 1]");
  const std::size_t n = two_n / 2;
  std::vector<double> env(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    env[k] = (1.0 - p.a_curve) + p.a_curve * std::sin(kPi * u);
  }
  const double peak = *std::max_element(env.begin(), env.end());
  Waveform w{std::vector<double>(two_n), ts};
  for (std::size_t k = 0; k < n; ++k) {
    const double v = quantize_amplitude(p.a * env[k] / peak);
    w.samples[k] = v;
    w.samples[two_n - 1 - k] = -v;
  }
  return w;
}

inline Waveform make_square(double a, double duration, double ts) {
  return Waveform{std::vector<double>(grid_samples(duration, ts), a), ts};
}

/// [+c] x k then [-c] x k with t1q = 2 k ts.
inline Waveform make_weak_correction(double c, double t1q, double ts) {
  const std::size_t two_k = grid_samples(t1q, ts);
  if (two_k % 2 != 0) throw Error(Errc::GridViolation, "t1q must equal 2 k ts");
  const double q = quantize_amplitude(c);
  Waveform w{std::vector<double>(two_k, q), ts};
  std::fill(w.samples.begin() + static_cast<std::ptrdiff_t>(two_k / 2), w.samples.end(), -q);
  return w;
}

/// Bipolar square parking pulse spanning tp + t_mid. When the span has an
/// odd number of samples the middle sample is zero.
inline Waveform make_parking(double amplitude, double tp, double t_mid, double ts) {
  const std::size_t total = grid_samples(tp + t_mid, ts);
  const std::size_t half = total / 2;
  const double q = quantize_amplitude(amplitude);
  Waveform w{std::vector<double>(total, 0.0), ts};
  std::fill_n(w.samples.begin(), half, q);
  std::fill_n(w.samples.end() - static_cast<std::ptrdiff_t>(half), half, -q);
  return w;
}

inline Waveform concat(const Waveform& first, const Waveform& second) {
  if (!first.empty() && !second.empty() && first.ts != second.ts)
    throw Error(Errc::GridViolation, "cannot join waveforms with different sample periods");
  Waveform w{first.samples, first.empty() ? second.ts : first.ts};
  w.samples.insert(w.samples.end(), second.samples.begin(), second.samples.end());
  return w;
}

/// Zero-pads to `duration`; throws if the waveform is already longer.
inline Waveform pad_to(const Waveform& w, double duration) {
  const std::size_t n = grid_samples(duration, w.ts);
  if (n < w.size()) throw Error(Errc::GridViolation, "waveform exceeds the allocated duration");
  Waveform out = w;
  out.samples.resize(n, 0.0);
  return out;
}

// --------------------------------------------------------------------------
// Distortion

/// Number of tail samples appended by apply_distortion: ceil(5 max tau / ts).
/// Each truncated term retains at most e^-5 |a_i| of its settling amplitude.
inline std::size_t distortion_tail(const DistortionModel& d, double ts) {
  if (d.terms.empty()) return 0;
  return static_cast<std::size_t>(std::ceil(5.0 * d.max_tau() / ts));
}

/// Convolves with the discrete impulse response h[k] = s(k ts) - s((k-1) ts).
/// Each exponential term is realized by its exact first-order recursion.
inline Waveform apply_distortion(const Waveform& w, const DistortionModel& d) {
  const std::size_t n = w.size();
  const std::size_t len = n + distortion_tail(d, w.ts);
  Waveform out{std::vector<double>(len, 0.0), w.ts};
  for (std::size_t k = 0; k < n; ++k) out.samples[k] = w.samples[k];
  for (const auto& term : d.terms) {
    const double r = std::exp(-w.ts / term.tau);
    double state = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double x = k < n ? w.samples[k] : 0.0;
      state = r * state + term.amplitude * (x - prev);
      prev = x;
      out.samples[k] += state;
    }
  }
  return out;
}

/// Exact inverse of a DistortionModel as a cascade of low-order IIR sections.
///
/// The distortion transfer function 1 + sum_i a_i (1 - z^-1) / (1 - r_i z^-1)
/// has poles r_i = exp(-ts / tau_i) and zeros q_k. Each real zero yields one
/// first-order section (1 - r z^-1) / (1 - q z^-1) per exponential term; a
/// complex-conjugate pair of zeros (opposite-sign terms with close tau) is
/// realized by one second-order section spanning two terms.
class CorrectionFilter {
 public:
  /// y[k] = b0 x[k] + b1 x[k-1] + b2 x[k-2] - a1 y[k-1] - a2 y[k-2]
  struct Section {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
  };

  explicit CorrectionFilter(const DistortionModel& d) : model_(d) {
    for (const auto& term : d.terms)
      if (!(std::abs(term.amplitude) < 1.0) || !(term.tau > 0.0))
        throw Error(Errc::Unstable, "distortion term with |a| >= 1 or tau <= 0");
  }

  Waveform operator()(const Waveform& w) const {
    Waveform out = w;
    for (const auto& s : sections(w.ts)) {
      double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
      for (double& v : out.samples) {
        const double x = v;
        const double y = s.b0 * x + s.b1 * x1 + s.b2 * x2 - s.a1 * y1 - s.a2 * y2;
        x2 = x1; x1 = x;
        y2 = y1; y1 = y;
        v = y;
      }
    }
    return out;
  }

  std::vector<Section> sections(double ts) const {
    const std::size_t n = model_.terms.size();
    if (n == 0) return {};
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::exp(-ts / model_.terms[i].tau);
    // Numerator in x = z^-1: prod_j (1 - r_j x) + sum_i a_i (1 - x) prod_{j != i} (1 - r_j x).
    auto mul = [](const std::vector<double>& p, double c0, double c1) {
      std::vector<double> q(p.size() + 1, 0.0);
      for (std::size_t k = 0; k < p.size(); ++k) {
        q[k] += c0 * p[k];
        q[k + 1] += c1 * p[k];
      }
      return q;
    };
    std::vector<double> num(n + 1, 0.0);
    std::vector<double> p{1.0};
    for (std::size_t j = 0; j < n; ++j) p = mul(p, 1.0, -r[j]);
    for (std::size_t k = 0; k <= n; ++k) num[k] += p[k];
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> t = mul({model_.terms[i].amplitude}, 1.0, -1.0);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) t = mul(t, 1.0, -r[j]);
      for (std::size_t k = 0; k <= n; ++k) num[k] += t[k];
    }
    // num(x) = num[0] prod_k (1 - q_k x); the q_k are the roots of the reversed polynomial.
    const auto en = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(en, en);
    for (Eigen::Index k = 0; k < en; ++k) comp(0, k) = -num[static_cast<std::size_t>(k) + 1] / num[0];
    for (Eigen::Index k = 1; k < en; ++k) comp(k, k - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<cplx> q(n);
    for (std::size_t k = 0; k < n; ++k) {
      q[k] = es.eigenvalues()(static_cast<Eigen::Index>(k));
      if (!(std::abs(q[k]) < 1.0)) throw Error(Errc::Unstable, "inverse filter pole outside the unit circle");
    }
    std::sort(q.begin(), q.end(), [](cplx x, cplx y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); });
    std::sort(r.begin(), r.end());

    std::vector<Section> out;
    std::size_t next_pole = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double tol = 1e-12 * std::max(1.0, std::abs(q[k]));
      if (std::abs(q[k].imag()) <= tol) {
        const double rk = r[next_pole++];
        out.push_back({1.0, -rk, 0.0, -q[k].real(), 0.0});
      } else {
        // Conjugate partner is adjacent after sorting by real part.
        const double r1 = r[next_pole++], r2 = r[next_pole++];
        out.push_back({1.0, -(r1 + r2), r1 * r2, -2.0 * q[k].real(), std::norm(q[k])});
        ++k;
      }
    }
    out.front().b0 /= num[0];
    out.front().b1 /= num[0];
    out.front().b2 /= num[0];
    return out;
  }

 private:
  DistortionModel model_;
};

inline CorrectionFilter correction_filter(const DistortionModel& d) { return CorrectionFilter(d); }

/// CSV with columns index,time_ns,amplitude.
inline void write_waveform_csv(std::ostream& os, const Waveform& w) {
  os << "index,time_ns,amplitude\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < w.size(); ++k)
    os << k << ',' << units::to_ns(static_cast<double>(k) * w.ts) << ',' << w.samples[k] << '\n';
}

/// Full-model propagation of a waveform on the fluxed transmon.
inline PairUnitary full_propagate(const PairSpec& pair, const Waveform& w) {
  return PairModel(pair).propagate(w.view(), w.ts);
}

}  // namespace snz
