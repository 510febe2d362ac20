#pragma once

// Leakage-modified two-qubit interleaved randomized benchmarking:
//   chi1(N) = A1 + B1 lambda^N
//   M0(N)   = A0 + B0 p^N + C0 lambda^N
// synthetic decay generation, weighted fits and interleaved extraction.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "snz/error.hpp"

namespace snz {

struct DecayCurve {
  std::vector<int> n_cliffords;
  std::vector<double> m0;
  std::vector<double> chi1;
  std::vector<int> shots;  // 0 marks a noiseless point

  std::size_t size() const { return n_cliffords.size(); }

  void validate() const {
    const std::size_t n = n_cliffords.size();
    if (m0.size() != n || chi1.size() != n || shots.size() != n)
      throw Error(Errc::InvalidConfig, "decay curve columns differ in length");
    for (std::size_t k = 0; k < n; ++k) {
      if (n_cliffords[k] < 0 || (k > 0 && n_cliffords[k] <= n_cliffords[k - 1]))
        throw Error(Errc::InvalidConfig, "n_cliffords must be non-negative and strictly increasing");
      if (!(m0[k] >= 0.0 && m0[k] <= 1.0 && chi1[k] >= 0.0 && chi1[k] <= 1.0))
        throw Error(Errc::InvalidConfig, "m0 and chi1 must lie in [0, 1]");
      if (shots[k] < 0) throw Error(Errc::InvalidConfig, "shots must be >= 0");
    }
  }
};

// --------------------------------------------------------------------------
// Per-Clifford decay parameters

inline constexpr int kTwoQubitDim = 4;

/// Seepage per step is seepage_ratio * L1, so the chi1 steady state is
/// ratio / (1 + ratio) and lambda = 1 - (1 + ratio) L1.
struct RBSynthOptions {
  double seepage_ratio = 0.0;
  int dim = kTwoQubitDim;
};

struct DecayParams {
  double p = 1.0;
  double lambda1 = 1.0;
};

/// Inverts F = 1 - (d-1)(1-p)/d - L1/d and lambda = 1 - (1 + ratio) L1.
inline DecayParams decay_params(double fidelity, double l1, const RBSynthOptions& opt = {}) {
  const double d = opt.dim;
  DecayParams r;
  r.p = 1.0 - (d * (1.0 - fidelity) - l1) / (d - 1.0);
  r.lambda1 = 1.0 - (1.0 + opt.seepage_ratio) * l1;
  return r;
}

inline double rb_fidelity(double p, double l1, int dim = kTwoQubitDim) {
  const double d = dim;
  return 1.0 - (d - 1.0) * (1.0 - p) / d - l1 / d;
}

/// Noiseless model values for one curve with the given per-step decays.
inline std::pair<double, double> decay_model(int n, const DecayParams& q, const RBSynthOptions& opt = {}) {
  const double a1 = opt.seepage_ratio / (1.0 + opt.seepage_ratio);
  const double d = opt.dim;
  const double ln = std::pow(q.lambda1, n);
  const double chi1 = a1 + (1.0 - a1) * ln;
  const double m0 = chi1 / d + (d - 1.0) / d * std::pow(q.p, n);
  return {m0, chi1};
}

/// Reference and interleaved decay curves. Interleaved per-step decays are the
/// products of reference-Clifford and gate decays. shots = 0 gives the exact
/// model; otherwise each point is a binomial estimate.
inline std::pair<DecayCurve, DecayCurve> synth_decays(double f_gate, double l1_gate, double f_ref, double l1_ref,
                                                      const std::vector<int>& n_list, int shots, std::uint64_t seed,
                                                      const RBSynthOptions& opt = {}) {
  if (shots < 0) throw Error(Errc::OutOfRange, "shots must be >= 0");
  const DecayParams ref = decay_params(f_ref, l1_ref, opt);
  const DecayParams gate = decay_params(f_gate, l1_gate, opt);
  const DecayParams inter{ref.p * gate.p, ref.lambda1 * gate.lambda1};
  for (const DecayParams& q : {ref, inter})
    if (!(q.p > 0.0 && q.p <= 1.0 && q.lambda1 > 0.0 && q.lambda1 <= 1.0))
      throw Error(Errc::OutOfRange, "fidelity and leakage give decays outside (0, 1]");
  std::mt19937_64 rng(seed);
  auto draw = [&](double prob) {
    if (shots == 0) return prob;
    std::binomial_distribution<int> b(shots, std::clamp(prob, 0.0, 1.0));
    return static_cast<double>(b(rng)) / shots;
  };
  auto make = [&](const DecayParams& q) {
    DecayCurve c;
    for (int n : n_list) {
      const auto [m0, chi1] = decay_model(n, q, opt);
      c.n_cliffords.push_back(n);
      c.m0.push_back(draw(m0));
      c.chi1.push_back(draw(chi1));
      c.shots.push_back(shots);
    }
    c.validate();
    return c;
  };
  DecayCurve r = make(ref);
  DecayCurve i = make(inter);
  return {std::move(r), std::move(i)};
}

// --------------------------------------------------------------------------
// Fitting

struct RBFit {
  double p = 1.0;
  double lambda1 = 1.0;
  double a0 = 0.0, b0 = 0.0, c0 = 0.0;  // M0 amplitudes
  double a1 = 0.0, b1 = 0.0;            // chi1 amplitudes
  Eigen::Matrix4d cov_m0 = Eigen::Matrix4d::Zero();    // (A0, B0, C0, p)
  Eigen::Matrix3d cov_chi1 = Eigen::Matrix3d::Zero();  // (A1, B1, lambda)
  double p_err = 0.0;
  double lambda1_err = 0.0;
  double leakage = 0.0;  // per-sequence-element leakage (1 - A1)(1 - lambda1)
  double leakage_err = 0.0;
  bool p_at_boundary = false;
  bool lambda1_at_boundary = false;
  double chi2_m0 = 0.0;
  double chi2_chi1 = 0.0;
};

namespace detail {

/// Weighted fit of y = sum_j c_j b_j(q, N) where the first basis column
/// depends on the nonlinear rate q (q^N) and the others are fixed columns.
struct ExpFitResult {
  double q = 1.0;
  Eigen::VectorXd coef;  // [fixed columns..., amplitude of q^N]
  Eigen::MatrixXd cov;   // over (coef..., q)
  double chi2 = 0.0;
  bool at_boundary = false;
};

inline Eigen::VectorXd solve_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                    double* rss) {
  const Eigen::VectorXd sw = w.array().sqrt();
  const Eigen::MatrixXd xw = sw.asDiagonal() * x;
  const Eigen::VectorXd yw = sw.asDiagonal() * y;
  const Eigen::VectorXd c = xw.colPivHouseholderQr().solve(yw);
  if (rss) *rss = (xw * c - yw).squaredNorm();
  return c;
}

inline Eigen::MatrixXd design(const std::vector<int>& n, const Eigen::MatrixXd& fixed, double q) {
  Eigen::MatrixXd x(fixed.rows(), fixed.cols() + 1);
  x.leftCols(fixed.cols()) = fixed;
  for (std::size_t k = 0; k < n.size(); ++k) x(static_cast<Eigen::Index>(k), fixed.cols()) = std::pow(q, n[k]);
  return x;
}

inline ExpFitResult fit_exponential_free(const std::vector<int>& n, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                         const Eigen::MatrixXd& fixed) {
  auto rss_at = [&](double q) {
    double r = 0.0;
    solve_linear(design(n, fixed, q), y, w, &r);
    return r;
  };
  // Variable projection: scan 1 - q on a log grid, then golden-section refine.
  std::vector<double> grid;
  const double e_lo = -8.0, e_hi = std::log10(0.95);
  for (int k = 0; k <= 400; ++k) grid.push_back(1.0 - std::pow(10.0, e_lo + (e_hi - e_lo) * k / 400.0));
  grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  std::size_t best = 0;
  double best_rss = rss_at(grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double r = rss_at(grid[k]);
    if (r < best_rss) best_rss = r, best = k;
  }
  if (!std::isfinite(best_rss)) throw Error(Errc::FitFailed, "non-finite residual");
  ExpFitResult res;
  double lo = grid[best == 0 ? 0 : best - 1], hi = grid[std::min(best + 1, grid.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = rss_at(x1), f2 = rss_at(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = rss_at(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = rss_at(x2);
    }
  }
  double q = f1 < f2 ? x1 : x2;
  Eigen::VectorXd coef = solve_linear(design(n, fixed, q), y, w, nullptr);
  const Eigen::Index m = coef.size();

  // Gauss-Newton polish on all parameters.
  auto jacobian = [&](const Eigen::VectorXd& c, double qq) {
    Eigen::MatrixXd j(y.size(), m + 1);
    j.leftCols(m) = design(n, fixed, qq);
    for (std::size_t k = 0; k < n.size(); ++k)
      j(static_cast<Eigen::Index>(k), m) = n[k] == 0 ? 0.0 : c(m - 1) * n[k] * std::pow(qq, n[k] - 1);
    return j;
  };
  auto model = [&](const Eigen::VectorXd& c, double qq) { return Eigen::VectorXd(design(n, fixed, qq) * c); };
  const Eigen::VectorXd sw = w.array().sqrt();
  auto wrss = [&](const Eigen::VectorXd& c, double qq) { return (sw.asDiagonal() * (model(c, qq) - y)).squaredNorm(); };
  double cur = wrss(coef, q);
  for (int it = 0; it < 20; ++it) {
    const Eigen::MatrixXd jw = sw.asDiagonal() * jacobian(coef, q);
    const Eigen::VectorXd rw = sw.asDiagonal() * (y - model(coef, q));
    const Eigen::VectorXd step = jw.colPivHouseholderQr().solve(rw);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < 30; ++h, t *= 0.5) {
      const Eigen::VectorXd c2 = coef + t * step.head(m);
      const double q2 = std::min(1.0, q + t * step(m));
      const double r2 = wrss(c2, q2);
      if (r2 <= cur) {
        moved = r2 < cur;
        coef = c2; q = q2; cur = r2;
        break;
      }
    }
    if (!moved) break;
  }
  res.q = q;
  res.coef = coef;
  res.chi2 = cur;
  res.at_boundary = q >= 1.0 - 1e-12 || std::abs(coef(m - 1)) < 1e-12;
  if (res.at_boundary) {
    // Rate undetermined: report q = 1 and covariance of the remaining terms.
    // With no fixed columns the constant is carried by the q^N amplitude.
    res.q = 1.0;
    const Eigen::MatrixXd x = fixed.cols() > 0 ? fixed : design(n, fixed, 1.0);
    const Eigen::Index k = x.cols();
    res.coef = Eigen::VectorXd::Zero(m);
    res.coef.head(k) = solve_linear(x, y, w, &res.chi2);
    if (fixed.cols() == 0) res.coef(m - 1) = res.coef(0);
    res.cov = Eigen::MatrixXd::Zero(m + 1, m + 1);
    const Eigen::MatrixXd xw = sw.asDiagonal() * x;
    res.cov.topLeftCorner(k, k) = (xw.transpose() * xw).inverse();
    return res;
  }
  const Eigen::MatrixXd jw = sw.asDiagonal() * jacobian(coef, q);
  const Eigen::MatrixXd h = jw.transpose() * jw;
  // Condition number after unit-diagonal scaling, so parameter units do not count.
  const Eigen::VectorXd dinv = h.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dinv.asDiagonal() * h * dinv.asDiagonal());
  const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  if (!(cond < 1e14)) throw Error(Errc::IllConditioned, "decay fit normal matrix condition number " + std::to_string(cond));
  res.cov = h.inverse();
  return res;
}

// Per-shot variance floor for points at 0 or 1, independent of shots so that
// rescaling shots only rescales the weights.
inline constexpr double kVarianceFloor = 1e-4;

/// As fit_exponential_free, with the first fixed coefficient held inside
/// [lo, hi]. An out-of-range or degenerate free fit is refitted with that
/// coefficient pinned at each bound and the better of the two is kept.
inline ExpFitResult fit_exponential(const std::vector<int>& n, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                    const Eigen::MatrixXd& fixed, std::optional<std::array<double, 2>> box0 = {}) {
  if (!box0) return fit_exponential_free(n, y, w, fixed);
  try {
    ExpFitResult r = fit_exponential_free(n, y, w, fixed);
    if (r.coef(0) >= (*box0)[0] && r.coef(0) <= (*box0)[1]) return r;
  } catch (const Error& e) {
    if (e.code() != Errc::IllConditioned) throw;
  }
  const Eigen::Index k = fixed.cols(), m = k + 1;
  std::optional<ExpFitResult> best;
  for (double v : *box0) {
    ExpFitResult r;
    try {
      r = fit_exponential_free(n, y - v * fixed.col(0), w, fixed.rightCols(k - 1));
    } catch (const Error& e) {
      if (e.code() != Errc::IllConditioned) throw;
      continue;
    }
    if (best && best->chi2 <= r.chi2) continue;
    ExpFitResult full;
    full.q = r.q;
    full.chi2 = r.chi2;
    full.at_boundary = r.at_boundary;
    full.coef.resize(m);
    full.coef << v, r.coef;
    // Error bars from the full Jacobian, so pinning does not hide the spread
    // along the poorly determined direction.
    full.cov = Eigen::MatrixXd::Zero(m + 1, m + 1);
    full.cov.bottomRightCorner(m, m) = r.cov;
    if (!r.at_boundary) {
      Eigen::MatrixXd j(y.size(), m + 1);
      j.leftCols(m) = design(n, fixed, r.q);
      for (std::size_t i = 0; i < n.size(); ++i)
        j(static_cast<Eigen::Index>(i), m) = n[i] == 0 ? 0.0 : full.coef(m - 1) * n[i] * std::pow(r.q, n[i] - 1);
      const Eigen::MatrixXd jw = w.array().sqrt().matrix().asDiagonal() * j;
      const Eigen::MatrixXd h = jw.transpose() * jw;
      const Eigen::VectorXd dinv = h.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dinv.asDiagonal() * h * dinv.asDiagonal());
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) < 1e14) full.cov = h.inverse();
    }
    best = full;
  }
  if (!best) throw Error(Errc::IllConditioned, "decay fit degenerate at both amplitude bounds");
  return *best;
}

inline Eigen::VectorXd fit_weights(const DecayCurve& c, const std::vector<double>& y_model) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(c.size()));
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c.shots[k] == 0) {
      w(static_cast<Eigen::Index>(k)) = 1.0;
      continue;
    }
    const double s = c.shots[k];
    const double yy = std::clamp(y_model[k], 0.0, 1.0);
    w(static_cast<Eigen::Index>(k)) = s / std::max(yy * (1.0 - yy), kVarianceFloor);
  }
  return w;
}

}  // namespace detail

/// Fits chi1 first (A1, B1, lambda), then M0 with lambda, A0 and C0 held.
inline RBFit fit_decay(const DecayCurve& curve, int dim = kTwoQubitDim) {
  curve.validate();
  if (curve.size() < 5) throw Error(Errc::FitFailed, "need at least 5 distinct sequence lengths");
  const auto rows = static_cast<Eigen::Index>(curve.size());
  const Eigen::VectorXd chi = Eigen::Map<const Eigen::VectorXd>(curve.chi1.data(), rows);
  const Eigen::VectorXd m0 = Eigen::Map<const Eigen::VectorXd>(curve.m0.data(), rows);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(rows, 1);

  auto fitted = [&](const detail::ExpFitResult& r, const Eigen::MatrixXd& fixed) {
    const Eigen::VectorXd v = detail::design(curve.n_cliffords, fixed, r.q) * r.coef;
    return std::vector<double>(v.data(), v.data() + v.size());
  };

  // Two passes: weights from the data, then from the first-pass model.
  RBFit out;
  // The chi1 steady state A1 is a population, so it is held in [0, 1]; over
  // short sequences it trades off against lambda almost freely otherwise.
  const std::array<double, 2> unit{0.0, 1.0};
  const bool noiseless = std::all_of(curve.shots.begin(), curve.shots.end(), [](int s) { return s == 0; });
  detail::ExpFitResult rc =
      detail::fit_exponential(curve.n_cliffords, chi, detail::fit_weights(curve, curve.chi1), ones, unit);
  rc = detail::fit_exponential(curve.n_cliffords, chi, detail::fit_weights(curve, fitted(rc, ones)), ones, unit);
  // Without a shot model the residual scatter sets the error scale.
  auto scale_cov = [&](detail::ExpFitResult& r, int params) {
    if (noiseless) r.cov *= r.chi2 / std::max<double>(1.0, static_cast<double>(rows - params));
  };
  scale_cov(rc, 3);
  out.lambda1 = rc.q;
  out.a1 = rc.coef(0);
  out.b1 = rc.coef(1);
  out.cov_chi1 = rc.cov;
  out.lambda1_err = std::sqrt(std::max(0.0, rc.cov(2, 2)));
  out.leakage = (1.0 - out.a1) * (1.0 - out.lambda1);
  {
    const Eigen::Vector3d g(-(1.0 - out.lambda1), 0.0, -(1.0 - out.a1));
    out.leakage_err = std::sqrt(std::max(0.0, g.dot(out.cov_chi1 * g)));
  }
  out.lambda1_at_boundary = rc.at_boundary;
  out.chi2_chi1 = rc.chi2;

  // M0 stage: the chi1 fit fixes the asymptote A0 = A1/d and the leakage
  // share C0 = B1/d (population inside the computational subspace is mixed
  // uniformly), leaving M0 - chi1_fit/d = B0 p^N. With A0 or C0 free the
  // slow lambda^N term trades off against p over short sequences.
  const double dd = dim;
  out.a0 = out.a1 / dd;
  out.c0 = out.b1 / dd;
  Eigen::VectorXd y(rows);
  for (Eigen::Index k = 0; k < rows; ++k)
    y(k) = m0(k) - (out.a0 + out.c0 * std::pow(out.lambda1, curve.n_cliffords[k]));
  const Eigen::MatrixXd none(rows, 0);
  auto m0_model = [&](const detail::ExpFitResult& r) {
    std::vector<double> v = fitted(r, none);
    for (Eigen::Index k = 0; k < rows; ++k) v[k] += m0(k) - y(k);
    return v;
  };
  detail::ExpFitResult rm = detail::fit_exponential(curve.n_cliffords, y, detail::fit_weights(curve, curve.m0), none);
  rm = detail::fit_exponential(curve.n_cliffords, y, detail::fit_weights(curve, m0_model(rm)), none);
  scale_cov(rm, 2);
  out.p = rm.q;
  out.p_at_boundary = rm.at_boundary;
  out.chi2_m0 = rm.chi2;
  out.b0 = rm.coef(0);
  // (A0, C0) inherit the chi1 covariance of (A1, B1) / d; (B0, p) come from this fit.
  const int idx[2] = {0, 2};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.cov_m0(idx[i], idx[j]) = out.cov_chi1(i, j) / (dd * dd);
  out.cov_m0.block<2, 2>(1, 1).setZero();
  out.cov_m0(1, 1) = rm.cov(0, 0);
  out.cov_m0(1, 3) = out.cov_m0(3, 1) = rm.cov(0, 1);
  out.cov_m0(3, 3) = rm.cov(1, 1);
  out.p_err = std::sqrt(std::max(0.0, out.cov_m0(3, 3)));
  if (!(out.p > 0.0 && out.p <= 1.0 && out.lambda1 > 0.0 && out.lambda1 <= 1.0))
    throw Error(Errc::FitFailed, "decay rates outside (0, 1]");
  return out;
}

// --------------------------------------------------------------------------
// Interleaved extraction

struct IRBResult {
  double fidelity = 1.0;
  double fidelity_err = 0.0;
  double leakage = 0.0;  // may be negative (seepage)
  double leakage_err = 0.0;
  double p_gate = 1.0;
  double p_gate_err = 0.0;
  double lambda_gate = 1.0;
  bool invalid_ratio = false;
};

inline IRBResult interleaved_extract(const RBFit& ref, const RBFit& inter, int dim = kTwoQubitDim) {
  const double d = dim;
  IRBResult r;
  r.p_gate = inter.p / ref.p;
  r.p_gate_err = r.p_gate * std::hypot(inter.p_err / inter.p, ref.p_err / ref.p);
  r.invalid_ratio = inter.p - ref.p > std::hypot(inter.p_err, ref.p_err);

  // Gate leakage from the per-element leakages S = (1 - A1)(1 - lambda), which
  // stay well determined when A1 and lambda separately do not:
  //   L1_gate = (S_inter - S_ref) / lambda_ref.
  r.lambda_gate = inter.lambda1 / ref.lambda1;
  const double lr = ref.lambda1;
  r.leakage = (inter.leakage - ref.leakage) / lr;
  const Eigen::Vector3d gi(-(1.0 - inter.lambda1) / lr, 0.0, -(1.0 - inter.a1) / lr);
  const Eigen::Vector3d gr((1.0 - lr) / lr, 0.0, ((1.0 - ref.a1) * lr - (inter.leakage - ref.leakage)) / (lr * lr));
  const double var_l = gi.dot(inter.cov_chi1 * gi) + gr.dot(ref.cov_chi1 * gr);
  r.leakage_err = std::sqrt(std::max(0.0, var_l));

  r.fidelity = rb_fidelity(r.p_gate, r.leakage, dim);
  const double var_f = std::pow((d - 1.0) / d * r.p_gate_err, 2) + std::pow(r.leakage_err / d, 2);
  r.fidelity_err = std::sqrt(var_f);
  return r;
}

// --------------------------------------------------------------------------
// CSV

inline void write_decay_csv(const std::string& path, const DecayCurve& c) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::InvalidConfig, "cannot write " + path);
  f.precision(17);
  f << "n_cliffords,m0,chi1,shots\n";
  for (std::size_t k = 0; k < c.size(); ++k)
    f << c.n_cliffords[k] << ',' << c.m0[k] << ',' << c.chi1[k] << ',' << c.shots[k] << '\n';
}

inline DecayCurve read_decay_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::InvalidConfig, "cannot read " + path);
  DecayCurve c;
  std::string line;
  std::getline(f, line);
  if (line.rfind("n_cliffords", 0) != 0) throw Error(Errc::InvalidConfig, path + ": missing header");
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, x, s;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, x, ',') || !std::getline(ss, s))
      throw Error(Errc::InvalidConfig, path + ": malformed row");
    c.n_cliffords.push_back(std::stoi(a));
    c.m0.push_back(std::stod(b));
    c.chi1.push_back(std::stod(x));
    c.shots.push_back(std::stoi(s));
  }
  c.validate();
  return c;
}

}  // namespace snz
