#pragma once

// Chevron analysis: per-amplitude sinusoidal fits of the target-state
// population versus pulse duration, then the symmetry axis from the minimum
// of the fitted oscillation frequency.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "snz/error.hpp"
#include "snz/landscape.hpp"
#include "snz/linalg.hpp"

namespace snz {

struct ChevronColumnFit {
  double amplitude = 0.0;
  double omega = 0.0;       // rad/s
  double visibility = 0.0;  // peak-to-peak of the fitted oscillation
  double offset = 0.0;
  double rms_residual = 0.0;
};

struct ChevronFit {
  double a_res = 0.0;
  double t_lim_fit = 0.0;   // s
  double omega_min = 0.0;   // rad/s, fitted oscillation frequency on the axis
  double goodness = 0.0;    // rms residual over all columns
  std::vector<ChevronColumnFit> columns;
};

namespace detail {

struct SineFit {
  double ssr = 0.0, offset = 0.0, c = 0.0, s = 0.0;
};

// Least squares of y = off + c cos(w t) + s sin(w t) at fixed w.
inline SineFit fit_fixed_omega(const std::vector<double>& t, const std::vector<double>& y, double w) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Eigen::Vector3d row(1.0, std::cos(w * t[k]), std::sin(w * t[k]));
    ata += row * row.transpose();
    aty += row * y[k];
  }
  const Eigen::Vector3d x = ata.ldlt().solve(aty);
  SineFit f{0.0, x(0), x(1), x(2)};
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double r = y[k] - (x(0) + x(1) * std::cos(w * t[k]) + x(2) * std::sin(w * t[k]));
    f.ssr += r * r;
  }
  return f;
}

inline ChevronColumnFit fit_column(double amplitude, std::vector<double> t, std::vector<double> y) {
  std::vector<std::size_t> order(t.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t[a] < t[b]; });
  std::vector<double> ts, ys;
  for (auto k : order) ts.push_back(t[k]), ys.push_back(y[k]);
  std::vector<double> gaps;
  for (std::size_t k = 1; k < ts.size(); ++k)
    if (ts[k] > ts[k - 1]) gaps.push_back(ts[k] - ts[k - 1]);
  std::sort(gaps.begin(), gaps.end());
  const double span = ts.back() - ts.front();
  const double dt = gaps[gaps.size() / 2];
  const double w_lo = kPi / span, w_hi = kPi / dt;

  const int n_grid = 1500;
  double best_w = w_lo, best_ssr = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k <= n_grid; ++k) {
    const double w = w_lo + (w_hi - w_lo) * k / n_grid;
    const double ssr = fit_fixed_omega(ts, ys, w).ssr;
    if (ssr < best_ssr) best_ssr = ssr, best_w = w, best_k = k;
  }
  // Golden-section refinement between the neighbouring grid nodes.
  double a = w_lo + (w_hi - w_lo) * std::max(0, best_k - 1) / n_grid;
  double b = w_lo + (w_hi - w_lo) * std::min(n_grid, best_k + 1) / n_grid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fit_fixed_omega(ts, ys, c).ssr, fd = fit_fixed_omega(ts, ys, d).ssr;
  for (int it = 0; it < 100 && b - a > 1e-12 * b; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = fit_fixed_omega(ts, ys, c).ssr;
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = fit_fixed_omega(ts, ys, d).ssr;
    }
  }
  const double w = fc < fd ? c : d;
  const SineFit f = fit_fixed_omega(ts, ys, std::min(fc, fd) < best_ssr ? w : best_w);
  ChevronColumnFit col;
  col.amplitude = amplitude;
  col.omega = std::min(fc, fd) < best_ssr ? w : best_w;
  col.visibility = 2.0 * std::hypot(f.c, f.s);
  col.offset = f.offset;
  col.rms_residual = std::sqrt(f.ssr / static_cast<double>(ts.size()));
  return col;
}

}  // namespace detail

/// Fits a chevron map (x = amplitude, y = duration in s, value = P(target)).
/// Scattered samples are first interpolated onto a regular grid.
inline ChevronFit chevron_fit(const LandscapeSamples& samples) {
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> cols;
  for (const auto& p : samples.points) {
    cols[p.x].first.push_back(p.y);
    cols[p.x].second.push_back(p.value);
  }
  bool gridded = cols.size() >= 5;
  for (const auto& [x, c] : cols) gridded = gridded && c.first.size() >= 8;
  if (!gridded) {
    LandscapeSamples s = samples;
    ensure_triangulation(s);
    const int n = std::max(16, static_cast<int>(std::sqrt(static_cast<double>(s.points.size()))));
    cols.clear();
    const Bounds& b = s.bounds;
    for (int i = 0; i < n; ++i) {
      const double x = b.x_min + b.width() * i / (n - 1);
      for (int j = 0; j < n; ++j) {
        const double y = b.y_min + b.height() * j / (n - 1);
        const double v = interpolate(s, x, y);
        if (!std::isfinite(v)) continue;
        cols[x].first.push_back(y);
        cols[x].second.push_back(v);
      }
    }
  }

  ChevronFit fit;
  double ss = 0.0;
  std::size_t count = 0;
  for (auto& [x, c] : cols) {
    if (c.first.size() < 8) continue;
    fit.columns.push_back(detail::fit_column(x, c.first, c.second));
    ss += fit.columns.back().rms_residual * fit.columns.back().rms_residual * c.first.size();
    count += c.first.size();
  }
  if (fit.columns.size() < 3) throw Error(Errc::FitFailed, "chevron map has fewer than 3 usable amplitude columns");
  fit.goodness = std::sqrt(ss / static_cast<double>(count));

  double v_max = 0.0;
  for (const auto& c : fit.columns) v_max = std::max(v_max, c.visibility);
  if (v_max < 0.05)
    throw Error(Errc::FitFailed, "no population oscillation (max visibility " + std::to_string(v_max) + ")");

  // Omega^2 is quadratic in amplitude near resonance; fit it over the
  // high-visibility columns, weighting by visibility.
  for (double frac : {0.5, 0.25, 0.1}) {
    std::vector<const ChevronColumnFit*> use;
    for (const auto& c : fit.columns)
      if (c.visibility >= frac * v_max) use.push_back(&c);
    if (use.size() < 3) continue;
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    const double x0 = use[use.size() / 2]->amplitude;
    for (const auto* c : use) {
      const double u = c->amplitude - x0, w = c->visibility * c->visibility;
      const Eigen::Vector3d row(1.0, u, u * u);
      ata += w * row * row.transpose();
      aty += w * row * (c->omega * c->omega);
    }
    const Eigen::Vector3d q = ata.colPivHouseholderQr().solve(aty);
    if (!(q(2) > 0.0)) continue;
    const double u_min = -q(1) / (2.0 * q(2));
    const double w2 = q(0) - q(1) * q(1) / (4.0 * q(2));
    const double a_res = x0 + u_min;
    if (!(w2 > 0.0) || a_res < fit.columns.front().amplitude || a_res > fit.columns.back().amplitude) continue;
    fit.a_res = a_res;
    fit.omega_min = std::sqrt(w2);
    fit.t_lim_fit = kTwoPi / fit.omega_min;
    return fit;
  }
  throw Error(Errc::FitFailed, "could not locate the chevron symmetry axis (rms residual " +
                                   std::to_string(fit.goodness) + ")");
}

}  // namespace snz
