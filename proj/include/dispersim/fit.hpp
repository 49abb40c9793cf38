#pragma once

// Least-squares extraction of dip widths from sampled interferograms.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dispersim/core_model.hpp"
#include "dispersim/error.hpp"

namespace dispersim {

struct FitOptions {
  // Fit error when RMS residual exceeds this fraction of the signal scale.
  double max_rel_residual = 1e-4;
  double param_tol = 1e-10;
  int max_iterations = 500;
};

template <int P>
struct LeastSquaresResult {
  Eigen::Matrix<double, P, 1> params;
  double rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt for small dense problems. `model(t, p, grad)` returns the
// model value at t and writes d(model)/dp into grad.
template <int P, class Model>
LeastSquaresResult<P> levenberg_marquardt(Model&& model, std::span<const double> t,
                                          std::span<const double> y,
                                          Eigen::Matrix<double, P, 1> p,
                                          const FitOptions& opts) {
  using Vec = Eigen::Matrix<double, P, 1>;
  using Mat = Eigen::Matrix<double, P, P>;
  const std::size_t n = t.size();

  auto evaluate = [&](const Vec& q, Mat* jtj, Vec* jtr) {
    double cost = 0.0;
    if (jtj) jtj->setZero();
    if (jtr) jtr->setZero();
    Vec grad;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = model(t[i], q, grad) - y[i];
      cost += r * r;
      if (jtj) {
        *jtj += grad * grad.transpose();
        *jtr += grad * r;
      }
    }
    return cost;
  };

  LeastSquaresResult<P> out;
  double lambda = 1e-3;
  Mat jtj;
  Vec jtr;
  double cost = evaluate(p, &jtj, &jtr);
  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it + 1;
    Mat damped = jtj;
    for (int k = 0; k < P; ++k)
      damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
    const Vec step = damped.ldlt().solve(-jtr);
    if (!step.allFinite()) break;
    const Vec trial = p + step;
    const double trial_cost = evaluate(trial, nullptr, nullptr);
    bool small = true;
    for (int k = 0; k < P; ++k)
      small = small && std::abs(step(k)) <=
                           opts.param_tol * (std::abs(p(k)) + opts.param_tol);
    if (std::isfinite(trial_cost) && trial_cost <= cost) {
      p = trial;
      cost = evaluate(p, &jtj, &jtr);
      lambda = std::max(lambda / 10.0, 1e-12);
      if (small) {
        out.converged = true;
        break;
      }
    } else {
      if (small) {
        out.converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e16) break;
    }
  }
  out.params = p;
  out.rms = n ? std::sqrt(cost / static_cast<double>(n)) : 0.0;
  return out;
}

struct DipFit {
  double width = 0.0;
  double visibility = 0.0;
  double baseline = 0.0;
  double residual = 0.0;  // RMS
  int iterations = 0;
};

namespace detail {

// Distance from tau = 0 at which |y| first crosses `level`, walking out from
// index `from` in direction `dir`; NaN if it never does.
inline double crossing(std::span<const double> t, std::span<const double> y,
                       std::size_t from, int dir, double level, bool rising) {
  for (std::size_t i = from;;) {
    const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + dir);
    if (j >= t.size()) break;
    const bool hit = rising ? y[j] >= level : y[j] <= level;
    if (hit) {
      const double f = (level - y[i]) / (y[j] - y[i]);
      return std::abs(t[i] + f * (t[j] - t[i]));
    }
    i = j;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double half_width_to_rms(double half) {
  return half / std::sqrt(2.0 * std::numbers::ln2);
}

}  // namespace detail

// Fits b (1 - V exp(-tau^2 / 2 w^2)) centered at zero delay.
inline DipFit fit_gaussian_dip(const Interferogram& ig,
                               const FitOptions& opts = {}) {
  const std::size_t n = ig.size();
  if (n < 21 || ig.values.size() != n)
    throw FitError("fit_gaussian_dip: need at least 21 samples");
  std::span<const double> t(ig.delays), y(ig.values);

  const std::size_t edge = std::max<std::size_t>(1, (n + 19) / 20);
  double b0 = 0.0;
  for (std::size_t i = 0; i < edge; ++i) b0 += y[i] + y[n - 1 - i];
  b0 /= static_cast<double>(2 * edge);
  const auto imin = static_cast<std::size_t>(
      std::min_element(y.begin(), y.end()) - y.begin());
  if (!(b0 > 0.0)) throw FitError("fit_gaussian_dip: non-positive baseline");
  const double v0 = (b0 - y[imin]) / b0;
  if (!(v0 > 1e-9)) throw FitError("fit_gaussian_dip: no dip present");

  const double level = b0 * (1.0 - 0.5 * v0);
  const double right = detail::crossing(t, y, imin, +1, level, true);
  const double left = detail::crossing(t, y, imin, -1, level, true);
  double half = 0.0;
  if (std::isfinite(right) && std::isfinite(left))
    half = 0.5 * (right + left);
  else if (std::isfinite(right) || std::isfinite(left))
    half = std::isfinite(right) ? right : left;
  else
    throw FitError("fit_gaussian_dip: dip does not recover within the scan");
  if (!(half > 0.0)) throw FitError("fit_gaussian_dip: unresolved dip");

  auto model = [](double tau, const Eigen::Vector3d& p, Eigen::Vector3d& g) {
    const double w2 = p(2) * p(2);
    const double e = std::exp(-tau * tau / (2.0 * w2));
    g(0) = 1.0 - p(1) * e;
    g(1) = -p(0) * e;
    g(2) = -p(0) * p(1) * e * tau * tau / (w2 * p(2));
    return p(0) * (1.0 - p(1) * e);
  };
  const auto res = levenberg_marquardt<3>(
      model, t, y, Eigen::Vector3d(b0, v0, detail::half_width_to_rms(half)),
      opts);
  if (!res.converged || !res.params.allFinite())
    throw FitError("fit_gaussian_dip: least squares did not converge");
  DipFit fit{std::abs(res.params(2)), res.params(1), res.params(0), res.rms,
             res.iterations};
  if (fit.residual > opts.max_rel_residual * std::abs(fit.baseline))
    throw FitError("fit_gaussian_dip: residual " + std::to_string(fit.residual) +
                   " exceeds tolerance; profile is not a Gaussian dip");
  return fit;
}

struct ModulatedDipFit {
  double amplitude = 0.0;
  double zeta = 0.0;
  double alpha = 0.0;
  double width = 0.0;
  double residual = 0.0;  // RMS
  int iterations = 0;
};

// Fits C cos(zeta - alpha tau^2) exp(-tau^2 / 2 w^2), the interference term
// of a chirped-pulse interferogram. (zeta, alpha) and (-zeta, -alpha)
// describe the same curve; the result is reported with alpha >= 0.
// With `modulated` false the cosine is held at 1.
inline ModulatedDipFit fit_modulated_dip(std::span<const double> t,
                                         std::span<const double> y,
                                         bool modulated = true,
                                         const FitOptions& opts = {}) {
  const std::size_t n = t.size();
  if (n < 21 || y.size() != n)
    throw FitError("fit_modulated_dip: need at least 21 samples");
  std::size_t ic = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(t[i]) < std::abs(t[ic])) ic = i;
  const double c0 = y[ic];
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  if (!(std::abs(c0) > 1e-9 * std::max(peak, 1e-300)) || peak == 0.0)
    throw FitError("fit_modulated_dip: no interference term present");

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = y[i] / c0;
  const double right = detail::crossing(t, mag, ic, +1, 0.5, false);
  const double left = detail::crossing(t, mag, ic, -1, 0.5, false);
  double half = 0.0;
  if (std::isfinite(right) && std::isfinite(left))
    half = 0.5 * (right + left);
  else if (std::isfinite(right) || std::isfinite(left))
    half = std::isfinite(right) ? right : left;
  else
    throw FitError("fit_modulated_dip: dip does not decay within the scan");

  auto gauss = [](double tau, const Eigen::Vector2d& p, Eigen::Vector2d& g) {
    const double w2 = p(1) * p(1);
    const double e = std::exp(-tau * tau / (2.0 * w2));
    g(0) = e;
    g(1) = p(0) * e * tau * tau / (w2 * p(1));
    return p(0) * e;
  };
  const auto first = levenberg_marquardt<2>(
      gauss, t, y, Eigen::Vector2d(c0, detail::half_width_to_rms(half)), opts);
  if (!first.converged || !first.params.allFinite())
    throw FitError("fit_modulated_dip: least squares did not converge");

  ModulatedDipFit fit;
  if (!modulated) {
    fit = {first.params(0), 0.0, 0.0, std::abs(first.params(1)), first.rms,
           first.iterations};
  } else {
    auto full = [](double tau, const Eigen::Vector4d& p, Eigen::Vector4d& g) {
      const double t2 = tau * tau;
      const double w2 = p(3) * p(3);
      const double e = std::exp(-t2 / (2.0 * w2));
      const double ph = p(1) - p(2) * t2;
      const double c = std::cos(ph), s = std::sin(ph);
      g(0) = c * e;
      g(1) = -p(0) * s * e;
      g(2) = p(0) * s * e * t2;
      g(3) = p(0) * c * e * t2 / (w2 * p(3));
      return p(0) * c * e;
    };
    // Start off the (zeta, alpha) = 0 stationary point.
    const auto res = levenberg_marquardt<4>(
        full, t, y,
        Eigen::Vector4d(first.params(0), 1e-3, 1e-3, std::abs(first.params(1))),
        opts);
    if (!res.converged || !res.params.allFinite())
      throw FitError("fit_modulated_dip: least squares did not converge");
    const double sign = res.params(2) < 0.0 ? -1.0 : 1.0;
    fit = {res.params(0), sign * res.params(1), sign * res.params(2),
           std::abs(res.params(3)), res.rms, res.iterations};
  }
  if (fit.residual > opts.max_rel_residual * std::abs(fit.amplitude))
    throw FitError("fit_modulated_dip: residual " +
                   std::to_string(fit.residual) +
                   " exceeds tolerance; profile is not a modulated Gaussian");
  return fit;
}

}  // namespace dispersim
