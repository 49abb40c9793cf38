#pragma once

// Hong-Ou-Mandel interferometer with a finite-correlation biphoton and a
// dispersive sample in one arm.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "dispersim/core_model.hpp"
#include "dispersim/parallel.hpp"
#include "dispersim/quadrature.hpp"

namespace dispersim {

struct HomWidthReport {
  double tau_hom = 0.0;
  // Strong-correlation (sigma_c << sigma) approximation; +inf when that
  // expansion diverges (uncorrelated pair with dispersion).
  double tau_hom_approx = 0.0;
  double visibility = 1.0;
  // sigma_c^2 / (2 sigma^2 + sigma_c^2): the multiplier on eps^2 sigma^4.
  double reduction_factor = 0.0;
};

namespace detail {

// Radicands in normalized units: tau_hom^2 sigma^2 and 1/V^2.
inline double hom_width_sq(const HomGroups& g) {
  if (g.uncorrelated) return 1.0 + g.eps * g.eps;
  if (g.perfect()) return 1.0;
  const double s2 = g.s * g.s;
  return 1.0 + g.eps * g.eps * s2 / (2.0 + s2);
}

}  // namespace detail

inline HomWidthReport hom_width(const BiphotonSpec& spec,
                                const SampleSpec& sample) {
  sample.require_quadratic("hom_width");
  const HomGroups g = hom_groups(spec, sample);
  const double inv_sigma = 1.0 / spec.sigma;
  HomWidthReport r;
  if (g.uncorrelated) {
    r.tau_hom = inv_sigma * std::sqrt(1.0 + g.eps * g.eps);
    r.tau_hom_approx = g.eps == 0.0 ? inv_sigma
                                    : std::numeric_limits<double>::infinity();
    r.visibility = 1.0 / std::sqrt(1.0 + g.eps * g.eps);
    r.reduction_factor = 1.0;
    return r;
  }
  const double s2 = g.s * g.s;
  const double e2 = g.eps * g.eps;
  r.tau_hom = inv_sigma * std::sqrt(1.0 + e2 * s2 / (2.0 + s2));
  r.tau_hom_approx = inv_sigma * std::sqrt(1.0 + e2 * s2 / 2.0);
  r.visibility = std::sqrt((2.0 + s2) / (2.0 + s2 + e2 * s2));
  r.reduction_factor = s2 / (2.0 + s2);
  return r;
}

// Baseline-normalized coincidence probability C(tau) = 1 - V exp(-tau^2 /
// 2 tau_hom^2).
inline double hom_closed_form(const BiphotonSpec& spec,
                              const SampleSpec& sample, double tau) {
  sample.require_quadratic("hom_closed_form");
  const HomGroups g = hom_groups(spec, sample);
  const double t = tau * spec.sigma;
  double vis = 1.0;
  double width_sq = 1.0;
  if (g.uncorrelated) {
    width_sq = 1.0 + g.eps * g.eps;
    vis = 1.0 / std::sqrt(width_sq);
  } else if (!g.perfect()) {
    const double s2 = g.s * g.s;
    const double num = 2.0 + s2;
    const double den = 2.0 + s2 + g.eps * g.eps * s2;
    vis = std::sqrt(num / den);
    return 1.0 - vis * std::exp(-t * t * num / (2.0 * den));
  }
  return 1.0 - vis * std::exp(-t * t / (2.0 * width_sq));
}

inline InterferogramMeta hom_meta(const BiphotonSpec& spec,
                                  const SampleSpec& sample,
                                  std::string evaluation) {
  InterferogramMeta m;
  m.model = "hom";
  m.evaluation = std::move(evaluation);
  m.normalization = "baseline";
  m.params = {{"omega0", spec.omega0},
              {"sigma", spec.sigma},
              {"sigma_c", spec.uncorrelated
                              ? std::numeric_limits<double>::infinity()
                              : spec.sigma_c},
              {"epsilon", sample.epsilon},
              {"cubic", sample.cubic}};
  return m;
}

inline Interferogram hom_closed_form_scan(const BiphotonSpec& spec,
                                          const SampleSpec& sample,
                                          const DelayGrid& grid) {
  Interferogram ig;
  ig.delays = grid.points();
  ig.values.reserve(ig.delays.size());
  for (double tau : ig.delays)
    ig.values.push_back(hom_closed_form(spec, sample, tau));
  ig.meta = hom_meta(spec, sample, "closed_form");
  return ig;
}

// Direct evaluation of  int int |A_tt + A_rr|^2 dw1 dw2  on the
// (w1, w2) detuning square with the tensor-product rule; normalized units
// (result scales with sigma^2). Slow for strong correlations; hom_numeric
// is the production oracle.
inline QuadratureResult<double> hom_coincidence_direct(
    const BiphotonSpec& spec, const SampleSpec& sample, double tau,
    const QuadratureConfig& cfg) {
  const HomGroups g = hom_groups(spec, sample);
  if (g.perfect())
    throw DomainError("hom_coincidence_direct: needs sigma_c > 0");
  const double t = tau * spec.sigma;
  auto integrand = [&](double x, double y) {
    const double f = detail::jsa_detuned(g.s, g.uncorrelated, x, y);
    const complex a_tt = f * std::polar(1.0, detail::phase_detuned(
                                                 g.eps, g.cubic, y) + x * t);
    const complex a_rr = -f * std::polar(1.0, detail::phase_detuned(
                                                  g.eps, g.cubic, x) + y * t);
    return std::norm(a_tt + a_rr);
  };
  const double k = cfg.half_width_k;
  const double range = std::abs(g.eps) * k * k + std::abs(g.cubic) * k * k * k +
                       std::abs(t) * 2.0 * k;
  // The anti-diagonal ridge has RMS width s/sqrt(2 + s^2) across x + y.
  std::int64_t seed = min_nodes_for_phase(range, cfg);
  if (!g.uncorrelated) {
    const double ridge = g.s / std::sqrt(2.0 + g.s * g.s);
    seed = std::max<std::int64_t>(
        seed, static_cast<std::int64_t>(std::ceil(2.0 * k / (ridge / 4.0))) | 1);
  }
  return integrate_2d(integrand, {-k, k}, {-k, k}, cfg, seed, seed);
}

namespace detail {

// Node counts (base-1)*2^m + 1 so that every seed is a refinement of the
// base grid and node positions are shared between delays.
inline std::int64_t nested_seed(std::int64_t want, const QuadratureConfig& cfg) {
  std::int64_t n = cfg.base_nodes;
  while (n < want) n = 2 * n - 1;
  return n;
}

// Coincidence integral in rotated coordinates u = x - y, v = x + y
// (x, y detunings in units of sigma). |A_tt + A_rr|^2 = 2 f^2 (1 - cos(dphi +
// u tau)), so the v integral K(u) = int f^2 exp(i dphi) dv does not depend on
// the delay and is cached per u node.
class HomCoincidenceOracle {
 public:
  HomCoincidenceOracle(const HomGroups& g, const QuadratureConfig& cfg)
      : g_(g), cfg_(cfg) {
    cfg_.validate();
    // f^2 = exp(-u^2/2 - a v^2) with a = 1/2 + 1/s^2.
    const double a = g_.uncorrelated ? 0.5 : 0.5 + 1.0 / (g_.s * g_.s);
    v_half_ = g_.perfect() ? 0.0 : cfg_.half_width_k / std::sqrt(2.0 * a);
    u_half_ = cfg_.half_width_k;
  }

  // Returns the integral and whether every quadrature converged.
  std::pair<double, bool> coincidence(double t) {
    const double k = u_half_;
    const double c = std::abs(g_.cubic);
    const double range = std::abs(t) * 2.0 * k +
                         c * (0.5 * k * k * k + 1.5 * k * v_half_ * v_half_) +
                         std::abs(g_.eps) * 2.0 * k * v_half_;
    const std::int64_t seed = nested_seed(min_nodes_for_phase(range, cfg_), cfg_);
    bool inner_ok = true;
    auto outer = [&](double u) {
      const Entry& e = inner(u);
      inner_ok = inner_ok && e.converged;
      return e.mass - (std::polar(1.0, u * t) * e.k).real();
    };
    const auto res = integrate_1d(outer, {-k, k}, cfg_, seed);
    // The factor 2 of the |.|^2 expansion cancels the Jacobian du dv = 2 dx dy.
    return {res.value, res.converged && inner_ok};
  }

 private:
  struct Entry {
    complex k;
    double mass;
    bool converged;
  };

  double dphi(double u, double v) const {
    const double x = 0.5 * (u + v);
    const double y = 0.5 * (v - u);
    return detail::phase_detuned(g_.eps, g_.cubic, y) -
           detail::phase_detuned(g_.eps, g_.cubic, x);
  }

  const Entry& inner(double u) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(u);
      if (it != cache_.end()) return it->second;
    }
    Entry e{};
    if (g_.perfect()) {
      // sigma_c -> 0 collapses the v integral onto the anti-diagonal.
      const double w = std::exp(-0.5 * u * u);
      e = {w * std::polar(1.0, dphi(u, 0.0)), w, true};
    } else {
      auto integrand = [&](double v) {
        const double x = 0.5 * (u + v);
        const double y = 0.5 * (v - u);
        const double f = detail::jsa_detuned(g_.s, g_.uncorrelated, x, y);
        const double f2 = f * f;
        return std::array<complex, 2>{f2 * std::polar(1.0, dphi(u, v)),
                                      complex(f2, 0.0)};
      };
      const double range = (std::abs(g_.eps) * std::abs(u) * 2.0 +
                            0.75 * std::abs(g_.cubic) * std::abs(u) * v_half_) *
                           v_half_;
      const auto res = integrate_1d(integrand, {-v_half_, v_half_}, cfg_,
                                    min_nodes_for_phase(range, cfg_));
      e = {res.value[0], res.value[1].real(), res.converged};
    }
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(u, e).first->second;
  }

  HomGroups g_;
  QuadratureConfig cfg_;
  double u_half_ = 0.0;
  double v_half_ = 0.0;
  std::mutex mu_;
  std::map<double, Entry> cache_;
};

}  // namespace detail

// Oracle: the coincidence integral by quadrature at each delay, divided by
// its value far outside the dip. Accepts a cubic sample phase.
inline Interferogram hom_numeric(const BiphotonSpec& spec,
                                 const SampleSpec& sample,
                                 const DelayGrid& grid,
                                 const QuadratureConfig& cfg, int jobs = 1) {
  const HomGroups g = hom_groups(spec, sample);
  const auto delays = grid.points();
  detail::HomCoincidenceOracle oracle(g, cfg);

  // Quadratic width plus the group-delay spread of the cubic term over
  // +-4 sigma.
  const double width = std::sqrt(detail::hom_width_sq(g)) +
                       48.0 * std::abs(g.cubic);
  const double t_base = grid.tau_max * spec.sigma + 20.0 * width;
  const auto [baseline, base_ok] = oracle.coincidence(t_base);
  if (!base_ok || !(baseline > 0.0))
    throw OracleError("hom_numeric: baseline quadrature did not converge at tau=" +
                      detail::tau_label(t_base / spec.sigma));

  Interferogram ig;
  ig.delays = delays;
  ig.values.assign(delays.size(), 0.0);
  parallel_for(delays.size(), jobs, [&](std::size_t i) {
    const auto [value, ok] = oracle.coincidence(delays[i] * spec.sigma);
    if (!ok)
      throw OracleError("hom_numeric: quadrature did not converge at tau=" +
                        detail::tau_label(delays[i]));
    double c = value / baseline;
    // Rounding at an exact null may leave a tiny negative residue.
    if (c < 0.0 && c > -1e-12) c = 0.0;
    ig.values[i] = c;
  });
  ig.meta = hom_meta(spec, sample, "numeric");
  ig.validate();
  return ig;
}

}  // namespace dispersim
