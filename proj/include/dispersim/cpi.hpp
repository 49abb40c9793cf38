#pragma once

// Chirped-pulse interferometer: closed-form sum-frequency signal for a pair
// of oppositely chirped Gaussian pulses, its width formulas, and a
// quadrature oracle built directly from the sum-frequency field.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dispersim/core_model.hpp"
#include "dispersim/parallel.hpp"
#include "dispersim/quadrature.hpp"

namespace dispersim {

// Weight of the interference term relative to the published Lambda_c.
// Expanding |a - b|^2 gives 2 Re(a b*); with the common prefactor of the
// Lambdas that is 2 Lambda_c, and the oracle's exact null at
// (A = 10, eps = 0, tau = 0) fixes it (see determine_cross_term_weight).
inline constexpr double kCrossTermWeight = 2.0;

struct CpiClosedFormTerms {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double lambda_c = 0.0;
  double zeta = 0.0;
  double alpha = 0.0;
  double tau_plus = 0.0;
  double tau_minus = 0.0;
  double tau_cpi = 0.0;
};

// The eight definitions accompanying the signal, in physical units.
inline CpiClosedFormTerms cpi_terms(const ChirpedPulseSpec& pulse,
                                    const SampleSpec& sample) {
  sample.require_quadratic("cpi_terms");
  if (pulse.infinite_chirp)
    throw DomainError("cpi_terms: undefined for infinite chirp");
  pulse.validate();
  const double s = pulse.sigma;
  const double a = pulse.chirp_a;
  const double e = sample.epsilon;
  const double s2 = s * s, s4 = s2 * s2;
  const double pre = std::sqrt(2.0 * std::pow(std::numbers::pi, 5)) * s;

  const double q_plus = 2.0 * a * a + 2.0 * a * e + e * e;
  const double q_minus = 2.0 * a * a - 2.0 * a * e + e * e;
  const double d = 1.0 + 2.0 * (2.0 * a * a + e * e) * s4;
  const double e4 = e * e * e * e;
  const double m = 4.0 * a * a * s4 + std::pow(1.0 + 2.0 * e * e * s4, 2);

  CpiClosedFormTerms r;
  r.lambda_plus = pre / std::sqrt(1.0 + 2.0 * q_plus * s4);
  r.lambda_minus = pre / std::sqrt(1.0 + 2.0 * q_minus * s4);
  r.lambda_c = pre / std::pow(16.0 * a * a * e4 * std::pow(s, 12) + d * d, 0.25);
  r.zeta = 0.5 * std::atan(4.0 * a * e * e * std::pow(s, 6) / d);
  r.alpha = 2.0 * a * e * e * std::pow(s, 8) / m;
  r.tau_plus = std::sqrt(1.0 / s2 + 2.0 * q_plus * s2);
  r.tau_minus = std::sqrt(1.0 / s2 + 2.0 * q_minus * s2);
  r.tau_cpi = std::sqrt(m / d) / s;
  return r;
}

// Sum-frequency power normalized to the broad envelope at zero delay,
// (L+ g+ + L- g- - kappa Lc cos(zeta - alpha tau^2) g_cpi) / (L+ + L-).
inline double cpi_closed_form(const ChirpedPulseSpec& pulse,
                              const SampleSpec& sample, double tau,
                              double kappa = kCrossTermWeight) {
  sample.require_quadratic("cpi_closed_form");
  if (pulse.infinite_chirp) {
    pulse.validate();
    const double t = tau * pulse.sigma;
    return 1.0 - 0.5 * kappa * std::exp(-0.5 * t * t);
  }
  const auto c = cpi_terms(pulse, sample);
  const double t2 = tau * tau;
  const double env = c.lambda_plus * std::exp(-t2 / (2.0 * c.tau_plus * c.tau_plus)) +
                     c.lambda_minus * std::exp(-t2 / (2.0 * c.tau_minus * c.tau_minus));
  const double dip = kappa * c.lambda_c * std::cos(c.zeta - c.alpha * t2) *
                     std::exp(-t2 / (2.0 * c.tau_cpi * c.tau_cpi));
  return (env - dip) / (c.lambda_plus + c.lambda_minus);
}

// Envelope part alone, same normalization.
inline double cpi_closed_form_envelope(const ChirpedPulseSpec& pulse,
                                       const SampleSpec& sample, double tau) {
  const auto c = cpi_terms(pulse, sample);
  const double t2 = tau * tau;
  return (c.lambda_plus * std::exp(-t2 / (2.0 * c.tau_plus * c.tau_plus)) +
          c.lambda_minus * std::exp(-t2 / (2.0 * c.tau_minus * c.tau_minus))) /
         (c.lambda_plus + c.lambda_minus);
}

inline InterferogramMeta cpi_meta(const ChirpedPulseSpec& pulse,
                                  const SampleSpec& sample,
                                  std::string evaluation) {
  InterferogramMeta m;
  m.model = "cpi";
  m.evaluation = std::move(evaluation);
  m.normalization = "envelope_peak";
  m.params = {{"omega0", pulse.omega0},
              {"sigma", pulse.sigma},
              {"chirp_a", pulse.infinite_chirp
                              ? std::numeric_limits<double>::infinity()
                              : pulse.chirp_a},
              {"amplitude", pulse.amplitude},
              {"epsilon", sample.epsilon},
              {"cubic", sample.cubic}};
  return m;
}

inline Interferogram cpi_closed_form_scan(const ChirpedPulseSpec& pulse,
                                          const SampleSpec& sample,
                                          const DelayGrid& grid,
                                          double kappa = kCrossTermWeight) {
  Interferogram ig;
  ig.delays = grid.points();
  ig.values.reserve(ig.delays.size());
  for (double tau : ig.delays) {
    double v = cpi_closed_form(pulse, sample, tau, kappa);
    if (v < 0.0 && v > -1e-12) v = 0.0;
    ig.values.push_back(v);
  }
  ig.meta = cpi_meta(pulse, sample, "closed_form");
  return ig;
}

struct CpiWidthReport {
  double tau_cpi = 0.0;
  double tau_cpi_large_chirp = 0.0;
  // (2 + 4 eps^2 s^4) / (1 + 4 A^2 s^4)
  double reduction_factor = 0.0;
};

inline CpiWidthReport cpi_width(const ChirpedPulseSpec& pulse,
                                const SampleSpec& sample) {
  sample.require_quadratic("cpi_width");
  const CpiGroups g = cpi_groups(pulse, sample);
  const double inv_sigma = 1.0 / pulse.sigma;
  if (g.infinite_chirp) return {inv_sigma, inv_sigma, 0.0};
  const double e2 = g.eps * g.eps;
  const double a2 = g.a * g.a;
  const double num = 2.0 + 4.0 * e2;
  CpiWidthReport r;
  r.tau_cpi = inv_sigma * std::sqrt(1.0 + e2 * num / (1.0 + 4.0 * a2 + 2.0 * e2));
  r.tau_cpi_large_chirp = inv_sigma * std::sqrt(1.0 + e2 * num / (1.0 + 4.0 * a2));
  r.reduction_factor = num / (1.0 + 4.0 * a2);
  return r;
}

// Oracle output. All series are divided by the numerically integrated
// envelope at zero delay.
struct CpiNumericScan {
  Interferogram signal;
  std::vector<double> envelope;  // int (|t1|^2 + |t2|^2) dw
  std::vector<double> cross;     // envelope - signal = 2 Re int t1 t2* dw
  double reference = 0.0;        // raw envelope at tau = 0 (normalized units)
  std::int64_t max_inner_nodes = 0;
};

namespace detail {

struct CpiPoint {
  double signal = 0.0;
  double envelope = 0.0;
  bool converged = false;
  std::int64_t inner_nodes = 0;
};

// Sum-frequency field E3(w, tau) = int dx [E(x;-A) E(w-x;A) - E(x;A)
// E(w-x;-A)] exp(i tau x + i phi(w - x)) for detunings x, w in units of
// sigma, then its power integrated over the sum-frequency detuning w.
class CpiFieldOracle {
 public:
  CpiFieldOracle(const CpiGroups& g, const QuadratureConfig& cfg)
      : g_(g), cfg_(cfg) {
    cfg_.validate();
    // |E(x)E(w-x)| = exp(-w^2/4) exp(-(x - w/2)^2): RMS 1/sqrt(2) in x.
    x_half_ = cfg_.half_width_k / std::sqrt(2.0);
  }

  // Half-width of the sum-frequency window. Each chirp branch contributes a
  // Gaussian in w of precision 1 + (2A +- eps)^2 / (1 + eps^2), displaced in
  // proportion to the delay; the cubic term is folded in as extra
  // dispersion and delay.
  double sfg_half_width(double t) const {
    const double c = std::abs(g_.cubic);
    const double t_eff = std::abs(t) + 12.0 * c;
    double h = 0.0;
    for (double de : {-6.0 * c, 0.0, 6.0 * c}) {
      const double e = g_.eps + de;
      for (double sgn : {-1.0, 1.0}) {
        const double slope = 2.0 * g_.a * sgn + e;
        const double prec = 1.0 + slope * slope / (1.0 + e * e);
        const double center = t_eff * std::abs(slope) / ((1.0 + e * e) * prec);
        h = std::max(h, center + cfg_.half_width_k / std::sqrt(prec));
      }
    }
    return h;
  }

  CpiPoint evaluate(double t) const {
    CpiPoint out;
    bool inner_ok = true;
    std::int64_t inner_max = 0;
    auto power = [&](double w) {
      const auto t12 = field_terms(w, t, inner_ok, inner_max);
      const complex e3 = t12[0] - t12[1];
      return std::array<double, 2>{std::norm(e3),
                                   std::norm(t12[0]) + std::norm(t12[1])};
    };
    const double h = sfg_half_width(t);
    const auto res = integrate_1d(power, {-h, h}, cfg_);
    out.signal = res.value[0];
    out.envelope = res.value[1];
    out.converged = res.converged && inner_ok;
    out.inner_nodes = inner_max;
    return out;
  }

 private:
  // The two bracket terms of E3 at detuning w (without their difference).
  std::array<complex, 2> field_terms(double w, double t, bool& ok,
                                     std::int64_t& nodes) const {
    const double a = g_.a;
    auto integrand = [&](double x) {
      // E(x;-A) = conj(E(x;A)).
      const complex e1 = chirped_detuned(a, x);
      const complex e2 = chirped_detuned(a, w - x);
      const complex forward = std::conj(e1) * e2;  // E(x;-A) E(w-x;A)
      const complex backward = e1 * std::conj(e2); // E(x;A) E(w-x;-A)
      const complex carrier =
          std::polar(1.0, t * x + phase_detuned(g_.eps, g_.cubic, w - x));
      return std::array<complex, 2>{forward * carrier, backward * carrier};
    };
    const double reach = 0.5 * std::abs(w) + x_half_;
    const double range = (std::abs(t) + 2.0 * std::abs(a * w)) * 2.0 * x_half_ +
                         std::abs(g_.eps) * reach * reach +
                         std::abs(g_.cubic) * reach * reach * reach;
    const double mid = 0.5 * w;
    const auto res = integrate_1d(integrand, {mid - x_half_, mid + x_half_},
                                  cfg_, min_nodes_for_phase(range, cfg_));
    ok = ok && res.converged;
    nodes = std::max(nodes, res.nodes_used);
    return res.value;
  }

  CpiGroups g_;
  QuadratureConfig cfg_;
  double x_half_ = 0.0;
};

}  // namespace detail

inline CpiNumericScan cpi_numeric_scan(const ChirpedPulseSpec& pulse,
                                       const SampleSpec& sample,
                                       const DelayGrid& grid,
                                       const QuadratureConfig& cfg,
                                       int jobs = 1) {
  const CpiGroups g = cpi_groups(pulse, sample);
  if (g.infinite_chirp)
    throw DomainError("cpi_numeric: infinite chirp cannot be simulated");
  const auto delays = grid.points();
  const detail::CpiFieldOracle oracle(g, cfg);

  const auto ref = oracle.evaluate(0.0);
  if (!ref.converged || !(ref.envelope > 0.0))
    throw OracleError("cpi_numeric: envelope quadrature did not converge at tau=0");

  std::vector<detail::CpiPoint> points(delays.size());
  parallel_for(delays.size(), jobs, [&](std::size_t i) {
    points[i] = oracle.evaluate(delays[i] * pulse.sigma);
    if (!points[i].converged)
      throw OracleError("cpi_numeric: quadrature did not converge at tau=" +
                        detail::tau_label(delays[i]) +
                        " (sum-frequency field or power stage)");
  });

  CpiNumericScan out;
  out.reference = ref.envelope;
  out.signal.delays = delays;
  out.signal.meta = cpi_meta(pulse, sample, "numeric");
  for (const auto& p : points) {
    double v = p.signal / ref.envelope;
    if (v < 0.0 && v > -1e-12) v = 0.0;
    out.signal.values.push_back(v);
    out.envelope.push_back(p.envelope / ref.envelope);
    out.cross.push_back((p.envelope - p.signal) / ref.envelope);
    out.max_inner_nodes = std::max(out.max_inner_nodes, p.inner_nodes);
  }
  out.signal.validate();
  return out;
}

inline Interferogram cpi_numeric(const ChirpedPulseSpec& pulse,
                                 const SampleSpec& sample,
                                 const DelayGrid& grid,
                                 const QuadratureConfig& cfg, int jobs = 1) {
  return cpi_numeric_scan(pulse, sample, grid, cfg, jobs).signal;
}

struct CrossTermWeight {
  double measured = 0.0;  // (L+ + L-) (1 - I(0)) / Lc from the oracle
  double adopted = 0.0;     // nearest of the candidate weights {1, 2}
  double dip_minimum = 0.0;  // oracle I(0), envelope-normalized
};

// Runs the oracle at zero delay for sigma = 1, A = 10, eps = 0, where the
// bracket of the sum-frequency field is odd and the signal must vanish, and
// infers the weight the interference term needs to reproduce it.
inline CrossTermWeight determine_cross_term_weight(const QuadratureConfig& cfg) {
  const ChirpedPulseSpec pulse{1.0, 1.0, 10.0, 1.0, false};
  const SampleSpec sample{0.0, 0.0};
  const detail::CpiFieldOracle oracle(cpi_groups(pulse, sample), cfg);
  const auto p = oracle.evaluate(0.0);
  if (!p.converged)
    throw OracleError("determine_cross_term_weight: quadrature did not converge");
  const auto c = cpi_terms(pulse, sample);
  CrossTermWeight k;
  k.dip_minimum = std::max(0.0, p.signal / p.envelope);
  k.measured = (c.lambda_plus + c.lambda_minus) * (1.0 - p.signal / p.envelope) /
               c.lambda_c;
  k.adopted = std::abs(k.measured - 2.0) < std::abs(k.measured - 1.0) ? 2.0 : 1.0;
  return k;
}

}  // namespace dispersim
