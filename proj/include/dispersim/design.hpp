#pragma once

// Tolerance budgets: the correlation needed to keep the dip within a given
// broadening ratio r = width * sigma for a sample of dispersion epsilon.

#include <cmath>
#include <limits>
#include <string>

#include "dispersim/core_model.hpp"
#include "dispersim/error.hpp"

namespace dispersim {

struct PumpBandwidthRequirement {
  // Exact inversion of the HOM width; +inf when no_constraint_needed.
  double sigma_c = 0.0;
  // Strong-correlation rule of thumb sqrt(2 (r^2 - 1)) / (|eps| sigma).
  double sigma_c_approx = 0.0;
  // Even an uncorrelated pair meets the budget.
  bool no_constraint_needed = false;
  // The rule of thumb is outside its sigma_c <= sigma / 3 regime.
  bool regime_warning = false;
};

namespace detail {

inline void check_budget(const char* who, double sigma, double epsilon,
                         double r) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ParameterError(std::string(who) + ": sigma must be finite and > 0");
  if (!(r > 1.0) || !std::isfinite(r))
    throw ParameterError(std::string(who) + ": broadening ratio must be > 1");
  if (epsilon == 0.0 || !std::isfinite(epsilon))
    throw ParameterError(std::string(who) + ": epsilon must be finite and != 0");
}

}  // namespace detail

inline PumpBandwidthRequirement required_pump_bandwidth(double sigma,
                                                        double epsilon,
                                                        double r) {
  detail::check_budget("required_pump_bandwidth", sigma, epsilon, r);
  const double budget = r * r - 1.0;
  const double e2s4 = epsilon * epsilon * sigma * sigma * sigma * sigma;
  PumpBandwidthRequirement out;
  out.sigma_c_approx = std::sqrt(2.0 * budget) / (std::abs(epsilon) * sigma);
  out.regime_warning = out.sigma_c_approx > sigma / 3.0;
  if (budget >= e2s4) {
    out.no_constraint_needed = true;
    out.sigma_c = std::numeric_limits<double>::infinity();
    return out;
  }
  out.sigma_c = sigma * std::sqrt(2.0 * budget / (e2s4 - budget));
  return out;
}

struct ChirpRequirement {
  // From the large-chirp width rule.
  double chirp_a = 0.0;
  // From the full width formula (keeps the 2 eps^2 sigma^4 term).
  double chirp_a_exact = 0.0;
  // The budget holds without any chirp.
  bool met_unchirped = false;
};

inline ChirpRequirement required_chirp(double sigma, double epsilon, double r) {
  detail::check_budget("required_chirp", sigma, epsilon, r);
  const double s2 = sigma * sigma;
  const double e2 = epsilon * epsilon * s2 * s2;
  const double need = e2 * (2.0 + 4.0 * e2) / (r * r - 1.0);
  ChirpRequirement out;
  out.chirp_a = std::sqrt(std::max(0.0, need - 1.0)) / (2.0 * s2);
  out.chirp_a_exact = std::sqrt(std::max(0.0, need - 1.0 - 2.0 * e2)) / (2.0 * s2);
  out.met_unchirped = need - 1.0 <= 0.0;
  return out;
}

struct EffectiveDispersion {
  double eps_eff = 0.0;
  double ratio = 0.0;
};

// HOM: ratio sigma_c / (sqrt(2) sigma), the square root of the
// strong-correlation reduction factor; 1 for an uncorrelated pair.
inline EffectiveDispersion effective_dispersion(const BiphotonSpec& spec,
                                                const SampleSpec& sample) {
  const HomGroups g = hom_groups(spec, sample);
  EffectiveDispersion out;
  out.ratio = g.uncorrelated ? 1.0 : g.s / std::sqrt(2.0);
  out.eps_eff = sample.epsilon * out.ratio;
  return out;
}

// CPI: ratio sqrt((2 + 4 eps^2 s^4) / (1 + 4 A^2 s^4)); 0 for infinite chirp.
inline EffectiveDispersion effective_dispersion(const ChirpedPulseSpec& pulse,
                                                const SampleSpec& sample) {
  const CpiGroups g = cpi_groups(pulse, sample);
  EffectiveDispersion out;
  out.ratio = g.infinite_chirp
                  ? 0.0
                  : std::sqrt((2.0 + 4.0 * g.eps * g.eps) / (1.0 + 4.0 * g.a * g.a));
  out.eps_eff = sample.epsilon * out.ratio;
  return out;
}

}  // namespace dispersim
