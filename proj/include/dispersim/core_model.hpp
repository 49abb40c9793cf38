#pragma once

// Parameter records and elementary spectral functions shared by the HOM and
// CPI models.
//
// Every observable depends only on the dimensionless groups
// sigma_c/sigma, epsilon*sigma^2, A*sigma^2, tau*sigma. Public functions take
// physical values; the *_groups() helpers perform the normalization and the
// model code works on detunings in units of sigma.

#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dispersim/error.hpp"

namespace dispersim {

using complex = std::complex<double>;

struct BiphotonSpec {
  double omega0 = 1.0;
  double sigma = 1.0;
  // 0 encodes perfect frequency anticorrelation.
  double sigma_c = 0.0;
  // sigma_c -> infinity (separable joint spectrum); sigma_c is ignored.
  bool uncorrelated = false;

  static BiphotonSpec correlated(double omega0, double sigma, double sigma_c) {
    return {omega0, sigma, sigma_c, false};
  }
  static BiphotonSpec uncorrelated_pair(double omega0, double sigma) {
    return {omega0, sigma, 0.0, true};
  }

  bool perfectly_correlated() const { return !uncorrelated && sigma_c == 0.0; }

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw ParameterError("biphoton: sigma must be finite and > 0");
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
      throw ParameterError("biphoton: omega0 must be finite and > 0");
    if (!uncorrelated && (!(sigma_c >= 0.0) || !std::isfinite(sigma_c)))
      throw ParameterError("biphoton: sigma_c must be finite and >= 0");
  }
};

struct ChirpedPulseSpec {
  double omega0 = 1.0;
  double sigma = 1.0;
  // Sign selects chirped vs anti-chirped.
  double chirp_a = 0.0;
  double amplitude = 1.0;
  // A -> infinity limit; only the width formulas accept it.
  bool infinite_chirp = false;

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw ParameterError("pulse: sigma must be finite and > 0");
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
      throw ParameterError("pulse: omega0 must be finite and > 0");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw ParameterError("pulse: amplitude must be finite and > 0");
    if (!infinite_chirp && !std::isfinite(chirp_a))
      throw ParameterError("pulse: chirp_a must be finite");
  }
};

struct SampleSpec {
  double epsilon = 0.0;
  // Only the quadrature oracles accept a nonzero cubic term.
  double cubic = 0.0;

  bool quadratic_only() const { return cubic == 0.0; }

  void validate() const {
    if (!std::isfinite(epsilon) || !std::isfinite(cubic))
      throw ParameterError("sample: epsilon and cubic must be finite");
  }

  void require_quadratic(const char* who) const {
    if (!quadratic_only())
      throw UnsupportedModelError(std::string(who) +
                                  ": closed form requires cubic == 0");
  }
};

struct DelayGrid {
  double tau_min = -5.0;
  double tau_max = 5.0;
  int n_points = 101;

  void validate() const {
    if (!std::isfinite(tau_min) || !std::isfinite(tau_max) ||
        !(tau_max > tau_min))
      throw ParameterError("delay grid: need finite tau_max > tau_min");
    if (n_points < 2) throw ParameterError("delay grid: need n_points >= 2");
  }

  // Uniform, both endpoints included exactly.
  std::vector<double> points() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(n_points));
    const double span = tau_max - tau_min;
    const double last = static_cast<double>(n_points - 1);
    for (int i = 0; i < n_points; ++i)
      out[static_cast<std::size_t>(i)] = tau_min + span * (i / last);
    out.back() = tau_max;
    return out;
  }

  static DelayGrid symmetric(double half_width, int n_points) {
    return {-half_width, half_width, n_points};
  }
};

struct InterferogramMeta {
  std::string model;        // "hom" | "cpi"
  std::string evaluation;   // "closed_form" | "numeric"
  std::string normalization;
  std::map<std::string, double> params;
};

struct Interferogram {
  std::vector<double> delays;
  std::vector<double> values;
  InterferogramMeta meta;

  std::size_t size() const { return delays.size(); }

  void validate() const {
    if (delays.size() != values.size())
      throw ParameterError("interferogram: delays/values length mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]) || values[i] < 0.0)
        throw ParameterError("interferogram: values must be finite and >= 0");
      if (i > 0 && !(delays[i] > delays[i - 1]))
        throw ParameterError("interferogram: delays must increase strictly");
    }
  }
};

// Dimensionless groups of a HOM configuration.
struct HomGroups {
  double s = 0.0;      // sigma_c / sigma
  double eps = 0.0;    // epsilon * sigma^2
  double cubic = 0.0;  // cubic * sigma^3
  bool uncorrelated = false;
  bool perfect() const { return !uncorrelated && s == 0.0; }
};

inline HomGroups hom_groups(const BiphotonSpec& spec, const SampleSpec& sample) {
  spec.validate();
  sample.validate();
  const double sg = spec.sigma;
  return {spec.uncorrelated ? 0.0 : spec.sigma_c / sg,
          sample.epsilon * sg * sg, sample.cubic * sg * sg * sg,
          spec.uncorrelated};
}

// Dimensionless groups of a CPI configuration.
struct CpiGroups {
  double a = 0.0;      // A * sigma^2
  double eps = 0.0;    // epsilon * sigma^2
  double cubic = 0.0;  // cubic * sigma^3
  bool infinite_chirp = false;
};

inline CpiGroups cpi_groups(const ChirpedPulseSpec& pulse,
                            const SampleSpec& sample) {
  pulse.validate();
  sample.validate();
  const double sg = pulse.sigma;
  return {pulse.infinite_chirp ? 0.0 : pulse.chirp_a * sg * sg,
          sample.epsilon * sg * sg, sample.cubic * sg * sg * sg,
          pulse.infinite_chirp};
}

namespace detail {

// Elementary functions on normalized detunings (units of sigma). s is
// sigma_c/sigma; `uncorrelated` drops the sum-frequency factor.
inline double jsa_detuned(double s, bool uncorrelated, double x, double y) {
  double exponent = -0.5 * (x * x + y * y);
  if (!uncorrelated) {
    const double sum = (x + y) / s;
    exponent -= 0.5 * sum * sum;
  }
  return std::exp(exponent);
}

inline complex chirped_detuned(double a, double x) {
  return std::polar(std::exp(-0.5 * x * x), a * x * x);
}

inline double phase_detuned(double eps, double cubic, double x) {
  return x * x * (eps + cubic * x);
}

inline std::string tau_label(double tau) {
  std::ostringstream os;
  os.precision(12);
  os << tau;
  return os.str();
}

}  // namespace detail

// f(w1, w2) of the finite-correlation biphoton. Peak value 1 at (w0, w0).
inline double joint_spectral_amplitude(const BiphotonSpec& spec, double omega1,
                                       double omega2) {
  spec.validate();
  if (spec.perfectly_correlated())
    throw DomainError(
        "joint_spectral_amplitude: sigma_c == 0 is a delta function; use "
        "the anti-diagonal parameterization");
  const double x = (omega1 - spec.omega0) / spec.sigma;
  const double y = (omega2 - spec.omega0) / spec.sigma;
  return detail::jsa_detuned(spec.sigma_c / spec.sigma, spec.uncorrelated, x,
                             y);
}

// Linearly chirped field E(w; A) = E0 exp[-(w-w0)^2/2s^2] exp[iA(w-w0)^2].
inline complex chirped_field(const ChirpedPulseSpec& pulse, double omega) {
  pulse.validate();
  if (pulse.infinite_chirp)
    throw DomainError("chirped_field: infinite chirp has no pointwise field");
  const double d = omega - pulse.omega0;
  return pulse.amplitude *
         detail::chirped_detuned(pulse.chirp_a * pulse.sigma * pulse.sigma,
                                 d / pulse.sigma);
}

// Spectral phase of the sample; the group-delay term is omitted.
inline double sample_phase(const SampleSpec& sample, double omega0,
                           double omega) {
  return detail::phase_detuned(sample.epsilon, sample.cubic, omega - omega0);
}

}  // namespace dispersim
