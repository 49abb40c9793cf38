// Pump bandwidth needed to keep a HOM dip within 1% of its transform limit
// behind a strongly dispersive sample, then a check against the oracle.

#include <cstdio>

#include "dispersim/dispersim.hpp"

int main() {
  using namespace dispersim;
  const double sigma = 1.0, eps = 10.0, r = 1.01;

  const auto req = required_pump_bandwidth(sigma, eps, r);
  std::printf("sigma_c needed: %.6f (rule of thumb %.6f)\n", req.sigma_c,
              req.sigma_c_approx);

  const auto spec = BiphotonSpec::correlated(1.0, sigma, req.sigma_c);
  const SampleSpec sample{eps};
  const auto w = hom_width(spec, sample);
  std::printf("closed-form width %.9f, visibility %.6f\n", w.tau_hom, w.visibility);

  const auto ig = hom_numeric(spec, sample, DelayGrid::symmetric(5.0 * w.tau_hom, 101),
                              QuadratureConfig{});
  const auto fit = fit_gaussian_dip(ig);
  std::printf("fitted width      %.9f, visibility %.6f\n", fit.width, fit.visibility);
  return 0;
}
